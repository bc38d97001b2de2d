//! Header + raw byte mask files.
//!
//! A mask is stored as two files: a flat `key: value` text header and a
//! companion `.raw` file next to it holding one byte per element, row-major
//! with the last axis fastest.
//!
//! ```text
//! dims: 64 64 32
//! spacing: 0.5 0.5 2
//! dtype: uint8
//! order: C
//! label: liver
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::GridMask;
use crate::scalar::Real;

pub const DTYPE: &str = "uint8";
pub const ORDER: &str = "C";

/// Parsed sidecar header.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskHeader {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub label: Option<String>,
}

impl MaskHeader {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Header {
            path: path.to_path_buf(),
            reason,
        };
        let mut dims = None;
        let mut spacing = None;
        let mut dtype = None;
        let mut order = None;
        let mut label = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| bad(format!("expected `key: value`, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "dims" => {
                    let v = value
                        .split_whitespace()
                        .map(str::parse::<usize>)
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| bad(format!("dims: {e}")))?;
                    dims = Some(v);
                }
                "spacing" => {
                    let v = value
                        .split_whitespace()
                        .map(str::parse::<f64>)
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| bad(format!("spacing: {e}")))?;
                    spacing = Some(v);
                }
                "dtype" => dtype = Some(value.to_string()),
                "order" => order = Some(value.to_string()),
                "label" => label = Some(value.to_string()),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let dims = dims.ok_or_else(|| bad("missing dims".into()))?;
        let spacing = spacing.ok_or_else(|| bad("missing spacing".into()))?;
        match dtype.as_deref() {
            Some(DTYPE) => {}
            other => return Err(bad(format!("dtype must be {DTYPE}, got {other:?}"))),
        }
        match order.as_deref() {
            Some(ORDER) => {}
            other => return Err(bad(format!("order must be {ORDER}, got {other:?}"))),
        }
        Ok(Self {
            dims,
            spacing,
            label,
        })
    }

    pub fn render(&self) -> String {
        let join = |v: Vec<String>| v.join(" ");
        let mut out = format!(
            "dims: {}\nspacing: {}\ndtype: {DTYPE}\norder: {ORDER}\n",
            join(self.dims.iter().map(|d| d.to_string()).collect()),
            join(self.spacing.iter().map(|s| s.to_string()).collect()),
        );
        if let Some(label) = &self.label {
            out.push_str(&format!("label: {label}\n"));
        }
        out
    }
}

/// Path of the raw companion file for a header path.
pub fn raw_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

/// Loads a mask, rejecting raw bytes other than 0 and 1.
pub fn load_mask<T: Real>(header_path: &Path) -> Result<GridMask<T>> {
    load_mask_with(header_path, true)
}

/// Loads a mask. With `strict` off any nonzero byte is foreground.
pub fn load_mask_with<T: Real>(header_path: &Path, strict: bool) -> Result<GridMask<T>> {
    let text = fs::read_to_string(header_path).map_err(|source| Error::Io {
        path: header_path.to_path_buf(),
        source,
    })?;
    let header = MaskHeader::parse(&text, header_path)?;
    let raw = raw_path(header_path);
    let bytes = fs::read(&raw).map_err(|source| Error::Io {
        path: raw.clone(),
        source,
    })?;
    let expected: usize = header.dims.iter().product();
    if bytes.len() != expected {
        return Err(Error::LengthMismatch {
            path: raw,
            expected,
            actual: bytes.len(),
        });
    }
    if strict {
        if let Some((index, &value)) = bytes.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::InvalidByte { index, value });
        }
    }
    let spacing = header.spacing.iter().map(|&s| T::of(s)).collect();
    GridMask::new(header.dims, spacing, bytes.iter().map(|&b| b != 0).collect())
}

pub fn save_mask<T: Real>(mask: &GridMask<T>, header_path: &Path) -> Result<()> {
    save_mask_labeled(mask, header_path, None)
}

pub fn save_mask_labeled<T: Real>(
    mask: &GridMask<T>,
    header_path: &Path,
    label: Option<&str>,
) -> Result<()> {
    let header = MaskHeader {
        dims: mask.dims().to_vec(),
        spacing: mask.spacing().iter().map(|s| s.to_f64_lossy()).collect(),
        label: label.map(str::to_string),
    };
    let write = |path: &Path, bytes: &[u8]| {
        fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(header_path, header.render().as_bytes())?;
    let bytes: Vec<u8> = mask.data().iter().map(|&v| v as u8).collect();
    write(&raw_path(header_path), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_pair(dir: &Path, header: &str, raw: &[u8]) -> PathBuf {
        let h = dir.join("m.hdr");
        fs::write(&h, header).unwrap();
        fs::write(raw_path(&h), raw).unwrap();
        h
    }

    #[test]
    fn loads_direct_encoding() {
        let dir = tempfile::tempdir().unwrap();
        let h = write_pair(
            dir.path(),
            "dims: 2 2\nspacing: 1 1\ndtype: uint8\norder: C\n",
            &[1, 1, 0, 0],
        );
        let m: GridMask<f64> = load_mask(&h).unwrap();
        assert_eq!(m.count(), 2);
        assert_eq!(m.data(), &[true, true, false, false]);
    }

    #[test]
    fn length_mismatch_names_counts() {
        let dir = tempfile::tempdir().unwrap();
        let h = write_pair(
            dir.path(),
            "dims: 2 2\nspacing: 1 1\ndtype: uint8\norder: C\n",
            &[0, 1, 0],
        );
        match load_mask::<f64>(&h) {
            Err(Error::LengthMismatch {
                expected, actual, ..
            }) => assert_eq!((expected, actual), (4, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_rejects_other_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let h = write_pair(
            dir.path(),
            "dims: 2 2\nspacing: 1 1\ndtype: uint8\norder: C\n",
            &[0, 1, 255, 0],
        );
        assert!(matches!(
            load_mask::<f64>(&h),
            Err(Error::InvalidByte {
                index: 2,
                value: 255
            })
        ));
        let m: GridMask<f64> = load_mask_with(&h, false).unwrap();
        assert_eq!(m.count(), 2);
    }

    #[test]
    fn empty_anisotropic_volume() {
        let dir = tempfile::tempdir().unwrap();
        let h = write_pair(
            dir.path(),
            "dims: 3 3 3\nspacing: 0.5 0.5 2.0\ndtype: uint8\norder: C\n",
            &[0; 27],
        );
        let m: GridMask<f64> = load_mask(&h).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.spacing(), &[0.5, 0.5, 2.0]);
    }

    #[test]
    fn header_tags_are_fixed() {
        let p = Path::new("x.hdr");
        assert!(MaskHeader::parse("dims: 2 2\nspacing: 1 1\ndtype: float32\norder: C", p).is_err());
        assert!(MaskHeader::parse("dims: 2 2\nspacing: 1 1\ndtype: uint8\norder: F", p).is_err());
        assert!(MaskHeader::parse("dims: 2 2\ndtype: uint8\norder: C", p).is_err());
        assert!(MaskHeader::parse("dims 2 2", p).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_mask::<f64>(&dir.path().join("none.hdr")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn empty_mask_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let m = GridMask::<f64>::empty(vec![3, 5], vec![0.7, 1.3]).unwrap();
        let h = dir.path().join("e.hdr");
        save_mask(&m, &h).unwrap();
        assert_eq!(load_mask::<f64>(&h).unwrap(), m);
    }

    #[test]
    fn label_is_kept_in_header() {
        let dir = tempfile::tempdir().unwrap();
        let m = GridMask::<f64>::empty(vec![2, 2], vec![1.0, 1.0]).unwrap();
        let h = dir.path().join("l.hdr");
        save_mask_labeled(&m, &h, Some("liver")).unwrap();
        let hdr = MaskHeader::parse(&fs::read_to_string(&h).unwrap(), &h).unwrap();
        assert_eq!(hdr.label.as_deref(), Some("liver"));
    }
}
