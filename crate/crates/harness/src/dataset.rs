//! Seeded synthetic reference/prediction pairs.
//!
//! A reference is a sum of Gaussian bumps thresholded at one half, reduced
//! to its largest face-connected component. The prediction thresholds the
//! same field at a jittered level, shifts it by a few elements and flips
//! random boundary elements, all scaled by the perturbation level.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use segdist::io::save_mask_labeled;
use segdist::metrics::dsc;
use segdist::Mask;

use crate::error::{HarnessError, Result};

const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenParams {
    pub seed: u64,
    pub count: usize,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    /// Perturbation level in `[0, 1]`; 0 makes the prediction a copy.
    pub level: f64,
    /// Probability that a pair gets an empty prediction.
    pub empty_fraction: f64,
    /// Multiplies bump widths; small values give sparse masks.
    pub blob_scale: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 10,
            dims: vec![64, 64],
            spacing: vec![1.0, 1.0],
            level: 0.3,
            empty_fraction: 0.0,
            blob_scale: 1.0,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Invalid(m.to_string()));
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        if !(2..=3).contains(&self.dims.len()) || self.dims.iter().any(|&d| d < 2) {
            return bad("dims must be 2 or 3 extents of at least 2");
        }
        if self.spacing.len() != self.dims.len() {
            return bad("spacing must match dims");
        }
        if !(0.0..=1.0).contains(&self.level) || !(0.0..=1.0).contains(&self.empty_fraction) {
            return bad("level and empty fraction must lie in [0, 1]");
        }
        if !(self.blob_scale > 0.0 && self.blob_scale.is_finite()) {
            return bad("blob scale must be positive");
        }
        Ok(())
    }
}

/// One manifest line. Paths are relative to the manifest's directory
/// unless absolute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    #[serde(rename = "pred")]
    pub prediction: String,
    #[serde(default)]
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
    pub base: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<ManifestRow>, _>>()
            .map_err(HarnessError::csv(path))?;
        let mut seen = std::collections::HashSet::new();
        for r in &rows {
            if !seen.insert(r.id.as_str()) {
                return Err(HarnessError::Manifest(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(Self {
            rows,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(HarnessError::csv(path))?;
        for r in &self.rows {
            w.serialize(r).map_err(HarnessError::csv(path))?;
        }
        w.flush().map_err(HarnessError::io(path))
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn tag_of(&self, id: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|r| r.id == id)
            .map(|r| r.tag.as_str())
            .filter(|t| !t.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub params: GenParams,
    pub empty_predictions: usize,
    /// Mean DSC over pairs with a nonempty prediction.
    pub mean_dsc: Option<f64>,
}

/// Deterministic pair `index` for `params`; the flag marks an empty prediction.
pub fn synth_pair(params: &GenParams, index: usize) -> Result<(Mask, Mask, bool)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index as u64);
    let empty_pred = params.empty_fraction > 0.0 && rng.gen_bool(params.empty_fraction);
    for _ in 0..MAX_ATTEMPTS {
        let field = bump_field(&mut rng, params);
        let reference = largest_component(&threshold(&field, params, 0.5));
        if reference.is_empty() {
            continue;
        }
        if empty_pred {
            let empty = Mask::empty(params.dims.clone(), params.spacing.clone())?;
            return Ok((reference, empty, true));
        }
        let prediction = perturb(&mut rng, &field, &reference, params);
        let overlaps = reference.data().iter().zip(prediction.data()).any(|(&x, &y)| x && y);
        if overlaps {
            return Ok((reference, prediction, false));
        }
    }
    Err(HarnessError::Exhausted {
        index,
        attempts: MAX_ATTEMPTS,
    })
}

/// Writes `count` pairs under `out`, plus `manifest.csv` and `stats.json`.
pub fn gen_dataset(params: &GenParams, out: &Path) -> Result<(Manifest, DatasetStats)> {
    params.validate()?;
    let masks = out.join("masks");
    fs::create_dir_all(&masks).map_err(HarnessError::io(&masks))?;
    let mut rows = Vec::with_capacity(params.count);
    let mut dsc_sum = 0.0;
    let mut dsc_n = 0usize;
    let mut empty_predictions = 0;
    for i in 0..params.count {
        let (reference, prediction, empty_pred) = synth_pair(params, i)?;
        let id = format!("pair_{i:04}");
        let (r, p) = (format!("masks/{id}_ref.hdr"), format!("masks/{id}_pred.hdr"));
        save_mask_labeled(&reference, &out.join(&r), Some("reference"))?;
        save_mask_labeled(&prediction, &out.join(&p), Some("prediction"))?;
        let tag = if empty_pred {
            empty_predictions += 1;
            "empty_pred"
        } else {
            dsc_sum += dsc(&reference, &prediction).unwrap_or(1.0);
            dsc_n += 1;
            if (reference.count() as f64) < 0.05 * reference.len() as f64 {
                "small"
            } else {
                "large"
            }
        };
        rows.push(ManifestRow {
            id,
            reference: r,
            prediction: p,
            tag: tag.to_string(),
        });
    }
    let manifest = Manifest {
        rows,
        base: out.to_path_buf(),
    };
    manifest.save(&out.join("manifest.csv"))?;
    let stats = DatasetStats {
        params: params.clone(),
        empty_predictions,
        mean_dsc: (dsc_n > 0).then(|| dsc_sum / dsc_n as f64),
    };
    let stats_path = out.join("stats.json");
    fs::write(&stats_path, serde_json::to_string_pretty(&stats)? + "\n").map_err(HarnessError::io(&stats_path))?;
    Ok((manifest, stats))
}

fn bump_field(rng: &mut ChaCha8Rng, params: &GenParams) -> Vec<f64> {
    let extent: Vec<f64> = params.dims.iter().zip(&params.spacing).map(|(&n, &s)| n as f64 * s).collect();
    let spread = if params.blob_scale < 1.0 { 0.35 } else { 0.2 };
    let bumps: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let c = extent.iter().map(|e| e * rng.gen_range(0.5 - spread..0.5 + spread)).collect();
            let sigma = extent.iter().map(|e| e * rng.gen_range(0.08..0.16) * params.blob_scale).collect();
            (c, sigma, rng.gen_range(0.7..1.0))
        })
        .collect();
    let shape = pad3(&params.dims);
    let sp = pad3f(&params.spacing);
    let off = 3 - params.dims.len();
    let mut out = Vec::with_capacity(shape.iter().product());
    for z in 0..shape[0] {
        for y in 0..shape[1] {
            for x in 0..shape[2] {
                let idx = [z, y, x];
                let mut v = 0.0;
                for (c, sigma, amp) in &bumps {
                    let q: f64 = (off..3)
                        .map(|k| (((idx[k] as f64 + 0.5) * sp[k] - c[k - off]) / sigma[k - off]).powi(2))
                        .sum();
                    v += amp * (-0.5 * q).exp();
                }
                out.push(v);
            }
        }
    }
    out
}

fn threshold(field: &[f64], params: &GenParams, t: f64) -> Mask {
    Mask::new(
        params.dims.clone(),
        params.spacing.clone(),
        field.iter().map(|&v| v >= t).collect(),
    )
    .expect("validated grid")
}

fn perturb(rng: &mut ChaCha8Rng, field: &[f64], reference: &Mask, params: &GenParams) -> Mask {
    let level = params.level;
    if level == 0.0 {
        return reference.clone();
    }
    let t = 0.5 + 0.2 * level * rng.gen_range(-1.0..=1.0);
    let shift: Vec<i64> = params
        .dims
        .iter()
        .map(|&n| {
            let s = (level * 0.08 * n as f64).round() as i64;
            rng.gen_range(-s..=s)
        })
        .collect();
    let moved = threshold(field, params, t).shifted(&shift);
    let flip = 0.5 * level;
    let shape = pad3(&params.dims);
    let data = moved.data();
    let noisy: Vec<bool> = (0..data.len())
        .map(|i| {
            let edge = face_neighbours(i, shape).any(|j| data[j] != data[i]);
            data[i] ^ (edge && rng.gen_bool(flip))
        })
        .collect();
    Mask::new(params.dims.clone(), params.spacing.clone(), noisy).expect("validated grid")
}

/// Keeps the largest face-connected foreground component; ties go to the
/// component found first in scan order.
fn largest_component(mask: &Mask) -> Mask {
    let shape = pad3(mask.dims());
    let data = mask.data();
    let mut label = vec![0u32; data.len()];
    let (mut best, mut best_size, mut next) = (0u32, 0usize, 0u32);
    let mut stack = Vec::new();
    for start in 0..data.len() {
        if !data[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            for j in face_neighbours(i, shape) {
                if data[j] && label[j] == 0 {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        if size > best_size {
            best = next;
            best_size = size;
        }
    }
    Mask::new(
        mask.dims().to_vec(),
        mask.spacing().to_vec(),
        label.iter().map(|&l| l != 0 && l == best).collect(),
    )
    .expect("same grid")
}

fn face_neighbours(i: usize, shape: [usize; 3]) -> impl Iterator<Item = usize> {
    let strides = [shape[1] * shape[2], shape[2], 1];
    let idx = [i / strides[0], (i / strides[1]) % shape[1], i % shape[2]];
    (0..3).flat_map(move |k| {
        let lo = (idx[k] > 0).then(|| i - strides[k]);
        let hi = (idx[k] + 1 < shape[k]).then(|| i + strides[k]);
        lo.into_iter().chain(hi)
    })
}

fn pad3(dims: &[usize]) -> [usize; 3] {
    let mut s = [1; 3];
    s[3 - dims.len()..].copy_from_slice(dims);
    s
}

fn pad3f(spacing: &[f64]) -> [f64; 3] {
    let mut s = [1.0; 3];
    s[3 - spacing.len()..].copy_from_slice(spacing);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(level: f64) -> GenParams {
        GenParams {
            seed: 7,
            count: 50,
            level,
            ..GenParams::default()
        }
    }

    #[test]
    fn same_seed_same_pair() {
        let p = params(0.3);
        for i in 0..5 {
            assert_eq!(synth_pair(&p, i).unwrap(), synth_pair(&p, i).unwrap());
        }
        assert_ne!(synth_pair(&p, 0).unwrap().0, synth_pair(&p, 1).unwrap().0);
    }

    #[test]
    fn reference_is_one_component() {
        let p = params(0.3);
        for i in 0..10 {
            let (r, _, _) = synth_pair(&p, i).unwrap();
            assert_eq!(largest_component(&r), r);
        }
    }

    #[test]
    fn level_zero_copies_reference() {
        let p = params(0.0);
        for i in 0..5 {
            let (r, q, empty) = synth_pair(&p, i).unwrap();
            assert!(!empty);
            assert_eq!(r, q);
        }
    }

    #[test]
    fn pairs_overlap_and_differ() {
        let p = params(0.3);
        let mut differ = 0;
        for i in 0..p.count {
            let (r, q, _) = synth_pair(&p, i).unwrap();
            let d = dsc(&r, &q).unwrap();
            assert!(d > 0.0);
            differ += usize::from(d < 1.0);
        }
        assert!(differ > p.count / 2);
    }

    #[test]
    fn empty_fraction_one_empties_every_prediction() {
        let p = GenParams {
            empty_fraction: 1.0,
            count: 3,
            ..params(0.3)
        };
        for i in 0..3 {
            let (r, q, empty) = synth_pair(&p, i).unwrap();
            assert!(empty && q.is_empty() && !r.is_empty());
        }
    }

    #[test]
    fn component_keeps_largest() {
        let m = Mask::from_fn(vec![1, 7], vec![1.0, 1.0], |i| [0, 2, 3, 4, 6].contains(&i[1])).unwrap();
        assert_eq!(
            largest_component(&m).data(),
            &[false, false, true, true, true, false, false]
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(synth_pair(&GenParams { count: 0, ..params(0.3) }, 0).is_err());
        assert!(synth_pair(&GenParams { level: 1.5, ..params(0.3) }, 0).is_err());
        assert!(synth_pair(&GenParams { dims: vec![4], spacing: vec![1.0], ..params(0.3) }, 0).is_err());
    }

    #[test]
    fn writes_manifest_and_stats() {
        let dir = tempfile::tempdir().unwrap();
        let (m, stats) = gen_dataset(&params(0.3), dir.path()).unwrap();
        let mean = stats.mean_dsc.unwrap();
        assert!(mean > 0.0 && mean < 1.0, "{mean}");
        let back = Manifest::load(&dir.path().join("manifest.csv")).unwrap();
        assert_eq!(back.rows, m.rows);
        assert!(back.resolve(&back.rows[0].reference).exists());
        let json = fs::read_to_string(dir.path().join("stats.json")).unwrap();
        assert!(json.contains("mean_dsc"));
    }
}
