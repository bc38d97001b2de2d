//! Binary masks on regular 2D/3D grids with physical element spacing.
//!
//! Data is stored row-major with the last axis fastest. Internally every
//! grid is viewed as three-dimensional: a 2D grid `[h, w]` is handled as
//! `[1, h, w]`, which leaves the flat layout unchanged. Code that walks
//! neighbours must restrict itself to [`GridMask::axes`] so the padded
//! axis never contributes boundaries.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMask<T> {
    dims: Vec<usize>,
    spacing: Vec<T>,
    data: Vec<bool>,
}

impl<T: Real> GridMask<T> {
    pub fn new(dims: Vec<usize>, spacing: Vec<T>, data: Vec<bool>) -> Result<Self> {
        validate_grid(&dims, &spacing)?;
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::InvalidGrid(format!(
                "data has {} elements, dims {:?} need {}",
                data.len(),
                dims,
                len
            )));
        }
        Ok(Self {
            dims,
            spacing,
            data,
        })
    }

    /// All-background mask.
    pub fn empty(dims: Vec<usize>, spacing: Vec<T>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, spacing, vec![false; len])
    }

    /// Builds a mask by evaluating `f` at every index vector.
    pub fn from_fn(
        dims: Vec<usize>,
        spacing: Vec<T>,
        mut f: impl FnMut(&[usize]) -> bool,
    ) -> Result<Self> {
        validate_grid(&dims, &spacing)?;
        let len: usize = dims.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(dims, spacing, data)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Number of foreground elements.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// True when the mask has no foreground.
    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    pub fn get(&self, idx: &[usize]) -> bool {
        self.data[self.flat(idx)]
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Dims padded to three axes with leading ones.
    pub fn shape3(&self) -> [usize; 3] {
        let mut out = [1; 3];
        let off = 3 - self.ndim();
        out[off..].copy_from_slice(&self.dims);
        out
    }

    /// Spacing padded to three axes with leading ones.
    pub fn spacing3(&self) -> [T; 3] {
        let mut out = [T::one(); 3];
        let off = 3 - self.ndim();
        out[off..].copy_from_slice(&self.spacing);
        out
    }

    /// The axes of the padded 3D view that belong to the real grid.
    pub fn axes(&self) -> std::ops::Range<usize> {
        (3 - self.ndim())..3
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.dims == other.dims && self.spacing == other.spacing
    }

    /// Same dims and data, different physical spacing.
    pub fn with_spacing(&self, spacing: Vec<T>) -> Result<Self> {
        Self::new(self.dims.clone(), spacing, self.data.clone())
    }

    /// Translates the mask by `shift` elements per axis; elements pushed off
    /// the grid are dropped and vacated elements become background.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        let dims = self.dims.clone();
        let src = self;
        Self::from_fn(dims, self.spacing.clone(), |idx| {
            let mut from = Vec::with_capacity(idx.len());
            for (k, &i) in idx.iter().enumerate() {
                let j = i as i64 - shift[k];
                if j < 0 || j >= src.dims[k] as i64 {
                    return false;
                }
                from.push(j as usize);
            }
            src.get(&from)
        })
        .expect("shift keeps a valid grid")
    }
}

fn validate_grid<T: Real>(dims: &[usize], spacing: &[T]) -> Result<()> {
    if dims.len() != 2 && dims.len() != 3 {
        return Err(Error::InvalidGrid(format!(
            "expected 2 or 3 axes, got {}",
            dims.len()
        )));
    }
    if spacing.len() != dims.len() {
        return Err(Error::InvalidGrid(format!(
            "{} dims but {} spacing components",
            dims.len(),
            spacing.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidGrid(format!("zero extent in dims {dims:?}")));
    }
    if spacing.iter().any(|&s| s <= T::zero() || !s.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "spacing must be finite and positive, got {spacing:?}"
        )));
    }
    Ok(())
}

/// Nearest-neighbour resampling onto `target` spacing.
///
/// Output extent per axis is `max(1, round(n * s / t))`. Both grids share
/// the physical extent starting at the outer corner of element 0, so output
/// element `j` has its center at `(j + 0.5) * t`. Exact midpoints resolve
/// to the lower input index.
pub fn resample_nn<T: Real>(mask: &GridMask<T>, target: &[T]) -> Result<GridMask<T>> {
    validate_grid(mask.dims(), target)?;
    if mask.spacing() == target {
        return Ok(mask.clone());
    }
    let half = T::of(0.5);
    let maps: Vec<Vec<usize>> = mask
        .dims()
        .iter()
        .zip(mask.spacing())
        .zip(target)
        .map(|((&n, &s), &t)| {
            let m = (T::of_usize(n) * s / t).round().to_usize().unwrap_or(1).max(1);
            (0..m)
                .map(|j| {
                    let u = (T::of_usize(j) + half) * t / s - half;
                    let i = (u - half).ceil();
                    if i <= T::zero() {
                        0
                    } else {
                        i.to_usize().unwrap_or(n - 1).min(n - 1)
                    }
                })
                .collect()
        })
        .collect();
    let out_dims: Vec<usize> = maps.iter().map(Vec::len).collect();
    let mut src = vec![0usize; mask.ndim()];
    GridMask::from_fn(out_dims, target.to_vec(), |idx| {
        for (k, &j) in idx.iter().enumerate() {
            src[k] = maps[k][j];
        }
        mask.get(&src)
    })
}

/// Result of [`crop_joint`].
#[derive(Debug, Clone, PartialEq)]
pub struct Crop<T> {
    pub a: GridMask<T>,
    pub b: GridMask<T>,
    /// Index of the crop origin in the original grid.
    pub offset: Vec<usize>,
    /// Both inputs had no foreground; `a` and `b` are single-element grids.
    pub empty: bool,
}

/// Crops both masks to the union of their foreground bounding boxes,
/// expanded by `margin` elements and clamped to the grid.
pub fn crop_joint<T: Real>(a: &GridMask<T>, b: &GridMask<T>, margin: usize) -> Result<Crop<T>> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "dims {:?}/{:?}, spacing {:?}/{:?}",
            a.dims(),
            b.dims(),
            a.spacing(),
            b.spacing()
        )));
    }
    let nd = a.ndim();
    let mut lo = vec![usize::MAX; nd];
    let mut hi = vec![0usize; nd];
    let mut any = false;
    let mut idx = vec![0usize; nd];
    for flat in 0..a.len() {
        if a.data[flat] || b.data[flat] {
            any = true;
            for k in 0..nd {
                lo[k] = lo[k].min(idx[k]);
                hi[k] = hi[k].max(idx[k]);
            }
        }
        for k in (0..nd).rev() {
            idx[k] += 1;
            if idx[k] < a.dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if !any {
        let dims = vec![1; nd];
        let e = GridMask::empty(dims, a.spacing.clone())?;
        return Ok(Crop {
            a: e.clone(),
            b: e,
            offset: vec![0; nd],
            empty: true,
        });
    }
    for k in 0..nd {
        lo[k] = lo[k].saturating_sub(margin);
        hi[k] = (hi[k] + margin).min(a.dims[k] - 1);
    }
    let dims: Vec<usize> = (0..nd).map(|k| hi[k] - lo[k] + 1).collect();
    let sub = |m: &GridMask<T>| {
        let mut src = vec![0usize; nd];
        GridMask::from_fn(dims.clone(), m.spacing.clone(), |i| {
            for k in 0..nd {
                src[k] = i[k] + lo[k];
            }
            m.get(&src)
        })
    };
    Ok(Crop {
        a: sub(a)?,
        b: sub(b)?,
        offset: lo,
        empty: false,
    })
}
