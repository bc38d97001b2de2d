//! Exact anisotropic Euclidean distance transforms and directed distances.
//!
//! The transform is the separable lower-envelope-of-parabolas method run
//! once per axis on squared distances with physical spacing, so results are
//! exact up to floating-point rounding (no chamfer approximation).
//!
//! Interface points sit on element faces rather than centers. For those the
//! transform runs on the half-step lattice (`2n + 1` nodes per axis at half
//! the spacing), which contains every center and every face center, so the
//! sampled distances are still exact point-to-point minima.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::grid::GridMask;
use crate::scalar::Real;

/// Which lattice a [`DistanceField`] is sampled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    /// One node per element center.
    Centers,
    /// Element centers plus every face, edge and corner midpoint.
    HalfStep,
}

impl Lattice {
    fn shape(self, grid: [usize; 3], ndim: usize) -> [usize; 3] {
        match self {
            Lattice::Centers => grid,
            Lattice::HalfStep => {
                let mut s = grid;
                for k in 3 - ndim..3 {
                    s[k] = 2 * grid[k] + 1;
                }
                s
            }
        }
    }

    fn spacing<T: Real>(self, spacing: [T; 3], ndim: usize) -> [T; 3] {
        match self {
            Lattice::Centers => spacing,
            Lattice::HalfStep => {
                let mut s = spacing;
                for v in s.iter_mut().skip(3 - ndim) {
                    *v = *v * T::of(0.5);
                }
                s
            }
        }
    }

    /// Lattice index of a half-element coordinate, if it lies on the lattice.
    fn index(self, h: i64, real_axis: bool) -> Option<i64> {
        match self {
            Lattice::Centers if h.rem_euclid(2) == 0 => Some(h / 2),
            Lattice::Centers => None,
            Lattice::HalfStep if real_axis => Some(h + 1),
            Lattice::HalfStep => Some(h),
        }
    }
}

/// Per-node distance in mm to the nearest source; `∞` everywhere when there
/// are no sources.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField<T> {
    ndim: usize,
    lattice: Lattice,
    shape: [usize; 3],
    spacing: [T; 3],
    values: Vec<T>,
}

impl<T: Real> DistanceField<T> {
    /// Transform of an element-level source mask.
    pub fn from_mask(source: &GridMask<T>) -> Self {
        let shape = source.shape3();
        let spacing = source.spacing3();
        let mut sq: Vec<T> = source
            .data()
            .iter()
            .map(|&v| if v { T::zero() } else { T::infinity() })
            .collect();
        edt_sq(&mut sq, shape, spacing);
        Self {
            ndim: source.ndim(),
            lattice: Lattice::Centers,
            shape,
            spacing,
            values: sq.into_iter().map(Float::sqrt).collect(),
        }
    }

    /// Transform of a point set on the given lattice of its grid.
    pub fn from_points(source: &BoundarySet<T>, grid_shape: [usize; 3], lattice: Lattice) -> Result<Self> {
        let ndim = source.ndim();
        let shape = lattice.shape(grid_shape, ndim);
        let spacing = lattice.spacing(source.spacing3(), ndim);
        let mut sq = vec![T::infinity(); shape.iter().product()];
        for h in source.half_coords() {
            let flat = flat_index(lattice, shape, ndim, *h).ok_or(Error::OffLatticePoints)?;
            sq[flat] = T::zero();
        }
        edt_sq(&mut sq, shape, spacing);
        Ok(Self {
            ndim,
            lattice,
            shape,
            spacing,
            values: sq.into_iter().map(Float::sqrt).collect(),
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[3 - self.ndim..]
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing[3 - self.ndim..]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Distance at a half-element coordinate, if it lies on this lattice.
    pub fn at_half(&self, h: [i64; 3]) -> Option<T> {
        flat_index(self.lattice, self.shape, self.ndim, h).map(|i| self.values[i])
    }
}

fn flat_index(lattice: Lattice, shape: [usize; 3], ndim: usize, h: [i64; 3]) -> Option<usize> {
    let mut flat = 0usize;
    for k in 0..3 {
        let i = lattice.index(h[k], k >= 3 - ndim)?;
        if i < 0 || i >= shape[k] as i64 {
            return None;
        }
        flat = flat * shape[k] + i as usize;
    }
    Some(flat)
}

/// In-place squared transform: zeros are sources, `∞` marks everything else.
pub fn edt_sq<T: Real>(values: &mut [T], shape: [usize; 3], spacing: [T; 3]) {
    let n_max = *shape.iter().max().unwrap_or(&1);
    let mut f = vec![T::zero(); n_max];
    let mut out = vec![T::zero(); n_max];
    let mut v = vec![0usize; n_max];
    let mut z = vec![T::zero(); n_max + 1];
    let strides = [shape[1] * shape[2], shape[2], 1];
    for axis in (0..3).rev() {
        let n = shape[axis];
        if n < 2 {
            continue;
        }
        let stride = strides[axis];
        let s = spacing[axis];
        let lines = values.len() / n;
        for line in 0..lines {
            // Base offset of this line: decompose `line` over the other axes.
            let outer = line / stride;
            let inner = line % stride;
            let base = outer * stride * n + inner;
            for q in 0..n {
                f[q] = values[base + q * stride];
            }
            envelope_1d(&f[..n], s, &mut out[..n], &mut v, &mut z);
            for q in 0..n {
                values[base + q * stride] = out[q];
            }
        }
    }
}

/// `out[q] = min_p ((q - p) s)^2 + f[p]` over finite `f[p]`.
fn envelope_1d<T: Real>(f: &[T], s: T, out: &mut [T], v: &mut [usize], z: &mut [T]) {
    let n = f.len();
    let two = T::of(2.0);
    let pos = |q: usize| T::of_usize(q) * s;
    let mut k: Option<usize> = None;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        let xq = pos(q);
        let fq = f[q] + xq * xq;
        loop {
            match k {
                None => {
                    k = Some(0);
                    v[0] = q;
                    z[0] = T::neg_infinity();
                    z[1] = T::infinity();
                    break;
                }
                Some(kk) => {
                    let p = v[kk];
                    let xp = pos(p);
                    let sep = (fq - (f[p] + xp * xp)) / (two * (xq - xp));
                    if sep <= z[kk] && kk > 0 {
                        k = Some(kk - 1);
                        continue;
                    }
                    if sep <= z[kk] {
                        // kk == 0: the new parabola dominates everywhere.
                        v[0] = q;
                        z[1] = T::infinity();
                        break;
                    }
                    v[kk + 1] = q;
                    z[kk + 1] = sep;
                    z[kk + 2] = T::infinity();
                    k = Some(kk + 1);
                    break;
                }
            }
        }
    }
    if k.is_none() {
        out.fill(T::infinity());
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let xq = pos(q);
        while z[k + 1] < xq {
            k += 1;
        }
        let p = v[k];
        let d = T::of_i64(q as i64 - p as i64) * s;
        *o = d * d + f[p];
    }
}

/// Distance from each element center to the nearest background center,
/// treating everything outside the grid as background. Background elements
/// map to 0.
pub fn inner_distance<T: Real>(mask: &GridMask<T>) -> Vec<T> {
    let shape = mask.shape3();
    let axes = mask.axes();
    let mut padded = shape;
    for k in axes.clone() {
        padded[k] += 2;
    }
    let mut sq = vec![T::zero(); padded.iter().product()];
    let lo = |k: usize| usize::from(axes.contains(&k));
    for z in 0..shape[0] {
        for y in 0..shape[1] {
            for x in 0..shape[2] {
                let src = (z * shape[1] + y) * shape[2] + x;
                if mask.data()[src] {
                    let dst = ((z + lo(0)) * padded[1] + y + lo(1)) * padded[2] + x + lo(2);
                    sq[dst] = T::infinity();
                }
            }
        }
    }
    edt_sq(&mut sq, padded, mask.spacing3());
    let mut out = Vec::with_capacity(mask.len());
    for z in 0..shape[0] {
        for y in 0..shape[1] {
            for x in 0..shape[2] {
                let src = ((z + lo(0)) * padded[1] + y + lo(1)) * padded[2] + x + lo(2);
                out.push(sq[src].sqrt());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    AToB,
    BToA,
}

/// Directed distances from one point set to another, with the query
/// points' weights carried along.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSet<T> {
    pub distances: Vec<T>,
    pub weights: Vec<T>,
    pub direction: Direction,
}

impl<T: Real> DistanceSet<T> {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// How [`directed_distances`] finds nearest points.
#[derive(Debug, Clone, Copy)]
pub enum Via<'a, T> {
    /// Read a transform of the target set at each query point.
    Field(&'a DistanceField<T>),
    /// Pairwise minimum over all target points.
    Exact,
}

pub fn directed_distances<T: Real>(
    from: &BoundarySet<T>,
    to: &BoundarySet<T>,
    via: Via<'_, T>,
    direction: Direction,
) -> Result<DistanceSet<T>> {
    let distances = match via {
        Via::Field(field) => from
            .half_coords()
            .iter()
            .map(|&h| field.at_half(h).ok_or(Error::OffLatticePoints))
            .collect::<Result<Vec<_>>>()?,
        Via::Exact => {
            let s = from.spacing3();
            let half = T::of(0.5);
            from.half_coords()
                .iter()
                .map(|p| {
                    to.half_coords()
                        .iter()
                        .map(|q| {
                            (0..3)
                                .map(|k| {
                                    let d = T::of_i64(p[k] - q[k]) * (s[k] * half);
                                    d * d
                                })
                                .fold(T::zero(), |a, b| a + b)
                        })
                        .fold(T::infinity(), T::min)
                        .sqrt()
                })
                .collect()
        }
    };
    Ok(DistanceSet {
        distances,
        weights: from.weights().to_vec(),
        direction,
    })
}
