//! Query-point extraction from masks.
//!
//! Points are kept on a half-element lattice: coordinate `h` along an axis
//! sits at physical position `h * spacing / 2`, so element centers have even
//! coordinates (`h = 2i`) and faces between elements have odd ones. This
//! keeps every extractor exact and lets the distance code pick a lattice
//! that contains all points.
//!
//! Everything outside the grid is background.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMask;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Mask minus its erosion by the cross-shaped element.
    ErodeFace,
    /// Mask minus its erosion by the full 3^d box.
    ErodeFull,
    /// Face centers between foreground and background, weighted by face measure.
    Interface,
    /// Every foreground element.
    ForegroundAll,
    /// Foreground elements not shared with the other mask.
    ForegroundNonOverlap,
}

impl BoundaryMode {
    pub const ALL: [BoundaryMode; 5] = [
        BoundaryMode::ErodeFace,
        BoundaryMode::ErodeFull,
        BoundaryMode::Interface,
        BoundaryMode::ForegroundAll,
        BoundaryMode::ForegroundNonOverlap,
    ];

    /// Whether extracted points carry physical element sizes.
    pub fn is_weighted(self) -> bool {
        matches!(self, BoundaryMode::Interface)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Face,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet<T> {
    ndim: usize,
    spacing: [T; 3],
    coords: Vec<[i64; 3]>,
    weights: Vec<T>,
}

impl<T: Real> BoundarySet<T> {
    fn new(mask: &GridMask<T>) -> Self {
        Self {
            ndim: mask.ndim(),
            spacing: mask.spacing3(),
            coords: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push(&mut self, coord: [i64; 3], weight: T) {
        self.coords.push(coord);
        self.weights.push(weight);
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Padded 3D spacing the points were extracted with.
    pub fn spacing3(&self) -> [T; 3] {
        self.spacing
    }

    /// Half-element lattice coordinates, padded to three axes.
    pub fn half_coords(&self) -> &[[i64; 3]] {
        &self.coords
    }

    /// True when every point is an element center.
    pub fn on_centers(&self) -> bool {
        self.coords
            .iter()
            .all(|c| c.iter().all(|h| h.rem_euclid(2) == 0))
    }

    /// Physical coordinates in mm of point `i`, one entry per grid axis.
    pub fn point(&self, i: usize) -> Vec<T> {
        let half = T::of(0.5);
        let c = &self.coords[i];
        (3 - self.ndim..3)
            .map(|k| T::of_i64(c[k]) * self.spacing[k] * half)
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<T>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

fn unravel(flat: usize, shape: [usize; 3]) -> [usize; 3] {
    let x = flat % shape[2];
    let y = (flat / shape[2]) % shape[1];
    let z = flat / (shape[2] * shape[1]);
    [z, y, x]
}

fn center(idx: [usize; 3]) -> [i64; 3] {
    [2 * idx[0] as i64, 2 * idx[1] as i64, 2 * idx[2] as i64]
}

/// Neighbour offsets of the structuring element, restricted to real axes.
fn offsets(mask: &GridMask<impl Real>, connectivity: Connectivity) -> Vec<[i64; 3]> {
    let axes = mask.axes();
    let mut out = Vec::new();
    match connectivity {
        Connectivity::Face => {
            for k in axes {
                for d in [-1, 1] {
                    let mut o = [0; 3];
                    o[k] = d;
                    out.push(o);
                }
            }
        }
        Connectivity::Full => {
            let r = |k: usize| if axes.contains(&k) { -1..=1 } else { 0..=0 };
            for z in r(0) {
                for y in r(1) {
                    for x in r(2) {
                        if [z, y, x] != [0, 0, 0] {
                            out.push([z, y, x]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Foreground test that treats everything outside the grid as background.
fn fg_at<T: Real>(mask: &GridMask<T>, shape: [usize; 3], idx: [i64; 3]) -> bool {
    if (0..3).any(|k| idx[k] < 0 || idx[k] >= shape[k] as i64) {
        return false;
    }
    let flat = (idx[0] as usize * shape[1] + idx[1] as usize) * shape[2] + idx[2] as usize;
    mask.data()[flat]
}

pub fn extract_erode<T: Real>(mask: &GridMask<T>, connectivity: Connectivity) -> BoundarySet<T> {
    let shape = mask.shape3();
    let offs = offsets(mask, connectivity);
    let mut set = BoundarySet::new(mask);
    for (flat, _) in mask.data().iter().enumerate().filter(|(_, &v)| v) {
        let idx = unravel(flat, shape);
        let eroded_away = offs.iter().any(|o| {
            let n = [
                idx[0] as i64 + o[0],
                idx[1] as i64 + o[1],
                idx[2] as i64 + o[2],
            ];
            !fg_at(mask, shape, n)
        });
        if eroded_away {
            set.push(center(idx), T::one());
        }
    }
    set
}

/// One point per foreground/background face, weighted by the face's
/// physical length (2D) or area (3D).
pub fn extract_interface<T: Real>(mask: &GridMask<T>) -> BoundarySet<T> {
    let shape = mask.shape3();
    let spacing = mask.spacing3();
    let axes = mask.axes();
    let face_measure: Vec<T> = (0..3)
        .map(|k| {
            axes.clone()
                .filter(|&j| j != k)
                .fold(T::one(), |acc, j| acc * spacing[j])
        })
        .collect();
    let mut set = BoundarySet::new(mask);
    for (flat, _) in mask.data().iter().enumerate().filter(|(_, &v)| v) {
        let idx = unravel(flat, shape);
        let c = center(idx);
        for k in axes.clone() {
            for d in [-1i64, 1] {
                let mut n = [idx[0] as i64, idx[1] as i64, idx[2] as i64];
                n[k] += d;
                if !fg_at(mask, shape, n) {
                    let mut h = c;
                    h[k] += d;
                    set.push(h, face_measure[k]);
                }
            }
        }
    }
    set
}

pub fn extract_foreground<T: Real>(mask: &GridMask<T>) -> BoundarySet<T> {
    let shape = mask.shape3();
    let mut set = BoundarySet::new(mask);
    for (flat, _) in mask.data().iter().enumerate().filter(|(_, &v)| v) {
        set.push(center(unravel(flat, shape)), T::one());
    }
    set
}

/// Foreground elements of `a` that are background in `b`.
fn extract_difference<T: Real>(a: &GridMask<T>, b: &GridMask<T>) -> BoundarySet<T> {
    let shape = a.shape3();
    let mut set = BoundarySet::new(a);
    for (flat, (&x, &y)) in a.data().iter().zip(b.data()).enumerate() {
        if x && !y {
            set.push(center(unravel(flat, shape)), T::one());
        }
    }
    set
}

/// Single-mask extraction. [`BoundaryMode::ForegroundNonOverlap`] needs both
/// masks and is rejected here.
pub fn extract<T: Real>(mask: &GridMask<T>, mode: BoundaryMode) -> Result<BoundarySet<T>> {
    Ok(match mode {
        BoundaryMode::ErodeFace => extract_erode(mask, Connectivity::Face),
        BoundaryMode::ErodeFull => extract_erode(mask, Connectivity::Full),
        BoundaryMode::Interface => extract_interface(mask),
        BoundaryMode::ForegroundAll => extract_foreground(mask),
        BoundaryMode::ForegroundNonOverlap => {
            return Err(Error::InvalidConfig(
                "non-overlap extraction needs both masks".into(),
            ))
        }
    })
}

pub fn extract_pair<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    mode: BoundaryMode,
) -> Result<(BoundarySet<T>, BoundarySet<T>)> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "dims {:?}/{:?}",
            a.dims(),
            b.dims()
        )));
    }
    match mode {
        BoundaryMode::ForegroundNonOverlap => {
            Ok((extract_difference(a, b), extract_difference(b, a)))
        }
        _ => Ok((extract(a, mode)?, extract(b, mode)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(dims: &[usize], spacing: &[f64], f: impl FnMut(&[usize]) -> bool) -> GridMask<f64> {
        GridMask::from_fn(dims.to_vec(), spacing.to_vec(), f).unwrap()
    }

    fn sorted_points(s: &BoundarySet<f64>) -> Vec<Vec<f64>> {
        let mut p: Vec<Vec<f64>> = s.points().collect();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    }

    /// Reference erosion: an element survives iff every offset in the
    /// structuring element lands on in-grid foreground.
    fn oracle_boundary(m: &GridMask<f64>, full: bool) -> Vec<Vec<usize>> {
        let nd = m.ndim();
        let mut offs: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..nd {
            offs = offs
                .into_iter()
                .flat_map(|o| {
                    (-1..=1).map(move |d| {
                        let mut v = o.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        let offs: Vec<Vec<i64>> = offs
            .into_iter()
            .filter(|o| {
                let nz = o.iter().filter(|&&d| d != 0).count();
                nz > 0 && (full || nz == 1)
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; nd];
        loop {
            if m.get(&idx) {
                let survives = offs.iter().all(|o| {
                    let n: Vec<i64> = idx.iter().zip(o).map(|(&i, &d)| i as i64 + d).collect();
                    n.iter().zip(m.dims()).all(|(&v, &d)| v >= 0 && v < d as i64) && {
                        let u: Vec<usize> = n.iter().map(|&v| v as usize).collect();
                        m.get(&u)
                    }
                });
                if !survives {
                    out.push(idx.clone());
                }
            }
            let mut k = nd;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < m.dims()[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn as_points(idx: &[Vec<usize>], spacing: &[f64]) -> Vec<Vec<f64>> {
        let mut p: Vec<Vec<f64>> = idx
            .iter()
            .map(|i| i.iter().zip(spacing).map(|(&v, &s)| v as f64 * s).collect())
            .collect();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    }

    #[test]
    fn single_element_erodes_to_itself() {
        let m = grid(&[5, 5], &[1.0, 1.0], |i| i == [2, 3]);
        for c in [Connectivity::Face, Connectivity::Full] {
            let s = extract_erode(&m, c);
            assert_eq!(sorted_points(&s), vec![vec![2.0, 3.0]]);
            assert_eq!(s.weights(), &[1.0]);
        }
    }

    #[test]
    fn full_square_keeps_ring() {
        let m = grid(&[3, 3], &[1.0, 1.0], |_| true);
        for c in [Connectivity::Face, Connectivity::Full] {
            let s = extract_erode(&m, c);
            assert_eq!(s.len(), 8);
            assert!(!sorted_points(&s).contains(&vec![1.0, 1.0]));
        }
    }

    #[test]
    fn plus_shape_distinguishes_connectivity() {
        let plus = |i: &[usize]| i[0] == 1 || i[1] == 1;
        let m = grid(&[3, 3], &[1.0, 1.0], plus);
        let face = extract_erode(&m, Connectivity::Face);
        let full = extract_erode(&m, Connectivity::Full);
        assert_eq!(sorted_points(&face), as_points(&oracle_boundary(&m, false), &[1.0, 1.0]));
        assert_eq!(sorted_points(&full), as_points(&oracle_boundary(&m, true), &[1.0, 1.0]));
        // The center survives cross erosion but not box erosion.
        assert_eq!(face.len(), 4);
        assert_eq!(full.len(), 5);
    }

    #[test]
    fn erosion_matches_reference_morphology() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let dims: Vec<usize> = if trial % 2 == 0 {
                vec![rng.gen_range(1..9), rng.gen_range(1..9)]
            } else {
                vec![rng.gen_range(1..6), rng.gen_range(1..6), rng.gen_range(1..6)]
            };
            let sp: Vec<f64> = dims.iter().map(|_| rng.gen_range(0.5..2.0)).collect();
            let m = grid(&dims, &sp, |_| rng.gen_bool(0.6));
            for (c, full) in [(Connectivity::Face, false), (Connectivity::Full, true)] {
                let got = sorted_points(&extract_erode(&m, c));
                assert_eq!(got, as_points(&oracle_boundary(&m, full), &sp));
            }
        }
    }

    #[test]
    fn interface_single_element_2d() {
        let m = grid(&[3, 3], &[1.0, 1.0], |i| i == [1, 1]);
        let s = extract_interface(&m);
        assert_eq!(
            sorted_points(&s),
            vec![vec![0.5, 1.0], vec![1.0, 0.5], vec![1.0, 1.5], vec![1.5, 1.0]]
        );
        assert!(s.weights().iter().all(|&w| w == 1.0));
        assert_eq!(s.total_weight(), 4.0);
        assert!(!s.on_centers());
    }

    #[test]
    fn interface_perimeter_anisotropic() {
        let m = grid(&[1, 1], &[0.5, 2.0], |_| true);
        assert_eq!(extract_interface(&m).total_weight(), 5.0);
    }

    #[test]
    fn interface_voxel_surface() {
        let m = grid(&[1, 1, 1], &[1.0, 1.0, 1.0], |_| true);
        let s = extract_interface(&m);
        assert_eq!(s.len(), 6);
        assert_eq!(s.total_weight(), 6.0);
    }

    #[test]
    fn interface_box_area_is_exact() {
        let sp = [0.5, 1.25, 2.0];
        let m = grid(&[6, 7, 5], &sp, |i| (1..4).contains(&i[0]) && (2..6).contains(&i[1]) && (1..3).contains(&i[2]));
        let (lx, ly, lz) = (3.0 * sp[0], 4.0 * sp[1], 2.0 * sp[2]);
        let area = 2.0 * (lx * ly + ly * lz + lx * lz);
        assert_eq!(extract_interface(&m).total_weight(), area);
    }

    #[test]
    fn foreground_counts() {
        let empty = grid(&[4, 4], &[1.0, 1.0], |_| false);
        assert!(extract_foreground(&empty).is_empty());
        let full = grid(&[2, 2], &[1.0, 1.0], |_| true);
        assert_eq!(extract_foreground(&full).len(), 4);
    }

    #[test]
    fn non_overlap_pairs() {
        let a = grid(&[3, 3], &[1.0, 1.0], |i| i[0] == 1 && i[1] < 2);
        let b = grid(&[3, 3], &[1.0, 1.0], |i| i == [1, 0]);
        let (sa, sb) = extract_pair(&a, &b, BoundaryMode::ForegroundNonOverlap).unwrap();
        assert_eq!(sorted_points(&sa), vec![vec![1.0, 1.0]]);
        assert!(sb.is_empty());

        let (sa, sb) = extract_pair(&a, &a, BoundaryMode::ForegroundNonOverlap).unwrap();
        assert!(sa.is_empty() && sb.is_empty());

        let c = grid(&[3, 3], &[1.0, 1.0], |i| i[0] == 2);
        let (sa, sc) = extract_pair(&a, &c, BoundaryMode::ForegroundNonOverlap).unwrap();
        assert_eq!(sorted_points(&sa), sorted_points(&extract_foreground(&a)));
        assert_eq!(sorted_points(&sc), sorted_points(&extract_foreground(&c)));
    }

    #[test]
    fn single_mask_extract_rejects_non_overlap() {
        let a = grid(&[2, 2], &[1.0, 1.0], |_| true);
        assert!(extract(&a, BoundaryMode::ForegroundNonOverlap).is_err());
    }
}
