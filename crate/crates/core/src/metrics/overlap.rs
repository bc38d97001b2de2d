use crate::distance::inner_distance;
use crate::grid::GridMask;
use crate::scalar::Real;

/// Foreground elements whose distance to the nearest background center is
/// at most `tau`.
pub fn inner_band<T: Real>(mask: &GridMask<T>, tau: T) -> Vec<bool> {
    inner_distance(mask)
        .into_iter()
        .zip(mask.data())
        .map(|(d, &fg)| fg && d <= tau)
        .collect()
}

fn iou(a: &[bool], b: &[bool]) -> (usize, usize) {
    a.iter().zip(b).fold((0, 0), |(i, u), (&x, &y)| {
        (i + usize::from(x && y), u + usize::from(x || y))
    })
}

/// IoU of the two inner `tau`-bands; `None` when both bands are empty.
///
/// Both masks share a grid, so element counts stand in for volumes.
pub fn biou<T: Real>(a: &GridMask<T>, b: &GridMask<T>, tau: T) -> Option<T> {
    biou_from_bands(&inner_band(a, tau), &inner_band(b, tau))
}

pub(crate) fn biou_from_bands<T: Real>(a: &[bool], b: &[bool]) -> Option<T> {
    let (inter, union) = iou(a, b);
    (union > 0).then(|| T::of_usize(inter) / T::of_usize(union))
}

/// `2|A ∩ B| / (|A| + |B|)`; `None` when both masks are empty.
pub fn dsc<T: Real>(a: &GridMask<T>, b: &GridMask<T>) -> Option<T> {
    let (inter, _) = iou(a.data(), b.data());
    let total = a.count() + b.count();
    (total > 0).then(|| T::of_usize(2 * inter) / T::of_usize(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize, lo: [usize; 2], size: usize) -> GridMask<f64> {
        GridMask::from_fn(vec![n, n], vec![1.0, 1.0], |i| {
            (lo[0]..lo[0] + size).contains(&i[0]) && (lo[1]..lo[1] + size).contains(&i[1])
        })
        .unwrap()
    }

    #[test]
    fn dsc_by_hand() {
        let a = square(6, [0, 0], 2);
        assert_eq!(dsc(&a, &a), Some(1.0));
        assert_eq!(dsc(&a, &square(6, [3, 3], 2)), Some(0.0));
        // 2x2 vs 2x2 shifted by one column: overlap 2.
        assert_eq!(dsc(&a, &square(6, [0, 1], 2)), Some(0.5));
        let e = GridMask::<f64>::empty(vec![3, 3], vec![1.0, 1.0]).unwrap();
        assert_eq!(dsc(&e, &e), None);
    }

    #[test]
    fn biou_identity_and_disjoint() {
        let a = square(9, [1, 1], 3);
        assert_eq!(biou(&a, &a, 2.0), Some(1.0));
        assert_eq!(biou(&a, &square(9, [5, 5], 3), 2.0), Some(0.0));
    }

    #[test]
    fn biou_shifted_square_rings() {
        // 5x5 solid square at (2,2) and the same shifted one row down, tau = 1:
        // each band is the 16-element outer ring of its square.
        let a = square(10, [2, 2], 5);
        let b = square(10, [3, 2], 5);
        let ring = |lo: [usize; 2]| -> Vec<[usize; 2]> {
            let mut v = Vec::new();
            for r in lo[0]..lo[0] + 5 {
                for c in lo[1]..lo[1] + 5 {
                    if r == lo[0] || r == lo[0] + 4 || c == lo[1] || c == lo[1] + 4 {
                        v.push([r, c]);
                    }
                }
            }
            v
        };
        let (ra, rb) = (ring([2, 2]), ring([3, 2]));
        assert_eq!(ra.len(), 16);
        let inter = ra.iter().filter(|p| rb.contains(p)).count();
        let union = ra.len() + rb.len() - inter;
        assert_eq!((inter, union), (8, 24));
        assert_eq!(biou(&a, &b, 1.0), Some(inter as f64 / union as f64));
    }

    #[test]
    fn tau_below_spacing_leaves_no_band() {
        let a = square(6, [1, 1], 3);
        assert_eq!(biou(&a, &a, 0.5), None);
    }
}
