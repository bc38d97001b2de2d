//! Aggregation of two directed distance sets into HD, HDp, MASD, ASSD and NSD.
//!
//! These functions do not look at mask emptiness; that is the caller's job
//! (see [`super::edge_case`]). They are still total on empty directed sets,
//! which only arise from non-overlap extraction when every query point of
//! one side lies inside the other mask: the maximum, percentile and mean of
//! an empty set are 0, pooled means over no distances are 0, and NSD over no
//! boundary is 1.

use crate::distance::DistanceSet;
use crate::scalar::Real;

use super::config::{AssdMode, HdpMode, MasdMode, NsdMode};

fn max_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::zero(), T::max)
}

fn sum_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::zero(), |a, b| a + b)
}

fn weighted_sum<T: Real>(d: &DistanceSet<T>) -> T {
    d.distances
        .iter()
        .zip(&d.weights)
        .fold(T::zero(), |a, (&x, &w)| a + x * w)
}

fn mean<T: Real>(v: &[T]) -> T {
    if v.is_empty() {
        T::zero()
    } else {
        sum_of(v) / T::of_usize(v.len())
    }
}

fn weighted_mean<T: Real>(d: &DistanceSet<T>) -> T {
    let w = sum_of(&d.weights);
    if d.is_empty() {
        T::zero()
    } else {
        weighted_sum(d) / w
    }
}

fn sorted<T: Real>(v: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = v.into_iter().collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("distances are never NaN"));
    out
}

/// 1-based position `round((p / 100) * n)` with halves rounded up,
/// clamped to `[1, n]`.
pub fn percentile_position<T: Real>(p: T, n: usize) -> usize {
    let x = p * T::of_usize(n) / T::of(100.0);
    let pos = (x + T::of(0.5)).floor().to_usize().unwrap_or(0);
    pos.clamp(1, n.max(1))
}

/// Percentile of an ascending list by the position rule.
pub fn percentile_sorted<T: Real>(sorted: &[T], p: T) -> T {
    if sorted.is_empty() {
        return T::zero();
    }
    sorted[percentile_position(p, sorted.len()) - 1]
}

/// Smallest distance whose cumulative weight (over distances ≤ it) reaches
/// `p / 100` of the total weight.
pub fn weighted_percentile<T: Real>(d: &DistanceSet<T>, p: T) -> T {
    if d.is_empty() {
        return T::zero();
    }
    let mut pairs: Vec<(T, T)> = d.distances.iter().copied().zip(d.weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("distances are never NaN"));
    let total = pairs.iter().fold(T::zero(), |a, &(_, w)| a + w);
    let threshold = p / T::of(100.0) * total;
    let mut cum = T::zero();
    for &(dist, w) in &pairs {
        cum = cum + w;
        if cum >= threshold {
            return dist;
        }
    }
    pairs[pairs.len() - 1].0
}

pub fn hd<T: Real>(dab: &DistanceSet<T>, dba: &DistanceSet<T>) -> T {
    max_of(&dab.distances).max(max_of(&dba.distances))
}

pub fn hdp<T: Real>(dab: &DistanceSet<T>, dba: &DistanceSet<T>, p: T, mode: HdpMode) -> T {
    let directed = |d: &DistanceSet<T>| percentile_sorted(&sorted(d.distances.iter().copied()), p);
    match mode {
        HdpMode::MaxOfDirected => directed(dab).max(directed(dba)),
        HdpMode::Pooled => percentile_sorted(
            &sorted(dab.distances.iter().chain(&dba.distances).copied()),
            p,
        ),
        HdpMode::MeanOfDirected => (directed(dab) + directed(dba)) * T::of(0.5),
        HdpMode::WeightedMaxOfDirected => weighted_percentile(dab, p).max(weighted_percentile(dba, p)),
    }
}

pub fn masd<T: Real>(dab: &DistanceSet<T>, dba: &DistanceSet<T>, mode: MasdMode) -> T {
    match mode {
        MasdMode::MeanOfMeans => (mean(&dab.distances) + mean(&dba.distances)) * T::of(0.5),
        MasdMode::MaxOfMeans => mean(&dab.distances).max(mean(&dba.distances)),
        MasdMode::WeightedMean => (weighted_mean(dab) + weighted_mean(dba)) * T::of(0.5),
    }
}

pub fn assd<T: Real>(dab: &DistanceSet<T>, dba: &DistanceSet<T>, mode: AssdMode) -> T {
    let (num, den) = match mode {
        AssdMode::PooledMean => (
            sum_of(&dab.distances) + sum_of(&dba.distances),
            T::of_usize(dab.len() + dba.len()),
        ),
        AssdMode::WeightedPooledMean => (
            weighted_sum(dab) + weighted_sum(dba),
            sum_of(&dab.weights) + sum_of(&dba.weights),
        ),
    };
    if dab.is_empty() && dba.is_empty() {
        T::zero()
    } else {
        num / den
    }
}

/// Fraction of boundary within `tau` (inclusive) of the other boundary.
pub fn nsd<T: Real>(dab: &DistanceSet<T>, dba: &DistanceSet<T>, tau: T, mode: NsdMode) -> T {
    if dab.is_empty() && dba.is_empty() {
        return T::one();
    }
    let within = |d: &DistanceSet<T>, weighted: bool| {
        d.distances
            .iter()
            .zip(&d.weights)
            .filter(|(&x, _)| x <= tau)
            .fold(T::zero(), |a, (_, &w)| a + if weighted { w } else { T::one() })
    };
    match mode {
        NsdMode::Count => {
            (within(dab, false) + within(dba, false)) / T::of_usize(dab.len() + dba.len())
        }
        NsdMode::WeightedArea => {
            (within(dab, true) + within(dba, true)) / (sum_of(&dab.weights) + sum_of(&dba.weights))
        }
    }
}
