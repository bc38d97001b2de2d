//! Two-sided paired Wilcoxon signed-rank test.
//!
//! Zero differences are dropped and tied magnitudes get midranks. Up to
//! [`EXACT_MAX`] nonzero differences the null distribution of the
//! positive-rank sum is enumerated exactly (on doubled ranks, so midranks
//! stay integral); above that a normal approximation with tie correction
//! is used.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{HarnessError, Result};

pub const EXACT_MAX: usize = 25;
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    /// Nonzero differences used.
    pub n: usize,
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    pub p_value: f64,
    pub exact: bool,
    pub corrections: usize,
    /// `p_value < ALPHA / corrections`.
    pub significant: bool,
}

pub fn wilcoxon_paired(x: &[f64], y: &[f64], corrections: usize) -> Result<Wilcoxon> {
    if x.len() != y.len() || x.is_empty() {
        return Err(HarnessError::Invalid(format!(
            "paired samples need equal nonzero lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if corrections == 0 {
        return Err(HarnessError::Invalid("corrections must be at least 1".into()));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(HarnessError::Invalid("differences must be finite".into()));
    }
    let n = diffs.len();
    let finish = |w_plus: f64, p: f64, exact: bool| Wilcoxon {
        n,
        w_plus,
        p_value: p,
        exact,
        corrections,
        significant: p < ALPHA / corrections as f64,
    };
    if n == 0 {
        return Ok(finish(0.0, 1.0, true));
    }
    let (doubled, tie_sizes) = doubled_ranks(&diffs);
    let t_plus: u64 = doubled.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| *r).sum();
    let w_plus = t_plus as f64 / 2.0;
    if n <= EXACT_MAX {
        let counts = null_counts(&doubled);
        let total: f64 = counts.iter().sum();
        let t = t_plus as usize;
        let lower: f64 = counts[..=t].iter().sum::<f64>() / total;
        let upper: f64 = counts[t..].iter().sum::<f64>() / total;
        Ok(finish(w_plus, (2.0 * lower.min(upper)).min(1.0), true))
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let ties: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        let z = (w_plus - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let tail = normal.cdf(-z.abs());
        Ok(finish(w_plus, (2.0 * tail).min(1.0), false))
    }
}

/// Twice the midrank of each |d|, plus the sizes of tie groups.
fn doubled_ranks(diffs: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0u64; diffs.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // Ranks start+1..=end; doubled midrank is their sum over half the count.
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        ties.push((end - start) as u64);
        start = end;
    }
    (ranks, ties)
}

/// Number of sign assignments giving each doubled positive-rank sum.
fn null_counts(doubled: &[u64]) -> Vec<f64> {
    let max: u64 = doubled.iter().sum();
    let mut counts = vec![0.0; max as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}
