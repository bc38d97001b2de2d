//! Brute-force reference evaluation.
//!
//! Everything here is transcribed directly from the metric definitions and
//! shares no computational code with the main path: boundaries come from
//! literal neighbour checks on index vectors, distances are pairwise minima
//! in physical coordinates, BIoU bands come from exhaustive search for
//! background elements, and there is no cropping or transform reuse. Only
//! the empty-input convention table is shared. Intended for small grids.

use crate::boundary::BoundaryMode;
use crate::error::{Error, Result};
use crate::grid::GridMask;
use crate::metrics::{
    edge_case, AssdMode, ComputeStats, HdpMode, MasdMode, Metric, MetricConfig, MetricEntry,
    MetricResult, NsdMode, Outcome, SpacingMode,
};
use crate::scalar::Real;

struct Points<T> {
    coords: Vec<Vec<T>>,
    weights: Vec<T>,
}

fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn is_fg<T: Real>(m: &GridMask<T>, idx: &[i64]) -> bool {
    if idx.iter().zip(m.dims()).any(|(&i, &n)| i < 0 || i >= n as i64) {
        return false;
    }
    let u: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
    m.get(&u)
}

fn center<T: Real>(idx: &[usize], spacing: &[T]) -> Vec<T> {
    idx.iter().zip(spacing).map(|(&i, &s)| T::of_usize(i) * s).collect()
}

fn erode_boundary<T: Real>(m: &GridMask<T>, spacing: &[T], full: bool) -> Points<T> {
    let nd = m.ndim();
    let offsets: Vec<Vec<i64>> = all_indices(&vec![3; nd])
        .into_iter()
        .map(|o| o.into_iter().map(|v| v as i64 - 1).collect::<Vec<i64>>())
        .filter(|o| {
            let nonzero = o.iter().filter(|&&v| v != 0).count();
            nonzero > 0 && (full || nonzero == 1)
        })
        .collect();
    let mut p = Points {
        coords: vec![],
        weights: vec![],
    };
    for idx in all_indices(m.dims()) {
        if !m.get(&idx) {
            continue;
        }
        let survives = offsets.iter().all(|o| {
            let n: Vec<i64> = idx.iter().zip(o).map(|(&i, &d)| i as i64 + d).collect();
            is_fg(m, &n)
        });
        if !survives {
            p.coords.push(center(&idx, spacing));
            p.weights.push(T::one());
        }
    }
    p
}

fn interface<T: Real>(m: &GridMask<T>, spacing: &[T]) -> Points<T> {
    let nd = m.ndim();
    let half = T::of(0.5);
    let mut p = Points {
        coords: vec![],
        weights: vec![],
    };
    for idx in all_indices(m.dims()) {
        if !m.get(&idx) {
            continue;
        }
        for k in 0..nd {
            for dir in [-1i64, 1] {
                let mut n: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
                n[k] += dir;
                if is_fg(m, &n) {
                    continue;
                }
                let mut c = center(&idx, spacing);
                c[k] = c[k] + T::of_i64(dir) * half * spacing[k];
                let mut w = T::one();
                for (j, &s) in spacing.iter().enumerate() {
                    if j != k {
                        w = w * s;
                    }
                }
                p.coords.push(c);
                p.weights.push(w);
            }
        }
    }
    p
}

fn foreground<T: Real>(m: &GridMask<T>, exclude: Option<&GridMask<T>>, spacing: &[T]) -> Points<T> {
    let mut p = Points {
        coords: vec![],
        weights: vec![],
    };
    for idx in all_indices(m.dims()) {
        if m.get(&idx) && !exclude.is_some_and(|e| e.get(&idx)) {
            p.coords.push(center(&idx, spacing));
            p.weights.push(T::one());
        }
    }
    p
}

/// (query set, target set) for the A→B direction.
fn sets<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    mode: BoundaryMode,
    spacing: &[T],
) -> (Points<T>, Points<T>) {
    match mode {
        BoundaryMode::ErodeFace => (erode_boundary(a, spacing, false), erode_boundary(b, spacing, false)),
        BoundaryMode::ErodeFull => (erode_boundary(a, spacing, true), erode_boundary(b, spacing, true)),
        BoundaryMode::Interface => (interface(a, spacing), interface(b, spacing)),
        BoundaryMode::ForegroundAll => (foreground(a, None, spacing), foreground(b, None, spacing)),
        BoundaryMode::ForegroundNonOverlap => (foreground(a, Some(b), spacing), foreground(b, None, spacing)),
    }
}

fn euclid<T: Real>(p: &[T], q: &[T]) -> T {
    p.iter()
        .zip(q)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// (distances, weights) from every query point to its nearest target.
fn directed<T: Real>(query: &Points<T>, target: &Points<T>) -> (Vec<T>, Vec<T>) {
    let d = query
        .coords
        .iter()
        .map(|p| {
            let mut best = T::infinity();
            for q in &target.coords {
                let d = euclid(p, q);
                if d < best {
                    best = d;
                }
            }
            best
        })
        .collect();
    (d, query.weights.clone())
}

struct Directed<T> {
    ab: (Vec<T>, Vec<T>),
    ba: (Vec<T>, Vec<T>),
}

fn directed_pair<T: Real>(a: &GridMask<T>, b: &GridMask<T>, mode: BoundaryMode, spacing: &[T]) -> Directed<T> {
    let (qa, tb) = sets(a, b, mode, spacing);
    let (qb, ta) = sets(b, a, mode, spacing);
    Directed {
        ab: directed(&qa, &tb),
        ba: directed(&qb, &ta),
    }
}

fn nth_by_rule<T: Real>(values: &[T], p: T) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let mut v = values.to_vec();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = v.len();
    let raw = p * T::of_usize(n) / T::of(100.0);
    let mut pos = raw.floor().to_usize().unwrap_or(0);
    if raw - raw.floor() >= T::of(0.5) {
        pos += 1;
    }
    let pos = pos.max(1).min(n);
    v[pos - 1]
}

fn weighted_nth<T: Real>(d: &[T], w: &[T], p: T) -> T {
    if d.is_empty() {
        return T::zero();
    }
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let mut total = T::zero();
    for &i in &order {
        total = total + w[i];
    }
    let need = p / T::of(100.0) * total;
    let mut acc = T::zero();
    for &i in &order {
        acc = acc + w[i];
        if acc >= need {
            return d[i];
        }
    }
    d[order[order.len() - 1]]
}

fn avg<T: Real>(v: &[T]) -> T {
    if v.is_empty() {
        return T::zero();
    }
    let mut s = T::zero();
    for &x in v {
        s = s + x;
    }
    s / T::of_usize(v.len())
}

fn wavg<T: Real>(d: &[T], w: &[T]) -> T {
    if d.is_empty() {
        return T::zero();
    }
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&x, &y) in d.iter().zip(w) {
        num = num + x * y;
        den = den + y;
    }
    num / den
}

fn band<T: Real>(m: &GridMask<T>, spacing: &[T], tau: T) -> Vec<Vec<usize>> {
    let nd = m.ndim();
    // Only elements within tau along every axis can be within tau overall.
    let reach: Vec<i64> = spacing
        .iter()
        .map(|&s| (tau / s).floor().to_i64().unwrap_or(0) + 1)
        .collect();
    let mut out = Vec::new();
    for idx in all_indices(m.dims()) {
        if !m.get(&idx) {
            continue;
        }
        let window: Vec<usize> = reach.iter().map(|&r| (2 * r + 1) as usize).collect();
        let hit = all_indices(&window).into_iter().any(|w| {
            let n: Vec<i64> = (0..nd).map(|k| idx[k] as i64 + w[k] as i64 - reach[k]).collect();
            if is_fg(m, &n) {
                return false;
            }
            let d = (0..nd)
                .fold(T::zero(), |acc, k| {
                    let x = T::of_i64(n[k] - idx[k] as i64) * spacing[k];
                    acc + x * x
                })
                .sqrt();
            d <= tau
        });
        if hit {
            out.push(idx);
        }
    }
    out
}

/// Evaluates every metric by brute force.
pub fn oracle_all_metrics<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    config: &MetricConfig<T>,
) -> Result<MetricResult<T>> {
    config.validate()?;
    if !a.same_grid(b) {
        return Err(Error::GridMismatch("oracle inputs differ".into()));
    }
    let empty_a = a.count() == 0;
    let empty_b = b.count() == 0;
    let spacing: Vec<T> = match config.spacing_mode {
        SpacingMode::Physical => a.spacing().to_vec(),
        SpacingMode::UnitFlaw => vec![T::one(); a.ndim()],
    };

    let from_edge = |m: Metric, ea: bool, eb: bool| match edge_case::<T>(m, ea, eb, config.edge_policy) {
        Some(Ok((value, side))) => Outcome::Value {
            value,
            warning: Some(side),
        },
        Some(Err(Error::EmptyInput { which, .. })) => Outcome::Failed { empty: which },
        _ => unreachable!(),
    };

    let mut entries = Vec::new();
    if empty_a || empty_b {
        for m in Metric::ALL {
            entries.push(MetricEntry {
                metric: m,
                outcome: from_edge(m, empty_a, empty_b),
            });
        }
        return Ok(MetricResult {
            entries,
            empty_a,
            empty_b,
            stats: ComputeStats::default(),
        });
    }

    let main = directed_pair(a, b, config.boundary_mode, &spacing);
    let masd_sets = directed_pair(a, b, config.masd_boundary_mode(), &spacing);
    let (dab, wab) = &main.ab;
    let (dba, wba) = &main.ba;
    let p = config.p;
    let tau = config.tau;
    let half = T::of(0.5);

    let mut hd_v = T::zero();
    for &d in dab.iter().chain(dba.iter()) {
        if d > hd_v {
            hd_v = d;
        }
    }

    let hdp_v = match config.hdp_mode {
        HdpMode::MaxOfDirected => nth_by_rule(dab, p).max(nth_by_rule(dba, p)),
        HdpMode::Pooled => {
            let all: Vec<T> = dab.iter().chain(dba.iter()).copied().collect();
            nth_by_rule(&all, p)
        }
        HdpMode::MeanOfDirected => (nth_by_rule(dab, p) + nth_by_rule(dba, p)) * half,
        HdpMode::WeightedMaxOfDirected => weighted_nth(dab, wab, p).max(weighted_nth(dba, wba, p)),
    };

    let (mab, mwab) = &masd_sets.ab;
    let (mba, mwba) = &masd_sets.ba;
    let masd_v = match config.masd_mode {
        MasdMode::MeanOfMeans => (avg(mab) + avg(mba)) * half,
        MasdMode::MaxOfMeans => avg(mab).max(avg(mba)),
        MasdMode::WeightedMean => (wavg(mab, mwab) + wavg(mba, mwba)) * half,
    };

    let n_total = dab.len() + dba.len();
    let assd_v = if n_total == 0 {
        T::zero()
    } else {
        match config.assd_mode {
            AssdMode::PooledMean => {
                let (mut s1, mut s2) = (T::zero(), T::zero());
                for &d in dab {
                    s1 = s1 + d;
                }
                for &d in dba {
                    s2 = s2 + d;
                }
                (s1 + s2) / T::of_usize(n_total)
            }
            AssdMode::WeightedPooledMean => {
                let part = |d: &[T], w: &[T]| {
                    d.iter().zip(w).fold((T::zero(), T::zero()), |(n, s), (&x, &y)| (n + x * y, s + y))
                };
                let (n1, w1) = part(dab, wab);
                let (n2, w2) = part(dba, wba);
                (n1 + n2) / (w1 + w2)
            }
        }
    };

    let nsd_v = if n_total == 0 {
        T::one()
    } else {
        match config.nsd_mode {
            NsdMode::Count => {
                let c = dab.iter().chain(dba.iter()).filter(|&&d| d <= tau).count();
                T::of_usize(c) / T::of_usize(n_total)
            }
            NsdMode::WeightedArea => {
                let (mut inside1, mut inside2, mut w1, mut w2) = (T::zero(), T::zero(), T::zero(), T::zero());
                for (&d, &w) in dab.iter().zip(wab) {
                    w1 = w1 + w;
                    if d <= tau {
                        inside1 = inside1 + w;
                    }
                }
                for (&d, &w) in dba.iter().zip(wba) {
                    w2 = w2 + w;
                    if d <= tau {
                        inside2 = inside2 + w;
                    }
                }
                (inside1 + inside2) / (w1 + w2)
            }
        }
    };

    let band_a = band(a, &spacing, tau);
    let band_b = band(b, &spacing, tau);
    let inter = band_a.iter().filter(|i| band_b.contains(i)).count();
    let union = band_a.len() + band_b.len() - inter;
    let biou_v = (union > 0).then(|| T::of_usize(inter) / T::of_usize(union));

    let both = all_indices(a.dims())
        .into_iter()
        .filter(|i| a.get(i) && b.get(i))
        .count();
    let dsc_v = T::of_usize(2 * both) / T::of_usize(a.count() + b.count());

    for m in Metric::ALL {
        let v = match m {
            Metric::Hd => Some(hd_v),
            Metric::Hdp => Some(hdp_v),
            Metric::Masd => Some(masd_v),
            Metric::Assd => Some(assd_v),
            Metric::Nsd => Some(nsd_v),
            Metric::Biou => biou_v,
            Metric::Dsc => Some(dsc_v),
        };
        entries.push(MetricEntry {
            metric: m,
            outcome: match v {
                Some(value) => Outcome::Value {
                    value,
                    warning: None,
                },
                None => from_edge(m, true, true),
            },
        });
    }
    Ok(MetricResult {
        entries,
        empty_a,
        empty_b,
        stats: ComputeStats::default(),
    })
}
