//! The main evaluation path: crop once, extract once per boundary mode,
//! transform once per direction, then feed every requested aggregator.

use serde::Serialize;

use crate::boundary::{extract_foreground, extract_pair, BoundaryMode, BoundarySet};
use crate::distance::{directed_distances, Direction, DistanceField, DistanceSet, Lattice, Via};
use crate::error::{EmptySide, Error, Result};
use crate::grid::{crop_joint, GridMask};
use crate::scalar::Real;

use super::aggregate::{assd, hd, hdp, masd, nsd};
use super::config::{MetricConfig, SpacingMode};
use super::edge::edge_case;
use super::overlap::{biou_from_bands, dsc, inner_band};
use super::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComputeOptions {
    /// Crop both masks to their joint bounding box before any work.
    pub crop: bool,
    /// Margin in elements around the box; values below 1 are raised to 1.
    pub margin: usize,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self { crop: true, margin: 1 }
    }
}

/// Work counters for one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ComputeStats {
    /// Transforms of boundary point sets.
    pub boundary_edts: usize,
    /// Inner-distance transforms for BIoU bands.
    pub band_edts: usize,
    /// Distinct boundary extractions performed.
    pub extractions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Outcome<T> {
    Value {
        value: T,
        /// Set when the value comes from an empty-input convention.
        warning: Option<EmptySide>,
    },
    Unsupported,
    /// Refused under the error edge policy.
    Failed { empty: EmptySide },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricEntry<T> {
    pub metric: Metric,
    pub outcome: Outcome<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult<T> {
    /// One entry per metric in [`Metric::ALL`] order.
    pub entries: Vec<MetricEntry<T>>,
    pub empty_a: bool,
    pub empty_b: bool,
    pub stats: ComputeStats,
}

impl<T: Real> MetricResult<T> {
    pub fn outcome(&self, metric: Metric) -> Outcome<T> {
        self.entries
            .iter()
            .find(|e| e.metric == metric)
            .map(|e| e.outcome)
            .unwrap_or(Outcome::Unsupported)
    }

    /// The metric's value, if it was computed (including edge conventions).
    pub fn get(&self, metric: Metric) -> Option<T> {
        match self.outcome(metric) {
            Outcome::Value { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Typed error for a metric refused under the error policy.
    pub fn error(&self, metric: Metric) -> Option<Error> {
        match self.outcome(metric) {
            Outcome::Failed { empty } => Some(Error::EmptyInput {
                metric,
                which: empty,
            }),
            _ => None,
        }
    }

    pub fn has_warnings(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.outcome, Outcome::Value { warning: Some(_), .. }))
    }
}

/// Every metric under `config`, with default options.
pub fn compute_all<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    config: &MetricConfig<T>,
) -> Result<MetricResult<T>> {
    compute_selected(a, b, config, &Metric::ALL, ComputeOptions::default())
}

/// Computes `metrics` under `config`; every other metric is reported as
/// unsupported.
pub fn compute_selected<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    config: &MetricConfig<T>,
    metrics: &[Metric],
    options: ComputeOptions,
) -> Result<MetricResult<T>> {
    config.validate()?;
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "dims {:?}/{:?}, spacing {:?}/{:?}",
            a.dims(),
            b.dims(),
            a.spacing(),
            b.spacing()
        )));
    }
    let wanted = |m: Metric| metrics.contains(&m);
    let (empty_a, empty_b) = (a.is_empty(), b.is_empty());
    let mut stats = ComputeStats::default();
    let mut out = Vec::with_capacity(Metric::ALL.len());

    if empty_a || empty_b {
        for m in Metric::ALL {
            let outcome = if !wanted(m) {
                Outcome::Unsupported
            } else {
                edge_outcome(m, empty_a, empty_b, config)
            };
            out.push(MetricEntry { metric: m, outcome });
        }
        return Ok(MetricResult {
            entries: out,
            empty_a,
            empty_b,
            stats,
        });
    }

    let (a, b) = effective_masks(a, b, config.spacing_mode, options)?;

    let main_mode = config.boundary_mode;
    let masd_mode = config.masd_boundary_mode();
    let needs_main = [Metric::Hd, Metric::Hdp, Metric::Assd, Metric::Nsd]
        .into_iter()
        .any(wanted)
        || (wanted(Metric::Masd) && masd_mode == main_mode);
    let main = if needs_main {
        Some(distance_pair(&a, &b, main_mode, &mut stats)?)
    } else {
        None
    };
    let masd_pair = if wanted(Metric::Masd) && masd_mode != main_mode {
        Some(distance_pair(&a, &b, masd_mode, &mut stats)?)
    } else {
        None
    };

    for m in Metric::ALL {
        let outcome = if !wanted(m) {
            Outcome::Unsupported
        } else {
            let value = match m {
                Metric::Hd | Metric::Hdp | Metric::Assd | Metric::Nsd | Metric::Masd => {
                    let (dab, dba) = match (m, &masd_pair) {
                        (Metric::Masd, Some(p)) => p,
                        _ => main.as_ref().expect("distances computed for wanted metrics"),
                    };
                    Some(match m {
                        Metric::Hd => hd(dab, dba),
                        Metric::Hdp => hdp(dab, dba, config.p, config.hdp_mode),
                        Metric::Masd => masd(dab, dba, config.masd_mode),
                        Metric::Assd => assd(dab, dba, config.assd_mode),
                        _ => nsd(dab, dba, config.tau, config.nsd_mode),
                    })
                }
                Metric::Biou => {
                    stats.band_edts += 2;
                    biou_from_bands(&inner_band(&a, config.tau), &inner_band(&b, config.tau))
                }
                Metric::Dsc => dsc(&a, &b),
            };
            match value {
                Some(value) => Outcome::Value {
                    value,
                    warning: None,
                },
                // Empty bands with nonempty masks: both-empty convention.
                None => edge_outcome(m, true, true, config),
            }
        };
        out.push(MetricEntry { metric: m, outcome });
    }
    Ok(MetricResult {
        entries: out,
        empty_a,
        empty_b,
        stats,
    })
}

fn edge_outcome<T: Real>(m: Metric, empty_a: bool, empty_b: bool, config: &MetricConfig<T>) -> Outcome<T> {
    match edge_case::<T>(m, empty_a, empty_b, config.edge_policy) {
        Some(Ok((value, side))) => Outcome::Value {
            value,
            warning: Some(side),
        },
        Some(Err(Error::EmptyInput { which, .. })) => Outcome::Failed { empty: which },
        Some(Err(_)) | None => unreachable!("edge_case only refuses with EmptyInput"),
    }
}

/// Applies the spacing mode and optional crop.
fn effective_masks<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    spacing_mode: SpacingMode,
    options: ComputeOptions,
) -> Result<(GridMask<T>, GridMask<T>)> {
    let (a, b) = match spacing_mode {
        SpacingMode::Physical => (a.clone(), b.clone()),
        SpacingMode::UnitFlaw => {
            let ones = vec![T::one(); a.ndim()];
            (a.with_spacing(ones.clone())?, b.with_spacing(ones)?)
        }
    };
    if options.crop {
        let c = crop_joint(&a, &b, options.margin.max(1))?;
        Ok((c.a, c.b))
    } else {
        Ok((a, b))
    }
}

/// Both directed distance sets for one extraction mode, using one transform
/// per target set.
fn distance_pair<T: Real>(
    a: &GridMask<T>,
    b: &GridMask<T>,
    mode: BoundaryMode,
    stats: &mut ComputeStats,
) -> Result<(DistanceSet<T>, DistanceSet<T>)> {
    let (qa, qb) = extract_pair(a, b, mode)?;
    stats.extractions += 1;
    // Non-overlap queries still measure to the other mask's whole foreground.
    let (ta, tb) = match mode {
        BoundaryMode::ForegroundNonOverlap => (extract_foreground(a), extract_foreground(b)),
        _ => (qa.clone(), qb.clone()),
    };
    let lattice = if mode == BoundaryMode::Interface {
        Lattice::HalfStep
    } else {
        Lattice::Centers
    };
    let shape = a.shape3();
    let mut directed = |from: &BoundarySet<T>, to: &BoundarySet<T>, dir| -> Result<DistanceSet<T>> {
        if from.is_empty() {
            return Ok(DistanceSet {
                distances: Vec::new(),
                weights: Vec::new(),
                direction: dir,
            });
        }
        let field = DistanceField::from_points(to, shape, lattice)?;
        stats.boundary_edts += 1;
        directed_distances(from, to, Via::Field(&field), dir)
    };
    let dab = directed(&qa, &tb, Direction::AToB)?;
    let dba = directed(&qb, &ta, Direction::BToA)?;
    Ok((dab, dba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{preset, EdgePolicy, HdpMode, PRESET_NAMES};

    fn points2(dims: [usize; 2], sp: [f64; 2], pts: &[[usize; 2]]) -> GridMask<f64> {
        GridMask::from_fn(dims.to_vec(), sp.to_vec(), |i| pts.iter().any(|p| p == i)).unwrap()
    }

    #[test]
    fn identical_masks_are_perfect() {
        let a = GridMask::<f64>::from_fn(vec![8, 9], vec![0.5, 1.5], |i| i[0] > 2 && i[1] < 6).unwrap();
        for name in PRESET_NAMES {
            let cfg = preset::<f64>(name).unwrap().config;
            let r = compute_all(&a, &a, &cfg).unwrap();
            for m in Metric::ALL {
                let v = r.get(m).unwrap();
                if m.is_absolute() {
                    assert_eq!(v, 0.0, "{name} {m}");
                } else {
                    assert_eq!(v, 1.0, "{name} {m}");
                }
            }
            assert!(!r.has_warnings());
        }
    }

    #[test]
    fn single_pixels_three_apart() {
        let a = points2([5, 1], [1.0, 1.0], &[[0, 0]]);
        let b = points2([5, 1], [1.0, 1.0], &[[3, 0]]);
        for mode in BoundaryMode::ALL {
            let r = compute_all(&a, &b, &MetricConfig::unweighted(mode)).unwrap();
            assert_eq!(r.get(Metric::Hd), Some(3.0), "{mode:?}");
        }
        let a = a.with_spacing(vec![0.5, 1.0]).unwrap();
        let b = b.with_spacing(vec![0.5, 1.0]).unwrap();
        let r = compute_all(&a, &b, &MetricConfig::unweighted(BoundaryMode::ErodeFace)).unwrap();
        assert_eq!(r.get(Metric::Hd), Some(1.5));
    }

    #[test]
    fn edge_cases_under_policies() {
        let e = GridMask::<f64>::empty(vec![4, 4], vec![1.0, 1.0]).unwrap();
        let a = points2([4, 4], [1.0, 1.0], &[[1, 1]]);
        let cfg = MetricConfig::reference();
        let r = compute_all(&e, &a, &cfg).unwrap();
        assert!(r.empty_a && !r.empty_b);
        assert_eq!(r.get(Metric::Hd), Some(f64::INFINITY));
        assert_eq!(r.get(Metric::Nsd), Some(0.0));
        assert!(r.has_warnings());
        let r = compute_all(&e, &e, &cfg).unwrap();
        assert_eq!(r.get(Metric::Nsd), Some(1.0));
        assert_eq!(r.get(Metric::Masd), Some(0.0));
        let r = compute_all(&e, &a, &cfg.clone().with_edge_policy(EdgePolicy::Error)).unwrap();
        assert!(matches!(
            r.error(Metric::Hd),
            Some(Error::EmptyInput { which: EmptySide::A, .. })
        ));
        let r = compute_all(&a, &e, &cfg.with_edge_policy(EdgePolicy::NaN)).unwrap();
        assert!(r.get(Metric::Assd).unwrap().is_nan());
        assert_eq!(r.stats, ComputeStats::default());
    }

    #[test]
    fn reuse_limits_transform_count() {
        let a = GridMask::<f64>::from_fn(vec![12, 12], vec![1.0, 1.0], |i| i[0] > 3 && i[1] > 2).unwrap();
        let b = GridMask::<f64>::from_fn(vec![12, 12], vec![1.0, 1.0], |i| i[0] > 4 && i[1] < 9).unwrap();
        for name in PRESET_NAMES {
            let cfg = preset::<f64>(name).unwrap().config;
            let r = compute_all(&a, &b, &cfg).unwrap();
            assert!(r.stats.boundary_edts <= 2 * r.stats.extractions, "{name}");
            assert!(r.stats.band_edts <= 2);
        }
        let r = compute_all(&a, &b, &MetricConfig::reference()).unwrap();
        assert_eq!(r.stats.boundary_edts, 2);
        assert_eq!(r.stats.extractions, 1);
    }

    #[test]
    fn unit_flaw_equals_unit_spacing() {
        let a = GridMask::<f64>::from_fn(vec![6, 7, 5], vec![2.0; 3], |i| i[0] > 1 && i[2] < 3).unwrap();
        let b = GridMask::<f64>::from_fn(vec![6, 7, 5], vec![2.0; 3], |i| i[1] > 2).unwrap();
        let miseval = preset::<f64>("miseval").unwrap().config;
        let face = MetricConfig::unweighted(BoundaryMode::ErodeFace);
        let r1 = compute_all(&a, &b, &miseval).unwrap();
        let r2 = compute_all(
            &a.with_spacing(vec![1.0; 3]).unwrap(),
            &b.with_spacing(vec![1.0; 3]).unwrap(),
            &face,
        )
        .unwrap();
        assert_eq!(r1.get(Metric::Hd), r2.get(Metric::Hd));
        assert_eq!(r1.get(Metric::Hd).unwrap(), r2.get(Metric::Hd).unwrap());
    }

    #[test]
    fn mean_of_directed_breaks_hd_identity() {
        // A is a long bar, B a single element at one end: directed maxima differ.
        let a = GridMask::<f64>::from_fn(vec![1, 8], vec![1.0, 1.0], |_| true).unwrap();
        let b = points2([1, 8], [1.0, 1.0], &[[0, 0]]);
        let mut cfg = MetricConfig::unweighted(BoundaryMode::ErodeFace).with_p(100.0);
        let r = compute_all(&a, &b, &cfg).unwrap();
        assert_eq!(r.get(Metric::Hdp), r.get(Metric::Hd));
        cfg.hdp_mode = HdpMode::MeanOfDirected;
        let r = compute_all(&a, &b, &cfg).unwrap();
        assert!(r.get(Metric::Hdp).unwrap() < r.get(Metric::Hd).unwrap());
    }

    #[test]
    fn rejects_mismatched_grids_and_bad_config() {
        let a = GridMask::<f64>::empty(vec![4, 4], vec![1.0, 1.0]).unwrap();
        let b = GridMask::<f64>::empty(vec![4, 5], vec![1.0, 1.0]).unwrap();
        let cfg = MetricConfig::reference();
        assert!(matches!(compute_all(&a, &b, &cfg), Err(Error::GridMismatch(_))));
        assert!(matches!(
            compute_all(&a, &a, &cfg.with_p(0.0)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn unselected_metrics_are_unsupported() {
        let a = points2([4, 4], [1.0, 1.0], &[[1, 1]]);
        let r = compute_selected(
            &a,
            &a,
            &MetricConfig::reference(),
            &[Metric::Hd],
            ComputeOptions::default(),
        )
        .unwrap();
        assert_eq!(r.outcome(Metric::Nsd), Outcome::Unsupported);
        assert_eq!(r.get(Metric::Hd), Some(0.0));
    }

    #[test]
    fn generic_over_f32() {
        let a = GridMask::<f32>::from_fn(vec![6, 6], vec![0.5, 1.0], |i| i[0] < 3).unwrap();
        let b = GridMask::<f32>::from_fn(vec![6, 6], vec![0.5, 1.0], |i| i[0] < 4).unwrap();
        let r = compute_all(&a, &b, &MetricConfig::unweighted(BoundaryMode::ErodeFace)).unwrap();
        assert_eq!(r.get(Metric::Hd), Some(0.5f32));
    }
}
