//! Wall-clock timing of full evaluations, with and without cropping.

use std::time::Instant;

use serde::Serialize;

use segdist::metrics::{compute_selected, ComputeOptions, ComputeStats};
use segdist::{io::load_mask, preset, Mask, Metric};

use crate::dataset::Manifest;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchParams {
    pub presets: Vec<String>,
    pub repetitions: usize,
    /// Crop settings to time, in output order.
    pub crop: Vec<bool>,
    pub p: f64,
    pub tau: f64,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            presets: vec!["gdm".into()],
            repetitions: 3,
            crop: vec![true, false],
            p: 95.0,
            tau: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub pair_id: String,
    pub preset: String,
    pub crop: bool,
    pub repetitions: usize,
    pub median_seconds: f64,
    pub boundary_edts: usize,
    pub band_edts: usize,
    pub extractions: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times every supported metric of each preset on each pair, sequentially.
pub fn bench(manifest: &Manifest, params: &BenchParams) -> Result<Vec<BenchRow>> {
    if params.repetitions == 0 {
        return Err(HarnessError::Invalid("repetitions must be at least 1".into()));
    }
    let presets = params
        .presets
        .iter()
        .map(|n| {
            let mut p = preset::<f64>(n)?;
            p.config = p.config.with_p(params.p).with_tau(params.tau);
            p.config.validate()?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for row in &manifest.rows {
        let a: Mask = load_mask(&manifest.resolve(&row.reference))?;
        let b: Mask = load_mask(&manifest.resolve(&row.prediction))?;
        for p in &presets {
            let wanted: Vec<Metric> = Metric::ALL.into_iter().filter(|&m| p.supports(m)).collect();
            for &crop in &params.crop {
                let options = ComputeOptions {
                    crop,
                    ..ComputeOptions::default()
                };
                let mut times = Vec::with_capacity(params.repetitions);
                let mut stats = ComputeStats::default();
                for _ in 0..params.repetitions {
                    let start = Instant::now();
                    let r = compute_selected(&a, &b, &p.config, &wanted, options)?;
                    times.push(start.elapsed().as_secs_f64());
                    stats = r.stats;
                }
                out.push(BenchRow {
                    pair_id: row.id.clone(),
                    preset: p.name.to_string(),
                    crop,
                    repetitions: params.repetitions,
                    median_seconds: median(times),
                    boundary_edts: stats.boundary_edts,
                    band_edts: stats.band_edts,
                    extractions: stats.extractions,
                });
            }
        }
    }
    Ok(out)
}
