//! Every pair × spacing × preset × supported metric, one row each.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use segdist::metrics::{compute_selected, ComputeOptions, EdgePolicy, Outcome};
use segdist::{io::load_mask, preset, resample_nn, EmptySide, Mask, Metric, Preset};

use crate::dataset::Manifest;
use crate::error::{HarnessError, Result};
use crate::spacing_label;

pub const HEADER: [&str; 6] = ["pair_id", "spacing", "preset", "metric", "value", "flag"];

#[derive(Debug, Clone, PartialEq)]
pub struct BatchParams {
    pub presets: Vec<String>,
    /// Target spacings; empty keeps each pair's own spacing.
    pub spacings: Vec<Vec<f64>>,
    pub p: f64,
    pub tau: f64,
    pub edge_policy: EdgePolicy,
    pub crop: bool,
}

impl Default for BatchParams {
    fn default() -> Self {
        Self {
            presets: vec!["gdm".into()],
            spacings: Vec::new(),
            p: 95.0,
            tau: 2.0,
            edge_policy: EdgePolicy::Reloaded,
            crop: true,
        }
    }
}

/// One result line. `value` is `None` when the metric was refused or the
/// row failed; `flag` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub pair_id: String,
    pub spacing: String,
    pub preset: String,
    pub metric: String,
    pub value: Option<f64>,
    pub flag: String,
}

impl ResultRow {
    /// Refused under the error policy, or failed to load or compute.
    pub fn is_error(&self) -> bool {
        self.flag.starts_with("failed") || self.flag.starts_with("error")
    }
}

fn side(s: EmptySide) -> &'static str {
    match s {
        EmptySide::A => "a",
        EmptySide::B => "b",
        EmptySide::Both => "both",
    }
}

pub fn run_batch(manifest: &Manifest, params: &BatchParams) -> Result<Vec<ResultRow>> {
    if params.presets.is_empty() {
        return Err(HarnessError::Invalid("no presets given".into()));
    }
    let presets = params
        .presets
        .iter()
        .map(|name| {
            let mut p = preset::<f64>(name)?;
            p.config = p
                .config
                .with_p(params.p)
                .with_tau(params.tau)
                .with_edge_policy(params.edge_policy);
            p.config.validate()?;
            Ok(p)
        })
        .collect::<Result<Vec<Preset<f64>>>>()?;
    let options = ComputeOptions {
        crop: params.crop,
        ..ComputeOptions::default()
    };
    let rows: Vec<Vec<ResultRow>> = manifest
        .rows
        .par_iter()
        .map(|row| {
            let loaded = load_mask::<f64>(&manifest.resolve(&row.reference))
                .and_then(|a| Ok((a, load_mask::<f64>(&manifest.resolve(&row.prediction))?)));
            pair_rows(&row.id, loaded, &presets, params, options)
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn pair_rows(
    id: &str,
    loaded: segdist::Result<(Mask, Mask)>,
    presets: &[Preset<f64>],
    params: &BatchParams,
    options: ComputeOptions,
) -> Vec<ResultRow> {
    let mut out = Vec::new();
    let error_rows = |out: &mut Vec<ResultRow>, label: &str, p: &Preset<f64>, msg: &str| {
        for m in Metric::ALL.into_iter().filter(|&m| p.supports(m)) {
            out.push(ResultRow {
                pair_id: id.to_string(),
                spacing: label.to_string(),
                preset: p.name.to_string(),
                metric: m.name().to_string(),
                value: None,
                flag: format!("error: {msg}"),
            });
        }
    };
    let (a, b) = match loaded {
        Ok(pair) => pair,
        Err(e) => {
            let labels: Vec<String> = if params.spacings.is_empty() {
                vec!["native".into()]
            } else {
                params.spacings.iter().map(|s| spacing_label(s)).collect()
            };
            for label in &labels {
                for p in presets {
                    error_rows(&mut out, label, p, &e.to_string());
                }
            }
            return out;
        }
    };
    let targets: Vec<Vec<f64>> = if params.spacings.is_empty() {
        vec![a.spacing().to_vec()]
    } else {
        params.spacings.clone()
    };
    for target in &targets {
        let label = spacing_label(target);
        let resampled = resample_nn(&a, target).and_then(|ra| Ok((ra, resample_nn(&b, target)?)));
        let (ra, rb) = match resampled {
            Ok(pair) => pair,
            Err(e) => {
                for p in presets {
                    error_rows(&mut out, &label, p, &e.to_string());
                }
                continue;
            }
        };
        for p in presets {
            let wanted: Vec<Metric> = Metric::ALL.into_iter().filter(|&m| p.supports(m)).collect();
            match compute_selected(&ra, &rb, &p.config, &wanted, options) {
                Ok(result) => {
                    for m in wanted {
                        let (value, flag) = match result.outcome(m) {
                            Outcome::Value { value, warning: None } => (Some(value), "ok".to_string()),
                            Outcome::Value {
                                value,
                                warning: Some(s),
                            } => (Some(value), format!("warn_empty_{}", side(s))),
                            Outcome::Failed { empty } => (None, format!("failed_empty_{}", side(empty))),
                            Outcome::Unsupported => (None, "unsupported".to_string()),
                        };
                        out.push(ResultRow {
                            pair_id: id.to_string(),
                            spacing: label.clone(),
                            preset: p.name.to_string(),
                            metric: m.name().to_string(),
                            value,
                            flag,
                        });
                    }
                }
                Err(e) => error_rows(&mut out, &label, p, &e.to_string()),
            }
        }
    }
    out
}

pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([&r.pair_id, &r.spacing, &r.preset, &r.metric, &value, &r.flag])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
    let header = reader.headers().map_err(HarnessError::csv(path))?.clone();
    if header.iter().ne(HEADER) {
        return Err(HarnessError::Invalid(format!(
            "{}: expected header {}, got {}",
            path.display(),
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(HarnessError::csv(path))?;
        let value = match &rec[4] {
            "" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|e| HarnessError::Invalid(format!("{}: value `{v}`: {e}", path.display())))?,
            ),
        };
        rows.push(ResultRow {
            pair_id: rec[0].to_string(),
            spacing: rec[1].to_string(),
            preset: rec[2].to_string(),
            metric: rec[3].to_string(),
            value,
            flag: rec[5].to_string(),
        });
    }
    Ok(rows)
}
