//! Per-pair deviations of each preset from a reference preset, their
//! summaries, and paired significance tests.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::batch::ResultRow;
use crate::dataset::Manifest;
use crate::error::{HarnessError, Result};
use crate::wilcoxon::{wilcoxon_paired, Wilcoxon, ALPHA};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRecord {
    pub pair_id: String,
    pub spacing: String,
    pub metric: String,
    pub candidate: String,
    pub reference: String,
    pub candidate_value: f64,
    pub reference_value: f64,
    /// `candidate_value - reference_value`.
    pub delta: f64,
    /// Both values finite, hence `delta` too.
    pub finite: bool,
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationSummary {
    pub candidate: String,
    pub reference: String,
    pub metric: String,
    pub spacing: String,
    /// `all`, or a manifest tag.
    pub stratum: String,
    /// Finite deltas summarised.
    pub n: usize,
    /// Records left out because a value was infinite or NaN.
    pub excluded: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    /// Population standard deviation (divisor `n`).
    pub sd: Option<f64>,
}

/// Pairs every preset's rows with the reference preset's rows on
/// (pair, spacing, metric). Rows without a value on either side are skipped.
pub fn deviations(
    rows: &[ResultRow],
    reference: &str,
    tag_of: impl Fn(&str) -> Option<String>,
) -> Result<Vec<DeviationRecord>> {
    if !rows.iter().any(|r| r.preset == reference) {
        return Err(HarnessError::Invalid(format!("reference preset `{reference}` not in results")));
    }
    let reference_values: HashMap<(&str, &str, &str), f64> = rows
        .iter()
        .filter(|r| r.preset == reference)
        .filter_map(|r| Some(((r.pair_id.as_str(), r.spacing.as_str(), r.metric.as_str()), r.value?)))
        .collect();
    let mut candidates: Vec<&str> = Vec::new();
    for r in rows {
        if !candidates.contains(&r.preset.as_str()) {
            candidates.push(&r.preset);
        }
    }
    let mut out = Vec::new();
    for cand in candidates {
        for r in rows.iter().filter(|r| r.preset == cand) {
            let (Some(c), Some(&m)) = (
                r.value,
                reference_values.get(&(r.pair_id.as_str(), r.spacing.as_str(), r.metric.as_str())),
            ) else {
                continue;
            };
            out.push(DeviationRecord {
                pair_id: r.pair_id.clone(),
                spacing: r.spacing.clone(),
                metric: r.metric.clone(),
                candidate: cand.to_string(),
                reference: reference.to_string(),
                candidate_value: c,
                reference_value: m,
                delta: c - m,
                finite: c.is_finite() && m.is_finite(),
                tag: tag_of(&r.pair_id),
            });
        }
    }
    Ok(out)
}

struct Group<'a> {
    summary: DeviationSummary,
    records: Vec<&'a DeviationRecord>,
}

fn groups(records: &[DeviationRecord]) -> Vec<Group<'_>> {
    let mut index: HashMap<(String, String, String, String), usize> = HashMap::new();
    let mut out: Vec<Group> = Vec::new();
    for r in records {
        let strata = std::iter::once("all".to_string()).chain(r.tag.clone());
        for stratum in strata {
            let key = (r.candidate.clone(), r.spacing.clone(), r.metric.clone(), stratum.clone());
            let i = *index.entry(key).or_insert_with(|| {
                out.push(Group {
                    summary: DeviationSummary {
                        candidate: r.candidate.clone(),
                        reference: r.reference.clone(),
                        metric: r.metric.clone(),
                        spacing: r.spacing.clone(),
                        stratum,
                        n: 0,
                        excluded: 0,
                        min: None,
                        max: None,
                        mean: None,
                        sd: None,
                    },
                    records: Vec::new(),
                });
                out.len() - 1
            });
            out[i].records.push(r);
        }
    }
    for g in &mut out {
        let finite: Vec<f64> = g.records.iter().filter(|r| r.finite).map(|r| r.delta).collect();
        let s = &mut g.summary;
        s.n = finite.len();
        s.excluded = g.records.len() - finite.len();
        if !finite.is_empty() {
            let n = finite.len() as f64;
            let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
            let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = (finite.iter().sum::<f64>() / n).clamp(min, max);
            let var = finite.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
            s.min = Some(min);
            s.max = Some(max);
            s.mean = Some(mean);
            s.sd = Some(var.sqrt());
        }
    }
    out
}

/// One summary per (candidate, spacing, metric, stratum), in first-seen order.
pub fn summarize(records: &[DeviationRecord]) -> Vec<DeviationSummary> {
    groups(records).into_iter().map(|g| g.summary).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub summary: DeviationSummary,
    /// Paired test of candidate vs reference on finite pairs; absent for
    /// the reference itself and for groups with no finite pairs.
    pub test: Option<Wilcoxon>,
}

/// Deviations, summaries and Bonferroni-corrected tests, with the number
/// of tests run used as the correction count.
pub fn compare(rows: &[ResultRow], reference: &str, manifest: Option<&Manifest>) -> Result<(Vec<Comparison>, usize)> {
    let records = deviations(rows, reference, |id| manifest.and_then(|m| m.tag_of(id)).map(str::to_string))?;
    let groups = groups(&records);
    let testable = |g: &Group| g.summary.candidate != reference && g.summary.n > 0;
    let corrections = groups.iter().filter(|g| testable(g)).count().max(1);
    let out = groups
        .into_iter()
        .map(|g| {
            let test = if testable(&g) {
                let (x, y): (Vec<f64>, Vec<f64>) = g
                    .records
                    .iter()
                    .filter(|r| r.finite)
                    .map(|r| (r.candidate_value, r.reference_value))
                    .unzip();
                Some(wilcoxon_paired(&x, &y, corrections)?)
            } else {
                None
            };
            Ok(Comparison {
                summary: g.summary,
                test,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, corrections))
}

pub const COMPARISON_HEADER: [&str; 13] = [
    "reference", "preset", "metric", "spacing", "stratum", "n", "excluded", "min", "max", "mean", "sd", "p_value",
    "significant",
];

pub fn write_comparison<W: Write>(rows: &[Comparison], corrections: usize, mut out: W) -> csv::Result<()> {
    writeln!(
        out,
        "# delta = preset - reference over finite pairs; sd is the population standard deviation (divisor n); \
         p_value is a two-sided paired Wilcoxon signed-rank test with zero differences dropped; \
         significant means p_value < {ALPHA}/{corrections}"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARISON_HEADER)?;
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for c in rows {
        let s = &c.summary;
        w.write_record([
            s.reference.clone(),
            s.candidate.clone(),
            s.metric.clone(),
            s.spacing.clone(),
            s.stratum.clone(),
            s.n.to_string(),
            s.excluded.to_string(),
            num(s.min),
            num(s.max),
            num(s.mean),
            num(s.sd),
            num(c.test.map(|t| t.p_value)),
            c.test.map(|t| t.significant.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(pair: &str, preset: &str, value: Option<f64>) -> ResultRow {
        ResultRow {
            pair_id: pair.into(),
            spacing: "1x1".into(),
            preset: preset.into(),
            metric: "hd".into(),
            value,
            flag: "ok".into(),
        }
    }

    #[test]
    fn two_deltas() {
        let rows = vec![
            row("p1", "ref", Some(2.0)),
            row("p2", "ref", Some(1.0)),
            row("p1", "c", Some(1.0)),
            row("p2", "c", Some(4.0)),
        ];
        let recs = deviations(&rows, "ref", |_| None).unwrap();
        let s = summarize(&recs);
        let c = s.iter().find(|s| s.candidate == "c").unwrap();
        assert_eq!((c.min, c.max, c.mean, c.sd), (Some(-1.0), Some(3.0), Some(1.0), Some(2.0)));
        assert_eq!(c.excluded, 0);
    }

    #[test]
    fn self_deviation_is_zero() {
        let rows: Vec<ResultRow> = (0..5).map(|i| row(&format!("p{i}"), "gdm", Some(i as f64 * 0.7))).collect();
        let recs = deviations(&rows, "gdm", |_| None).unwrap();
        assert!(recs.iter().all(|r| r.delta == 0.0));
        let s = &summarize(&recs)[0];
        assert_eq!((s.min, s.max, s.mean, s.sd), (Some(0.0), Some(0.0), Some(0.0), Some(0.0)));
    }

    #[test]
    fn infinite_values_are_counted_not_summarised() {
        let rows = vec![
            row("p1", "ref", Some(2.0)),
            row("p2", "ref", Some(f64::INFINITY)),
            row("p1", "c", Some(3.0)),
            row("p2", "c", Some(f64::INFINITY)),
        ];
        let recs = deviations(&rows, "ref", |_| None).unwrap();
        assert!(!recs.iter().find(|r| r.candidate == "c" && r.pair_id == "p2").unwrap().finite);
        let s = summarize(&recs);
        let c = s.iter().find(|s| s.candidate == "c").unwrap();
        assert_eq!((c.n, c.excluded, c.mean), (1, 1, Some(1.0)));
    }

    #[test]
    fn strata_follow_tags() {
        let rows = vec![
            row("p1", "ref", Some(0.0)),
            row("p2", "ref", Some(0.0)),
            row("p1", "c", Some(1.0)),
            row("p2", "c", Some(3.0)),
        ];
        let recs = deviations(&rows, "ref", |id| Some(if id == "p1" { "small" } else { "large" }.into())).unwrap();
        let s: Vec<_> = summarize(&recs).into_iter().filter(|s| s.candidate == "c").collect();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].stratum, "all");
        assert_eq!(s.iter().find(|s| s.stratum == "large").unwrap().mean, Some(3.0));
    }

    #[test]
    fn missing_reference_is_an_error() {
        assert!(deviations(&[row("p", "c", Some(1.0))], "gdm", |_| None).is_err());
    }

    #[test]
    fn comparison_csv_documents_sd() {
        let rows: Vec<ResultRow> = (0..6)
            .flat_map(|i| {
                let id = format!("p{i}");
                [row(&id, "ref", Some(0.0)), row(&id, "c", Some(1.0 + i as f64))]
            })
            .collect();
        let (cmp, corrections) = compare(&rows, "ref", None).unwrap();
        assert_eq!(corrections, 1);
        let c = cmp.iter().find(|c| c.summary.candidate == "c").unwrap();
        assert_eq!(c.test.unwrap().p_value, 0.03125);
        let mut buf = Vec::new();
        write_comparison(&cmp, corrections, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# "));
        assert!(text.contains("population standard deviation"));
        assert!(text.contains("reference,preset,metric,spacing,stratum,n,excluded,min,max,mean,sd,p_value,significant"));
    }
}
