//! Synthetic datasets, batch evaluation across presets and spacings,
//! deviation statistics, paired significance tests and timing.

pub mod batch;
pub mod bench;
pub mod dataset;
pub mod deviation;
mod error;
pub mod wilcoxon;

pub use batch::{read_results, run_batch, write_results, BatchParams, ResultRow};
pub use bench::{bench, BenchParams, BenchRow};
pub use dataset::{gen_dataset, synth_pair, DatasetStats, GenParams, Manifest, ManifestRow};
pub use deviation::{compare, deviations, summarize, write_comparison, Comparison, DeviationRecord, DeviationSummary};
pub use error::{HarnessError, Result};
pub use wilcoxon::{wilcoxon_paired, Wilcoxon};

/// Parses `"1,1,1;2,2,2"` into spacing vectors.
pub fn parse_spacings(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_list)
        .collect()
}

/// Parses a comma-separated list of positive finite numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| HarnessError::Invalid(format!("`{v}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(HarnessError::Invalid(format!("expected positive numbers, got `{text}`")));
    }
    Ok(values)
}

/// Spacing label used in result tables, e.g. `0.5x0.5x2`.
pub fn spacing_label(spacing: &[f64]) -> String {
    spacing.iter().map(f64::to_string).collect::<Vec<_>>().join("x")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_lists() {
        assert_eq!(
            parse_spacings("1,1,1; 2,2,2;0.5,0.5,2").unwrap(),
            vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0], vec![0.5, 0.5, 2.0]]
        );
        assert!(parse_spacings("1,0,1").is_err());
        assert!(parse_spacings("1,a").is_err());
        assert_eq!(spacing_label(&[0.5, 0.5, 2.0]), "0.5x0.5x2");
    }
}
