//! Metric aggregators, variant axes, edge-case policies and tool presets.

mod aggregate;
mod compute;
mod config;
mod edge;
mod overlap;
mod preset;

pub use aggregate::{
    assd, hd, hdp, masd, nsd, percentile_position, percentile_sorted, weighted_percentile,
};
pub use compute::{
    compute_all, compute_selected, ComputeOptions, ComputeStats, MetricEntry, MetricResult,
    Outcome,
};
pub use config::{
    AssdMode, EdgePolicy, HdpMode, MasdMode, MetricConfig, NsdMode, SpacingMode,
};
pub use edge::edge_case;
pub use overlap::{biou, dsc, inner_band};
pub use preset::{preset, Preset, PRESET_NAMES};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Hd,
    Hdp,
    Masd,
    Assd,
    Nsd,
    Biou,
    Dsc,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Hd,
        Metric::Hdp,
        Metric::Masd,
        Metric::Assd,
        Metric::Nsd,
        Metric::Biou,
        Metric::Dsc,
    ];

    /// The six distance-based metrics.
    pub const DISTANCE: [Metric; 6] = [
        Metric::Hd,
        Metric::Hdp,
        Metric::Masd,
        Metric::Assd,
        Metric::Nsd,
        Metric::Biou,
    ];

    /// Absolute metrics are in mm; the rest are ratios in [0, 1].
    pub fn is_absolute(self) -> bool {
        matches!(self, Metric::Hd | Metric::Hdp | Metric::Masd | Metric::Assd)
    }

    /// Whether the metric is built from the two directed distance sets.
    pub fn uses_distances(self) -> bool {
        matches!(
            self,
            Metric::Hd | Metric::Hdp | Metric::Masd | Metric::Assd | Metric::Nsd
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Hd => "hd",
            Metric::Hdp => "hdp",
            Metric::Masd => "masd",
            Metric::Assd => "assd",
            Metric::Nsd => "nsd",
            Metric::Biou => "biou",
            Metric::Dsc => "dsc",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| crate::Error::InvalidConfig(format!("unknown metric `{s}`")))
    }
}
