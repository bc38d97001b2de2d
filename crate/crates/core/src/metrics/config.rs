use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryMode;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingMode {
    /// Distances use the grid's physical spacing.
    Physical,
    /// Distances use unit spacing regardless of the grid (the flaw some
    /// tools have); `tau` stays in mm.
    UnitFlaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HdpMode {
    /// Percentile of each directed set, then the larger of the two.
    MaxOfDirected,
    /// Percentile of the union of both directed sets.
    Pooled,
    /// Mean of the two directed percentiles.
    MeanOfDirected,
    /// Size-weighted percentile of each directed set, then the larger.
    WeightedMaxOfDirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MasdMode {
    MeanOfMeans,
    MaxOfMeans,
    WeightedMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssdMode {
    PooledMean,
    WeightedPooledMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NsdMode {
    Count,
    WeightedArea,
}

/// What to report when one or both masks are empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgePolicy {
    /// One empty: `∞` mm / 0. Both empty: 0 mm / 1. Always warns.
    Reloaded,
    /// NaN with a warning.
    #[serde(rename = "nan")]
    NaN,
    /// Refuse with [`crate::Error::EmptyInput`].
    Error,
}

impl std::str::FromStr for EdgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reloaded" => Ok(Self::Reloaded),
            "nan" => Ok(Self::NaN),
            "error" => Ok(Self::Error),
            other => Err(Error::InvalidConfig(format!("unknown edge policy `{other}`"))),
        }
    }
}

impl std::fmt::Display for EdgePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Reloaded => "reloaded",
            Self::NaN => "nan",
            Self::Error => "error",
        })
    }
}

/// One point on every implementation-variant axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig<T> {
    pub boundary_mode: BoundaryMode,
    /// Extraction used for MASD only, when it differs from `boundary_mode`.
    pub masd_boundary: Option<BoundaryMode>,
    pub spacing_mode: SpacingMode,
    pub hdp_mode: HdpMode,
    pub masd_mode: MasdMode,
    pub assd_mode: AssdMode,
    pub nsd_mode: NsdMode,
    pub edge_policy: EdgePolicy,
    /// Percentile for HDp, in (0, 100].
    pub p: T,
    /// Tolerance in mm for NSD and BIoU.
    pub tau: T,
}

impl<T: Real> MetricConfig<T> {
    /// Face-centered boundaries with size-weighted aggregation everywhere.
    pub fn reference() -> Self {
        Self {
            boundary_mode: BoundaryMode::Interface,
            masd_boundary: None,
            spacing_mode: SpacingMode::Physical,
            hdp_mode: HdpMode::WeightedMaxOfDirected,
            masd_mode: MasdMode::WeightedMean,
            assd_mode: AssdMode::WeightedPooledMean,
            nsd_mode: NsdMode::WeightedArea,
            edge_policy: EdgePolicy::Reloaded,
            p: T::of(95.0),
            tau: T::of(2.0),
        }
    }

    /// Unweighted aggregation over the given extraction.
    pub fn unweighted(boundary_mode: BoundaryMode) -> Self {
        Self {
            boundary_mode,
            hdp_mode: HdpMode::MaxOfDirected,
            masd_mode: MasdMode::MeanOfMeans,
            assd_mode: AssdMode::PooledMean,
            nsd_mode: NsdMode::Count,
            ..Self::reference()
        }
    }

    pub fn with_p(mut self, p: T) -> Self {
        self.p = p;
        self
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_edge_policy(mut self, policy: EdgePolicy) -> Self {
        self.edge_policy = policy;
        self
    }

    pub fn masd_boundary_mode(&self) -> BoundaryMode {
        self.masd_boundary.unwrap_or(self.boundary_mode)
    }

    pub fn validate(&self) -> Result<()> {
        let hundred = T::of(100.0);
        if !(self.p > T::zero() && self.p <= hundred) {
            return Err(Error::InvalidConfig(format!("p = {} outside (0, 100]", self.p)));
        }
        if !(self.tau > T::zero() && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!("tau = {} must be positive", self.tau)));
        }
        let need = |weighted: bool, mode: BoundaryMode, what: &str| {
            if weighted && !mode.is_weighted() {
                Err(Error::InvalidConfig(format!(
                    "{what} is size-weighted but {mode:?} extraction carries no element sizes"
                )))
            } else {
                Ok(())
            }
        };
        need(self.hdp_mode == HdpMode::WeightedMaxOfDirected, self.boundary_mode, "HDp")?;
        need(self.assd_mode == AssdMode::WeightedPooledMean, self.boundary_mode, "ASSD")?;
        need(self.nsd_mode == NsdMode::WeightedArea, self.boundary_mode, "NSD")?;
        need(self.masd_mode == MasdMode::WeightedMean, self.masd_boundary_mode(), "MASD")?;
        Ok(())
    }
}

impl<T: Real> Default for MetricConfig<T> {
    fn default() -> Self {
        Self::reference()
    }
}
