//! Distance-based segmentation metrics (HD, HDp, MASD, ASSD, NSD, BIoU, plus
//! DSC) on 2D/3D binary masks with anisotropic spacing.
//!
//! Every place where published implementations disagree is a named variant
//! axis on [`MetricConfig`]: boundary extraction, percentile and mean
//! aggregation, size weighting, spacing handling and empty-input policy.
//! [`preset`] maps tool names onto those axes.
//!
//! The core is generic over the scalar type; [`Mask`], [`Config`] and
//! [`MetricResult64`] fix it to `f64`.

pub mod boundary;
pub mod distance;
mod error;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod oracle;
mod scalar;

pub use boundary::{BoundaryMode, BoundarySet};
pub use distance::{DistanceField, DistanceSet};
pub use error::{EmptySide, Error, Result};
pub use grid::{crop_joint, resample_nn, Crop, GridMask};
pub use io::{load_mask, save_mask};
pub use metrics::{
    compute_all, compute_selected, preset, ComputeOptions, EdgePolicy, Metric, MetricConfig,
    MetricResult, Outcome, Preset, PRESET_NAMES,
};
pub use oracle::oracle_all_metrics;
pub use scalar::Real;

pub type Mask = GridMask<f64>;
pub type Mask32 = GridMask<f32>;
pub type Config = MetricConfig<f64>;
pub type MetricResult64 = MetricResult<f64>;
