//! Emulation presets for eleven surveyed open-source tools.
//!
//! Each preset fixes every variant axis to the tool's documented definition
//! and lists the metrics the tool exposes. Only definitional differences are
//! reproduced; crashes and output-encoding quirks are left to the edge
//! policies. DSC is counting-based and available under every preset.

use crate::boundary::BoundaryMode;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::config::{AssdMode, HdpMode, MasdMode, MetricConfig, SpacingMode};
use super::Metric;

pub const PRESET_NAMES: [&str; 11] = [
    "anima",
    "evaluatesegmentation",
    "gdm",
    "medpy",
    "metricsreloaded",
    "miseval",
    "monai",
    "plastimatch",
    "pymia",
    "segmetrics",
    "simpleitk",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset<T> {
    pub name: &'static str,
    pub config: MetricConfig<T>,
    pub supports: &'static [Metric],
    pub notes: &'static str,
}

impl<T: Real> Preset<T> {
    pub fn supports(&self, metric: Metric) -> bool {
        self.supports.contains(&metric)
    }
}

use Metric::*;

pub fn preset<T: Real>(name: &str) -> Result<Preset<T>> {
    let unweighted = MetricConfig::<T>::unweighted;
    let (name, config, supports, notes): (&'static str, MetricConfig<T>, &'static [Metric], &'static str) =
        match name.to_ascii_lowercase().as_str() {
            "anima" => (
                "anima",
                MetricConfig {
                    masd_mode: MasdMode::MaxOfMeans,
                    ..unweighted(BoundaryMode::ErodeFace)
                },
                &[Hd, Masd, Assd, Dsc],
                "MASD is the larger of the two directed means (ContourMeanDistance).",
            ),
            "evaluatesegmentation" => (
                "evaluatesegmentation",
                MetricConfig {
                    hdp_mode: HdpMode::Pooled,
                    ..unweighted(BoundaryMode::ForegroundNonOverlap)
                },
                &[Hd, Hdp, Masd, Dsc],
                "Queries only non-overlapping foreground elements; HDp is fixed at 95 in the tool. \
                 Its non-deterministic optimisation is not emulated.",
            ),
            "gdm" => (
                "gdm",
                MetricConfig::reference(),
                &[Hd, Hdp, Masd, Assd, Nsd, Dsc],
                "Face-centered boundary with size weights. The tool derives element sizes from a \
                 marching-cubes style lookup on a half-shifted grid; here exact face measures are used.",
            ),
            "medpy" => (
                "medpy",
                MetricConfig {
                    hdp_mode: HdpMode::Pooled,
                    ..unweighted(BoundaryMode::ErodeFace)
                },
                &[Hd, Hdp, Assd, Dsc],
                "HDp over the union of both directed sets, fixed at 95 in the tool.",
            ),
            "metricsreloaded" => (
                "metricsreloaded",
                unweighted(BoundaryMode::ErodeFace),
                &[Hd, Hdp, Masd, Assd, Nsd, Biou, Dsc],
                "BIoU uses physical spacing; pair with the unit-spacing flaw mode to reproduce the tool's BIoU bug.",
            ),
            "miseval" => (
                "miseval",
                MetricConfig {
                    spacing_mode: SpacingMode::UnitFlaw,
                    ..unweighted(BoundaryMode::ErodeFace)
                },
                &[Hd, Dsc],
                "Distances ignore the element spacing.",
            ),
            "monai" => (
                "monai",
                unweighted(BoundaryMode::ErodeFace),
                &[Hd, Hdp, Assd, Nsd, Dsc],
                "Default face-connectivity boundary.",
            ),
            "plastimatch" => (
                "plastimatch",
                MetricConfig {
                    hdp_mode: HdpMode::MeanOfDirected,
                    ..unweighted(BoundaryMode::ErodeFace)
                },
                &[Hd, Hdp, Masd, Dsc],
                "HDp is the mean of the two directed percentiles, so HDp(100) can fall below HD.",
            ),
            "pymia" => (
                "pymia",
                MetricConfig {
                    masd_boundary: Some(BoundaryMode::ForegroundAll),
                    masd_mode: MasdMode::MeanOfMeans,
                    assd_mode: AssdMode::PooledMean,
                    ..MetricConfig::reference()
                },
                &[Hd, Hdp, Masd, Nsd, Dsc],
                "Face-centered weighted boundary for HD/HDp/NSD, all foreground for MASD. \
                 Approximate: the tool's 2D path differs from its 3D path in unspecified ways.",
            ),
            "segmetrics" => (
                "segmetrics",
                MetricConfig {
                    hdp_mode: HdpMode::Pooled,
                    ..unweighted(BoundaryMode::ErodeFull)
                },
                &[Hd, Hdp, Assd, Dsc],
                "Full-connectivity erosion; HDp over the union, fixed at 95 in the tool.",
            ),
            "simpleitk" => (
                "simpleitk",
                unweighted(BoundaryMode::ForegroundAll),
                &[Hd, Masd, Dsc],
                "All foreground elements are query points.",
            ),
            _ => return Err(Error::UnknownPreset(name.to_string())),
        };
    Ok(Preset {
        name,
        config,
        supports,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_are_valid() {
        for name in PRESET_NAMES {
            let p = preset::<f64>(name).unwrap();
            assert_eq!(p.name, name);
            p.config.validate().unwrap();
            assert!(p.supports(Metric::Hd));
        }
    }

    #[test]
    fn documented_assignments() {
        assert_eq!(preset::<f64>("gdm").unwrap().config.hdp_mode, HdpMode::WeightedMaxOfDirected);
        assert_eq!(preset::<f64>("anima").unwrap().config.masd_mode, MasdMode::MaxOfMeans);
        assert_eq!(preset::<f64>("plastimatch").unwrap().config.hdp_mode, HdpMode::MeanOfDirected);
        assert_eq!(preset::<f64>("segmetrics").unwrap().config.boundary_mode, BoundaryMode::ErodeFull);
        assert_eq!(
            preset::<f64>("evaluatesegmentation").unwrap().config.boundary_mode,
            BoundaryMode::ForegroundNonOverlap
        );
        assert_eq!(preset::<f64>("miseval").unwrap().config.spacing_mode, SpacingMode::UnitFlaw);
        let pymia = preset::<f64>("pymia").unwrap();
        assert_eq!(pymia.config.boundary_mode, BoundaryMode::Interface);
        assert_eq!(pymia.config.masd_boundary_mode(), BoundaryMode::ForegroundAll);
        assert!(preset::<f64>("metricsreloaded").unwrap().supports(Metric::Biou));
        assert!(!preset::<f64>("monai").unwrap().supports(Metric::Masd));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset::<f64>("nosuch"), Err(Error::UnknownPreset(n)) if n == "nosuch"));
    }
}
