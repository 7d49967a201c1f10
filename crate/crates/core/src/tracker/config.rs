use crate::error::{Error, Result};
use crate::kalman::FilterConfig;

/// Tracker parameters. Defaults are the values used on most benchmarks;
/// crowded scenes typically lower `det_threshold` to 0.4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Detections with confidence at or below this are discarded.
    pub det_threshold: f64,
    pub iou_gate: f64,
    /// Weight of the direction-consistency term.
    pub lambda: f64,
    /// Frame distance of the observations defining a track's direction.
    pub delta_t: u32,
    /// Tracks unobserved for this many frames are removed.
    pub max_age: u32,
    pub min_hits: u32,
    pub enable_oru: bool,
    pub enable_ocm: bool,
    pub enable_ocr: bool,
    pub filter: FilterConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            det_threshold: 0.6,
            iou_gate: 0.3,
            lambda: 0.2,
            delta_t: 3,
            max_age: 30,
            min_hits: 3,
            enable_oru: true,
            enable_ocm: true,
            enable_ocr: true,
            filter: FilterConfig::default(),
        }
    }
}

impl TrackerConfig {
    /// Plain SORT: every observation-centric stage disabled.
    pub fn sort_baseline() -> Self {
        Self {
            enable_oru: false,
            enable_ocm: false,
            enable_ocr: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must lie in [0, 1]")))
            }
        };
        in_unit("det_threshold", self.det_threshold)?;
        in_unit("iou_gate", self.iou_gate)?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!(
                "lambda = {} must be finite and non-negative",
                self.lambda
            )));
        }
        if self.delta_t < 1 {
            return Err(Error::Config("delta_t must be at least 1".into()));
        }
        if self.max_age < 1 {
            return Err(Error::Config("max_age must be at least 1".into()));
        }
        Ok(())
    }

    /// Direction weight actually applied in association.
    pub fn effective_lambda(&self) -> f64 {
        if self.enable_ocm {
            self.lambda
        } else {
            0.0
        }
    }
}
