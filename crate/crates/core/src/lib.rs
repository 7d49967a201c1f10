//! Observation-centric SORT: Kalman-filter tracking by detection with
//! observation-centric re-update, momentum and recovery, plus a synthetic
//! noise laboratory, offline post-processing, MOTChallenge text I/O and
//! desk-scale evaluation metrics.

pub mod association;
pub mod bbox;
pub mod detection;
pub mod error;
pub mod kalman;
pub mod metrics;
pub mod mot;
pub mod noise;
pub mod postprocess;
pub mod tracker;

pub use bbox::BBox;
pub use detection::Detection;
pub use error::{Error, Result};
pub use kalman::{FilterConfig, FilterSnapshot, FilterState, Observation, StateVector};
pub use postprocess::{TrackEntry, TrackletSet};
pub use tracker::{FrameOutput, TrackOutput, Tracker, TrackerConfig};
