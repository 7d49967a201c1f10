use thiserror::Error;

/// Errors produced by the tracking library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate box [{x1}, {y1}, {x2}, {y2}]: width and height must be positive")]
    DegenerateBox { x1: f64, y1: f64, x2: f64, y2: f64 },

    #[error("invalid state: area {area} and aspect ratio {ratio} must both be positive and finite")]
    InvalidState { area: f64, ratio: f64 },

    #[error("innovation covariance is not positive definite")]
    SingularInnovation,

    #[error("frame {got} is not after the previous frame {previous}")]
    NonMonotonicFrame { previous: u32, got: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate entry for id {id} at frame {frame}")]
    DuplicateEntry { id: i64, frame: u32 },

    #[error("invalid scene plan: {0}")]
    Plan(String),

    #[error("invalid replay: {0}")]
    InvalidReplay(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
