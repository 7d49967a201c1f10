use crate::bbox::BBox;
use crate::error::{Error, Result};

/// One detector box with its confidence at a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame: u32,
    pub bbox: BBox,
    pub confidence: f64,
}

impl Detection {
    pub fn new(frame: u32, bbox: BBox, confidence: f64) -> Result<Self> {
        bbox.validate()?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Config(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(Self {
            frame,
            bbox,
            confidence,
        })
    }
}
