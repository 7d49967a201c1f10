//! Ground-truth trajectories and noisy detections for synthetic scenes.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng;
use crate::bbox::BBox;
use crate::detection::Detection;
use crate::error::{Error, Result};
use crate::postprocess::{TrackEntry, TrackletSet};

/// How a target's center moves, in pixels per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    /// Piecewise-linear path through `(frame, u, v)` waypoints; the target
    /// exists from the first waypoint's frame to the last one's.
    Waypoints { points: Vec<(u32, f64, f64)> },
    /// Linear carrier with a sinusoidal offset perpendicular to it.
    Sinusoidal {
        start_frame: u32,
        end_frame: u32,
        origin: (f64, f64),
        velocity: (f64, f64),
        amplitude: f64,
        period: f64,
    },
}

impl Motion {
    pub fn span(&self) -> (u32, u32) {
        match self {
            Motion::Waypoints { points } => (points.first().map_or(0, |p| p.0), points.last().map_or(0, |p| p.0)),
            Motion::Sinusoidal {
                start_frame, end_frame, ..
            } => (*start_frame, *end_frame),
        }
    }

    /// Center at `frame`, or `None` outside the target's lifetime.
    pub fn center(&self, frame: u32) -> Option<(f64, f64)> {
        let (first, last) = self.span();
        if frame < first || frame > last {
            return None;
        }
        match self {
            Motion::Waypoints { points } => {
                let i = points.partition_point(|p| p.0 <= frame);
                let a = points[i - 1];
                let Some(b) = points.get(i) else {
                    return Some((a.1, a.2));
                };
                let w = f64::from(frame - a.0) / f64::from(b.0 - a.0);
                Some((a.1 + (b.1 - a.1) * w, a.2 + (b.2 - a.2) * w))
            }
            Motion::Sinusoidal {
                start_frame,
                origin,
                velocity,
                amplitude,
                period,
                ..
            } => {
                let k = f64::from(frame - start_frame);
                let speed = velocity.0.hypot(velocity.1);
                let normal = if speed > 0.0 {
                    (-velocity.1 / speed, velocity.0 / speed)
                } else {
                    (0.0, 1.0)
                };
                let offset = amplitude * (2.0 * std::f64::consts::PI * k / period).sin();
                Some((
                    origin.0 + velocity.0 * k + offset * normal.0,
                    origin.1 + velocity.1 * k + offset * normal.1,
                ))
            }
        }
    }
}

fn default_confidence() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPlan {
    /// Box width and height in pixels.
    pub size: (f64, f64),
    pub motion: Motion,
    /// Half-open `[start, end)` frame ranges without detections.
    #[serde(default)]
    pub occlusions: Vec<(u32, u32)>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl TargetPlan {
    pub fn occluded(&self, frame: u32) -> bool {
        self.occlusions.iter().any(|&(a, b)| frame >= a && frame < b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePlan {
    /// Frames are numbered `1..=frames`.
    pub frames: u32,
    #[serde(default)]
    pub sigma_u: f64,
    #[serde(default)]
    pub sigma_v: f64,
    #[serde(default)]
    pub false_negative_rate: f64,
    #[serde(default)]
    pub seed: u64,
    pub targets: Vec<TargetPlan>,
}

impl ScenePlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Plan(m));
        if !(self.sigma_u >= 0.0 && self.sigma_v >= 0.0) {
            return bad(format!(
                "noise sigmas must be non-negative ({}, {})",
                self.sigma_u, self.sigma_v
            ));
        }
        if !(0.0..=1.0).contains(&self.false_negative_rate) {
            return bad(format!(
                "false-negative rate {} outside [0, 1]",
                self.false_negative_rate
            ));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !(t.size.0 > 0.0 && t.size.1 > 0.0) {
                return bad(format!("target {i}: size must be positive"));
            }
            if !(0.0..=1.0).contains(&t.confidence) {
                return bad(format!("target {i}: confidence outside [0, 1]"));
            }
            match &t.motion {
                Motion::Waypoints { points } => {
                    if points.is_empty() || points.windows(2).any(|w| w[1].0 <= w[0].0) {
                        return bad(format!(
                            "target {i}: waypoints must be non-empty with increasing frames"
                        ));
                    }
                }
                Motion::Sinusoidal {
                    start_frame,
                    end_frame,
                    period,
                    ..
                } => {
                    if end_frame < start_frame || *period <= 0.0 {
                        return bad(format!("target {i}: bad sinusoidal span or period"));
                    }
                }
            }
            for &(a, b) in &t.occlusions {
                if a >= b || a < 1 || b > self.frames + 1 {
                    return bad(format!(
                        "target {i}: occlusion [{a}, {b}) outside frames 1..={}",
                        self.frames
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ground truth (id = target index + 1) and the detections derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub frames: u32,
    pub ground_truth: TrackletSet,
    pub detections: BTreeMap<u32, Vec<Detection>>,
}

/// Samples a scene. Every target consumes the same number of random draws
/// on every frame of its lifetime, so toggling an occlusion does not
/// disturb the noise of other detections.
pub fn generate_scene(plan: &ScenePlan) -> Result<Scene> {
    plan.validate()?;
    let mut rng = rng(plan.seed, 0);
    let mut ground_truth = TrackletSet::new();
    let mut detections: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for frame in 1..=plan.frames {
        for (i, target) in plan.targets.iter().enumerate() {
            let Some((cu, cv)) = target.motion.center(frame) else {
                continue;
            };
            let miss: f64 = rng.random();
            let nu: f64 = rng.sample(StandardNormal);
            let nv: f64 = rng.sample(StandardNormal);
            let (w, h) = target.size;
            let gt = BBox::from_center(cu, cv, w, h);
            ground_truth.insert(
                i as i64 + 1,
                TrackEntry {
                    frame,
                    bbox: gt,
                    confidence: 1.0,
                },
            )?;
            if target.occluded(frame) || miss < plan.false_negative_rate {
                continue;
            }
            let bbox = BBox::from_center(cu + plan.sigma_u * nu, cv + plan.sigma_v * nv, w, h);
            detections.entry(frame).or_default().push(Detection {
                frame,
                bbox,
                confidence: target.confidence,
            });
        }
    }
    Ok(Scene {
        frames: plan.frames,
        ground_truth,
        detections,
    })
}
