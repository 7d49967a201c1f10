//! Fixed scene plans shared by tests, benchmarks and the command line.

use rand::Rng;

use super::rng;
use super::scene::{Motion, ScenePlan, TargetPlan};

/// Number of scenes in [`ablation_suite`].
pub const ABLATION_SCENES: usize = 20;

/// Frame on which the occluded target of [`crossing_plan`] reappears.
pub const CROSSING_RECOVERY_FRAME: u32 = 31;

/// Two targets whose paths cross while the first one is hidden.
///
/// Target 1 moves right at 4 px/frame, disappears on frames 21..=30 and
/// slows to 1 px/frame behind the occluder, so a constant-velocity
/// extrapolation overshoots its reappearance. Target 2 walks down through
/// the spot where target 1 was last seen.
pub fn crossing_plan(seed: u64) -> ScenePlan {
    ScenePlan {
        frames: 80,
        sigma_u: 0.2,
        sigma_v: 0.2,
        false_negative_rate: 0.0,
        seed,
        targets: vec![
            TargetPlan {
                size: (60.0, 120.0),
                motion: Motion::Waypoints {
                    points: vec![(1, 100.0, 200.0), (20, 176.0, 200.0), (80, 236.0, 200.0)],
                },
                occlusions: vec![(21, CROSSING_RECOVERY_FRAME)],
                confidence: 0.9,
            },
            TargetPlan {
                size: (60.0, 120.0),
                motion: Motion::Waypoints {
                    points: vec![(1, 181.0, -50.0), (80, 181.0, 740.0)],
                },
                occlusions: vec![],
                confidence: 0.9,
            },
        ],
    }
}

/// Randomized multi-target scene `index` of the ablation suite: mixed
/// piecewise-linear and sinusoidal motion with occlusions and misses.
pub fn ablation_plan(index: usize) -> ScenePlan {
    let seed = 1000 + index as u64;
    let mut r = rng(seed, 4);
    let frames = 150;
    let count = r.random_range(5..=8);
    let mut targets = Vec::with_capacity(count);
    for _ in 0..count {
        let w: f64 = r.random_range(30.0..80.0);
        let h = w * r.random_range(1.5..3.0);
        let start = r.random_range(1..40);
        let end = r.random_range(frames - 40..=frames);
        let origin = (r.random_range(100.0..1180.0), r.random_range(100.0..620.0));
        let velocity = (r.random_range(-6.0..6.0), r.random_range(-3.0..3.0));
        let motion = if r.random_bool(0.5) {
            let turn = r.random_range(start + 20..end - 10);
            let at = |k: u32, v: (f64, f64), o: (f64, f64)| (o.0 + v.0 * f64::from(k), o.1 + v.1 * f64::from(k));
            let mid = at(turn - start, velocity, origin);
            let bend = (r.random_range(-6.0..6.0), r.random_range(-3.0..3.0));
            let last = at(end - turn, bend, mid);
            Motion::Waypoints {
                points: vec![(start, origin.0, origin.1), (turn, mid.0, mid.1), (end, last.0, last.1)],
            }
        } else {
            Motion::Sinusoidal {
                start_frame: start,
                end_frame: end,
                origin,
                velocity,
                amplitude: r.random_range(10.0..40.0),
                period: r.random_range(20.0..60.0),
            }
        };
        let mut occlusions = Vec::new();
        if r.random_bool(0.6) {
            let len = r.random_range(5..20);
            let at = r.random_range(start + 10..end - len);
            occlusions.push((at, at + len));
        }
        targets.push(TargetPlan {
            size: (w, h),
            motion,
            occlusions,
            confidence: r.random_range(0.7..1.0),
        });
    }
    ScenePlan {
        frames,
        sigma_u: 1.5,
        sigma_v: 1.5,
        false_negative_rate: 0.05,
        seed,
        targets,
    }
}

pub fn ablation_suite() -> Vec<ScenePlan> {
    (0..ABLATION_SCENES).map(ablation_plan).collect()
}

/// `targets` objects on non-overlapping lanes for `frames` frames, with
/// light noise and no occlusions.
pub fn throughput_plan(frames: u32, targets: usize, seed: u64) -> ScenePlan {
    let mut r = rng(seed, 5);
    let lanes = (0..targets)
        .map(|i| {
            let v = 60.0 + 90.0 * i as f64;
            let speed = r.random_range(-3.0..3.0);
            TargetPlan {
                size: (40.0, 80.0),
                motion: Motion::Waypoints {
                    points: vec![
                        (1, 640.0, v),
                        (frames.max(2), 640.0 + speed * f64::from(frames.max(2) - 1), v),
                    ],
                },
                occlusions: vec![],
                confidence: 0.9,
            }
        })
        .collect();
    ScenePlan {
        frames,
        sigma_u: 1.0,
        sigma_v: 1.0,
        false_negative_rate: 0.0,
        seed,
        targets: lanes,
    }
}
