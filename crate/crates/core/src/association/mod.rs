//! Association cost construction (IoU plus direction consistency) and
//! gated optimal assignment.

pub mod lap;

use std::f64::consts::PI;

use crate::bbox::BBox;
use crate::kalman::Observation;

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    a.iou(b)
}

/// Direction of the displacement `to - from` in `(-pi, pi]`, or `None`
/// when the displacement is zero.
pub fn direction_angle(from: (f64, f64), to: (f64, f64)) -> Option<f64> {
    let (du, dv) = (to.0 - from.0, to.1 - from.1);
    if du == 0.0 && dv == 0.0 {
        return None;
    }
    let theta = dv.atan2(du);
    // atan2 yields -pi for (negative, -0.0); fold onto the half-open range.
    Some(if theta == -PI { PI } else { theta })
}

/// Smallest absolute difference of two angles on the circle, in `[0, pi]`.
/// An undefined direction is neutral and yields 0.
pub fn angle_diff(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => {
            let d = (a - b).abs() % (2.0 * PI);
            d.min(2.0 * PI - d).clamp(0.0, PI)
        }
        _ => 0.0,
    }
}

/// The two observation centers that define a track's motion direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAnchors {
    pub older: (f64, f64),
    pub latest: (f64, f64),
}

impl DirectionAnchors {
    pub fn theta(&self) -> Option<f64> {
        direction_angle(self.older, self.latest)
    }

    /// Picks the anchors from a frame-ordered observation history: the
    /// latest observation, and the newest one at least `delta_t` frames
    /// older, falling back to the oldest when the track is younger than
    /// that. Fewer than two observations gives `None`.
    pub fn select(history: &[(u32, Observation)], delta_t: u32) -> Option<Self> {
        let (&(last_frame, latest), rest) = history.split_last()?;
        let (_, first) = rest.first()?;
        let target = last_frame.saturating_sub(delta_t);
        let older = rest.iter().rev().find(|(f, _)| *f <= target).map_or(first, |(_, z)| z);
        Some(Self {
            older: (older.u, older.v),
            latest: (latest.u, latest.v),
        })
    }
}

/// Dense tracks x detections cost matrix together with the IoU terms used
/// for gating.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CostMatrix {
    pub values: Vec<Vec<f64>>,
    pub iou: Vec<Vec<f64>>,
    pub num_detections: usize,
}

impl CostMatrix {
    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.num_detections
    }

    /// Negative IoU only.
    pub fn iou_only(tracks: &[BBox], detections: &[BBox]) -> Self {
        let iou: Vec<Vec<f64>> = tracks
            .iter()
            .map(|t| detections.iter().map(|d| t.iou(d)).collect())
            .collect();
        let values = iou.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
        Self {
            values,
            iou,
            num_detections: detections.len(),
        }
    }

    pub fn gate_mask(&self, iou_gate: f64) -> Vec<Vec<bool>> {
        self.iou
            .iter()
            .map(|row| row.iter().map(|&v| v >= iou_gate).collect())
            .collect()
    }
}

/// `C[i][j] = -IoU(est_i, det_j) + lambda * dtheta_ij`, where `dtheta_ij`
/// compares the direction of track `i`'s anchors with the direction from
/// its latest observation to detection `j`. Rows without anchors use IoU
/// alone.
pub fn build_cost(
    estimates: &[BBox],
    detections: &[BBox],
    anchors: &[Option<DirectionAnchors>],
    lambda: f64,
) -> CostMatrix {
    debug_assert_eq!(estimates.len(), anchors.len());
    let mut cost = CostMatrix::iou_only(estimates, detections);
    if lambda == 0.0 {
        return cost;
    }
    for (row, anchor) in cost.values.iter_mut().zip(anchors) {
        let Some(anchor) = anchor else { continue };
        let theta_track = anchor.theta();
        for (c, det) in row.iter_mut().zip(detections) {
            let theta_intention = direction_angle(anchor.latest, det.center());
            *c += lambda * angle_diff(theta_track, theta_intention);
        }
    }
    cost
}

/// Matches, unmatched tracks and unmatched detections; together they
/// partition both index sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssignmentResult {
    pub matches: Vec<(usize, usize)>,
    pub unmatched_tracks: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

/// Stand-in cost for pairs below the IoU gate. Larger than any possible
/// saving from the gated entries, so the solver first maximizes the number
/// of gated matches and then minimizes their total cost.
const UNGATED_COST: f64 = 1e6;

/// Minimum-cost one-to-one assignment over the entries with IoU at least
/// `iou_gate`; any pair below the gate the solver still has to use is
/// demoted to unmatched on both sides.
pub fn solve_assignment(cost: &CostMatrix, iou_gate: f64) -> AssignmentResult {
    let (rows, cols) = (cost.rows(), cost.cols());
    let mut det_used = vec![false; cols];
    let mut result = AssignmentResult::default();
    let masked: Vec<Vec<f64>> = cost
        .values
        .iter()
        .zip(&cost.iou)
        .map(|(row, ious)| {
            row.iter()
                .zip(ious)
                .map(|(&c, &v)| if v >= iou_gate { c } else { UNGATED_COST })
                .collect()
        })
        .collect();
    for (track, det) in lap::solve(&masked).into_iter().enumerate() {
        match det {
            Some(det) if cost.iou[track][det] >= iou_gate => {
                det_used[det] = true;
                result.matches.push((track, det));
            }
            _ => result.unmatched_tracks.push(track),
        }
    }
    result.unmatched_detections = (0..cols).filter(|&j| !det_used[j]).collect();
    debug_assert_eq!(result.matches.len() + result.unmatched_tracks.len(), rows);
    result
}
