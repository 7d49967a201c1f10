//! The online tracking loop: association with direction consistency, a
//! recovery pass on last observations, re-update of the filter along a
//! virtual trajectory on re-activation, and track lifecycle.

mod config;

use std::collections::BTreeMap;

pub use config::TrackerConfig;

use crate::association::{build_cost, solve_assignment, AssignmentResult, CostMatrix, DirectionAnchors};
use crate::bbox::BBox;
use crate::detection::Detection;
use crate::error::{Error, Result};
use crate::kalman::{box_to_observation, FilterSnapshot, FilterState, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Observed this frame, not yet confirmed.
    Tentative,
    /// Observed this frame and confirmed.
    Tracked,
    /// Not observed this frame.
    Untracked,
}

/// One emitted box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOutput {
    pub frame: u32,
    pub track_id: u64,
    pub bbox: BBox,
    pub confidence: f64,
}

/// Confirmed-track outputs of a single frame, sorted by id.
pub type FrameOutput = Vec<TrackOutput>;

/// Boxes a track produced before it was confirmed.
pub type TentativeRecords = BTreeMap<u64, Vec<TrackOutput>>;

#[derive(Debug, Clone)]
pub struct Track {
    pub id: u64,
    pub filter: FilterState,
    pub snapshot: FilterSnapshot,
    /// Recent real observations, oldest first. Only the window needed to
    /// pick direction anchors is kept.
    pub history: Vec<(u32, Observation)>,
    pub last_box: BBox,
    pub last_confidence: f64,
    pub status: TrackStatus,
    pub hits: u32,
    pub age_untracked: u32,
    pub confirmed: bool,
    tentative: Vec<TrackOutput>,
}

impl Track {
    pub fn last_observation(&self) -> (u32, Observation) {
        *self.history.last().expect("a track always holds its birth observation")
    }

    /// Direction of the filter's velocity estimate, if it is non-zero.
    pub fn velocity_direction(&self) -> Option<f64> {
        let s = self.filter.state();
        crate::association::direction_angle((0.0, 0.0), (s.u_dot, s.v_dot))
    }
}

/// Constant-velocity virtual observations strictly between `t1` and `t2`,
/// linear in every component.
pub fn generate_virtual_trajectory(z1: &Observation, t1: u32, z2: &Observation, t2: u32) -> Vec<(u32, Observation)> {
    if t2 <= t1 + 1 {
        return Vec::new();
    }
    let (a, b) = (z1.to_vector(), z2.to_vector());
    let span = f64::from(t2 - t1);
    (t1 + 1..t2)
        .map(|t| {
            let w = f64::from(t - t1) / span;
            (t, Observation::from_vector(&(a + (b - a) * w)))
        })
        .collect()
}

/// Second association attempt between the last real observations of
/// unmatched tracks and the unmatched detections, on IoU alone.
pub fn ocr_pass(last_observations: &[BBox], detections: &[BBox], iou_gate: f64) -> AssignmentResult {
    solve_assignment(&CostMatrix::iou_only(last_observations, detections), iou_gate)
}

/// Online multi-object tracker. Feed frames in increasing order.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    frame_count: u32,
    last_frame: Option<u32>,
    records: TentativeRecords,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            tracks: Vec::new(),
            next_id: 1,
            frame_count: 0,
            last_frame: None,
            records: TentativeRecords::new(),
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn track(&self, id: u64) -> Option<&Track> {
        self.tracks.iter().find(|t| t.id == id)
    }

    /// Pre-confirmation boxes of every track that was eventually confirmed.
    pub fn tentative_records(&self) -> &TentativeRecords {
        &self.records
    }

    /// Processes the detections of `frame`. Skipped frames since the last
    /// call are processed as empty frames first.
    pub fn step(&mut self, frame: u32, detections: &[Detection]) -> Result<FrameOutput> {
        if let Some(previous) = self.last_frame {
            if frame <= previous {
                return Err(Error::NonMonotonicFrame { previous, got: frame });
            }
            for skipped in previous + 1..frame {
                self.advance(skipped, &[])?;
            }
        }
        self.advance(frame, detections)
    }

    fn advance(&mut self, frame: u32, detections: &[Detection]) -> Result<FrameOutput> {
        self.last_frame = Some(frame);
        self.frame_count += 1;
        let cfg = self.config;

        let mut dets: Vec<(BBox, Observation, f64)> = Vec::with_capacity(detections.len());
        for d in detections.iter().filter(|d| d.confidence > cfg.det_threshold) {
            dets.push((d.bbox, box_to_observation(&d.bbox)?, d.confidence));
        }

        // Predict; states that cannot be drawn as a box are discarded.
        let mut estimates = Vec::with_capacity(self.tracks.len());
        self.tracks.retain_mut(|t| {
            t.filter = t.filter.predict();
            match t.filter.to_box() {
                Ok(b) => {
                    estimates.push(b);
                    true
                }
                Err(_) => false,
            }
        });

        let lambda = cfg.effective_lambda();
        let anchors: Vec<Option<DirectionAnchors>> = self
            .tracks
            .iter()
            .map(|t| {
                if lambda > 0.0 {
                    DirectionAnchors::select(&t.history, cfg.delta_t)
                } else {
                    None
                }
            })
            .collect();
        let det_boxes: Vec<BBox> = dets.iter().map(|d| d.0).collect();
        let primary = solve_assignment(&build_cost(&estimates, &det_boxes, &anchors, lambda), cfg.iou_gate);

        let mut matches = primary.matches;
        let mut unmatched_tracks = primary.unmatched_tracks;
        let mut unmatched_dets = primary.unmatched_detections;

        if cfg.enable_ocr && !unmatched_tracks.is_empty() && !unmatched_dets.is_empty() {
            let last: Vec<BBox> = unmatched_tracks.iter().map(|&i| self.tracks[i].last_box).collect();
            let left: Vec<BBox> = unmatched_dets.iter().map(|&j| det_boxes[j]).collect();
            let recovery = ocr_pass(&last, &left, cfg.iou_gate);
            matches.extend(
                recovery
                    .matches
                    .iter()
                    .map(|&(i, j)| (unmatched_tracks[i], unmatched_dets[j])),
            );
            unmatched_tracks = recovery.unmatched_tracks.iter().map(|&i| unmatched_tracks[i]).collect();
            unmatched_dets = recovery
                .unmatched_detections
                .iter()
                .map(|&j| unmatched_dets[j])
                .collect();
        }

        for &(ti, dj) in &matches {
            let (bbox, z, conf) = dets[dj];
            self.apply_match(ti, frame, bbox, z, conf)?;
        }

        for &ti in &unmatched_tracks {
            let t = &mut self.tracks[ti];
            t.filter = t.filter.dummy_update();
            t.age_untracked += 1;
            t.status = TrackStatus::Untracked;
        }
        self.tracks.retain(|t| t.age_untracked < cfg.max_age);

        unmatched_dets.sort_unstable();
        for dj in unmatched_dets {
            let (bbox, z, conf) = dets[dj];
            self.spawn(frame, bbox, z, conf);
        }

        let grace = self.frame_count <= cfg.min_hits;
        let mut out: FrameOutput = self
            .tracks
            .iter()
            .filter(|t| t.age_untracked == 0 && (t.confirmed || grace))
            .filter_map(|t| {
                let bbox = t.filter.to_box().ok()?;
                Some(TrackOutput {
                    frame,
                    track_id: t.id,
                    bbox,
                    confidence: t.last_confidence,
                })
            })
            .collect();
        out.sort_by_key(|o| o.track_id);
        Ok(out)
    }

    fn apply_match(&mut self, ti: usize, frame: u32, bbox: BBox, z: Observation, conf: f64) -> Result<()> {
        let cfg = self.config;
        let t = &mut self.tracks[ti];
        t.filter = if cfg.enable_oru && t.age_untracked > 0 {
            let (t1, z1) = t.last_observation();
            let virtual_obs = generate_virtual_trajectory(&z1, t1, &z, frame);
            t.snapshot.re_update(&virtual_obs, frame, &z)?
        } else {
            t.filter.update(&z)?
        };
        t.snapshot = t.filter.snapshot(frame);
        t.history.push((frame, z));
        let keep = cfg.delta_t as usize + 1;
        if t.history.len() > keep {
            t.history.drain(..t.history.len() - keep);
        }
        t.last_box = bbox;
        t.last_confidence = conf;
        t.hits += 1;
        t.age_untracked = 0;
        self.after_hit(ti, frame);
        Ok(())
    }

    fn spawn(&mut self, frame: u32, bbox: BBox, z: Observation, conf: f64) {
        let filter = FilterState::new(&z, &self.config.filter);
        self.tracks.push(Track {
            id: self.next_id,
            filter,
            snapshot: filter.snapshot(frame),
            history: vec![(frame, z)],
            last_box: bbox,
            last_confidence: conf,
            status: TrackStatus::Tentative,
            hits: 1,
            age_untracked: 0,
            confirmed: false,
            tentative: Vec::new(),
        });
        self.next_id += 1;
        self.after_hit(self.tracks.len() - 1, frame);
    }

    fn after_hit(&mut self, ti: usize, frame: u32) {
        let min_hits = self.config.min_hits;
        let t = &mut self.tracks[ti];
        if t.confirmed {
            t.status = TrackStatus::Tracked;
            return;
        }
        if let Ok(bbox) = t.filter.to_box() {
            t.tentative.push(TrackOutput {
                frame,
                track_id: t.id,
                bbox,
                confidence: t.last_confidence,
            });
        }
        if t.hits >= min_hits {
            t.confirmed = true;
            t.status = TrackStatus::Tracked;
            // The confirming frame is emitted normally.
            t.tentative.pop();
            self.records.insert(t.id, std::mem::take(&mut t.tentative));
        } else {
            t.status = TrackStatus::Tentative;
        }
    }
}

/// Runs a tracker over frames `first..=last`, returning every frame's output.
pub fn run_sequence(
    config: TrackerConfig,
    frames: &BTreeMap<u32, Vec<Detection>>,
    first: u32,
    last: u32,
) -> Result<(Vec<FrameOutput>, TentativeRecords)> {
    let mut tracker = Tracker::new(config)?;
    let mut outputs = Vec::with_capacity((last.saturating_sub(first) + 1) as usize);
    for frame in first..=last {
        let dets = frames.get(&frame).map_or(&[][..], Vec::as_slice);
        outputs.push(tracker.step(frame, dets)?);
    }
    Ok((outputs, tracker.records))
}
