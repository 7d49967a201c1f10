//! Offline refinement of finished tracks: linear gap interpolation and
//! head padding of the confirmation delay.

use std::collections::BTreeMap;

use crate::bbox::BBox;
use crate::error::{Error, Result};
use crate::tracker::{FrameOutput, TentativeRecords};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackEntry {
    pub frame: u32,
    pub bbox: BBox,
    pub confidence: f64,
}

/// Per-identity sequences of boxes, each sorted by frame without
/// duplicates. Used for tracker results and for ground truth alike.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackletSet {
    tracks: BTreeMap<i64, Vec<TrackEntry>>,
}

impl TrackletSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts keeping frame order; a second entry for the same
    /// `(id, frame)` is an error.
    pub fn insert(&mut self, id: i64, entry: TrackEntry) -> Result<()> {
        let entries = self.tracks.entry(id).or_default();
        match entries.binary_search_by_key(&entry.frame, |e| e.frame) {
            Ok(_) => Err(Error::DuplicateEntry { id, frame: entry.frame }),
            Err(pos) => {
                entries.insert(pos, entry);
                Ok(())
            }
        }
    }

    pub fn from_outputs<'a>(outputs: impl IntoIterator<Item = &'a FrameOutput>) -> Self {
        let mut set = Self::new();
        for o in outputs.into_iter().flatten() {
            let entry = TrackEntry {
                frame: o.frame,
                bbox: o.bbox,
                confidence: o.confidence,
            };
            set.insert(o.track_id as i64, entry)
                .expect("tracker emits each track once per frame");
        }
        set
    }

    pub fn get(&self, id: i64) -> Option<&[TrackEntry]> {
        self.tracks.get(&id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[TrackEntry])> {
        self.tracks.iter().map(|(id, v)| (*id, v.as_slice()))
    }

    pub fn ids(&self) -> impl Iterator<Item = i64> + '_ {
        self.tracks.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.values().all(Vec::is_empty)
    }

    /// Total number of entries over all tracks.
    pub fn len(&self) -> usize {
        self.tracks.values().map(Vec::len).sum()
    }

    /// Entries regrouped by frame as `(id, entry)` pairs, ordered by id.
    pub fn by_frame(&self) -> BTreeMap<u32, Vec<(i64, TrackEntry)>> {
        let mut frames: BTreeMap<u32, Vec<(i64, TrackEntry)>> = BTreeMap::new();
        for (id, entries) in &self.tracks {
            for e in entries {
                frames.entry(e.frame).or_default().push((*id, *e));
            }
        }
        frames
    }
}

/// Fills internal gaps of at most `max_gap` missing frames by per-coordinate
/// linear interpolation, for tracks whose frame span is at least `min_len`.
/// Inserted entries carry the mean of the two bracketing confidences.
pub fn linear_interpolate(ts: &TrackletSet, max_gap: u32, min_len: u32) -> TrackletSet {
    let mut out = ts.clone();
    for entries in out.tracks.values_mut() {
        let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
            continue;
        };
        if last.frame - first.frame + 1 < min_len {
            continue;
        }
        let mut filled = Vec::with_capacity(entries.len());
        for pair in entries.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            filled.push(a);
            let missing = b.frame - a.frame - 1;
            if missing == 0 || missing > max_gap {
                continue;
            }
            let span = f64::from(b.frame - a.frame);
            let (pa, pb) = (a.bbox.to_array(), b.bbox.to_array());
            for frame in a.frame + 1..b.frame {
                let w = f64::from(frame - a.frame) / span;
                let c: [f64; 4] = std::array::from_fn(|k| pa[k] + (pb[k] - pa[k]) * w);
                let confidence = (a.confidence + b.confidence) / 2.0;
                filled.push(TrackEntry {
                    frame,
                    bbox: BBox::from(c),
                    confidence,
                });
            }
        }
        filled.extend(entries.last().copied());
        *entries = filled;
    }
    out
}

/// Writes the pre-confirmation boxes of confirmed tracks back under their
/// id. Frames already present are left untouched.
pub fn head_padding(ts: &TrackletSet, records: &TentativeRecords) -> TrackletSet {
    let mut out = ts.clone();
    for (id, recs) in records {
        let id = *id as i64;
        if !out.tracks.contains_key(&id) {
            continue;
        }
        for r in recs {
            let entry = TrackEntry {
                frame: r.frame,
                bbox: r.bbox,
                confidence: r.confidence,
            };
            // Already-emitted frames (sequence-start grace) stay as they are.
            let _ = out.insert(id, entry);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::TrackOutput;

    fn entry(frame: u32, x: f64) -> TrackEntry {
        TrackEntry {
            frame,
            bbox: BBox::new(x, x, x + 10.0, x + 10.0),
            confidence: 0.8,
        }
    }

    /// A track spanning `span` frames starting at 1 with one hole of
    /// `missing` frames in the middle.
    fn holed(span: u32, missing: u32) -> TrackletSet {
        let mut ts = TrackletSet::new();
        let hole_start = span / 2 - missing / 2;
        for f in 1..=span {
            if f >= hole_start && f < hole_start + missing {
                continue;
            }
            ts.insert(1, entry(f, f64::from(f))).unwrap();
        }
        ts
    }

    #[test]
    fn duplicate_entries_rejected() {
        let mut ts = TrackletSet::new();
        ts.insert(3, entry(1, 0.0)).unwrap();
        assert_eq!(
            ts.insert(3, entry(1, 1.0)),
            Err(Error::DuplicateEntry { id: 3, frame: 1 })
        );
    }

    #[test]
    fn one_frame_gap_gets_midpoint() {
        let mut ts = TrackletSet::new();
        ts.insert(
            1,
            TrackEntry {
                frame: 1,
                bbox: BBox::new(0.0, 0.0, 10.0, 10.0),
                confidence: 0.6,
            },
        )
        .unwrap();
        ts.insert(
            1,
            TrackEntry {
                frame: 3,
                bbox: BBox::new(2.0, 2.0, 12.0, 12.0),
                confidence: 1.0,
            },
        )
        .unwrap();
        for f in 4..=40 {
            ts.insert(1, entry(f, 5.0)).unwrap();
        }
        let out = linear_interpolate(&ts, 20, 30);
        let mid = out.get(1).unwrap()[1];
        assert_eq!(mid.frame, 2);
        assert_eq!(mid.bbox, BBox::new(1.0, 1.0, 11.0, 11.0));
        assert!((mid.confidence - 0.8).abs() < 1e-12);
    }

    #[test]
    fn gap_limits() {
        let ts = holed(60, 20);
        assert_eq!(linear_interpolate(&ts, 20, 30).len(), 60);
        let ts = holed(60, 21);
        assert_eq!(linear_interpolate(&ts, 20, 30), ts);
        let ts = holed(29, 3);
        assert_eq!(linear_interpolate(&ts, 20, 30), ts);
        let ts = holed(30, 3);
        assert_eq!(linear_interpolate(&ts, 20, 30).len(), 30);
    }

    #[test]
    fn head_padding_writes_back_tentative_frames() {
        let mut ts = TrackletSet::new();
        for f in 5..=10 {
            ts.insert(7, entry(f, 1.0)).unwrap();
        }
        let mut records = TentativeRecords::new();
        let rec = |frame| TrackOutput {
            frame,
            track_id: 7,
            bbox: BBox::new(0.0, 0.0, 1.0, 1.0),
            confidence: 0.9,
        };
        records.insert(7, vec![rec(3), rec(4)]);
        // Unknown id: nothing emitted.
        records.insert(9, vec![TrackOutput { track_id: 9, ..rec(2) }]);
        let out = head_padding(&ts, &records);
        let frames: Vec<u32> = out.get(7).unwrap().iter().map(|e| e.frame).collect();
        assert_eq!(frames, (3..=10).collect::<Vec<_>>());
        assert!(out.get(9).is_none());
        assert_eq!(&out.get(7).unwrap()[2..], ts.get(7).unwrap());
    }
}
