//! MOTChallenge text format: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`.
//!
//! Detections carry id `-1`; the world coordinates are `-1` placeholders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bbox::BBox;
use crate::detection::Detection;
use crate::error::{Error, Result};
use crate::postprocess::{TrackEntry, TrackletSet};
use crate::tracker::{FrameOutput, TrackerConfig};

/// Decimal places used when writing result files.
pub const DEFAULT_PRECISION: usize = 2;

/// One parsed line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotRow {
    pub frame: u32,
    pub id: i64,
    pub bb_left: f64,
    pub bb_top: f64,
    pub bb_width: f64,
    pub bb_height: f64,
    pub conf: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl MotRow {
    pub fn bbox(&self) -> BBox {
        BBox::from_tlwh(self.bb_left, self.bb_top, self.bb_width, self.bb_height)
    }

    /// Parses one line; `line_no` is 1-based and used in errors.
    pub fn parse(line: &str, line_no: usize) -> Result<Self> {
        let err = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(err(format!("expected at least 7 columns, found {}", fields.len())));
        }
        let real = |i: usize| -> Result<f64> {
            match fields.get(i) {
                None => Ok(-1.0),
                Some(s) => s
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("column {}: '{s}' is not a finite number", i + 1))),
            }
        };
        let frame = fields[0]
            .parse::<u32>()
            .ok()
            .filter(|&f| f >= 1)
            .ok_or_else(|| err(format!("column 1: '{}' is not a frame index >= 1", fields[0])))?;
        let id = fields[1]
            .parse::<i64>()
            .map_err(|_| err(format!("column 2: '{}' is not an integer id", fields[1])))?;
        let row = Self {
            frame,
            id,
            bb_left: real(2)?,
            bb_top: real(3)?,
            bb_width: real(4)?,
            bb_height: real(5)?,
            conf: real(6)?,
            x: real(7)?,
            y: real(8)?,
            z: real(9)?,
        };
        if row.bb_width <= 0.0 || row.bb_height <= 0.0 {
            return Err(err(format!("non-positive box size {}x{}", row.bb_width, row.bb_height)));
        }
        Ok(row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// First malformed line aborts the parse.
    #[default]
    Strict,
    /// Malformed lines are collected and skipped.
    Lenient,
}

/// Rows that parsed, plus the per-line errors collected in lenient mode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Parsed<T> {
    pub value: T,
    pub errors: Vec<Error>,
}

fn parse_rows(text: &str, mode: ParseMode) -> Result<Parsed<Vec<(usize, MotRow)>>> {
    let mut out: Parsed<Vec<(usize, MotRow)>> = Parsed::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match MotRow::parse(line, i + 1) {
            Ok(row) => out.value.push((i + 1, row)),
            Err(e) if mode == ParseMode::Lenient => out.errors.push(e),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn cmp_detection(a: &Detection, b: &Detection) -> Ordering {
    a.bbox
        .to_array()
        .iter()
        .zip(b.bbox.to_array().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.confidence.total_cmp(&b.confidence))
}

/// Groups detection rows by frame (ascending). Within a frame detections
/// are put in a canonical order, so line order does not matter.
pub fn parse_detections(text: &str, mode: ParseMode) -> Result<Parsed<BTreeMap<u32, Vec<Detection>>>> {
    let rows = parse_rows(text, mode)?;
    let mut frames: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    let mut errors = rows.errors;
    for (line, row) in rows.value {
        let det = Detection {
            frame: row.frame,
            bbox: row.bbox(),
            confidence: row.conf,
        };
        if !(0.0..=1.0).contains(&det.confidence) {
            let e = Error::Parse {
                line,
                message: format!("confidence {} outside [0, 1]", row.conf),
            };
            match mode {
                ParseMode::Strict => return Err(e),
                ParseMode::Lenient => {
                    errors.push(e);
                    continue;
                }
            }
        }
        frames.entry(row.frame).or_default().push(det);
    }
    for dets in frames.values_mut() {
        dets.sort_by(cmp_detection);
    }
    Ok(Parsed { value: frames, errors })
}

/// Parses a ground-truth or result file into per-id tracks.
pub fn parse_tracklets(text: &str, mode: ParseMode) -> Result<Parsed<TrackletSet>> {
    let rows = parse_rows(text, mode)?;
    let mut set = TrackletSet::new();
    let mut errors = rows.errors;
    for (_, row) in rows.value {
        let entry = TrackEntry {
            frame: row.frame,
            bbox: row.bbox(),
            confidence: row.conf,
        };
        if let Err(e) = set.insert(row.id, entry) {
            match mode {
                ParseMode::Strict => return Err(e),
                ParseMode::Lenient => errors.push(e),
            }
        }
    }
    Ok(Parsed { value: set, errors })
}

fn push_row(out: &mut String, frame: u32, id: i64, b: &BBox, conf: f64, precision: usize) {
    let p = precision;
    let _ = writeln!(
        out,
        "{frame},{id},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$},-1,-1,-1",
        b.x1,
        b.y1,
        b.width(),
        b.height(),
        conf
    );
}

/// Serializes tracks sorted by `(frame, id)`.
pub fn write_tracklets(ts: &TrackletSet, precision: usize) -> String {
    let mut out = String::new();
    for (frame, entries) in ts.by_frame() {
        for (id, e) in entries {
            push_row(&mut out, frame, id, &e.bbox, e.confidence, precision);
        }
    }
    out
}

/// Serializes tracker outputs with the default precision.
pub fn write_results<'a>(outputs: impl IntoIterator<Item = &'a FrameOutput>) -> String {
    write_tracklets(&TrackletSet::from_outputs(outputs), DEFAULT_PRECISION)
}

/// Serializes detections (id `-1`), sorted by frame.
pub fn write_detections(frames: &BTreeMap<u32, Vec<Detection>>, precision: usize) -> String {
    let mut out = String::new();
    for (frame, dets) in frames {
        for d in dets {
            push_row(&mut out, *frame, -1, &d.bbox, d.confidence, precision);
        }
    }
    out
}

/// Applies `key=value` lines to a configuration. Blank lines and lines
/// starting with `#` are ignored.
pub fn apply_config_text(config: &mut TrackerConfig, text: &str) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let real = || {
            value
                .parse::<f64>()
                .map_err(|_| err(format!("{key}: '{value}' is not a number")))
        };
        let int = || {
            value
                .parse::<u32>()
                .map_err(|_| err(format!("{key}: '{value}' is not a count")))
        };
        let flag = || {
            value
                .parse::<bool>()
                .map_err(|_| err(format!("{key}: '{value}' is not true/false")))
        };
        match key {
            "det_thresh" | "det_threshold" => config.det_threshold = real()?,
            "iou_thresh" | "iou_gate" => config.iou_gate = real()?,
            "lambda" => config.lambda = real()?,
            "delta_t" => config.delta_t = int()?,
            "max_age" => config.max_age = int()?,
            "min_hits" => config.min_hits = int()?,
            "oru" | "enable_oru" => config.enable_oru = flag()?,
            "ocm" | "enable_ocm" => config.enable_ocm = flag()?,
            "ocr" | "enable_ocr" => config.enable_ocr = flag()?,
            _ => return Err(err(format!("unknown key '{key}'"))),
        }
    }
    config.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_detection_row() {
        let p = parse_detections("1,-1,10,20,30,40,0.9,-1,-1,-1\n", ParseMode::Strict).unwrap();
        let d = p.value[&1][0];
        assert_eq!(d.bbox, BBox::new(10.0, 20.0, 40.0, 60.0));
        assert_eq!(d.confidence, 0.9);
        assert!(p.errors.is_empty());
    }

    #[test]
    fn empty_input() {
        let p = parse_detections("", ParseMode::Strict).unwrap();
        assert!(p.value.is_empty());
    }

    #[test]
    fn zero_width_rejected_with_line_number() {
        let text = "1,-1,10,20,30,40,0.9\n1,-1,10,20,0,40,0.9\n";
        match parse_detections(text, ParseMode::Strict) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let p = parse_detections(text, ParseMode::Lenient).unwrap();
        assert_eq!(p.value[&1].len(), 1);
        assert!(matches!(p.errors[..], [Error::Parse { line: 2, .. }]));
    }

    #[test]
    fn malformed_fields() {
        for bad in [
            "1,-1,10,20,30",
            "x,-1,1,1,1,1,1",
            "0,-1,1,1,1,1,1",
            "1,a,1,1,1,1,1",
            "1,-1,1,nan,1,1,1",
        ] {
            assert!(MotRow::parse(bad, 1).is_err(), "{bad}");
        }
    }

    #[test]
    fn writes_sorted_fixed_precision() {
        let mut ts = TrackletSet::new();
        let e = |frame, x| TrackEntry {
            frame,
            bbox: BBox::new(x, 2.0, x + 3.333, 6.0),
            confidence: 0.5,
        };
        ts.insert(2, e(1, 1.0)).unwrap();
        ts.insert(1, e(2, 0.0)).unwrap();
        ts.insert(1, e(1, 5.0)).unwrap();
        let text = write_tracklets(&ts, 2);
        assert_eq!(
            text,
            "1,1,5.00,2.00,3.33,4.00,0.50,-1,-1,-1\n1,2,1.00,2.00,3.33,4.00,0.50,-1,-1,-1\n2,1,0.00,2.00,3.33,4.00,0.50,-1,-1,-1\n"
        );
        assert_eq!(write_tracklets(&TrackletSet::new(), 2), "");
    }

    #[test]
    fn config_file() {
        let mut c = TrackerConfig::default();
        apply_config_text(&mut c, "# comment\nlambda = 0.5\nmax_age=10\nocr=false\n").unwrap();
        assert_eq!(c.lambda, 0.5);
        assert_eq!(c.max_age, 10);
        assert!(!c.enable_ocr);
        assert!(apply_config_text(&mut c, "bogus=1").is_err());
        assert!(apply_config_text(&mut c, "delta_t=0").is_err());
    }
}
