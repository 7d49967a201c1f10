//! CLEAR-style counts, ID switches, fragmentations and IDF1.
//!
//! Per-frame correspondence is a plain IoU-maximizing assignment (no
//! preference for the previous frame's matches), so absolute numbers can
//! differ slightly from the official toolkits.

use std::collections::{BTreeMap, HashMap};

use crate::association::{lap, solve_assignment, CostMatrix};
use crate::bbox::BBox;
use crate::postprocess::TrackletSet;

/// Default IoU needed for a prediction to count as matching a target.
pub const DEFAULT_IOU_MATCH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub mota: f64,
    pub idf1: f64,
    pub id_switches: usize,
    pub fragmentations: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub num_gt: usize,
    pub num_pred: usize,
    /// Identity-level true positives of the global identity matching.
    pub idtp: usize,
    /// `(gt_id, pred_id)` correspondences of every frame.
    pub matches: BTreeMap<u32, Vec<(i64, i64)>>,
}

impl EvalReport {
    pub fn csv_header() -> &'static str {
        "mota,idf1,id_switches,fragmentations,tp,fp,fn,num_gt,num_pred,idtp"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{},{},{},{},{},{},{},{}",
            self.mota,
            self.idf1,
            self.id_switches,
            self.fragmentations,
            self.tp,
            self.fp,
            self.fn_,
            self.num_gt,
            self.num_pred,
            self.idtp
        )
    }
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MOTA   {:.4}", self.mota)?;
        writeln!(f, "IDF1   {:.4}", self.idf1)?;
        writeln!(f, "IDs    {}", self.id_switches)?;
        writeln!(f, "Frag   {}", self.fragmentations)?;
        writeln!(f, "TP     {}", self.tp)?;
        writeln!(f, "FP     {}", self.fp)?;
        writeln!(f, "FN     {}", self.fn_)?;
        write!(f, "GT     {}", self.num_gt)
    }
}

#[derive(Default)]
struct TargetState {
    last_pred: Option<i64>,
    ever_tracked: bool,
    tracked_prev: bool,
}

/// Scores `pred` against `gt`. Both sets are duplicate-free by
/// construction.
pub fn evaluate(gt: &TrackletSet, pred: &TrackletSet, iou_match: f64) -> EvalReport {
    let gt_frames = gt.by_frame();
    let pred_frames = pred.by_frame();
    let mut report = EvalReport {
        num_gt: gt.len(),
        num_pred: pred.len(),
        ..Default::default()
    };

    let mut targets: BTreeMap<i64, TargetState> = BTreeMap::new();
    let mut overlap: HashMap<(i64, i64), usize> = HashMap::new();
    let empty = Vec::new();

    let frames: std::collections::BTreeSet<u32> = gt_frames.keys().chain(pred_frames.keys()).copied().collect();
    for frame in frames {
        let g = gt_frames.get(&frame).unwrap_or(&empty);
        let p = pred_frames.get(&frame).unwrap_or(&empty);
        let g_boxes: Vec<BBox> = g.iter().map(|(_, e)| e.bbox).collect();
        let p_boxes: Vec<BBox> = p.iter().map(|(_, e)| e.bbox).collect();
        let cost = CostMatrix::iou_only(&g_boxes, &p_boxes);

        for (i, row) in cost.iou.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= iou_match {
                    *overlap.entry((g[i].0, p[j].0)).or_default() += 1;
                }
            }
        }

        let assignment = solve_assignment(&cost, iou_match);
        let mut matched = vec![None; g.len()];
        let mut frame_matches = Vec::with_capacity(assignment.matches.len());
        for &(i, j) in &assignment.matches {
            matched[i] = Some(p[j].0);
            frame_matches.push((g[i].0, p[j].0));
        }
        report.tp += assignment.matches.len();
        report.fn_ += g.len() - assignment.matches.len();
        report.fp += p.len() - assignment.matches.len();

        for (i, (gid, _)) in g.iter().enumerate() {
            let state = targets.entry(*gid).or_default();
            match matched[i] {
                Some(pid) => {
                    if state.last_pred.is_some_and(|last| last != pid) {
                        report.id_switches += 1;
                    }
                    if state.ever_tracked && !state.tracked_prev {
                        report.fragmentations += 1;
                    }
                    state.last_pred = Some(pid);
                    state.ever_tracked = true;
                    state.tracked_prev = true;
                }
                None => state.tracked_prev = false,
            }
        }
        if !frame_matches.is_empty() {
            report.matches.insert(frame, frame_matches);
        }
    }

    let errors = report.fn_ + report.fp + report.id_switches;
    report.mota = 1.0 - errors as f64 / report.num_gt.max(1) as f64;
    report.idtp = identity_true_positives(gt, pred, &overlap);
    let denom = report.num_gt + report.num_pred;
    report.idf1 = if denom == 0 {
        1.0
    } else {
        2.0 * report.idtp as f64 / denom as f64
    };
    report
}

/// Maximum total overlap over one-to-one pairings of identities.
fn identity_true_positives(gt: &TrackletSet, pred: &TrackletSet, overlap: &HashMap<(i64, i64), usize>) -> usize {
    let gids: Vec<i64> = gt.ids().collect();
    let pids: Vec<i64> = pred.ids().collect();
    if gids.is_empty() || pids.is_empty() || overlap.is_empty() {
        return 0;
    }
    let costs: Vec<Vec<f64>> = gids
        .iter()
        .map(|g| {
            pids.iter()
                .map(|p| -(overlap.get(&(*g, *p)).copied().unwrap_or(0) as f64))
                .collect()
        })
        .collect();
    lap::solve(&costs)
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| overlap.get(&(gids[i], pids[j])).copied().unwrap_or(0)))
        .sum()
}
