use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ocsort::metrics::evaluate;
use ocsort::mot::{parse_detections, parse_tracklets, write_tracklets, ParseMode};
use ocsort::{BBox, TrackEntry, TrackletSet};

fn random_pair(seed: u64) -> (TrackletSet, TrackletSet) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut gt = TrackletSet::new();
    let mut pred = TrackletSet::new();
    let targets = r.random_range(1..=5);
    let mut next_pred = 100;
    for g in 1..=targets {
        let (mut x, y) = (r.random_range(0.0..300.0), r.random_range(0.0..300.0));
        let vx = r.random_range(-4.0..4.0);
        let (start, end) = (r.random_range(1..20), r.random_range(30..=50));
        let mut pid = next_pred;
        next_pred += 1;
        for f in start..=end {
            x += vx;
            let b = BBox::from_tlwh(x, y, 40.0, 80.0);
            gt.insert(
                g,
                TrackEntry {
                    frame: f,
                    bbox: b,
                    confidence: 1.0,
                },
            )
            .unwrap();
            if r.random_bool(0.05) {
                pid = next_pred;
                next_pred += 1;
            }
            if r.random_bool(0.85) {
                let j = BBox::from_tlwh(
                    x + r.random_range(-12.0..12.0),
                    y + r.random_range(-12.0..12.0),
                    40.0,
                    80.0,
                );
                pred.insert(
                    pid,
                    TrackEntry {
                        frame: f,
                        bbox: j,
                        confidence: 1.0,
                    },
                )
                .unwrap();
            }
        }
    }
    for _ in 0..r.random_range(0..20) {
        let b = BBox::from_tlwh(r.random_range(0.0..400.0), r.random_range(0.0..400.0), 40.0, 80.0);
        let _ = pred.insert(
            r.random_range(900..903),
            TrackEntry {
                frame: r.random_range(1..=50),
                bbox: b,
                confidence: 1.0,
            },
        );
    }
    (gt, pred)
}

/// Best partial matching of one frame: most pairs, then largest IoU sum.
fn best_frame_matching(g: &[(i64, BBox)], p: &[(i64, BBox)]) -> Vec<(i64, i64)> {
    fn go(
        g: &[(i64, BBox)],
        p: &[(i64, BBox)],
        i: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        best: &mut (usize, f64, Vec<(usize, usize)>),
    ) {
        if i == g.len() {
            let score: f64 = cur.iter().map(|&(a, b)| g[a].1.iou(&p[b].1)).sum();
            if cur.len() > best.0 || (cur.len() == best.0 && score > best.1) {
                *best = (cur.len(), score, cur.clone());
            }
            return;
        }
        go(g, p, i + 1, used, cur, best);
        for j in 0..p.len() {
            if !used[j] && g[i].1.iou(&p[j].1) >= 0.5 {
                used[j] = true;
                cur.push((i, j));
                go(g, p, i + 1, used, cur, best);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut best = (0, f64::NEG_INFINITY, Vec::new());
    go(g, p, 0, &mut vec![false; p.len()], &mut Vec::new(), &mut best);
    best.2.into_iter().map(|(a, b)| (g[a].0, p[b].0)).collect()
}

struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
    switches: usize,
    frags: usize,
    idtp: usize,
}

fn recount(gt: &TrackletSet, pred: &TrackletSet) -> Counts {
    let frames = |ts: &TrackletSet| {
        let mut m: BTreeMap<u32, Vec<(i64, BBox)>> = BTreeMap::new();
        for (id, es) in ts.iter() {
            for e in es {
                m.entry(e.frame).or_default().push((id, e.bbox));
            }
        }
        m
    };
    let (gf, pf) = (frames(gt), frames(pred));
    let mut c = Counts {
        tp: 0,
        fp: 0,
        fn_: 0,
        switches: 0,
        frags: 0,
        idtp: 0,
    };
    let mut last: HashMap<i64, i64> = HashMap::new();
    let mut was_tracked: HashMap<i64, bool> = HashMap::new();
    let mut overlap: HashMap<(i64, i64), usize> = HashMap::new();
    let empty = Vec::new();
    for f in 1..=60 {
        let g = gf.get(&f).unwrap_or(&empty);
        let p = pf.get(&f).unwrap_or(&empty);
        for a in g {
            for b in p {
                if a.1.iou(&b.1) >= 0.5 {
                    *overlap.entry((a.0, b.0)).or_default() += 1;
                }
            }
        }
        let m = best_frame_matching(g, p);
        c.tp += m.len();
        c.fp += p.len() - m.len();
        c.fn_ += g.len() - m.len();
        for (gid, _) in g {
            match m.iter().find(|x| x.0 == *gid) {
                Some(&(_, pid)) => {
                    if last.get(gid).is_some_and(|&l| l != pid) {
                        c.switches += 1;
                    }
                    if was_tracked.get(gid) == Some(&false) {
                        c.frags += 1;
                    }
                    last.insert(*gid, pid);
                    was_tracked.insert(*gid, true);
                }
                None => {
                    if was_tracked.contains_key(gid) {
                        was_tracked.insert(*gid, false);
                    }
                }
            }
        }
    }
    // Identity pairing by exhaustive search over injective maps.
    let gids: Vec<i64> = gt.ids().collect();
    let pids: Vec<i64> = pred.ids().collect();
    fn pair(i: usize, gids: &[i64], pids: &[i64], used: &mut Vec<bool>, ov: &HashMap<(i64, i64), usize>) -> usize {
        if i == gids.len() {
            return 0;
        }
        let mut best = pair(i + 1, gids, pids, used, ov);
        for j in 0..pids.len() {
            let o = ov.get(&(gids[i], pids[j])).copied().unwrap_or(0);
            if !used[j] && o > 0 {
                used[j] = true;
                best = best.max(o + pair(i + 1, gids, pids, used, ov));
                used[j] = false;
            }
        }
        best
    }
    c.idtp = pair(0, &gids, &pids, &mut vec![false; pids.len()], &overlap);
    c
}

#[test]
fn metrics_match_exhaustive_recount() {
    for seed in 0..60 {
        let (gt, pred) = random_pair(seed);
        let r = evaluate(&gt, &pred, 0.5);
        let c = recount(&gt, &pred);
        assert_eq!((r.tp, r.fp, r.fn_), (c.tp, c.fp, c.fn_), "seed {seed}");
        assert_eq!((r.id_switches, r.fragmentations), (c.switches, c.frags), "seed {seed}");
        assert_eq!(r.idtp, c.idtp, "seed {seed}");
        assert_eq!(r.tp + r.fn_, gt.len());
        let mota = 1.0 - (c.fp + c.fn_ + c.switches) as f64 / gt.len() as f64;
        assert!((r.mota - mota).abs() < 1e-12);
        assert!((r.idf1 - 2.0 * c.idtp as f64 / (gt.len() + pred.len()) as f64).abs() < 1e-12);
    }
}

#[test]
fn metrics_ignore_prediction_labels() {
    for seed in 0..30 {
        let (gt, pred) = random_pair(seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed + 1000);
        let mut ids: Vec<i64> = pred.ids().collect();
        let mut fresh: Vec<i64> = (5000..5000 + ids.len() as i64).collect();
        fresh.shuffle(&mut r);
        let mapping: HashMap<i64, i64> = ids.drain(..).zip(fresh).collect();
        let mut relabeled = TrackletSet::new();
        for (id, es) in pred.iter() {
            for e in es {
                relabeled.insert(mapping[&id], *e).unwrap();
            }
        }
        let (a, b) = (evaluate(&gt, &pred, 0.5), evaluate(&gt, &relabeled, 0.5));
        assert_eq!(
            (a.tp, a.fp, a.fn_, a.id_switches, a.fragmentations, a.idtp),
            (b.tp, b.fp, b.fn_, b.id_switches, b.fragmentations, b.idtp)
        );
        assert_eq!(a.mota, b.mota);
        assert_eq!(a.idf1, b.idf1);
    }
}

#[test]
fn detection_rows_follow_the_schema() {
    let p = parse_detections("1,-1,10,20,30,40,0.9,-1,-1,-1\n", ParseMode::Strict).unwrap();
    let d = &p.value[&1][0];
    assert_eq!(d.bbox, BBox::new(10.0, 20.0, 40.0, 60.0));
    assert_eq!(d.confidence, 0.9);
    assert!(parse_detections("", ParseMode::Strict).unwrap().value.is_empty());

    let err = parse_detections("1,-1,1,1,5,5,0.5\n1,-1,10,20,0,40,0.9\n", ParseMode::Strict).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let lenient = parse_detections("1,-1,1,1,5,5,0.5\n1,-1,10,20,0,40,0.9\n", ParseMode::Lenient).unwrap();
    assert_eq!(lenient.value[&1].len(), 1);
    assert_eq!(lenient.errors.len(), 1);
}

#[test]
fn writing_is_independent_of_insertion_order() {
    let rows = [
        "3,2,1,1,5,5,0.5,-1,-1,-1",
        "1,7,1,1,5,5,0.5,-1,-1,-1",
        "1,2,4,4,5,5,0.5,-1,-1,-1",
        "2,2,1,1,5,5,0.5,-1,-1,-1",
    ];
    let a = write_tracklets(&parse_tracklets(&rows.join("\n"), ParseMode::Strict).unwrap().value, 2);
    let mut rev = rows;
    rev.reverse();
    let b = write_tracklets(&parse_tracklets(&rev.join("\n"), ParseMode::Strict).unwrap().value, 2);
    assert_eq!(a, b);
    assert!(a.starts_with("1,2,4.00,4.00,5.00,5.00,0.50,-1,-1,-1\n1,7,"));
    assert_eq!(write_tracklets(&TrackletSet::new(), 2), "");
}

proptest! {
    #[test]
    fn parsing_ignores_line_order(seed in 0u64..10_000) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut lines: Vec<String> = (0..r.random_range(1..40))
            .map(|_| {
                format!(
                    "{},-1,{:.2},{:.2},{:.2},{:.2},{:.3},-1,-1,-1",
                    r.random_range(1..6),
                    r.random_range(-20.0..500.0),
                    r.random_range(-20.0..500.0),
                    r.random_range(1.0..100.0),
                    r.random_range(1.0..100.0),
                    r.random_range(0.0..1.0)
                )
            })
            .collect();
        let a = parse_detections(&lines.join("\n"), ParseMode::Strict).unwrap().value;
        lines.shuffle(&mut r);
        let b = parse_detections(&lines.join("\r\n"), ParseMode::Strict).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn result_round_trip_at_two_decimals(x in -100.0..2000.0f64, y in -100.0..1000.0f64, w in 0.01..400.0f64, h in 0.01..400.0f64, c in 0.0..1.0f64) {
        let mut ts = TrackletSet::new();
        let b = BBox::from_tlwh((x * 100.0).round() / 100.0, (y * 100.0).round() / 100.0, (w * 100.0).round().max(1.0) / 100.0, (h * 100.0).round().max(1.0) / 100.0);
        ts.insert(4, TrackEntry { frame: 9, bbox: b, confidence: (c * 100.0).round() / 100.0 }).unwrap();
        let text = write_tracklets(&ts, 2);
        let back = parse_tracklets(&text, ParseMode::Strict).unwrap().value;
        let e = back.get(4).unwrap()[0];
        for (a, b) in e.bbox.to_array().iter().zip(b.to_array()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert_eq!(write_tracklets(&back, 2), text);
    }
}
