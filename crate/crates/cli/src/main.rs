//! `oc-track`: run the tracker on MOT detection files, score results,
//! generate synthetic scenes and re-run the noise checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ocsort::metrics::{evaluate, EvalReport, DEFAULT_IOU_MATCH};
use ocsort::mot::{
    apply_config_text, parse_detections, parse_tracklets, write_detections, write_tracklets, ParseMode,
    DEFAULT_PRECISION,
};
use ocsort::noise::{generate_scene, noise_check, CheckRow, ScenePlan};
use ocsort::postprocess::{head_padding, linear_interpolate};
use ocsort::tracker::run_sequence;
use ocsort::{TrackerConfig, TrackletSet};

#[derive(Parser)]
#[command(name = "oc-track", version, about = "Observation-centric SORT multi-object tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a MOT detection file and write MOT results.
    Track(TrackArgs),
    /// Score a result file against ground truth.
    Evaluate(EvaluateArgs),
    /// Sample detections and ground truth from a JSON scene plan.
    Simulate(SimulateArgs),
    /// Run the Monte Carlo and closed-form noise checks.
    NoiseCheck(NoiseCheckArgs),
    /// Fill short gaps in a result file by linear interpolation.
    Interpolate(InterpolateArgs),
}

#[derive(Args)]
struct TrackArgs {
    #[arg(long)]
    dets: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    det_thresh: Option<f64>,
    #[arg(long)]
    iou_thresh: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta_t: Option<u32>,
    #[arg(long)]
    max_age: Option<u32>,
    #[arg(long)]
    min_hits: Option<u32>,
    #[arg(long)]
    no_oru: bool,
    #[arg(long)]
    no_ocm: bool,
    #[arg(long)]
    no_ocr: bool,
    /// Linear interpolation of gaps up to 20 frames on tracks spanning 30+.
    #[arg(long)]
    interpolate: bool,
    /// Write back the boxes a track had before it was confirmed.
    #[arg(long)]
    head_padding: bool,
    /// Skip malformed lines instead of failing.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// IoU needed for a prediction to count as a hit.
    #[arg(long, default_value_t = DEFAULT_IOU_MATCH)]
    iou: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Directory for `det.txt` and `gt.txt`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct NoiseCheckArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InterpolateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    max_gap: u32,
    #[arg(long, default_value_t = 30)]
    min_len: u32,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn tracker_config(args: &TrackArgs) -> Result<TrackerConfig> {
    let mut config = TrackerConfig::default();
    if let Some(path) = &args.config {
        apply_config_text(&mut config, &read(path)?)?;
    }
    config.det_threshold = args.det_thresh.unwrap_or(config.det_threshold);
    config.iou_gate = args.iou_thresh.unwrap_or(config.iou_gate);
    config.lambda = args.lambda.unwrap_or(config.lambda);
    config.delta_t = args.delta_t.unwrap_or(config.delta_t);
    config.max_age = args.max_age.unwrap_or(config.max_age);
    config.min_hits = args.min_hits.unwrap_or(config.min_hits);
    config.enable_oru &= !args.no_oru;
    config.enable_ocm &= !args.no_ocm;
    config.enable_ocr &= !args.no_ocr;
    config.validate()?;
    Ok(config)
}

fn warn_skipped(errors: &[ocsort::Error]) {
    for e in errors {
        eprintln!(
            "{}",
            serde_json::json!({ "warning": "skipped", "message": e.to_string() })
        );
    }
}

fn track(args: TrackArgs) -> Result<()> {
    let config = tracker_config(&args)?;
    let mode = if args.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    let parsed = parse_detections(&read(&args.dets)?, mode)?;
    warn_skipped(&parsed.errors);
    let frames = parsed.value;
    let last = frames.keys().next_back().copied().unwrap_or(0);
    let (outputs, records) = run_sequence(config, &frames, 1, last)?;
    let mut results = TrackletSet::from_outputs(&outputs);
    if args.head_padding {
        results = head_padding(&results, &records);
    }
    if args.interpolate {
        results = linear_interpolate(&results, 20, 30);
    }
    write(&args.out, &write_tracklets(&results, DEFAULT_PRECISION))
}

fn evaluate_files(args: EvaluateArgs) -> Result<()> {
    let gt = parse_tracklets(&read(&args.gt)?, ParseMode::Strict)?.value;
    let pred = parse_tracklets(&read(&args.pred)?, ParseMode::Strict)?.value;
    let report = evaluate(&gt, &pred, args.iou);
    println!("{}", EvalReport::csv_header());
    println!("{}", report.csv_row());
    println!();
    println!("{report}");
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut plan: ScenePlan =
        serde_json::from_str(&read(&args.plan)?).map_err(|e| ocsort::Error::Plan(e.to_string()))?;
    plan.seed = args.seed;
    let scene = generate_scene(&plan)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    write(
        &args.out_dir.join("det.txt"),
        &write_detections(&scene.detections, DEFAULT_PRECISION),
    )?;
    write(
        &args.out_dir.join("gt.txt"),
        &write_tracklets(&scene.ground_truth, DEFAULT_PRECISION),
    )
}

fn run_noise_check(args: NoiseCheckArgs) -> Result<()> {
    let rows = noise_check(args.seed)?;
    let mut csv = String::from(CheckRow::csv_header());
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    write(&args.report, &csv)?;
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.parameter.as_str()).collect();
    println!("{} of {} checks passed", rows.len() - failed.len(), rows.len());
    if !failed.is_empty() {
        bail!(CheckFailed(failed.join(", ")));
    }
    Ok(())
}

fn interpolate(args: InterpolateArgs) -> Result<()> {
    let ts = parse_tracklets(&read(&args.input)?, ParseMode::Strict)?.value;
    write(
        &args.out,
        &write_tracklets(&linear_interpolate(&ts, args.max_gap, args.min_len), DEFAULT_PRECISION),
    )
}

#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "checks out of tolerance: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn error_kind(err: &anyhow::Error) -> &'static str {
    use ocsort::Error as E;
    if err.is::<CheckFailed>() {
        return "check_failed";
    }
    if err.chain().any(|c| c.is::<std::io::Error>()) {
        return "io";
    }
    match err.downcast_ref::<E>() {
        Some(E::Parse { .. } | E::DuplicateEntry { .. }) => "parse",
        Some(E::Config(_)) => "config",
        Some(E::Plan(_)) => "plan",
        Some(_) => "tracking",
        None => "internal",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.kind().to_string();
            eprint!("{}", e.render());
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": message }));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Track(a) => track(a),
        Command::Evaluate(a) => evaluate_files(a),
        Command::Simulate(a) => simulate(a),
        Command::NoiseCheck(a) => run_noise_check(a),
        Command::Interpolate(a) => interpolate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = format!("{err:#}");
            eprintln!(
                "{}",
                serde_json::json!({ "error": error_kind(&err), "message": message })
            );
            ExitCode::FAILURE
        }
    }
}
