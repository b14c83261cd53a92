//! `airwrite` command-line front end.
//!
//! Every command prints one JSON document on stdout. On failure the process
//! exits with status 1 and prints `{"error": kind, "message": text}` on a
//! single stderr line.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use airwrite_core::config::{Settings, KEYS};
use airwrite_core::eval::{
    evaluate_chars, evaluate_tracking, load_tracking_sequence, read_sequence_list, recognize_stroke, run_ope_tre,
    synth_hand, KcfTracker, SequenceSpec, SequenceTruth, SynthHandSpec, SyntheticSequence,
};
use airwrite_core::fingertip::{detect_from_series, mask_signature};
use airwrite_core::handpose::{analyze_pose, hand_centroid};
use airwrite_core::imgproc::pnm;
use airwrite_core::recognition::{default_templates, load_templates, recognizer_by_name, Recognizer, TemplateSet};
use airwrite_core::tracking::{
    read_annotations, read_fingertips_jsonl, run_pipeline, write_jsonl, AnnotationProvider, FrameDir,
    HandRegionProvider, SkinBlobProvider,
};
use airwrite_core::trajectory::TrajectoryFile;
use airwrite_core::{BinaryMask, Error};
use airwrite_service::{ServiceConfig, DEFAULT_PORT};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "airwrite", version, about = "Air-writing recognition from hand video")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Settings file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set fingertip.gamma=3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Recognizer name.
    #[arg(long, global = true, value_name = "NAME")]
    recognizer: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a synthetic hand mask and its truth.
    SynthHand {
        #[arg(long)]
        fingers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Render a synthetic frame sequence with per-frame truth.
    SynthSeq {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count raised fingers in a hand mask.
    Pose {
        #[arg(long)]
        mask: PathBuf,
    },
    /// Locate the fingertip in a one-finger hand mask.
    Fingertip {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write the signature series as CSV.
        #[arg(long, value_name = "PATH")]
        dump_signature: Option<PathBuf>,
    },
    /// Run the full pipeline over a frame directory.
    Track {
        #[arg(long)]
        frames: PathBuf,
        /// Annotation list or sequence truth file with one box per frame.
        #[arg(long, conflicts_with = "fallback_detector", required_unless_present = "fallback_detector")]
        boxes: Option<PathBuf>,
        /// Find the hand as the largest skin-colored blob.
        #[arg(long)]
        fallback_detector: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Smooth and recognize one trajectory.
    Write {
        #[arg(long)]
        traj: PathBuf,
        /// Template directory; the built-in set when omitted.
        #[arg(long)]
        templates: Option<PathBuf>,
    },
    /// Fingertip precision of a result file against sequence truth.
    EvalTracking {
        /// Result JSON lines, or a truth file.
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 15.0)]
        threshold: f64,
    },
    /// One-pass and temporal-robustness success curves of the box tracker.
    EvalOpeTre {
        /// File listing sequence directories, one per line.
        #[arg(long)]
        sequences: PathBuf,
        #[arg(long, default_value_t = 20)]
        tre_starts: usize,
    },
    /// Recognition accuracy over a directory of labeled trajectories.
    EvalChars {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        templates: Option<PathBuf>,
    },
    /// Write the built-in template set as PGM files.
    GenTemplates {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the merged settings, or every known key.
    Settings {
        #[arg(long)]
        keys: bool,
    },
    /// Start the stroke-session service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long)]
        templates: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    /// Prefixes the message with the file it concerns.
    fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
        move |e| Failure {
            kind: e.kind(),
            message: format!("{}: {e}", path.display()),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "Usage",
            message: message.into(),
        }
    }
}

type CmdResult = Result<Value, Failure>;

fn settings(g: &Global, extra: &[String]) -> Result<Settings, Failure> {
    let mut overrides = g.set.clone();
    if let Some(name) = &g.recognizer {
        overrides.push(format!("recognizer.name={name}"));
    }
    overrides.extend_from_slice(extra);
    Ok(Settings::load(g.config.as_deref(), &overrides)?)
}

fn templates_from(dir: Option<&Path>) -> Result<TemplateSet, Failure> {
    match dir {
        Some(d) => Ok(load_templates(d).map_err(Failure::at(d))?.set),
        None => Ok(default_templates()),
    }
}

fn recognizer(s: &Settings, templates: Option<&Path>) -> Result<Arc<dyn Recognizer>, Failure> {
    Ok(recognizer_by_name(&s.recognizer, templates_from(templates)?, s.classifier)?)
}

fn read_mask(path: &Path) -> Result<BinaryMask, Failure> {
    pnm::read_mask(path).map_err(Failure::at(path))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    std::fs::write(path, text).map_err(Error::from)?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::at(path)(e.into()))?;
    serde_json::from_str(&text).map_err(|e| Failure::at(path)(e.into()))
}

fn synth_hand_cmd(fingers: usize, seed: u64, out: &Path, truth_path: &Path) -> CmdResult {
    let spec = SynthHandSpec::random(fingers, seed)?;
    let (mask, truth) = synth_hand(&spec)?;
    pnm::write_mask(out, &mask)?;
    write_json(truth_path, &truth)?;
    Ok(json!({"mask": out, "truth": truth_path, "width": mask.width(), "height": mask.height(), "fingers": truth.finger_count}))
}

fn synth_seq_cmd(spec: &Path, out: &Path) -> CmdResult {
    let spec: SequenceSpec = read_json(spec)?;
    let seq = SyntheticSequence::new(spec)?;
    seq.write_dir(out)?;
    Ok(json!({"out": out, "frames": seq.len()}))
}

fn pose_cmd(s: &Settings, mask: &Path) -> CmdResult {
    let mask = read_mask(mask)?;
    let pose = analyze_pose(&mask, &s.pipeline.pose)?;
    Ok(json!({
        "fingers": pose.count.fingers,
        "verdict": pose.verdict,
        "centroid": pose.centroid.final_,
        "inner_radius": pose.count.inner_radius,
        "crossings": pose.count.crossings,
    }))
}

fn fingertip_cmd(s: &Settings, mask: &Path, dump: Option<&Path>) -> CmdResult {
    let mask = read_mask(mask)?;
    let centroid = hand_centroid(&mask)?.final_;
    let series = mask_signature(&mask, centroid, &s.pipeline.fingertip)?;
    if let Some(path) = dump {
        std::fs::write(path, series.to_csv()).map_err(Error::from)?;
    }
    let tip = detect_from_series(&series);
    Ok(json!({
        "x": tip.position.x,
        "y": tip.position.y,
        "psi": tip.psi_max,
        "index": tip.index,
        "margin": tip.margin,
        "centroid": centroid,
    }))
}

fn box_provider(path: &Path) -> Result<Box<dyn HandRegionProvider>, Failure> {
    match read_annotations(path) {
        Ok(a) => Ok(Box::new(AnnotationProvider::new(&a))),
        Err(first) => match SequenceTruth::read(path) {
            Ok(t) => Ok(Box::new(AnnotationProvider::from_regions(t.boxes()))),
            Err(_) => Err(Failure::at(path)(first)),
        },
    }
}

fn track_cmd(s: &Settings, frames: &Path, boxes: Option<&Path>, out: &Path) -> CmdResult {
    let provider: Box<dyn HandRegionProvider> = match boxes {
        Some(p) => box_provider(p)?,
        None => Box::new(SkinBlobProvider {
            skin: s.pipeline.skin,
            ..SkinBlobProvider::default()
        }),
    };
    let dir = FrameDir::open(frames).map_err(Failure::at(frames))?;
    let results = run_pipeline(dir.frames(), provider, s.pipeline.clone(), recognizer(s, None)?)?;
    let file = std::fs::File::create(out).map_err(Error::from)?;
    write_jsonl(std::io::BufWriter::new(file), &results)?;
    let strokes: Vec<Value> = results
        .iter()
        .filter_map(|r| {
            let stroke = r.stroke.as_ref()?;
            let top = stroke.result.as_ref().and_then(|res| res.top());
            Some(json!({
                "frame": r.frame_index,
                "points": stroke.smoothed.len(),
                "label": top.map(|t| t.label),
                "score": top.map(|t| t.score),
            }))
        })
        .collect();
    let total_ms: f64 = results.iter().map(|r| r.timing.total_ms).sum();
    Ok(json!({
        "out": out,
        "frames": results.len(),
        "fingertips": results.iter().filter(|r| r.fingertip.is_some()).count(),
        "errors": results.iter().filter(|r| r.error.is_some()).count(),
        "strokes": strokes,
        "fps": if total_ms > 0.0 { results.len() as f64 * 1000.0 / total_ms } else { 0.0 },
    }))
}

fn write_cmd(s: &Settings, traj: &Path, templates: Option<&Path>) -> CmdResult {
    let file = TrajectoryFile::read(traj).map_err(Failure::at(traj))?;
    let rec = recognizer(s, templates)?;
    let out = recognize_stroke(&file.points, &s.pipeline.smoothing, rec.as_ref())?;
    Ok(json!({
        "label": out.result.top().map(|t| t.label),
        "ranked": out.result.ranked,
        "rejected": out.result.rejected,
        "smoothing": out.smoothing,
        "points": out.smoothed.len(),
    }))
}

fn eval_tracking_cmd(pred: &Path, truth: &Path, threshold: f64) -> CmdResult {
    let pred = match SequenceTruth::read(pred) {
        Ok(t) => t.tips(),
        Err(_) => read_fingertips_jsonl(pred).map_err(Failure::at(pred))?,
    };
    let truth = SequenceTruth::read(truth).map_err(Failure::at(truth))?;
    let report = evaluate_tracking(&pred, &truth.tips(), threshold)?;
    Ok(serde_json::to_value(report).map_err(Error::from)?)
}

fn eval_ope_tre_cmd(s: &Settings, list: &Path, tre_starts: usize) -> CmdResult {
    if tre_starts == 0 {
        return Err(Failure::usage("--tre-starts must be at least 1"));
    }
    let seqs = read_sequence_list(list)?
        .iter()
        .map(load_tracking_sequence)
        .collect::<Result<Vec<_>, _>>()?;
    let track = &s.pipeline.track;
    let report = run_ope_tre(|_| Box::new(KcfTracker::new(track.clone())), &seqs, tre_starts);
    Ok(json!({
        "ope_auc": report.ope.auc,
        "tre_auc": report.tre.auc,
        "report": report,
    }))
}

fn eval_chars_cmd(s: &Settings, dataset: &Path, templates: Option<&Path>) -> CmdResult {
    let rec = recognizer(s, templates)?;
    let report = evaluate_chars(dataset, &s.pipeline.smoothing, rec.as_ref())?;
    Ok(serde_json::to_value(report).map_err(Error::from)?)
}

fn gen_templates_cmd(out: &Path) -> CmdResult {
    let written = default_templates().save(out)?;
    Ok(json!({"out": out, "templates": written.len()}))
}

fn serve_cmd(s: &Settings, host: IpAddr, port: u16, templates: Option<&Path>) -> CmdResult {
    let config = ServiceConfig {
        termination: s.pipeline.termination,
        smoothing: s.pipeline.smoothing,
        recognizer: recognizer(s, templates)?,
    };
    let addr = SocketAddr::new(host, port);
    let runtime = tokio::runtime::Runtime::new().map_err(Error::from)?;
    eprintln!("{}", json!({"listening": addr.to_string()}));
    runtime
        .block_on(airwrite_service::serve(addr, config))
        .map_err(Error::from)?;
    Ok(json!({"stopped": addr.to_string()}))
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::SynthHand {
            fingers,
            seed,
            out,
            truth,
        } => synth_hand_cmd(*fingers, *seed, out, truth),
        Command::SynthSeq { spec, out } => synth_seq_cmd(spec, out),
        Command::Pose { mask } => pose_cmd(&settings(g, &[])?, mask),
        Command::Fingertip {
            mask,
            gamma,
            samples,
            dump_signature,
        } => {
            let mut extra = Vec::new();
            if let Some(v) = gamma {
                extra.push(format!("fingertip.gamma={v}"));
            }
            if let Some(v) = samples {
                extra.push(format!("fingertip.samples={v}"));
            }
            fingertip_cmd(&settings(g, &extra)?, mask, dump_signature.as_deref())
        }
        Command::Track {
            frames,
            boxes,
            fallback_detector: _,
            out,
        } => track_cmd(&settings(g, &[])?, frames, boxes.as_deref(), out),
        Command::Write { traj, templates } => write_cmd(&settings(g, &[])?, traj, templates.as_deref()),
        Command::EvalTracking { pred, truth, threshold } => eval_tracking_cmd(pred, truth, *threshold),
        Command::EvalOpeTre { sequences, tre_starts } => eval_ope_tre_cmd(&settings(g, &[])?, sequences, *tre_starts),
        Command::EvalChars { dataset, templates } => eval_chars_cmd(&settings(g, &[])?, dataset, templates.as_deref()),
        Command::GenTemplates { out } => gen_templates_cmd(out),
        Command::Settings { keys } => {
            if *keys {
                Ok(json!(KEYS))
            } else {
                let s = settings(g, &[])?;
                let map: serde_json::Map<String, Value> = KEYS
                    .iter()
                    .map(|k| (k.to_string(), Value::String(s.get(k).unwrap_or_default())))
                    .collect();
                Ok(Value::Object(map))
            }
        }
        Command::Serve { port, host, templates } => serve_cmd(&settings(g, &[])?, *host, *port, templates.as_deref()),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", json!({"error": f.kind, "message": f.message}));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let message = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            return fail(Failure::usage(message.trim_start_matches("error: ")));
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(f) => fail(f),
    }
}
