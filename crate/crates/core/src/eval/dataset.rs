//! Dataset loading and summary reports.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::metrics::{default_precision_thresholds, precision_curve, PrecisionCurve};
use super::ope::TrackingSequence;
use super::synth::SequenceTruth;
use crate::recognition::{confusion_matrix, CharClass, ConfusionMatrix, RecognitionResult, Recognizer};
use crate::tracking::FrameDir;
use crate::trajectory::{rasterize, smooth_points, SmoothStats, SmoothingConfig, TrajPoint, Trajectory, TrajectoryFile, RASTER_SIDE};
use crate::{Error, Point, Result};

/// Smoothed points, smoothing statistics and ranking for one stroke.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrokeRecognition {
    pub smoothed: Vec<TrajPoint>,
    pub smoothing: SmoothStats,
    pub result: RecognitionResult,
}

/// Smooth, rasterize and classify a finished stroke.
pub fn recognize_stroke(
    points: &[TrajPoint],
    smoothing: &SmoothingConfig,
    recognizer: &dyn Recognizer,
) -> Result<StrokeRecognition> {
    let (smoothed, stats) = smooth_points(points, smoothing)?;
    let raster = rasterize(&Trajectory::from_points(smoothed.clone())?, RASTER_SIDE)?;
    Ok(StrokeRecognition {
        smoothed,
        smoothing: stats,
        result: recognizer.recognize(&raster)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharSampleResult {
    pub file: String,
    pub label: Option<CharClass>,
    pub predicted: Option<CharClass>,
    pub score: Option<f64>,
    pub rejected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharEvalReport {
    pub recognizer: String,
    pub samples: Vec<CharSampleResult>,
    /// Samples that could not be scored (no label, unreadable, degenerate).
    pub skipped: usize,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

/// Labeled `*.json` trajectory files in `dir`, in name order.
pub fn char_dataset_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidParameter(format!("no trajectory .json files in {}", dir.display())));
    }
    Ok(files)
}

/// Recognizes every trajectory in `dir` against its label.
pub fn evaluate_chars(
    dir: impl AsRef<Path>,
    smoothing: &SmoothingConfig,
    recognizer: &dyn Recognizer,
) -> Result<CharEvalReport> {
    let mut samples = Vec::new();
    let mut scored: Vec<(CharClass, RecognitionResult)> = Vec::new();
    for path in char_dataset_files(dir)? {
        let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut sample = CharSampleResult {
            file,
            label: None,
            predicted: None,
            score: None,
            rejected: false,
            error: None,
        };
        let outcome = TrajectoryFile::read(&path).and_then(|tf| {
            let label = tf
                .label
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("trajectory has no label".into()))
                .and_then(|l| {
                    let mut chars = l.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => CharClass::new(c),
                        _ => Err(Error::InvalidParameter(format!("label {l:?} is not one character"))),
                    }
                })?;
            Ok((label, recognize_stroke(&tf.points, smoothing, recognizer)?))
        });
        match outcome {
            Ok((label, rec)) => {
                sample.label = Some(label);
                let top = rec.result.top();
                sample.predicted = top.map(|t| t.label);
                sample.score = top.map(|t| t.score);
                sample.rejected = rec.result.rejected;
                scored.push((label, rec.result));
            }
            Err(e) => sample.error = Some(e.to_string()),
        }
        samples.push(sample);
    }
    let confusion = confusion_matrix(&scored);
    Ok(CharEvalReport {
        recognizer: recognizer.name().to_string(),
        skipped: samples.len() - scored.len(),
        accuracy: confusion.accuracy(),
        confusion,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingReport {
    pub frames: usize,
    /// Frames with a fingertip estimate.
    pub emitted: usize,
    pub threshold: f64,
    pub precision: f64,
    pub mean_error: Option<f64>,
    pub curve: PrecisionCurve,
}

/// Point precision of per-frame fingertip estimates; frames without an
/// estimate count as misses.
pub fn evaluate_tracking(pred: &[Option<Point>], truth: &[Option<Point>], threshold: f64) -> Result<TrackingReport> {
    let mut thresholds = default_precision_thresholds();
    if !thresholds.contains(&threshold) {
        thresholds.push(threshold);
        thresholds.sort_by(f64::total_cmp);
    }
    let curve = precision_curve(pred, truth, &thresholds)?;
    let errors: Vec<f64> = pred
        .iter()
        .zip(truth)
        .filter_map(|(p, t)| Some(p.as_ref()?.distance(*t.as_ref()?)))
        .collect();
    Ok(TrackingReport {
        frames: pred.len(),
        emitted: pred.iter().filter(|p| p.is_some()).count(),
        threshold,
        precision: curve.at(threshold).unwrap_or(0.0),
        mean_error: (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64),
        curve,
    })
}

/// A frame directory with its `truth.json`.
pub fn load_tracking_sequence(dir: impl AsRef<Path>) -> Result<TrackingSequence> {
    let dir = dir.as_ref();
    let truth = SequenceTruth::read(dir.join("truth.json"))?;
    let frames = FrameDir::open(dir)?.frames().collect::<Result<Vec<_>>>()?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    TrackingSequence::new(name, frames, truth.boxes())
}

/// Sequence directories listed one per line; relative entries resolve
/// against the list's directory. Blank lines and `#` comments are skipped.
pub fn read_sequence_list(path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    let dirs: Vec<PathBuf> = std::fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
        .collect();
    if dirs.is_empty() {
        return Err(Error::InvalidParameter(format!("{} lists no sequences", path.display())));
    }
    Ok(dirs)
}
