//! One-pass (OPE) and temporal-robustness (TRE) tracker evaluation.

use std::time::Instant;

use serde::Serialize;

use super::metrics::{iou, success_curve, SuccessCurve};
use crate::segmentation::HandRegion;
use crate::tracking::{kcf_init, kcf_update, TrackConfig, TrackerState};
use crate::{par, Error, Image, Result};

/// Frames with one ground-truth box each.
#[derive(Debug, Clone)]
pub struct TrackingSequence {
    pub name: String,
    pub frames: Vec<Image>,
    pub boxes: Vec<HandRegion>,
}

impl TrackingSequence {
    pub fn new(name: impl Into<String>, frames: Vec<Image>, boxes: Vec<HandRegion>) -> Result<Self> {
        if frames.len() != boxes.len() {
            return Err(Error::LengthMismatch(frames.len(), boxes.len()));
        }
        Ok(Self {
            name: name.into(),
            frames,
            boxes,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// A box tracker under evaluation.
pub trait BoxTracker {
    fn init(&mut self, frame: &Image, index: usize, bbox: HandRegion) -> Result<()>;

    /// Estimate for frame `index`; `None` when the tracker has lost the target.
    fn update(&mut self, frame: &Image, index: usize) -> Option<HandRegion>;
}

/// Returns the ground truth.
#[derive(Debug, Clone)]
pub struct OracleTracker {
    truth: Vec<HandRegion>,
}

impl OracleTracker {
    pub fn new(truth: Vec<HandRegion>) -> Self {
        Self { truth }
    }
}

impl BoxTracker for OracleTracker {
    fn init(&mut self, _frame: &Image, _index: usize, _bbox: HandRegion) -> Result<()> {
        Ok(())
    }

    fn update(&mut self, _frame: &Image, index: usize) -> Option<HandRegion> {
        self.truth.get(index).copied()
    }
}

/// Never moves from its initial box.
#[derive(Debug, Clone, Default)]
pub struct FrozenTracker {
    bbox: Option<HandRegion>,
}

impl BoxTracker for FrozenTracker {
    fn init(&mut self, _frame: &Image, _index: usize, bbox: HandRegion) -> Result<()> {
        self.bbox = Some(bbox);
        Ok(())
    }

    fn update(&mut self, _frame: &Image, _index: usize) -> Option<HandRegion> {
        self.bbox
    }
}

/// The correlation-filter tracker. A low-confidence frame keeps the last box.
#[derive(Debug)]
pub struct KcfTracker {
    cfg: TrackConfig,
    state: Option<TrackerState>,
}

impl KcfTracker {
    pub fn new(cfg: TrackConfig) -> Self {
        Self { cfg, state: None }
    }
}

impl BoxTracker for KcfTracker {
    fn init(&mut self, frame: &Image, _index: usize, bbox: HandRegion) -> Result<()> {
        let b = bbox.clamped(frame.width(), frame.height()).ok_or(Error::BoxOutOfFrame {
            x: bbox.x,
            y: bbox.y,
            w: bbox.w,
            h: bbox.h,
        })?;
        self.state = Some(kcf_init(frame, b, &self.cfg)?);
        Ok(())
    }

    fn update(&mut self, frame: &Image, _index: usize) -> Option<HandRegion> {
        let state = self.state.as_mut()?;
        match kcf_update(state, frame) {
            Ok(b) => Some(b),
            Err(_) => Some(state.bbox()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpeTreReport {
    pub ope: SuccessCurve,
    pub tre: SuccessCurve,
    /// Frames per second of tracker work, initialization included.
    pub fps: f64,
    pub sequences: usize,
    pub frames: usize,
    pub tre_starts: usize,
}

/// `n` starting frames spread evenly over `len` frames, the first being 0.
pub fn tre_start_frames(len: usize, n: usize) -> Vec<usize> {
    (0..n.max(1)).map(|k| k * len / n.max(1)).collect()
}

struct Run {
    overlaps: Vec<f64>,
    frames: usize,
    secs: f64,
}

fn run_from(tracker: &mut dyn BoxTracker, seq: &TrackingSequence, start: usize) -> Run {
    let mut overlaps = Vec::with_capacity(seq.len() - start);
    let t = Instant::now();
    let ok = tracker.init(&seq.frames[start], start, seq.boxes[start]).is_ok();
    let mut secs = t.elapsed().as_secs_f64();
    overlaps.push(if ok { 1.0 } else { 0.0 });
    for i in start + 1..seq.len() {
        let t = Instant::now();
        let est = if ok { tracker.update(&seq.frames[i], i) } else { None };
        secs += t.elapsed().as_secs_f64();
        overlaps.push(est.map_or(0.0, |b| iou(&b, &seq.boxes[i])));
    }
    Run {
        frames: overlaps.len(),
        overlaps,
        secs,
    }
}

/// OPE runs each sequence once from frame 0; TRE restarts it from
/// `tre_starts` evenly spaced frames and pools every run's overlaps.
/// Sequences are evaluated independently and merged in input order.
pub fn run_ope_tre<F>(factory: F, sequences: &[TrackingSequence], tre_starts: usize) -> OpeTreReport
where
    F: Fn(&TrackingSequence) -> Box<dyn BoxTracker> + Sync + Send,
{
    let per_seq: Vec<(Run, Vec<Run>)> = par::map_slice(sequences, |seq| {
        if seq.is_empty() {
            return (
                Run {
                    overlaps: vec![],
                    frames: 0,
                    secs: 0.0,
                },
                vec![],
            );
        }
        let ope = run_from(factory(seq).as_mut(), seq, 0);
        let tre = tre_start_frames(seq.len(), tre_starts)
            .into_iter()
            .map(|s| run_from(factory(seq).as_mut(), seq, s))
            .collect();
        (ope, tre)
    });
    let mut ope_o = Vec::new();
    let mut tre_o = Vec::new();
    let (mut frames, mut secs) = (0usize, 0.0);
    for (ope, tre) in &per_seq {
        ope_o.extend_from_slice(&ope.overlaps);
        frames += ope.frames;
        secs += ope.secs;
        for r in tre {
            tre_o.extend_from_slice(&r.overlaps);
            frames += r.frames;
            secs += r.secs;
        }
    }
    OpeTreReport {
        ope: success_curve(&ope_o),
        tre: success_curve(&tre_o),
        fps: if secs > 0.0 { frames as f64 / secs } else { 0.0 },
        sequences: sequences.len(),
        frames: sequences.iter().map(TrackingSequence::len).sum(),
        tre_starts,
    }
}
