use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::kcf::{kcf_init, kcf_update, TrackConfig, TrackerState};
use super::provider::HandRegionProvider;
use crate::fingertip::{detect_fingertip, SignatureConfig};
use crate::handpose::{analyze_pose, PoseConfig, PoseVerdict};
use crate::imgproc::pnm;
use crate::recognition::Recognizer;
use crate::segmentation::{segment_hand, skin_mask, GmmBackgroundModel, GmmConfig, HandRegion, SkinModel};
use crate::trajectory::{Phase, SmoothingConfig, StrokeOutcome, StrokeSession, TerminationConfig, TrajPoint};
use crate::{BinaryMask, Error, Image, MorphKernel, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub skin: SkinModel,
    pub gmm: GmmConfig,
    /// Fuse the skin mask with GMM foreground; off means skin alone.
    pub use_background: bool,
    pub morph_radius: usize,
    pub pose: PoseConfig,
    pub fingertip: SignatureConfig,
    pub track: TrackConfig,
    pub termination: TerminationConfig,
    pub smoothing: SmoothingConfig,
    /// Segmentation window relative to the tracked box.
    pub roi_margin: f64,
    /// Capture rate used to timestamp fingertip points.
    pub frame_rate: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            skin: SkinModel::default(),
            gmm: GmmConfig::default(),
            use_background: true,
            morph_radius: 3,
            pose: PoseConfig::default(),
            fingertip: SignatureConfig::default(),
            track: TrackConfig::default(),
            termination: TerminationConfig::default(),
            smoothing: SmoothingConfig::default(),
            roi_margin: 1.3,
            frame_rate: 30.0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.skin.validate()?;
        self.gmm.validate()?;
        MorphKernel::disk(self.morph_radius)?;
        self.pose.validate()?;
        self.fingertip.validate()?;
        self.track.validate()?;
        self.termination.validate()?;
        self.smoothing.validate()?;
        if !(self.roi_margin >= 1.0 && self.roi_margin.is_finite()) {
            return Err(Error::InvalidParameter("pipeline.roi_margin must be at least 1".into()));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(Error::InvalidParameter("pipeline.frame_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub track_ms: f64,
    pub background_ms: f64,
    pub segment_ms: f64,
    pub pose_ms: f64,
    pub fingertip_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResult {
    pub frame_index: usize,
    pub hand: Option<HandRegion>,
    /// The tracker was (re)initialized from the provider on this frame.
    pub reinitialized: bool,
    pub psr: Option<f64>,
    pub pose: PoseVerdict,
    pub fingers: Option<usize>,
    /// Present only when the pose is writing.
    pub fingertip: Option<Point>,
    pub phase: Phase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stroke: Option<StrokeOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: StageTiming,
}

impl FrameResult {
    fn empty(frame_index: usize, phase: Phase) -> Self {
        Self {
            frame_index,
            hand: None,
            reinitialized: false,
            psr: None,
            pose: PoseVerdict::Indeterminate,
            fingers: None,
            fingertip: None,
            phase,
            stroke: None,
            error: None,
            timing: StageTiming::default(),
        }
    }

    fn note(&mut self, e: &Error) {
        let msg = e.to_string();
        self.error = Some(match self.error.take() {
            Some(prev) => format!("{prev}; {msg}"),
            None => msg,
        });
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Per-frame detection-based fingertip tracking.
pub struct Pipeline {
    cfg: PipelineConfig,
    kernel: MorphKernel,
    provider: Box<dyn HandRegionProvider>,
    tracker: Option<TrackerState>,
    gmm: Option<GmmBackgroundModel>,
    session: StrokeSession,
    index: usize,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline")
            .field("provider", &self.provider.name())
            .field("tracker", &self.tracker)
            .field("index", &self.index)
            .finish()
    }
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, provider: Box<dyn HandRegionProvider>, recognizer: Arc<dyn Recognizer>) -> Result<Self> {
        cfg.validate()?;
        let kernel = MorphKernel::disk(cfg.morph_radius)?;
        let session = StrokeSession::new(cfg.termination, cfg.smoothing, recognizer);
        Ok(Self {
            cfg,
            kernel,
            provider,
            tracker: None,
            gmm: None,
            session,
            index: 0,
        })
    }

    pub fn session(&self) -> &StrokeSession {
        &self.session
    }

    /// Index the next frame will get.
    pub fn frame_index(&self) -> usize {
        self.index
    }

    /// Records a frame that could not be read and moves on.
    pub fn skip(&mut self, err: &Error) -> FrameResult {
        let mut r = FrameResult::empty(self.index, self.session.phase());
        r.note(err);
        self.index += 1;
        r
    }

    pub fn process(&mut self, frame: &Image) -> FrameResult {
        let start = Instant::now();
        let index = self.index;
        self.index += 1;
        let mut r = FrameResult::empty(index, self.session.phase());

        let t = Instant::now();
        let hand = self.track(index, frame, &mut r);
        r.timing.track_ms = ms(t);
        r.hand = hand;

        let t = Instant::now();
        let (fw, fh) = frame.dims();
        let roi = hand.and_then(|b| b.grown(self.cfg.roi_margin).pixel_rect(fw, fh));
        let fg = if self.cfg.use_background {
            match self.background(frame, roi) {
                Ok(m) => Some(m),
                Err(e) => {
                    r.note(&e);
                    None
                }
            }
        } else {
            None
        };
        r.timing.background_ms = ms(t);

        if let Some(rect) = roi {
            if let Err(e) = self.analyze(frame, rect, fg.as_ref(), &mut r) {
                r.note(&e);
            }
        }
        r.phase = self.session.phase();
        r.timing.total_ms = ms(start);
        r
    }

    fn track(&mut self, index: usize, frame: &Image, r: &mut FrameResult) -> Option<HandRegion> {
        let scheduled = index.is_multiple_of(self.cfg.track.reinit_interval);
        if !scheduled {
            if let Some(state) = self.tracker.as_mut() {
                match kcf_update(state, frame) {
                    Ok(b) => {
                        r.psr = Some(state.psr());
                        return Some(b);
                    }
                    Err(e) => {
                        r.psr = Some(state.psr());
                        r.note(&e);
                    }
                }
            }
        }
        self.tracker = None;
        let acquired = self
            .provider
            .next(index, frame)
            .map(|b| b.and_then(|b| b.clamped(frame.width(), frame.height())));
        match acquired {
            Ok(Some(b)) => match kcf_init(frame, b, &self.cfg.track) {
                Ok(state) => {
                    self.tracker = Some(state);
                    r.reinitialized = true;
                    Some(b)
                }
                Err(e) => {
                    r.note(&e);
                    None
                }
            },
            Ok(None) => None,
            Err(e) => {
                r.note(&e);
                None
            }
        }
    }

    /// Updates the background model, holding back the hand window and every
    /// skin-colored pixel, and returns the full-frame foreground mask.
    fn background(&mut self, frame: &Image, roi: Option<(usize, usize, usize, usize)>) -> Result<BinaryMask> {
        let (fw, fh) = frame.dims();
        let gmm = self
            .gmm
            .get_or_insert_with(|| GmmBackgroundModel::new(fw, fh, self.cfg.gmm));
        let mut exclude = skin_mask(frame, &self.cfg.skin)?;
        if let Some((x, y, w, h)) = roi {
            for row in y..y + h {
                exclude.bits_mut()[row * fw + x..row * fw + x + w].fill(true);
            }
        }
        gmm.update_selective(frame, Some(&exclude))
    }

    fn analyze(
        &mut self,
        frame: &Image,
        (x, y, w, h): (usize, usize, usize, usize),
        fg: Option<&BinaryMask>,
        r: &mut FrameResult,
    ) -> Result<()> {
        let t = Instant::now();
        let crop = frame.crop(x, y, w, h)?;
        let fg = match fg {
            Some(m) => m.crop(x, y, w, h)?,
            None => BinaryMask::filled(w, h, true),
        };
        let segmented = segment_hand(&crop, &self.cfg.skin, &fg, self.kernel);
        r.timing.segment_ms = ms(t);
        let mask = segmented?;

        let t = Instant::now();
        let pose = analyze_pose(&mask, &self.cfg.pose);
        r.timing.pose_ms = ms(t);
        let pose = match pose {
            Ok(p) => p,
            Err(e) => {
                r.pose = PoseVerdict::Indeterminate;
                return Err(e);
            }
        };
        r.pose = pose.verdict;
        r.fingers = Some(pose.count.fingers);

        match pose.verdict {
            PoseVerdict::Writing => {
                let t = Instant::now();
                let tip = detect_fingertip(&mask, pose.centroid.final_, &self.cfg.fingertip);
                r.timing.fingertip_ms = ms(t);
                let tip = tip?;
                let p = Point::new(tip.position.x + x as f64, tip.position.y + y as f64);
                r.fingertip = Some(p);
                self.session.observe_pose(true);
                if self.session.phase() == Phase::Writing {
                    let ts = r.frame_index as f64 * 1000.0 / self.cfg.frame_rate;
                    let out = self.session.push(TrajPoint::new(p.x, p.y, ts))?;
                    r.stroke = out.stroke;
                }
            }
            PoseVerdict::NonWriting => self.session.observe_pose(false),
            PoseVerdict::Indeterminate => {}
        }
        Ok(())
    }
}

/// Runs the pipeline over every frame in order.
pub fn run_pipeline<I>(
    frames: I,
    provider: Box<dyn HandRegionProvider>,
    cfg: PipelineConfig,
    recognizer: Arc<dyn Recognizer>,
) -> Result<Vec<FrameResult>>
where
    I: IntoIterator<Item = Result<Image>>,
{
    let mut p = Pipeline::new(cfg, provider, recognizer)?;
    Ok(frames
        .into_iter()
        .map(|f| match f {
            Ok(img) => p.process(&img),
            Err(e) => p.skip(&e),
        })
        .collect())
}

/// Directory of `frame_NNNNNN.ppm` files in name order.
#[derive(Debug, Clone)]
pub struct FrameDir {
    paths: Vec<PathBuf>,
}

impl FrameDir {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".ppm"))
            })
            .collect();
        if paths.is_empty() {
            return Err(Error::InvalidParameter(format!("no frame_*.ppm files in {}", dir.display())));
        }
        paths.sort();
        Ok(Self { paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    pub fn frames(&self) -> impl Iterator<Item = Result<Image>> + '_ {
        self.paths.iter().map(pnm::read_image)
    }
}

pub fn write_jsonl<W: Write>(mut out: W, results: &[FrameResult]) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Fingertip per frame from a JSON-lines result file.
pub fn read_fingertips_jsonl(path: impl AsRef<Path>) -> Result<Vec<Option<Point>>> {
    #[derive(Deserialize)]
    struct Row {
        fingertip: Option<Point>,
    }
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str::<Row>(l)?.fingertip))
        .collect()
}
