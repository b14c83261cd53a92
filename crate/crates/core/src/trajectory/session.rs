use std::sync::Arc;

use serde::Serialize;

use super::{
    check_termination, rasterize, smooth_points, velocity, SmoothStats, SmoothingConfig, TerminationConfig, TrajPoint,
    Trajectory, RASTER_SIDE,
};
use crate::recognition::{RecognitionResult, Recognizer};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Idle,
    Writing,
    Terminated,
}

/// What happened when a stroke ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrokeOutcome {
    pub smoothed: Vec<TrajPoint>,
    pub smoothing: Option<SmoothStats>,
    pub result: Option<RecognitionResult>,
    /// Why smoothing or recognition could not run, if it could not.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushOutcome {
    pub phase: Phase,
    /// Speed of the step into the new point, px/second.
    pub velocity: Option<f64>,
    pub point_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stroke: Option<StrokeOutcome>,
}

/// Idle → writing → terminated → (clear) → idle stroke state machine with
/// termination, smoothing and recognition wired in.
pub struct StrokeSession {
    phase: Phase,
    trajectory: Trajectory,
    termination: TerminationConfig,
    smoothing: SmoothingConfig,
    recognizer: Arc<dyn Recognizer>,
    last: Option<StrokeOutcome>,
}

impl std::fmt::Debug for StrokeSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StrokeSession")
            .field("phase", &self.phase)
            .field("points", &self.trajectory.len())
            .field("recognizer", &self.recognizer.name())
            .finish()
    }
}

impl StrokeSession {
    pub fn new(termination: TerminationConfig, smoothing: SmoothingConfig, recognizer: Arc<dyn Recognizer>) -> Self {
        Self {
            phase: Phase::Idle,
            trajectory: Trajectory::new(),
            termination,
            smoothing,
            recognizer,
            last: None,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn last_outcome(&self) -> Option<&StrokeOutcome> {
        self.last.as_ref()
    }

    fn clear(&mut self) {
        self.trajectory.clear();
        self.last = None;
        self.phase = Phase::Idle;
    }

    fn start(&mut self) {
        self.trajectory.reset();
        self.last = None;
        self.phase = Phase::Writing;
    }

    /// Explicit pose event. One raised finger starts a stroke, clearing a
    /// finished one first; any other count clears.
    pub fn set_pose(&mut self, raised_fingers: usize) {
        match (raised_fingers, self.phase) {
            (1, Phase::Writing) => {}
            (1, Phase::Terminated) => {
                self.clear();
                self.start();
            }
            (1, Phase::Idle) => self.start(),
            _ => self.clear(),
        }
    }

    /// Pose observed on a video frame. Unlike [`set_pose`](Self::set_pose), a
    /// writing pose does not restart after termination: the hand has to
    /// leave the writing pose first.
    pub fn observe_pose(&mut self, writing: bool) {
        match (writing, self.phase) {
            (true, Phase::Idle) => self.start(),
            (true, _) => {}
            (false, _) => {
                if self.phase != Phase::Idle || !self.trajectory.is_empty() {
                    self.clear();
                }
            }
        }
    }

    pub fn push(&mut self, p: TrajPoint) -> Result<PushOutcome> {
        if self.phase != Phase::Writing {
            return Err(Error::TrajectoryClosed);
        }
        self.trajectory.push(p)?;
        let n = self.trajectory.len();
        let v = (n >= 2).then(|| velocity(self.trajectory.points(), n - 1)).transpose()?;
        let mut stroke = None;
        if check_termination(self.trajectory.points(), &self.termination) {
            self.trajectory.terminate();
            self.phase = Phase::Terminated;
            let outcome = self.finish();
            self.last = Some(outcome.clone());
            stroke = Some(outcome);
        }
        Ok(PushOutcome {
            phase: self.phase,
            velocity: v,
            point_count: n,
            stroke,
        })
    }

    fn finish(&self) -> StrokeOutcome {
        let points = self.trajectory.points();
        let (smoothed, stats) = match smooth_points(points, &self.smoothing) {
            Ok((s, st)) => (s, Some(st)),
            Err(e) => {
                return StrokeOutcome {
                    smoothed: points.to_vec(),
                    smoothing: None,
                    result: None,
                    error: Some(e.to_string()),
                }
            }
        };
        let recognized = Trajectory::from_points(smoothed.clone())
            .and_then(|t| rasterize(&t, RASTER_SIDE))
            .and_then(|raster| self.recognizer.recognize(&raster));
        match recognized {
            Ok(r) => StrokeOutcome {
                smoothed,
                smoothing: stats,
                result: Some(r),
                error: None,
            },
            Err(e) => StrokeOutcome {
                smoothed,
                smoothing: stats,
                result: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognition::TemplateRecognizer;

    fn session() -> StrokeSession {
        StrokeSession::new(
            TerminationConfig::default(),
            SmoothingConfig::default(),
            Arc::new(TemplateRecognizer::default()),
        )
    }

    #[test]
    fn points_rejected_unless_writing() {
        let mut s = session();
        assert!(matches!(s.push(TrajPoint::new(0.0, 0.0, 0.0)), Err(Error::TrajectoryClosed)));
        s.set_pose(1);
        assert_eq!(s.phase(), Phase::Writing);
        s.push(TrajPoint::new(0.0, 0.0, 0.0)).unwrap();
        assert!(matches!(s.push(TrajPoint::new(1.0, 0.0, 0.0)), Err(Error::NonMonotonicTime)));
        s.set_pose(5);
        assert_eq!(s.phase(), Phase::Idle);
        assert!(s.trajectory().is_empty());
    }

    #[test]
    fn slow_tail_terminates_and_recognizes() {
        let mut s = session();
        s.set_pose(1);
        let mut last = None;
        for i in 0..20 {
            let x = if i < 12 { i as f64 * 4.0 } else { 44.0 + (i - 11) as f64 * 0.5 };
            last = Some(s.push(TrajPoint::new(x, 10.0, i as f64 * 33.0)).unwrap());
            if s.phase() == Phase::Terminated {
                break;
            }
        }
        let last = last.unwrap();
        assert_eq!(last.phase, Phase::Terminated);
        assert_eq!(last.point_count, 17);
        assert!(last.stroke.unwrap().result.is_some());
        assert!(matches!(s.push(TrajPoint::new(0.0, 0.0, 9999.0)), Err(Error::TrajectoryClosed)));
        s.set_pose(1);
        assert_eq!(s.phase(), Phase::Writing);
        assert!(s.trajectory().is_empty());
    }

    #[test]
    fn observed_writing_pose_does_not_restart() {
        let mut s = session();
        s.observe_pose(true);
        for i in 0..10 {
            s.push(TrajPoint::new(0.0, 0.0, i as f64)).unwrap();
        }
        assert_eq!(s.phase(), Phase::Terminated);
        assert!(s.last_outcome().unwrap().error.is_some());
        s.observe_pose(true);
        assert_eq!(s.phase(), Phase::Terminated);
        s.observe_pose(false);
        assert_eq!(s.phase(), Phase::Idle);
        s.observe_pose(true);
        assert_eq!(s.phase(), Phase::Writing);
    }
}
