//! Fingertip trajectories: accumulation, velocity-based termination,
//! iterative smoothing, and rasterization for recognition.

mod raster;
mod session;

pub use raster::{rasterize, rasterize_points, CONTENT_SIDE, RASTER_SIDE};
pub use session::{Phase, PushOutcome, StrokeOutcome, StrokeSession};

use serde::{Deserialize, Serialize};

use crate::fingertip::{entropy_of, turning_angle};
use crate::{Error, Point, Result};

/// One fingertip sample; `t` in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl TrajPoint {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn xy(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryState {
    Open,
    Terminated,
    Cleared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    points: Vec<TrajPoint>,
    state: TrajectoryState,
}

impl Default for Trajectory {
    fn default() -> Self {
        Self::new()
    }
}

impl Trajectory {
    pub fn new() -> Self {
        Self {
            points: Vec::new(),
            state: TrajectoryState::Open,
        }
    }

    /// An open trajectory over `points`, which must have strictly increasing
    /// timestamps.
    pub fn from_points(points: Vec<TrajPoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::NonMonotonicTime);
        }
        Ok(Self {
            points,
            state: TrajectoryState::Open,
        })
    }

    pub fn points(&self) -> &[TrajPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn state(&self) -> TrajectoryState {
        self.state
    }

    pub fn push(&mut self, p: TrajPoint) -> Result<()> {
        if self.state != TrajectoryState::Open {
            return Err(Error::TrajectoryClosed);
        }
        if !(p.x.is_finite() && p.y.is_finite() && p.t.is_finite()) {
            return Err(Error::InvalidParameter("trajectory point must be finite".into()));
        }
        if let Some(last) = self.points.last() {
            if !(p.t > last.t) {
                return Err(Error::NonMonotonicTime);
            }
        }
        self.points.push(p);
        Ok(())
    }

    pub fn terminate(&mut self) {
        if self.state == TrajectoryState::Open {
            self.state = TrajectoryState::Terminated;
        }
    }

    pub fn clear(&mut self) {
        self.points.clear();
        self.state = TrajectoryState::Cleared;
    }

    /// Clears and reopens for a new stroke.
    pub fn reset(&mut self) {
        self.points.clear();
        self.state = TrajectoryState::Open;
    }

    pub fn velocity(&self, i: usize) -> Result<f64> {
        velocity(&self.points, i)
    }
}

/// Speed of the step into point `i`, in px/second.
pub fn velocity(points: &[TrajPoint], i: usize) -> Result<f64> {
    if i == 0 || i >= points.len() {
        return Err(Error::InvalidParameter(format!("velocity index {i} out of range")));
    }
    let (a, b) = (points[i - 1], points[i]);
    let dt = b.t - a.t;
    if !(dt > 0.0) {
        return Err(Error::NonMonotonicTime);
    }
    let d = (b.x - a.x).hypot(b.y - a.y);
    Ok(d * 1000.0 / dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminationConfig {
    /// Speed threshold in px/second.
    pub tau: f64,
    /// Consecutive slow steps required.
    pub window: usize,
    pub min_points: usize,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self {
            tau: 40.0,
            window: 5,
            min_points: 10,
        }
    }
}

impl TerminationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || self.window == 0 {
            return Err(Error::InvalidParameter("termination needs tau > 0 and window >= 1".into()));
        }
        Ok(())
    }
}

/// True once there are at least `min_points` points and the last `window`
/// steps all ran slower than `tau`.
pub fn check_termination(points: &[TrajPoint], cfg: &TerminationConfig) -> bool {
    let n = points.len();
    if n < cfg.min_points.max(cfg.window + 1) {
        return false;
    }
    (n - cfg.window..n).all(|i| velocity(points, i).is_ok_and(|v| v < cfg.tau))
}

/// Mean curvature entropy over the interior turning angles of the polyline.
/// Zero-length segments count as no turn.
pub fn trajectory_entropy(points: &[TrajPoint]) -> Result<f64> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooShort(n));
    }
    let sum: f64 = (1..n - 1)
        .map(|i| {
            turning_angle(points[i - 1].xy(), points[i].xy(), points[i + 1].xy())
                .map_or(0.0, entropy_of)
        })
        .sum();
    Ok(sum / (n - 2) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    /// Gap in pixels above which a point is replaced by its neighbors' mean.
    pub lambda: f64,
    /// Stop once the entropy changes by less than this between passes.
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            lambda: 5.0,
            epsilon: 0.4,
            max_iterations: 50,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.epsilon > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "smoothing needs lambda > 0, epsilon > 0, max_iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothStats {
    pub iterations: usize,
    /// Stopped by the entropy tolerance rather than the iteration cap.
    pub converged: bool,
    pub entropy: f64,
}

/// One in-place pass: each interior point whose gap to its (already
/// updated) predecessor exceeds `lambda` becomes the mean of its neighbors.
pub fn smoothing_pass(points: &mut [TrajPoint], lambda: f64) {
    for i in 1..points.len().saturating_sub(1) {
        let (prev, cur, next) = (points[i - 1], points[i], points[i + 1]);
        if (cur.x - prev.x).hypot(cur.y - prev.y) > lambda {
            points[i].x = (prev.x + next.x) / 2.0;
            points[i].y = (prev.y + next.y) / 2.0;
        }
    }
}

pub fn smooth_points(points: &[TrajPoint], cfg: &SmoothingConfig) -> Result<(Vec<TrajPoint>, SmoothStats)> {
    let mut out = points.to_vec();
    let mut u = trajectory_entropy(&out)?;
    for k in 1..=cfg.max_iterations {
        smoothing_pass(&mut out, cfg.lambda);
        let next = trajectory_entropy(&out)?;
        let delta = (next - u).abs();
        u = next;
        if delta < cfg.epsilon {
            return Ok((
                out,
                SmoothStats {
                    iterations: k,
                    converged: true,
                    entropy: u,
                },
            ));
        }
    }
    Ok((
        out,
        SmoothStats {
            iterations: cfg.max_iterations,
            converged: false,
            entropy: u,
        },
    ))
}

/// Smoothed copy of `t`; endpoints, point count, and timestamps are kept.
pub fn smooth(t: &Trajectory, cfg: &SmoothingConfig) -> Result<Trajectory> {
    let (points, _) = smooth_points(t.points(), cfg)?;
    Ok(Trajectory {
        points,
        state: t.state,
    })
}

/// Trajectory dataset entry: `{"label": optional, "points": [{x, y, t}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub points: Vec<TrajPoint>,
}

impl TrajectoryFile {
    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::from_points(self.points.clone())
    }
}
