use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("mask has {0} connected components, expected one")]
    MultipleComponents(usize),
    #[error("contour is degenerate")]
    DegenerateContour,
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("center ({x:.1}, {y:.1}) is not on a foreground pixel")]
    CenterOnBackground { x: f64, y: f64 },
    #[error("ring crossed the hand an odd number of times ({0})")]
    OddCrossings(usize),
    #[error("ring radius {0:.2} is too small")]
    RingDegenerate(f64),
    #[error("box ({x:.1}, {y:.1}, {w:.1}, {h:.1}) is not inside the frame")]
    BoxOutOfFrame { x: f64, y: f64, w: f64, h: f64 },
    #[error("tracker confidence {psr:.2} below floor")]
    LowConfidence { psr: f64 },
    #[error("no annotation for frame {0}")]
    AnnotationMissing(usize),
    #[error("timestamps must be strictly increasing")]
    NonMonotonicTime,
    #[error("trajectory too short: {0} points")]
    TooShort(usize),
    #[error("trajectory points all coincide")]
    DegenerateTrajectory,
    #[error("trajectory is not accepting points")]
    TrajectoryClosed,
    #[error("template set is empty")]
    EmptyTemplateSet,
    #[error("no valid templates in {0}")]
    NoTemplates(PathBuf),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("synthetic spec out of bounds: {0}")]
    SpecOutOfBounds(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed {kind}: {reason}")]
    Format { kind: &'static str, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyMask => "EmptyMask",
            Error::MultipleComponents(_) => "MultipleComponents",
            Error::DegenerateContour => "DegenerateContour",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::CenterOnBackground { .. } => "CenterOnBackground",
            Error::OddCrossings(_) => "OddCrossings",
            Error::RingDegenerate(_) => "RingDegenerate",
            Error::BoxOutOfFrame { .. } => "BoxOutOfFrame",
            Error::LowConfidence { .. } => "LowConfidence",
            Error::AnnotationMissing(_) => "AnnotationMissing",
            Error::NonMonotonicTime => "NonMonotonicTime",
            Error::TooShort(_) => "TooShort",
            Error::DegenerateTrajectory => "DegenerateTrajectory",
            Error::TrajectoryClosed => "TrajectoryClosed",
            Error::EmptyTemplateSet => "EmptyTemplateSet",
            Error::NoTemplates(_) => "NoTemplates",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::SpecOutOfBounds(_) => "SpecOutOfBounds",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Format { .. } => "Format",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn format(kind: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            kind,
            reason: reason.into(),
        }
    }
}
