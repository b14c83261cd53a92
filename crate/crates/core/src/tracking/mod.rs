//! Hand-region acquisition and tracking, and the per-frame pipeline that
//! turns video frames into fingertip points and strokes.

pub mod kcf;
pub mod pipeline;
pub mod provider;

pub use kcf::{kcf_init, kcf_update, peak_to_sidelobe, TrackConfig, TrackerState};
pub use pipeline::{
    read_fingertips_jsonl, run_pipeline, write_jsonl, FrameDir, FrameResult, Pipeline, PipelineConfig, StageTiming,
};
pub use provider::{read_annotations, write_annotations, Annotation, AnnotationProvider, HandRegionProvider, SkinBlobProvider};
