//! Synthetic ground truth, tracking and recognition metrics, and report
//! emission.

pub mod dataset;
pub mod metrics;
pub mod ope;
pub mod synth;

pub use dataset::{
    char_dataset_files, evaluate_chars, evaluate_tracking, load_tracking_sequence, read_sequence_list, recognize_stroke,
    CharEvalReport, CharSampleResult, StrokeRecognition, TrackingReport,
};
pub use metrics::{
    default_precision_thresholds, iou, iou_thresholds, precision_curve, success_curve, PrecisionCurve, SuccessCurve,
};
pub use ope::{
    run_ope_tre, tre_start_frames, BoxTracker, FrozenTracker, KcfTracker, OpeTreReport, OracleTracker, TrackingSequence,
};
pub use synth::{
    frame_file_name, moving_hand_sequence, sample_glyph_path, synth_hand, FingerSpec, FrameTruth, HandTruth, Motion,
    SequenceSpec, SequenceTruth, SynthHandSpec, SyntheticSequence, SKIN_RGB,
};
