use std::sync::Arc;

use airwrite_core::eval::{
    evaluate_tracking, moving_hand_sequence, sample_glyph_path, Motion, SequenceSpec, SynthHandSpec, SyntheticSequence,
};
use airwrite_core::handpose::PoseVerdict;
use airwrite_core::recognition::{CharClass, TemplateRecognizer};
use airwrite_core::tracking::{
    run_pipeline, Annotation, AnnotationProvider, FrameDir, FrameResult, PipelineConfig, SkinBlobProvider,
};
use airwrite_core::trajectory::Phase;
use airwrite_core::{Image, Point};

fn recognizer() -> Arc<TemplateRecognizer> {
    Arc::new(TemplateRecognizer::default())
}

fn run_with_truth(seq: &SyntheticSequence) -> Vec<FrameResult> {
    let provider = AnnotationProvider::from_regions(seq.truths().boxes());
    run_pipeline(
        (0..seq.len()).map(|i| Ok(seq.frame(i))),
        Box::new(provider),
        PipelineConfig::default(),
        recognizer(),
    )
    .unwrap()
}

#[test]
fn fist_never_yields_a_fingertip() {
    let hand = SynthHandSpec::random(0, 21).unwrap();
    let seq = SyntheticSequence::new(SequenceSpec {
        width: 640,
        height: 480,
        origin: Point::new(((640 - hand.width) / 2) as f64, ((480 - hand.height) / 2) as f64),
        hand,
        motion: Motion::Constant { dx: 2.0, dy: 0.0 },
        frames: 30,
        background: [60, 80, 110],
        noise: 4,
        seed: 21,
    })
    .unwrap();
    let results = run_with_truth(&seq);
    assert!(results.iter().all(|r| r.fingertip.is_none()));
    assert!(results.iter().all(|r| r.phase == Phase::Idle));
    let non_writing = results.iter().filter(|r| r.pose == PoseVerdict::NonWriting).count();
    assert!(non_writing >= 25, "{non_writing}");
}

#[test]
fn hand_leaving_the_frame_is_survivable() {
    let seq = moving_hand_sequence(4, 30, 4.0, 0.0).unwrap();
    let annotations: Vec<Annotation> = seq
        .truths()
        .frames
        .iter()
        .map(|f| Annotation {
            frame: f.frame,
            x: f.bbox.x,
            y: f.bbox.y,
            w: f.bbox.w,
            h: f.bbox.h,
        })
        .collect();
    let empty = Image::filled_rgb(640, 480, [60, 80, 110]);
    let frames = (0..60).map(|i| Ok(if i < 30 { seq.frame(i) } else { empty.clone() }));
    let results = run_pipeline(
        frames,
        Box::new(AnnotationProvider::new(&annotations)),
        PipelineConfig::default(),
        recognizer(),
    )
    .unwrap();
    assert_eq!(results.len(), 60);
    assert!(results[..30].iter().filter(|r| r.fingertip.is_some()).count() >= 25);
    assert!(results[31..].iter().all(|r| r.fingertip.is_none()));
    // Frame 50 asks the provider for a box it does not have.
    assert!(results[50].error.is_some());
    assert!(results[50].hand.is_none());
}

#[test]
fn runs_are_deterministic() {
    let seq = moving_hand_sequence(9, 40, 5.0, 3.0).unwrap();
    let strip = |rs: Vec<FrameResult>| -> Vec<_> {
        rs.into_iter()
            .map(|r| (r.hand, r.fingertip, r.fingers, r.pose, r.phase, r.reinitialized))
            .collect()
    };
    assert_eq!(strip(run_with_truth(&seq)), strip(run_with_truth(&seq)));
}

#[test]
fn skin_blob_provider_tracks_without_annotations() {
    let seq = moving_hand_sequence(12, 60, 6.0, -2.0).unwrap();
    let results = run_pipeline(
        (0..seq.len()).map(|i| Ok(seq.frame(i))),
        Box::new(SkinBlobProvider::default()),
        PipelineConfig::default(),
        recognizer(),
    )
    .unwrap();
    let pred: Vec<Option<Point>> = results.iter().map(|r| r.fingertip).collect();
    let report = evaluate_tracking(&pred, &seq.truths().tips(), 15.0).unwrap();
    assert!(report.precision >= 0.95, "{report:?}");
    let reinit: Vec<usize> = results.iter().filter(|r| r.reinitialized).map(|r| r.frame_index).collect();
    assert_eq!(reinit, vec![0, 50]);
}

#[test]
fn frames_round_trip_through_a_directory() {
    let seq = moving_hand_sequence(2, 12, 3.0, 1.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    seq.write_dir(dir.path()).unwrap();
    let fd = FrameDir::open(dir.path()).unwrap();
    assert_eq!(fd.len(), 12);
    let from_disk = run_pipeline(
        fd.frames(),
        Box::new(AnnotationProvider::from_regions(seq.truths().boxes())),
        PipelineConfig::default(),
        recognizer(),
    )
    .unwrap();
    let tips = |rs: &[FrameResult]| rs.iter().map(|r| r.fingertip).collect::<Vec<_>>();
    assert_eq!(tips(&from_disk), tips(&run_with_truth(&seq)));
}

#[test]
fn written_digit_is_recognized_from_video() {
    let label = CharClass::new('3').unwrap();
    let mut path = sample_glyph_path(label, Point::new(260.0, 120.0), 100.0, 50);
    let last = *path.last().unwrap();
    path.extend(std::iter::repeat_n(last, 10));
    let mut hand = SynthHandSpec::random(1, 30).unwrap();
    hand.width = 160;
    hand.palm_center.x = 80.0;
    hand.fingers[0].angle = 95.0;
    let seq = SyntheticSequence::new(SequenceSpec {
        width: 640,
        height: 480,
        hand,
        origin: Point::new(0.0, 0.0),
        motion: Motion::Path { points: path.clone() },
        frames: path.len(),
        background: [60, 80, 110],
        noise: 2,
        seed: 30,
    })
    .unwrap();
    let results = run_with_truth(&seq);
    let stroke = results
        .iter()
        .find_map(|r| r.stroke.clone())
        .expect("stroke terminated");
    let top = stroke.result.expect("recognized").top().unwrap();
    assert_eq!(top.label, label);
}
