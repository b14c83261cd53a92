use serde::{Deserialize, Serialize};

use crate::segmentation::HandRegion;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionCurve {
    pub thresholds: Vec<f64>,
    pub fraction_correct: Vec<f64>,
}

impl PrecisionCurve {
    /// Fraction at `threshold`, if it is one of the curve's thresholds.
    pub fn at(&self, threshold: f64) -> Option<f64> {
        self.thresholds
            .iter()
            .position(|&t| t == threshold)
            .map(|i| self.fraction_correct[i])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,fraction_correct\n");
        for (t, f) in self.thresholds.iter().zip(&self.fraction_correct) {
            s.push_str(&format!("{t},{f}\n"));
        }
        s
    }
}

/// Thresholds 0, 1, ..., 50 px.
pub fn default_precision_thresholds() -> Vec<f64> {
    (0..=50).map(f64::from).collect()
}

/// Fraction of frames whose prediction lies within each threshold of the
/// truth. Frames without a prediction or truth count as misses.
pub fn precision_curve(pred: &[Option<Point>], truth: &[Option<Point>], thresholds: &[f64]) -> Result<PrecisionCurve> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    let errors: Vec<Option<f64>> = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| Some(p.as_ref()?.distance(*t.as_ref()?)))
        .collect();
    let n = errors.len();
    let fraction_correct = thresholds
        .iter()
        .map(|&th| {
            if n == 0 {
                return 0.0;
            }
            errors.iter().filter(|e| matches!(e, Some(d) if *d <= th)).count() as f64 / n as f64
        })
        .collect();
    Ok(PrecisionCurve {
        thresholds: thresholds.to_vec(),
        fraction_correct,
    })
}

pub fn iou(a: &HandRegion, b: &HandRegion) -> f64 {
    let iw = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let ih = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCurve {
    pub iou_thresholds: Vec<f64>,
    pub success_rates: Vec<f64>,
    pub auc: f64,
}

impl SuccessCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iou_threshold,success_rate\n");
        for (t, r) in self.iou_thresholds.iter().zip(&self.success_rates) {
            s.push_str(&format!("{t},{r}\n"));
        }
        s
    }
}

/// 0, 0.05, ..., 1.
pub fn iou_thresholds() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Share of frames with IoU at least each threshold; AUC is the mean rate.
/// Missing estimates have IoU 0.
pub fn success_curve(overlaps: &[f64]) -> SuccessCurve {
    let iou_thresholds = iou_thresholds();
    let success_rates: Vec<f64> = iou_thresholds
        .iter()
        .map(|&th| {
            if overlaps.is_empty() {
                0.0
            } else {
                overlaps.iter().filter(|&&o| o >= th).count() as f64 / overlaps.len() as f64
            }
        })
        .collect();
    let auc = success_rates.iter().sum::<f64>() / success_rates.len() as f64;
    SuccessCurve {
        iou_thresholds,
        success_rates,
        auc,
    }
}
