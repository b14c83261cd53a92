//! Flat `key = value` settings file with dotted keys, e.g.
//!
//! ```text
//! # comments and blank lines are ignored
//! fingertip.gamma = 2.5
//! track.reinit_interval = 50
//! recognizer.name = template-nn
//! ```
//!
//! Settings merge as defaults, then the file, then command-line overrides.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::recognition::{ClassifierConfig, TemplateRecognizer};
use crate::tracking::PipelineConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub pipeline: PipelineConfig,
    pub classifier: ClassifierConfig,
    pub recognizer: String,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            classifier: ClassifierConfig::default(),
            recognizer: TemplateRecognizer::NAME.to_string(),
        }
    }
}

const KNOWN_RECOGNIZERS: &[&str] = &[TemplateRecognizer::NAME];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse {value:?}")))
}

macro_rules! settings_keys {
    ($($key:literal => $($field:ident).+),* $(,)?) => {
        /// Every key accepted in a settings file.
        pub const KEYS: &[&str] = &[$($key),*];

        impl Settings {
            /// Sets one dotted key from its textual value.
            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                let value = value.trim();
                match key {
                    $($key => self.$($field).+ = parse(key, value)?,)*
                    _ => return Err(Error::InvalidParameter(format!("unknown setting {key:?}"))),
                }
                Ok(())
            }

            /// Current value of one dotted key.
            pub fn get(&self, key: &str) -> Option<String> {
                match key {
                    $($key => Some(self.$($field).+.to_string()),)*
                    _ => None,
                }
            }
        }
    };
}

settings_keys! {
    "skin.cb_min" => pipeline.skin.cb_min,
    "skin.cb_max" => pipeline.skin.cb_max,
    "skin.cr_min" => pipeline.skin.cr_min,
    "skin.cr_max" => pipeline.skin.cr_max,
    "gmm.max_components" => pipeline.gmm.max_components,
    "gmm.learning_rate" => pipeline.gmm.learning_rate,
    "gmm.variance_threshold" => pipeline.gmm.variance_threshold,
    "gmm.initial_variance" => pipeline.gmm.initial_variance,
    "gmm.min_variance" => pipeline.gmm.min_variance,
    "gmm.max_variance" => pipeline.gmm.max_variance,
    "gmm.background_ratio" => pipeline.gmm.background_ratio,
    "gmm.complexity_prior" => pipeline.gmm.complexity_prior,
    "gmm.warmup_frames" => pipeline.gmm.warmup_frames,
    "segmentation.use_background" => pipeline.use_background,
    "segmentation.morph_radius" => pipeline.morph_radius,
    "pose.magnification" => pipeline.pose.magnification,
    "fingertip.samples" => pipeline.fingertip.samples,
    "fingertip.gamma" => pipeline.fingertip.gamma,
    "fingertip.ignore_border" => pipeline.fingertip.ignore_border,
    "track.reinit_interval" => pipeline.track.reinit_interval,
    "track.padding" => pipeline.track.padding,
    "track.kernel_sigma" => pipeline.track.kernel_sigma,
    "track.regularization" => pipeline.track.regularization,
    "track.model_learning_rate" => pipeline.track.model_learning_rate,
    "track.psr_floor" => pipeline.track.psr_floor,
    "track.max_patch_side" => pipeline.track.max_patch_side,
    "track.output_sigma_factor" => pipeline.track.output_sigma_factor,
    "pipeline.roi_margin" => pipeline.roi_margin,
    "pipeline.frame_rate" => pipeline.frame_rate,
    "termination.tau" => pipeline.termination.tau,
    "termination.window" => pipeline.termination.window,
    "termination.min_points" => pipeline.termination.min_points,
    "smoothing.lambda" => pipeline.smoothing.lambda,
    "smoothing.epsilon" => pipeline.smoothing.epsilon,
    "smoothing.max_iterations" => pipeline.smoothing.max_iterations,
    "classifier.sigma" => classifier.sigma,
    "classifier.reject_below" => classifier.reject_below,
    "recognizer.name" => recognizer,
}

impl Settings {
    /// Applies `key = value` lines. Errors name the offending line.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v)
                .map_err(|e| Error::InvalidParameter(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides such as command-line `--set` arguments.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("override {o:?}: expected key=value")))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Defaults, then `file` if given, then `overrides`; validated.
    pub fn load<S: AsRef<str>>(file: Option<&Path>, overrides: &[S]) -> Result<Self> {
        let mut s = Self::default();
        if let Some(f) = file {
            s.apply_file(f)?;
        }
        s.apply_overrides(overrides)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.classifier.validate()?;
        if !KNOWN_RECOGNIZERS.contains(&self.recognizer.as_str()) {
            return Err(Error::InvalidParameter(format!("unknown recognizer {:?}", self.recognizer)));
        }
        Ok(())
    }

    /// All settings as `key = value` lines in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect()
    }
}
