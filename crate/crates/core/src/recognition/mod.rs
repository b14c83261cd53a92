//! Character recognition over 28×28 stroke rasters.
//!
//! Recognizers sit behind the [`Recognizer`] trait; the bundled one is a
//! Gaussian-kernel nearest-template classifier.

mod glyphs;

pub use glyphs::{default_templates, glyph_path, render_variant, VARIANTS};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::imgproc::pnm;
use crate::trajectory::RASTER_SIDE;
use crate::{Error, Image, Result};

pub const ALPHABET: &str = "0123456789abcdefghijklmnopqrstuvwxyz";
pub const CLASS_COUNT: usize = 36;

/// One of the 36 symbols `0-9a-z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharClass(u8);

impl CharClass {
    pub fn new(c: char) -> Result<Self> {
        let c = c.to_ascii_lowercase();
        ALPHABET
            .find(c)
            .map(|i| CharClass(i as u8))
            .ok_or_else(|| Error::InvalidParameter(format!("label {c:?} is not in 0-9a-z")))
    }

    pub fn from_index(i: usize) -> Option<Self> {
        (i < CLASS_COUNT).then_some(CharClass(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_char(self) -> char {
        ALPHABET.as_bytes()[self.0 as usize] as char
    }

    pub fn all() -> impl Iterator<Item = CharClass> {
        (0..CLASS_COUNT as u8).map(CharClass)
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl std::str::FromStr for CharClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => CharClass::new(c),
            _ => Err(Error::InvalidParameter(format!("label {s:?} is not a single character"))),
        }
    }
}

impl Serialize for CharClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CharClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub label: CharClass,
    pub raster: Image,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    entries: Vec<Template>,
}

impl TemplateSet {
    pub fn new(entries: Vec<Template>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTemplateSet);
        }
        for t in &entries {
            check_raster(&t.raster)?;
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Template] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes `<label>_<index>.pgm` files, numbering per label from 0.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut next: BTreeMap<CharClass, usize> = BTreeMap::new();
        let mut written = Vec::new();
        for t in &self.entries {
            let k = next.entry(t.label).or_default();
            let path = dir.join(format!("{}_{}.pgm", t.label, k));
            *k += 1;
            pnm::write_image(&path, &t.raster)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn check_raster(img: &Image) -> Result<()> {
    if img.dims() != (RASTER_SIDE, RASTER_SIDE) || img.channels() != 1 {
        return Err(Error::DimensionMismatch {
            expected: (RASTER_SIDE, RASTER_SIDE),
            actual: img.dims(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub label: CharClass,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub ranked: Vec<Ranked>,
    pub rejected: bool,
}

impl RecognitionResult {
    pub fn top(&self) -> Option<Ranked> {
        self.ranked.first().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Kernel width on the 0-255 pixel scale.
    pub sigma: f64,
    /// Results whose top score is below this are flagged rejected.
    pub reject_below: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            sigma: 2000.0,
            reject_below: 0.05,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(0.0..=1.0).contains(&self.reject_below) {
            return Err(Error::InvalidParameter("classifier needs sigma > 0, reject_below in [0, 1]".into()));
        }
        Ok(())
    }
}

fn squared_distance(a: &Image, b: &Image) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum()
}

/// Scores every represented label by its best template and ranks them. A
/// raster without ink is always rejected.
pub fn classify_with(raster: &Image, templates: &TemplateSet, cfg: &ClassifierConfig) -> Result<RecognitionResult> {
    if templates.is_empty() {
        return Err(Error::EmptyTemplateSet);
    }
    check_raster(raster)?;
    let two_sigma2 = 2.0 * cfg.sigma * cfg.sigma;
    let mut best: BTreeMap<CharClass, f64> = BTreeMap::new();
    for t in templates.entries() {
        let s = (-squared_distance(raster, &t.raster) / two_sigma2).exp();
        let e = best.entry(t.label).or_insert(0.0);
        if s > *e {
            *e = s;
        }
    }
    let mut ranked: Vec<Ranked> = best.into_iter().map(|(label, score)| Ranked { label, score }).collect();
    // Stable sort over label order keeps ties deterministic.
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    let blank = raster.data().iter().all(|&v| v == 0);
    let rejected = blank || ranked[0].score < cfg.reject_below;
    Ok(RecognitionResult { ranked, rejected })
}

pub fn classify(raster: &Image, templates: &TemplateSet) -> Result<RecognitionResult> {
    classify_with(raster, templates, &ClassifierConfig::default())
}

pub trait Recognizer: Send + Sync {
    fn name(&self) -> &str;
    fn recognize(&self, raster: &Image) -> Result<RecognitionResult>;
}

#[derive(Debug, Clone)]
pub struct TemplateRecognizer {
    templates: TemplateSet,
    config: ClassifierConfig,
}

impl TemplateRecognizer {
    pub const NAME: &'static str = "template-nn";

    pub fn new(templates: TemplateSet, config: ClassifierConfig) -> Self {
        Self { templates, config }
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }
}

impl Default for TemplateRecognizer {
    fn default() -> Self {
        Self::new(default_templates(), ClassifierConfig::default())
    }
}

impl Recognizer for TemplateRecognizer {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn recognize(&self, raster: &Image) -> Result<RecognitionResult> {
        classify_with(raster, &self.templates, &self.config)
    }
}

/// Recognizer registry keyed by name.
pub fn recognizer_by_name(name: &str, templates: TemplateSet, config: ClassifierConfig) -> Result<Arc<dyn Recognizer>> {
    match name {
        TemplateRecognizer::NAME => Ok(Arc::new(TemplateRecognizer::new(templates, config))),
        other => Err(Error::InvalidParameter(format!("unknown recognizer {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedTemplate {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LoadedTemplates {
    pub set: TemplateSet,
    pub skipped: Vec<SkippedTemplate>,
}

fn parse_template_name(path: &Path) -> Option<CharClass> {
    let stem = path.file_stem()?.to_str()?;
    let (label, index) = stem.split_once('_')?;
    index.parse::<usize>().ok()?;
    label.parse().ok()
}

/// Loads `<label>_<index>.pgm` files from `dir` in name order. Files that do
/// not parse are listed in `skipped`.
pub fn load_templates(dir: impl AsRef<Path>) -> Result<LoadedTemplates> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "pgm"))
        .collect();
    paths.sort();
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let Some(label) = parse_template_name(&path) else {
            skipped.push(SkippedTemplate {
                path,
                reason: "name is not <label>_<index>.pgm".into(),
            });
            continue;
        };
        match pnm::read_image(&path).and_then(|img| check_raster(&img).map(|_| img)) {
            Ok(raster) => entries.push(Template { label, raster }),
            Err(e) => skipped.push(SkippedTemplate {
                path,
                reason: e.to_string(),
            }),
        }
    }
    if entries.is_empty() {
        return Err(Error::NoTemplates(dir.to_path_buf()));
    }
    Ok(LoadedTemplates {
        set: TemplateSet::new(entries)?,
        skipped,
    })
}

/// Counts of true label (rows) against top-ranked label (columns), with
/// rejections tallied separately per true label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<CharClass>,
    pub counts: Vec<Vec<u64>>,
    pub rejected: Vec<u64>,
    pub total: u64,
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self {
            labels: CharClass::all().collect(),
            counts: vec![vec![0; CLASS_COUNT]; CLASS_COUNT],
            rejected: vec![0; CLASS_COUNT],
            total: 0,
        }
    }

    pub fn record(&mut self, truth: CharClass, result: &RecognitionResult) {
        self.total += 1;
        match result.top() {
            Some(top) if !result.rejected => self.counts[truth.index()][top.label.index()] += 1,
            _ => self.rejected[truth.index()] += 1,
        }
    }

    pub fn correct(&self) -> u64 {
        (0..CLASS_COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Diagonal over all recorded results; 0 when empty.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct() as f64 / self.total as f64
        }
    }
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self::new()
    }
}

pub fn confusion_matrix(results: &[(CharClass, RecognitionResult)]) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::new();
    for (truth, r) in results {
        m.record(*truth, r);
    }
    m
}
