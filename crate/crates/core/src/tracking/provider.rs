use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::imgproc::components;
use crate::segmentation::{skin_mask, HandRegion, SkinModel};
use crate::{Error, Image, Result};

/// Source of hand boxes used to (re)initialize the tracker.
pub trait HandRegionProvider: Send {
    fn name(&self) -> &str;

    /// Hand box for frame `index`, or `None` when there is no hand.
    fn next(&mut self, index: usize, frame: &Image) -> Result<Option<HandRegion>>;
}

/// One entry of an annotation file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Annotation {
    pub fn region(&self) -> HandRegion {
        HandRegion::new(self.x, self.y, self.w, self.h)
    }
}

pub fn read_annotations(path: impl AsRef<Path>) -> Result<Vec<Annotation>> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

pub fn write_annotations(path: impl AsRef<Path>, annotations: &[Annotation]) -> Result<()> {
    std::fs::write(path, serde_json::to_vec_pretty(annotations)?)?;
    Ok(())
}

/// Boxes looked up by frame index. Frames missing inside the annotated range
/// have no hand; frames past it are an error.
#[derive(Debug, Clone, Default)]
pub struct AnnotationProvider {
    boxes: BTreeMap<usize, HandRegion>,
    last: Option<usize>,
}

impl AnnotationProvider {
    pub fn new(annotations: &[Annotation]) -> Self {
        let boxes: BTreeMap<usize, HandRegion> = annotations.iter().map(|a| (a.frame, a.region())).collect();
        let last = boxes.keys().next_back().copied();
        Self { boxes, last }
    }

    pub fn from_regions(regions: impl IntoIterator<Item = HandRegion>) -> Self {
        let boxes: BTreeMap<usize, HandRegion> = regions.into_iter().enumerate().collect();
        let last = boxes.keys().next_back().copied();
        Self { boxes, last }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::new(&read_annotations(path)?))
    }
}

impl HandRegionProvider for AnnotationProvider {
    fn name(&self) -> &str {
        "annotation"
    }

    fn next(&mut self, index: usize, _frame: &Image) -> Result<Option<HandRegion>> {
        match self.last {
            Some(last) if index <= last => Ok(self.boxes.get(&index).copied()),
            _ => Err(Error::AnnotationMissing(index)),
        }
    }
}

/// Bounding box of the largest skin-colored component, grown by
/// `growth` about its center and clamped to the frame.
#[derive(Debug, Clone)]
pub struct SkinBlobProvider {
    pub skin: SkinModel,
    pub growth: f64,
    pub min_area: usize,
}

impl Default for SkinBlobProvider {
    fn default() -> Self {
        Self {
            skin: SkinModel::default(),
            growth: 1.2,
            min_area: 400,
        }
    }
}

impl HandRegionProvider for SkinBlobProvider {
    fn name(&self) -> &str {
        "skin-blob"
    }

    fn next(&mut self, _index: usize, frame: &Image) -> Result<Option<HandRegion>> {
        let mask = skin_mask(frame, &self.skin)?;
        let Some(best) = components(&mask).into_iter().max_by_key(|c| c.area) else {
            return Ok(None);
        };
        if best.area < self.min_area {
            return Ok(None);
        }
        let (x0, y0, x1, y1) = best.bbox;
        let region = HandRegion::new(x0 as f64, y0 as f64, (x1 - x0 + 1) as f64, (y1 - y0 + 1) as f64).grown(self.growth);
        Ok(region.clamped(frame.width(), frame.height()))
    }
}
