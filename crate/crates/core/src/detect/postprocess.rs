use std::collections::{BTreeMap, HashMap};

use super::geometry::{iou, relation_between, BoundingBox, RelationSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::{CategoryName, ColorName};

/// One similarity score per palette color, in palette order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScores<T>([T; 7]);

impl<T: Scalar> ColorScores<T> {
    pub fn from_map(scores: &BTreeMap<ColorName, T>) -> Result<Self> {
        let mut out = [T::zero(); 7];
        for (slot, color) in out.iter_mut().zip(ColorName::PALETTE) {
            *slot = *scores
                .get(&color)
                .ok_or_else(|| Error::MissingColor(color.to_string()))?;
        }
        Ok(ColorScores(out))
    }

    pub fn from_fn(f: impl Fn(ColorName) -> T) -> Self {
        ColorScores(ColorName::PALETTE.map(f))
    }

    pub fn get(&self, color: ColorName) -> T {
        self.0[ColorName::PALETTE.iter().position(|c| *c == color).expect("palette color")]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ColorName, T)> + '_ {
        ColorName::PALETTE.into_iter().zip(self.0.iter().copied())
    }

    /// Highest-scoring color; ties go to the earlier palette color.
    pub fn argmax(&self) -> ColorName {
        let mut best = 0;
        for i in 1..7 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        ColorName::PALETTE[best]
    }
}

/// Argmax over a full seven-color score map.
pub fn classify_color<T: Scalar>(scores: &BTreeMap<ColorName, T>) -> Result<ColorName> {
    ColorScores::from_map(scores).map(|s| s.argmax())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDetection<T> {
    pub category: CategoryName,
    pub confidence: T,
    pub bbox: BoundingBox<T>,
    pub color_scores: ColorScores<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedInstance<T> {
    pub category: CategoryName,
    pub confidence: T,
    pub bbox: BoundingBox<T>,
    pub color: ColorName,
    pub color_scores: ColorScores<T>,
}

impl<T: Scalar> DetectedInstance<T> {
    pub fn to_raw(&self) -> RawDetection<T> {
        RawDetection {
            category: self.category.clone(),
            confidence: self.confidence,
            bbox: self.bbox,
            color_scores: self.color_scores,
        }
    }
}

/// Post-processed detections of one image, in descending confidence order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionSet<T> {
    pub instances: Vec<DetectedInstance<T>>,
}

impl<T: Scalar> DetectionSet<T> {
    pub fn new(instances: Vec<DetectedInstance<T>>) -> Self {
        DetectionSet { instances }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// `m_k`.
    pub fn count_of(&self, category: &CategoryName) -> usize {
        self.instances.iter().filter(|d| &d.category == category).count()
    }

    pub fn counts(&self) -> BTreeMap<CategoryName, usize> {
        let mut out = BTreeMap::new();
        for d in &self.instances {
            *out.entry(d.category.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn to_raw(&self) -> Vec<RawDetection<T>> {
        self.instances.iter().map(DetectedInstance::to_raw).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostProcessConfig<T> {
    /// Detections below this confidence are dropped.
    pub confidence_threshold: T,
    /// Same-category boxes overlapping a kept box above this IoU are dropped.
    pub dedup_iou: T,
    /// Boxes with a side below this many pixels are dropped.
    pub min_side: T,
    /// Relation offset coefficient `c`.
    pub offset_coefficient: T,
}

impl<T: Scalar> Default for PostProcessConfig<T> {
    fn default() -> Self {
        PostProcessConfig {
            confidence_threshold: T::of(0.3),
            dedup_iou: T::of(0.9),
            min_side: T::of(5.0),
            offset_coefficient: T::of(0.1),
        }
    }
}

impl<T: Scalar> PostProcessConfig<T> {
    pub fn check(&self) -> Result<()> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(self.confidence_threshold) || !unit(self.dedup_iou) {
            return Err(Error::Config("thresholds must lie in [0, 1]".into()));
        }
        let non_negative = |v: T| v >= T::zero() && v.is_finite();
        if !non_negative(self.min_side) || !non_negative(self.offset_coefficient) {
            return Err(Error::Config("min side and offset coefficient must be non-negative".into()));
        }
        Ok(())
    }
}

/// Confidence filter, per-category duplicate suppression (highest
/// confidence first), then tiny-box filter; survivors get their argmax color.
pub fn post_process<T: Scalar>(raw: &[RawDetection<T>], cfg: &PostProcessConfig<T>) -> DetectionSet<T> {
    let mut confident: Vec<&RawDetection<T>> = raw
        .iter()
        .filter(|d| d.confidence >= cfg.confidence_threshold)
        .collect();
    // stable: equal confidences keep input order
    confident.sort_by(|a, b| b.confidence.partial_cmp(&a.confidence).unwrap_or(std::cmp::Ordering::Equal));

    let mut kept: Vec<&RawDetection<T>> = Vec::new();
    for det in confident {
        let duplicate = kept
            .iter()
            .any(|k| k.category == det.category && iou(&k.bbox, &det.bbox) > cfg.dedup_iou);
        if !duplicate {
            kept.push(det);
        }
    }

    DetectionSet::new(
        kept.into_iter()
            .filter(|d| d.bbox.min_side() >= cfg.min_side)
            .map(|d| DetectedInstance {
                category: d.category.clone(),
                confidence: d.confidence,
                bbox: d.bbox,
                color: d.color_scores.argmax(),
                color_scores: d.color_scores,
            })
            .collect(),
    )
}

/// Pairwise relations between detected instances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RelationMap {
    pairs: HashMap<(usize, usize), RelationSet>,
}

impl RelationMap {
    /// Kinds describing detection `subject` relative to detection `object`.
    pub fn get(&self, subject: usize, object: usize) -> RelationSet {
        self.pairs.get(&(subject, object)).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Relation sets for every ordered pair of distinct detections.
pub fn extract_relations<T: Scalar>(dets: &DetectionSet<T>, cfg: &PostProcessConfig<T>) -> RelationMap {
    let mut pairs = HashMap::new();
    for (i, a) in dets.instances.iter().enumerate() {
        for (j, b) in dets.instances.iter().enumerate() {
            if i != j {
                pairs.insert((i, j), relation_between(&a.bbox, &b.bbox, cfg.offset_coefficient));
            }
        }
    }
    RelationMap { pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::RelationKind;

    fn det(cat: &str, conf: f64, cx: f64, cy: f64, w: f64, h: f64) -> RawDetection<f64> {
        RawDetection {
            category: CategoryName::new(cat).unwrap(),
            confidence: conf,
            bbox: BoundingBox::new(cx, cy, w, h).unwrap(),
            color_scores: ColorScores::from_fn(|c| if c == ColorName::Red { 0.9 } else { 0.1 }),
        }
    }

    #[test]
    fn low_confidence_dropped() {
        let cfg = PostProcessConfig::default();
        assert!(post_process(&[det("clock", 0.2, 50.0, 50.0, 20.0, 20.0)], &cfg).is_empty());
    }

    #[test]
    fn dedup_keeps_higher_confidence() {
        let cfg = PostProcessConfig::default();
        // widths 20 vs 19: IoU = 19*20 / 20*20 = 0.95
        let a = det("clock", 0.8, 50.0, 50.0, 19.0, 20.0);
        let b = det("clock", 0.9, 50.0, 50.0, 20.0, 20.0);
        assert!((iou(&a.bbox, &b.bbox) - 0.95).abs() < 1e-12);
        let out = post_process(&[a.clone(), b.clone()], &cfg);
        assert_eq!(out.len(), 1);
        assert_eq!(out.instances[0].confidence, 0.9);

        let mut other = a;
        other.category = CategoryName::new("vase").unwrap();
        assert_eq!(post_process(&[other, b], &cfg).len(), 2);
    }

    #[test]
    fn tiny_boxes_dropped() {
        let cfg = PostProcessConfig::default();
        let out = post_process(
            &[det("cup", 0.9, 10.0, 10.0, 4.9, 30.0), det("cup", 0.9, 100.0, 10.0, 5.0, 30.0)],
            &cfg,
        );
        assert_eq!(out.len(), 1);
        assert_eq!(out.instances[0].bbox.w, 5.0);
    }

    #[test]
    fn color_classification() {
        let mut scores: BTreeMap<ColorName, f64> = ColorName::PALETTE.iter().map(|&c| (c, 0.1)).collect();
        scores.insert(ColorName::Red, 0.9);
        assert_eq!(classify_color(&scores).unwrap(), ColorName::Red);
        let flat: BTreeMap<ColorName, f64> = ColorName::PALETTE.iter().map(|&c| (c, 0.5)).collect();
        assert_eq!(classify_color(&flat).unwrap(), ColorName::Green);
        scores.remove(&ColorName::Blue);
        assert!(matches!(classify_color(&scores), Err(Error::MissingColor(c)) if c == "blue"));
    }

    #[test]
    fn relations_for_all_ordered_pairs() {
        let cfg = PostProcessConfig::default();
        let set = post_process(
            &[det("cup", 0.9, 10.0, 10.0, 10.0, 10.0), det("cup", 0.8, 50.0, 50.0, 10.0, 10.0)],
            &cfg,
        );
        let rel = extract_relations(&set, &cfg);
        assert_eq!(rel.len(), 2);
        assert!(rel.get(1, 0).contains(RelationKind::Right));
        assert!(rel.get(1, 0).contains(RelationKind::Below));
        assert!(rel.get(0, 1).contains(RelationKind::Left));
        assert!(rel.get(0, 1).contains(RelationKind::Above));
    }
}
