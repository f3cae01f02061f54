//! Detection post-processing: filtering, color classification, and geometric relations.

mod geometry;
mod postprocess;
mod record;

pub use geometry::{iou, relation_between, BoundingBox, RelationSet};
pub use postprocess::{
    classify_color, extract_relations, post_process, ColorScores, DetectedInstance, DetectionSet,
    PostProcessConfig, RawDetection, RelationMap,
};
pub use record::{DetectionRecord, DETECTIONS_SCHEMA};
