//! Detection record file: the contract between an external detector and the scorer.
//!
//! ```json
//! {"schema":"scenebench/detections","version":1,"image_id":17,
//!  "detections":[{"category":"clock","confidence":0.93,"box":[120.0,88.5,40.0,42.0],
//!                 "color_scores":{"green":0.11,"red":0.19,"yellow":0.12,"brown":0.14,
//!                                 "black":0.13,"white":0.26,"blue":0.10}}]}
//! ```
//!
//! `box` is `[center x, center y, width, height]` in pixels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::BoundingBox;
use super::postprocess::{ColorScores, RawDetection};
use crate::error::{Error, Result};
use crate::scene::{CategoryName, ColorName};

pub const DETECTIONS_SCHEMA: &str = "scenebench/detections";

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub image_id: u64,
    pub detections: Vec<RawDetection<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    schema: String,
    version: u32,
    image_id: u64,
    detections: Vec<DetectionEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionEntry {
    category: CategoryName,
    confidence: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    color_scores: BTreeMap<ColorName, f64>,
}

impl DetectionRecord {
    pub fn empty(image_id: u64) -> Self {
        DetectionRecord {
            image_id,
            detections: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: RecordFile = crate::scene::format::from_document(text)?;
        if file.schema != DETECTIONS_SCHEMA {
            return Err(Error::parse(1, "schema", format!("expected `{DETECTIONS_SCHEMA}`")));
        }
        if file.version != crate::scene::format::FORMAT_VERSION {
            return Err(Error::parse(1, "version", format!("unsupported version {}", file.version)));
        }
        let detections = file
            .detections
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let field = |f: &str| format!("detections[{i}].{f}");
                if !(0.0..=1.0).contains(&d.confidence) {
                    return Err(Error::parse(0, field("confidence"), "confidence outside [0, 1]"));
                }
                let [cx, cy, w, h] = d.bbox;
                let bbox = BoundingBox::new(cx, cy, w, h)
                    .map_err(|e| Error::parse(0, field("box"), e.to_string()))?;
                let color_scores = ColorScores::from_map(&d.color_scores)
                    .map_err(|e| Error::parse(0, field("color_scores"), e.to_string()))?;
                Ok(RawDetection {
                    category: d.category,
                    confidence: d.confidence,
                    bbox,
                    color_scores,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DetectionRecord {
            image_id: file.image_id,
            detections,
        })
    }

    pub fn to_json(&self) -> String {
        let file = RecordFile {
            schema: DETECTIONS_SCHEMA.into(),
            version: crate::scene::format::FORMAT_VERSION,
            image_id: self.image_id,
            detections: self
                .detections
                .iter()
                .map(|d| DetectionEntry {
                    category: d.category.clone(),
                    confidence: d.confidence,
                    bbox: d.bbox.to_array(),
                    color_scores: d.color_scores.iter().collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("record serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"schema":"scenebench/detections","version":1,"image_id":3,
      "detections":[{"category":"clock","confidence":0.93,"box":[120.0,88.5,40.0,42.0],
        "color_scores":{"green":0.11,"red":0.19,"yellow":0.12,"brown":0.14,"black":0.13,"white":0.26,"blue":0.10}}]}"#;

    #[test]
    fn parse_sample() {
        let rec = DetectionRecord::parse(SAMPLE).unwrap();
        assert_eq!(rec.image_id, 3);
        assert_eq!(rec.detections[0].color_scores.argmax(), ColorName::White);
        assert_eq!(DetectionRecord::parse(&rec.to_json()).unwrap(), rec);
    }

    #[test]
    fn missing_color_key_located() {
        let text = SAMPLE.replace(",\"blue\":0.10", "");
        match DetectionRecord::parse(&text).unwrap_err() {
            Error::Parse { field, message, .. } => {
                assert_eq!(field, "detections[0].color_scores");
                assert!(message.contains("blue"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_json_has_line() {
        let text = SAMPLE.replace("0.93", "\"high\"");
        match DetectionRecord::parse(&text).unwrap_err() {
            Error::Parse { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "detections[0].confidence");
            }
            e => panic!("unexpected {e}"),
        }
    }
}
