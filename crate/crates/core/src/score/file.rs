//! Score report file: per-prompt records plus a dataset aggregate.
//!
//! A single JSON document `{"schema":"scenebench/scores","version":1,
//! "records":[...],"aggregate":{...}}`. Instances are referenced as
//! `{"category":..,"id":..}` with zero-based per-category ids, matching the
//! benchmark file; matching targets are detection indices into the
//! post-processed (descending-confidence) detection list, or `null` for blank.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::evaluate::{aggregate, Aggregate, ScoreReport};
use super::matching::{AccTally, ColorVerdict, Matching, RelationVerdict, Target, Verdicts};
use crate::detect::{DetectionSet, RelationSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::format::{from_document, FORMAT_VERSION};
use crate::scene::{BenchmarkEntry, CategoryName, ColorName, InstanceRef, RelationKind, StructuredScene};

pub const SCORES_SCHEMA: &str = "scenebench/scores";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceKey {
    pub category: CategoryName,
    pub id: u32,
}

impl InstanceKey {
    fn of(scene: &StructuredScene, index: usize) -> Self {
        let inst = &scene.instances()[index];
        InstanceKey {
            category: inst.category.clone(),
            id: inst.ordinal - 1,
        }
    }

    fn resolve(&self, scene: &StructuredScene) -> Result<usize> {
        scene
            .index_of(&InstanceRef::new(self.category.clone(), self.id + 1))
            .ok_or_else(|| {
                Error::InvalidMatching(format!("{} #{} not in scene", self.category, self.id))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub category: CategoryName,
    pub required: usize,
    pub detected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    #[serde(flatten)]
    pub instance: InstanceKey,
    pub target: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRecord {
    #[serde(flatten)]
    pub instance: InstanceKey,
    pub required: ColorName,
    pub detected: Option<ColorName>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub subject: InstanceKey,
    pub object: InstanceKey,
    pub kind: RelationKind,
    pub detected: Option<Vec<RelationKind>>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub prompt_id: u64,
    /// No detection record existed; scored as an empty detection set.
    pub missing_detections: bool,
    pub total_instances: usize,
    pub category_count: usize,
    pub relation_count: usize,
    pub max_same_category: usize,
    pub bias: usize,
    pub hits: usize,
    pub normalizer: usize,
    pub acc: f64,
    pub align_score: f64,
    pub counts: Vec<CountRecord>,
    pub matching: Vec<MatchRecord>,
    pub colors: Vec<ColorRecord>,
    pub relations: Vec<RelationRecord>,
}

impl ScoreRecord {
    pub fn new<T: Scalar>(
        entry: &BenchmarkEntry,
        dets: &DetectionSet<T>,
        report: &ScoreReport,
        missing_detections: bool,
    ) -> Self {
        let scene = &entry.scene;
        ScoreRecord {
            prompt_id: entry.id,
            missing_detections,
            total_instances: scene.total_number(),
            category_count: scene.category_count(),
            relation_count: scene.relations().len(),
            max_same_category: scene.max_same_category(),
            bias: report.bias,
            hits: report.acc.hits,
            normalizer: report.acc.normalizer,
            acc: report.acc_value(),
            align_score: report.align_score,
            counts: scene
                .category_counts()
                .into_iter()
                .map(|(category, n)| CountRecord {
                    category: category.clone(),
                    required: n,
                    detected: dets.count_of(category),
                })
                .collect(),
            matching: report
                .matching
                .targets()
                .iter()
                .enumerate()
                .map(|(i, t)| MatchRecord {
                    instance: InstanceKey::of(scene, i),
                    target: t.detected(),
                })
                .collect(),
            colors: report
                .verdicts
                .colors
                .iter()
                .map(|v| ColorRecord {
                    instance: InstanceKey::of(scene, v.instance),
                    required: v.required,
                    detected: v.detected,
                    correct: v.correct,
                })
                .collect(),
            relations: report
                .verdicts
                .relations
                .iter()
                .map(|v| RelationRecord {
                    subject: InstanceKey::of(scene, v.subject),
                    object: InstanceKey::of(scene, v.object),
                    kind: v.kind,
                    detected: v.detected.map(|set| set.iter().collect()),
                    correct: v.correct,
                })
                .collect(),
        }
    }

    /// Rebuild the in-memory report against the scene it was scored on.
    pub fn to_report(&self, scene: &StructuredScene) -> Result<ScoreReport> {
        let mut targets = vec![Target::Blank; scene.total_number()];
        for m in &self.matching {
            targets[m.instance.resolve(scene)?] = m.target.map_or(Target::Blank, Target::Detected);
        }
        let colors = self
            .colors
            .iter()
            .map(|c| {
                Ok(ColorVerdict {
                    instance: c.instance.resolve(scene)?,
                    required: c.required,
                    detected: c.detected,
                    correct: c.correct,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let relations = self
            .relations
            .iter()
            .map(|r| {
                Ok(RelationVerdict {
                    subject: r.subject.resolve(scene)?,
                    object: r.object.resolve(scene)?,
                    kind: r.kind,
                    detected: r.detected.as_ref().map(|k| k.iter().copied().collect::<RelationSet>()),
                    correct: r.correct,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreReport {
            bias: self.bias,
            acc: AccTally {
                hits: self.hits,
                normalizer: self.normalizer,
            },
            align_score: self.align_score,
            matching: Matching::new(targets),
            verdicts: Verdicts { colors, relations },
        })
    }

    pub fn detected_counts(&self) -> BTreeMap<CategoryName, usize> {
        self.counts
            .iter()
            .map(|c| (c.category.clone(), c.detected))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub count: usize,
    pub missing_detections: usize,
    pub mean_acc: f64,
    pub mean_bias: f64,
    pub align_score: f64,
    pub mean_prompt_align_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreFile {
    pub schema: String,
    pub version: u32,
    pub records: Vec<ScoreRecord>,
    pub aggregate: AggregateRecord,
}

impl ScoreFile {
    pub fn new(records: Vec<ScoreRecord>) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.acc, r.bias as f64)).collect();
        let Aggregate {
            count,
            mean_acc,
            mean_bias,
            align_score,
            mean_prompt_align_score,
        } = aggregate(&pairs)?;
        Ok(ScoreFile {
            schema: SCORES_SCHEMA.into(),
            version: FORMAT_VERSION,
            aggregate: AggregateRecord {
                count,
                missing_detections: records.iter().filter(|r| r.missing_detections).count(),
                mean_acc,
                mean_bias,
                align_score,
                mean_prompt_align_score,
            },
            records,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScoreFile = from_document(text)?;
        if file.schema != SCORES_SCHEMA {
            return Err(Error::parse(1, "schema", format!("expected `{SCORES_SCHEMA}`")));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scores serialize") + "\n"
    }
}
