//! Turn a scored prompt's failed checks into the paired prompts `c1` (what
//! the failed parts should look like) and `c2` (what was generated instead).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detect::{DetectionSet, RelationSet};
use crate::error::{Error, Result};
use crate::gen::ordinal_word;
use crate::scalar::Scalar;
use crate::scene::format::{from_line, Header};
use crate::scene::{CategoryName, ColorName, InstanceRef, RelationKind, StructuredScene};
use crate::score::ScoreReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountError {
    pub category: CategoryName,
    pub required: usize,
    pub detected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorError {
    pub instance: InstanceRef,
    pub required: ColorName,
    /// `None` when the instance was matched to a blank.
    pub detected: Option<ColorName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationError {
    pub subject: InstanceRef,
    pub object: InstanceRef,
    pub required: RelationKind,
    /// `None` when an endpoint was matched to a blank.
    pub detected: Option<RelationSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MisalignmentReport {
    pub counts: Vec<CountError>,
    pub colors: Vec<ColorError>,
    pub relations: Vec<RelationError>,
}

impl MisalignmentReport {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty() && self.colors.is_empty() && self.relations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len() + self.colors.len() + self.relations.len()
    }
}

/// Failed count, color and relation checks under the report's matching.
pub fn diagnose<T: Scalar>(
    report: &ScoreReport,
    scene: &StructuredScene,
    dets: &DetectionSet<T>,
) -> MisalignmentReport {
    diagnose_with_counts(report, scene, &dets.counts())
}

/// As [`diagnose`], with per-category detected counts supplied directly
/// (e.g. from a stored score record).
pub fn diagnose_with_counts(
    report: &ScoreReport,
    scene: &StructuredScene,
    detected: &BTreeMap<CategoryName, usize>,
) -> MisalignmentReport {
    let key = |i: usize| scene.instances()[i].key();
    let counts = scene
        .category_counts()
        .into_iter()
        .filter_map(|(category, n)| {
            let m = detected.get(category).copied().unwrap_or(0);
            (n != m).then(|| CountError {
                category: category.clone(),
                required: n,
                detected: m,
            })
        })
        .collect();
    let colors = report
        .verdicts
        .colors
        .iter()
        .filter(|v| !v.correct)
        .map(|v| ColorError {
            instance: key(v.instance),
            required: v.required,
            detected: v.detected,
        })
        .collect();
    let relations = report
        .verdicts
        .relations
        .iter()
        .filter(|v| !v.correct)
        .map(|v| RelationError {
            subject: key(v.subject),
            object: key(v.object),
            required: v.kind,
            detected: v.detected,
        })
        .collect();
    MisalignmentReport {
        counts,
        colors,
        relations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnforcePair {
    pub c1: String,
    pub c2: String,
}

fn instance_phrase(r: &InstanceRef) -> String {
    let ord = ordinal_word(r.ordinal).map_or_else(|| format!("#{}", r.ordinal), str::to_string);
    format!("{ord} {}", r.category)
}

fn relation_clause(kind: RelationKind, object: &InstanceRef) -> String {
    format!("{} the {}", kind.phrase(), instance_phrase(object))
}

/// Build `(c1, c2)`.
///
/// Count clauses come first (`2 bowl`, digits), then one sentence per
/// instance with a failed color or a failed relation it is the subject of,
/// in the order the errors were diagnosed. `c2` states the detected value
/// where one exists and negates the target otherwise:
/// `c1 = "2 bowl. The second bowl is white"`,
/// `c2 = "1 bowl. The second bowl is not white"`.
pub fn build_enforce_pair(mis: &MisalignmentReport) -> Result<EnforcePair> {
    if mis.is_empty() {
        return Err(Error::NothingToEnforce);
    }
    let mut want = Vec::new();
    let mut have = Vec::new();
    if !mis.counts.is_empty() {
        let clause = |n: usize, c: &CategoryName| format!("{n} {c}");
        want.push(mis.counts.iter().map(|e| clause(e.required, &e.category)).collect::<Vec<_>>().join(", "));
        have.push(mis.counts.iter().map(|e| clause(e.detected, &e.category)).collect::<Vec<_>>().join(", "));
    }

    // subjects in first-error order
    let mut subjects: Vec<&InstanceRef> = Vec::new();
    for r in mis.colors.iter().map(|e| &e.instance).chain(mis.relations.iter().map(|e| &e.subject)) {
        if !subjects.contains(&r) {
            subjects.push(r);
        }
    }
    for subject in subjects {
        let mut w = Vec::new();
        let mut h = Vec::new();
        if let Some(e) = mis.colors.iter().find(|e| &e.instance == subject) {
            w.push(e.required.to_string());
            h.push(match e.detected {
                Some(c) => c.to_string(),
                None => format!("not {}", e.required),
            });
        }
        for e in mis.relations.iter().filter(|e| &e.subject == subject) {
            w.push(relation_clause(e.required, &e.object));
            match e.detected.filter(|set| !set.is_empty()) {
                Some(set) => h.extend(set.iter().map(|k| relation_clause(k, &e.object))),
                None => h.push(format!("not {}", relation_clause(e.required, &e.object))),
            }
        }
        let head = format!("The {} is", instance_phrase(subject));
        want.push(format!("{head} {}", w.join(", ")));
        have.push(format!("{head} {}", h.join(", ")));
    }
    Ok(EnforcePair {
        c1: want.join(". "),
        c2: have.join(". "),
    })
}

pub const ENFORCE_SCHEMA: &str = "scenebench/enforce";

/// One line of an enforce-pair file, consumed by the guided re-generation step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnforceRecord {
    pub prompt_id: u64,
    pub c1: String,
    pub c2: String,
    /// Seed of the benchmark entry, reused for re-generation.
    pub seed: u64,
}

/// JSON Lines with a `{"schema":"scenebench/enforce","version":1}` header.
pub fn write_enforce_pairs(records: &[EnforceRecord]) -> String {
    let mut out = serde_json::to_string(&Header::new(ENFORCE_SCHEMA)).expect("header serializes");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_enforce_pairs(text: &str) -> Result<Vec<EnforceRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "schema", "empty enforce-pair file"))?;
    Header::check(header, ENFORCE_SCHEMA)?;
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| from_line(l, i + 1))
        .collect()
}
