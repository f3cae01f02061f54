use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::correlation::{mean, sample_moments, Moments};
use crate::error::{Error, Result};
use crate::scene::RelationKind;
use crate::score::file::AggregateRecord;
use crate::score::{align_score, ScoreRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKey {
    TotalInstances,
    Categories,
    Relations,
    MaxSameCategory,
    /// Not a partition: a record joins the group of every kind it specifies.
    RelationKind,
}

impl GroupKey {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKey::TotalInstances => "total",
            GroupKey::Categories => "categories",
            GroupKey::Relations => "relations",
            GroupKey::MaxSameCategory => "max-same",
            GroupKey::RelationKind => "kind",
        }
    }

    fn count_of(self, r: &ScoreRecord) -> Option<usize> {
        match self {
            GroupKey::TotalInstances => Some(r.total_instances),
            GroupKey::Categories => Some(r.category_count),
            GroupKey::Relations => Some(r.relation_count),
            GroupKey::MaxSameCategory => Some(r.max_same_category),
            GroupKey::RelationKind => None,
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(GroupKey::TotalInstances),
            "categories" => Ok(GroupKey::Categories),
            "relations" => Ok(GroupKey::Relations),
            "max-same" => Ok(GroupKey::MaxSameCategory),
            "kind" => Ok(GroupKey::RelationKind),
            _ => Err(Error::Config(format!(
                "unknown grouping key `{s}` (expected total, categories, relations, max-same or kind)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupValue {
    Count(usize),
    Kind(RelationKind),
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupValue::Count(n) => write!(f, "{n}"),
            GroupValue::Kind(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub value: GroupValue,
    pub size: usize,
    pub mean_acc: f64,
    pub mean_bias: f64,
    pub mean_align_score: f64,
    /// AlignScore of the group's mean acc and mean bias.
    pub align_score_of_means: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedMetrics {
    pub key: GroupKey,
    pub filter: Option<(GroupKey, usize)>,
    pub groups: Vec<GroupRow>,
    /// Values with no records (gaps in the observed range, absent kinds).
    pub notes: Vec<String>,
}

impl GroupedMetrics {
    pub fn to_table(&self) -> String {
        let mut out = format!("{}\tsize\tmean_acc\tmean_bias\tmean_align_score\talign_score_of_means\n", self.key);
        for g in &self.groups {
            out.push_str(&format!(
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
                g.value, g.size, g.mean_acc, g.mean_bias, g.mean_align_score, g.align_score_of_means
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        out
    }
}

/// Per-group means of acc, bias and AlignScore, optionally restricted to
/// records with `filter.0 == filter.1` first (e.g. total instances fixed at 4).
pub fn group_scores(
    records: &[ScoreRecord],
    key: GroupKey,
    filter: Option<(GroupKey, usize)>,
) -> Result<GroupedMetrics> {
    if let Some((GroupKey::RelationKind, _)) = filter {
        return Err(Error::Config("cannot filter on relation kind".into()));
    }
    let kept: Vec<&ScoreRecord> = records
        .iter()
        .filter(|r| filter.is_none_or(|(k, v)| k.count_of(r) == Some(v)))
        .collect();

    let mut buckets: BTreeMap<GroupValue, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in &kept {
        match key.count_of(r) {
            Some(n) => buckets.entry(GroupValue::Count(n)).or_default().push(r),
            None => {
                let mut kinds: Vec<RelationKind> = r.relations.iter().map(|v| v.kind).collect();
                kinds.sort();
                kinds.dedup();
                for k in kinds {
                    buckets.entry(GroupValue::Kind(k)).or_default().push(r);
                }
            }
        }
    }

    let mut notes = Vec::new();
    if kept.is_empty() {
        notes.push("no records match the filter".to_string());
    } else if key == GroupKey::RelationKind {
        for k in RelationKind::ALL {
            if !buckets.contains_key(&GroupValue::Kind(k)) {
                notes.push(format!("no records specify `{k}`"));
            }
        }
    } else {
        let present: Vec<usize> = buckets
            .keys()
            .filter_map(|v| match v {
                GroupValue::Count(n) => Some(*n),
                GroupValue::Kind(_) => None,
            })
            .collect();
        if let (Some(&lo), Some(&hi)) = (present.first(), present.last()) {
            for n in lo..=hi {
                if !present.contains(&n) {
                    notes.push(format!("no records with {key} = {n}"));
                }
            }
        }
    }

    let groups = buckets
        .into_iter()
        .map(|(value, rs)| {
            let col = |f: fn(&ScoreRecord) -> f64| mean(&rs.iter().map(|r| f(r)).collect::<Vec<f64>>());
            let mean_acc = col(|r| r.acc);
            let mean_bias = col(|r| r.bias as f64);
            GroupRow {
                value,
                size: rs.len(),
                mean_acc,
                mean_bias,
                mean_align_score: col(|r| r.align_score),
                align_score_of_means: align_score(mean_acc, mean_bias),
            }
        })
        .collect();
    Ok(GroupedMetrics {
        key,
        filter,
        groups,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KindTally {
    pub correct: usize,
    pub total: usize,
}

impl KindTally {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

/// Fraction of true relation verdicts per kind; kinds never specified are absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectionAccuracy {
    pub tallies: BTreeMap<RelationKind, KindTally>,
}

impl DirectionAccuracy {
    pub fn accuracy(&self, kind: RelationKind) -> Option<f64> {
        self.tallies.get(&kind).map(KindTally::accuracy)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("kind\tcorrect\ttotal\taccuracy\n");
        for k in RelationKind::ALL {
            match self.tallies.get(&k) {
                Some(t) => out.push_str(&format!("{k}\t{}\t{}\t{:.6}\n", t.correct, t.total, t.accuracy())),
                None => out.push_str(&format!("{k}\t0\t0\tNA\n")),
            }
        }
        out
    }
}

pub fn relation_direction_accuracy(records: &[ScoreRecord]) -> DirectionAccuracy {
    let mut tallies: BTreeMap<RelationKind, KindTally> = BTreeMap::new();
    for v in records.iter().flat_map(|r| &r.relations) {
        let t = tallies.entry(v.kind).or_default();
        t.total += 1;
        t.correct += usize::from(v.correct);
    }
    DirectionAccuracy { tallies }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub runs: usize,
    pub acc: Moments<f64>,
    pub bias: Moments<f64>,
    pub align_score: Moments<f64>,
}

impl StabilityReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("metric\tmean\tsd\n");
        for (name, m) in [("acc", self.acc), ("bias", self.bias), ("align_score", self.align_score)] {
            out.push_str(&format!("{name}\t{:.6}\t{:.6}\n", m.mean, m.sd));
        }
        out
    }
}

/// Mean and sample standard deviation of each dataset metric over repeated runs.
pub fn stability_report(runs: &[AggregateRecord]) -> Result<StabilityReport> {
    let col = |f: fn(&AggregateRecord) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    Ok(StabilityReport {
        runs: runs.len(),
        acc: sample_moments(&col(|a| a.mean_acc))?,
        bias: sample_moments(&col(|a| a.mean_bias))?,
        align_score: sample_moments(&col(|a| a.align_score))?,
    })
}
