use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::acyclic::{check_acyclic, RingCheck};
use super::types::{Axis, CategoryName, ColorName, InstanceRef, StructuredScene};
use super::vocab::CompatibilityTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneLimits {
    pub max_instances: usize,
    pub max_relations: usize,
}

impl Default for SceneLimits {
    fn default() -> Self {
        SceneLimits {
            max_instances: 5,
            max_relations: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoInstances,
    TooManyInstances { count: usize, max: usize },
    TooManyRelations { count: usize, max: usize },
    UnknownCategory(CategoryName),
    ColorNotPermitted { instance: InstanceRef, color: ColorName },
    BadOrdinal { category: CategoryName, ordinals: Vec<u32> },
    UnresolvedReference(InstanceRef),
    SelfRelation(InstanceRef),
    DuplicatePair(InstanceRef, InstanceRef),
    HorizontalCycle,
    VerticalCycle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoInstances => write!(f, "scene has no instances"),
            Violation::TooManyInstances { count, max } => {
                write!(f, "{count} instances exceed the maximum of {max}")
            }
            Violation::TooManyRelations { count, max } => {
                write!(f, "{count} relations exceed the maximum of {max}")
            }
            Violation::UnknownCategory(c) => write!(f, "category `{c}` not in vocabulary"),
            Violation::ColorNotPermitted { instance, color } => {
                write!(f, "color not permitted: {instance} is {color}")
            }
            Violation::BadOrdinal { category, ordinals } => {
                write!(f, "ordinals of `{category}` are {ordinals:?}, expected 1..=n")
            }
            Violation::UnresolvedReference(r) => write!(f, "unresolved reference {r}"),
            Violation::SelfRelation(r) => write!(f, "{r} is related to itself"),
            Violation::DuplicatePair(a, b) => write!(f, "pair ({a}, {b}) has more than one relation"),
            Violation::HorizontalCycle => write!(f, "horizontal cycle"),
            Violation::VerticalCycle => write!(f, "vertical cycle"),
        }
    }
}

pub fn validate_scene(scene: &StructuredScene, table: &CompatibilityTable) -> Result<(), Vec<Violation>> {
    validate_scene_with(scene, table, SceneLimits::default())
}

/// Audit every scene invariant, collecting all violations instead of stopping at the first.
pub fn validate_scene_with(
    scene: &StructuredScene,
    table: &CompatibilityTable,
    limits: SceneLimits,
) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let n = scene.total_number();
    if n == 0 {
        out.push(Violation::NoInstances);
    }
    if n > limits.max_instances {
        out.push(Violation::TooManyInstances {
            count: n,
            max: limits.max_instances,
        });
    }
    if scene.relations().len() > limits.max_relations {
        out.push(Violation::TooManyRelations {
            count: scene.relations().len(),
            max: limits.max_relations,
        });
    }

    for category in scene.categories() {
        if !table.contains(category) {
            out.push(Violation::UnknownCategory(category.clone()));
        }
        let ordinals: Vec<u32> = scene
            .instances()
            .iter()
            .filter(|i| &i.category == category)
            .map(|i| i.ordinal)
            .collect();
        let contiguous = ordinals.iter().enumerate().all(|(i, &o)| o as usize == i + 1);
        if !contiguous {
            out.push(Violation::BadOrdinal {
                category: category.clone(),
                ordinals,
            });
        }
    }
    for inst in scene.instances() {
        if let Some(color) = inst.color {
            if table.contains(&inst.category) && !table.permits(&inst.category, color) {
                out.push(Violation::ColorNotPermitted {
                    instance: inst.key(),
                    color,
                });
            }
        }
    }

    let mut unresolved = BTreeSet::new();
    let mut pairs = HashSet::new();
    for rel in scene.relations() {
        for end in [&rel.subject, &rel.object] {
            if scene.index_of(end).is_none() && unresolved.insert(end.clone()) {
                out.push(Violation::UnresolvedReference(end.clone()));
            }
        }
        if rel.subject == rel.object {
            out.push(Violation::SelfRelation(rel.subject.clone()));
            continue;
        }
        let pair = if rel.subject < rel.object {
            (rel.subject.clone(), rel.object.clone())
        } else {
            (rel.object.clone(), rel.subject.clone())
        };
        if !pairs.insert(pair.clone()) {
            out.push(Violation::DuplicatePair(pair.0, pair.1));
        }
    }

    let indexed = scene.indexed_relations();
    if check_acyclic(n, &indexed, Axis::Horizontal) == RingCheck::Ring {
        out.push(Violation::HorizontalCycle);
    }
    if check_acyclic(n, &indexed, Axis::Vertical) == RingCheck::Ring {
        out.push(Violation::VerticalCycle);
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
