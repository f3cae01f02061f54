use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercase category identifier, e.g. `bench` or `traffic light`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CategoryName(String);

impl CategoryName {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let well_formed = !name.is_empty()
            && !name.starts_with(' ')
            && !name.ends_with(' ')
            && !name.contains("  ")
            && name.chars().all(|c| c.is_ascii_lowercase() || c == ' ');
        if well_formed {
            Ok(CategoryName(name))
        } else {
            Err(Error::InvalidScene(format!(
                "category name `{name}` must be non-empty lowercase words"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CategoryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for CategoryName {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        CategoryName::new(value)
    }
}

impl From<CategoryName> for String {
    fn from(value: CategoryName) -> Self {
        value.0
    }
}

impl FromStr for CategoryName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CategoryName::new(s)
    }
}

/// The closed seven-color palette. Declaration order is the tie-break order
/// used by color classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorName {
    Green,
    Red,
    Yellow,
    Brown,
    Black,
    White,
    Blue,
}

impl ColorName {
    pub const PALETTE: [ColorName; 7] = [
        ColorName::Green,
        ColorName::Red,
        ColorName::Yellow,
        ColorName::Brown,
        ColorName::Black,
        ColorName::White,
        ColorName::Blue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ColorName::Green => "green",
            ColorName::Red => "red",
            ColorName::Yellow => "yellow",
            ColorName::Brown => "brown",
            ColorName::Black => "black",
            ColorName::White => "white",
            ColorName::Blue => "blue",
        }
    }
}

impl fmt::Display for ColorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ColorName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ColorName::PALETTE
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidScene(format!("`{s}` is not a palette color")))
    }
}

/// Spatial relation of a subject instance relative to an object instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Left,
    Right,
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::Left,
        RelationKind::Right,
        RelationKind::Above,
        RelationKind::Below,
    ];

    pub fn axis(self) -> Axis {
        match self {
            RelationKind::Left | RelationKind::Right => Axis::Horizontal,
            RelationKind::Above | RelationKind::Below => Axis::Vertical,
        }
    }

    /// The kind describing the object relative to the subject.
    pub fn inverse(self) -> RelationKind {
        match self {
            RelationKind::Left => RelationKind::Right,
            RelationKind::Right => RelationKind::Left,
            RelationKind::Above => RelationKind::Below,
            RelationKind::Below => RelationKind::Above,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Left => "left",
            RelationKind::Right => "right",
            RelationKind::Above => "above",
            RelationKind::Below => "below",
        }
    }

    /// Prompt phrase preceding the object reference.
    pub fn phrase(self) -> &'static str {
        match self {
            RelationKind::Left => "on the left of",
            RelationKind::Right => "on the right of",
            RelationKind::Above => "above",
            RelationKind::Below => "below",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidScene(format!("`{s}` is not a relation kind")))
    }
}

/// `(category, ordinal)` key of a prompt instance; ordinals start at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceRef {
    pub category: CategoryName,
    pub ordinal: u32,
}

impl InstanceRef {
    pub fn new(category: CategoryName, ordinal: u32) -> Self {
        InstanceRef { category, ordinal }
    }
}

impl fmt::Display for InstanceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.category, self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceSpec {
    pub category: CategoryName,
    pub ordinal: u32,
    /// `None` only for hand-built scenes that leave an instance's color open.
    pub color: Option<ColorName>,
}

impl InstanceSpec {
    pub fn key(&self) -> InstanceRef {
        InstanceRef::new(self.category.clone(), self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSpec {
    pub subject: InstanceRef,
    pub object: InstanceRef,
    pub kind: RelationKind,
}

/// Ground truth of one prompt.
///
/// Instances are kept in canonical order: categories in first-appearance
/// order, then ascending ordinal. Relations are ordered by subject position,
/// then object position. Both orders are fixed at construction so that
/// structurally equal scenes compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuredScene {
    instances: Vec<InstanceSpec>,
    relations: Vec<RelationSpec>,
}

impl StructuredScene {
    /// Assemble a scene without rejecting anything; use
    /// [`crate::scene::validate_scene`] to audit it, or [`SceneBuilder`] for
    /// construction that refuses malformed references up front.
    pub fn from_parts(instances: Vec<InstanceSpec>, relations: Vec<RelationSpec>) -> Self {
        let mut order: Vec<CategoryName> = Vec::new();
        for inst in &instances {
            if !order.contains(&inst.category) {
                order.push(inst.category.clone());
            }
        }
        let mut instances = instances;
        instances.sort_by_key(|inst| {
            let pos = order.iter().position(|c| *c == inst.category).unwrap_or(usize::MAX);
            (pos, inst.ordinal)
        });
        let mut scene = StructuredScene {
            instances,
            relations: Vec::new(),
        };
        let mut relations = relations;
        relations.sort_by_key(|r| {
            (
                scene.index_of(&r.subject).unwrap_or(usize::MAX),
                scene.index_of(&r.object).unwrap_or(usize::MAX),
            )
        });
        scene.relations = relations;
        scene
    }

    pub fn instances(&self) -> &[InstanceSpec] {
        &self.instances
    }

    pub fn relations(&self) -> &[RelationSpec] {
        &self.relations
    }

    pub fn total_number(&self) -> usize {
        self.instances.len()
    }

    /// Categories in prompt order.
    pub fn categories(&self) -> Vec<&CategoryName> {
        let mut out: Vec<&CategoryName> = Vec::new();
        for inst in &self.instances {
            if !out.contains(&&inst.category) {
                out.push(&inst.category);
            }
        }
        out
    }

    /// `(category, n_k)` in prompt order.
    pub fn category_counts(&self) -> Vec<(&CategoryName, usize)> {
        self.categories()
            .into_iter()
            .map(|c| (c, self.instances.iter().filter(|i| i.category == *c).count()))
            .collect()
    }

    pub fn category_count(&self) -> usize {
        self.categories().len()
    }

    pub fn count_of(&self, category: &CategoryName) -> usize {
        self.instances.iter().filter(|i| &i.category == category).count()
    }

    pub fn max_same_category(&self) -> usize {
        self.category_counts()
            .into_iter()
            .map(|(_, n)| n)
            .max()
            .unwrap_or(0)
    }

    pub fn index_of(&self, key: &InstanceRef) -> Option<usize> {
        self.instances
            .iter()
            .position(|i| i.category == key.category && i.ordinal == key.ordinal)
    }

    /// Relations as `(subject index, object index, kind)`; unresolved references are skipped.
    pub fn indexed_relations(&self) -> Vec<(usize, usize, RelationKind)> {
        self.relations
            .iter()
            .filter_map(|r| Some((self.index_of(&r.subject)?, self.index_of(&r.object)?, r.kind)))
            .collect()
    }

    /// Number of instances whose color is specified.
    pub fn specified_colors(&self) -> usize {
        self.instances.iter().filter(|i| i.color.is_some()).count()
    }
}

/// Incremental construction that enforces the structural invariants:
/// contiguous ordinals per category, resolvable relation endpoints, no
/// self-relations and at most one relation per unordered pair.
#[derive(Debug, Default, Clone)]
pub struct SceneBuilder {
    instances: Vec<InstanceSpec>,
    relations: Vec<RelationSpec>,
    pairs: HashSet<(InstanceRef, InstanceRef)>,
}

impl SceneBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the next instance of `category`; returns its key.
    pub fn instance(&mut self, category: &CategoryName, color: Option<ColorName>) -> InstanceRef {
        let ordinal = self
            .instances
            .iter()
            .filter(|i| &i.category == category)
            .count() as u32
            + 1;
        self.instances.push(InstanceSpec {
            category: category.clone(),
            ordinal,
            color,
        });
        InstanceRef::new(category.clone(), ordinal)
    }

    pub fn relate(
        &mut self,
        subject: &InstanceRef,
        kind: RelationKind,
        object: &InstanceRef,
    ) -> Result<&mut Self> {
        let exists = |k: &InstanceRef| {
            self.instances
                .iter()
                .any(|i| i.category == k.category && i.ordinal == k.ordinal)
        };
        if !exists(subject) || !exists(object) {
            return Err(Error::InvalidScene(format!(
                "relation {subject} {kind} {object} references an unknown instance"
            )));
        }
        if subject == object {
            return Err(Error::InvalidScene(format!("{subject} related to itself")));
        }
        let pair = if subject < object {
            (subject.clone(), object.clone())
        } else {
            (object.clone(), subject.clone())
        };
        if !self.pairs.insert(pair) {
            return Err(Error::InvalidScene(format!(
                "pair ({subject}, {object}) already has a relation"
            )));
        }
        self.relations.push(RelationSpec {
            subject: subject.clone(),
            object: object.clone(),
            kind,
        });
        Ok(self)
    }

    pub fn build(self) -> StructuredScene {
        StructuredScene::from_parts(self.instances, self.relations)
    }
}
