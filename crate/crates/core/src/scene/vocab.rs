use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::types::{CategoryName, ColorName};
use crate::error::{Error, Result};

pub const COMPATIBILITY_SCHEMA: &str = "scenebench/compatibility";

const DEFAULT_TABLE: &str = include_str!("../../data/compatibility.json");

/// Category vocabulary together with the colors each category may take.
///
/// Category order is significant: the generator samples by index into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityTable {
    entries: Vec<(CategoryName, Vec<ColorName>)>,
    index: BTreeMap<CategoryName, usize>,
    canonical: bool,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    schema: String,
    version: u32,
    #[serde(default)]
    canonical: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    categories: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    name: CategoryName,
    colors: Vec<ColorName>,
}

impl CompatibilityTable {
    pub fn new(entries: Vec<(CategoryName, Vec<ColorName>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("compatibility table has no categories".into()));
        }
        let mut index = BTreeMap::new();
        let mut normalized = Vec::with_capacity(entries.len());
        for (pos, (name, colors)) in entries.into_iter().enumerate() {
            if colors.is_empty() {
                return Err(Error::Config(format!("category `{name}` has no permitted color")));
            }
            if index.insert(name.clone(), pos).is_some() {
                return Err(Error::Config(format!("category `{name}` listed twice")));
            }
            let colors: Vec<ColorName> = ColorName::PALETTE
                .into_iter()
                .filter(|c| colors.contains(c))
                .collect();
            normalized.push((name, colors));
        }
        Ok(CompatibilityTable {
            entries: normalized,
            index,
            canonical: false,
        })
    }

    /// The bundled illustrative table (66 categories).
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_TABLE).expect("bundled compatibility table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = super::format::from_document(text)?;
        if file.schema != COMPATIBILITY_SCHEMA {
            return Err(Error::parse(1, "schema", format!("expected `{COMPATIBILITY_SCHEMA}`")));
        }
        if file.version != super::format::FORMAT_VERSION {
            return Err(Error::parse(1, "version", format!("unsupported version {}", file.version)));
        }
        let mut table = Self::new(
            file.categories
                .into_iter()
                .map(|e| (e.name, e.colors))
                .collect(),
        )?;
        table.canonical = file.canonical;
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            schema: COMPATIBILITY_SCHEMA.into(),
            version: 1,
            canonical: self.canonical,
            note: None,
            categories: self
                .entries
                .iter()
                .map(|(name, colors)| TableEntry {
                    name: name.clone(),
                    colors: colors.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("table serializes") + "\n"
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(CategoryName, Vec<ColorName>)] {
        &self.entries
    }

    pub fn contains(&self, category: &CategoryName) -> bool {
        self.index.contains_key(category)
    }

    pub fn colors(&self, category: &CategoryName) -> Option<&[ColorName]> {
        self.index.get(category).map(|&i| self.entries[i].1.as_slice())
    }

    pub fn permits(&self, category: &CategoryName, color: ColorName) -> bool {
        self.colors(category).is_some_and(|cs| cs.contains(&color))
    }
}
