//! Benchmark file format.
//!
//! A benchmark file is UTF-8 JSON Lines. The first line is a header
//! `{"schema":"scenebench/benchmark","version":1}`; every following line is
//! one entry:
//!
//! ```json
//! {"id":0,"seed":42,"total_number":4,
//!  "objects":[{"category":"bench","instances":[
//!     {"id":0,"color":"white","relations":[{"kind":"left","category":"boat","id":0}]},
//!     {"id":1,"color":"black","relations":[]}]}],
//!  "prompt":"A photo-realistic image of ..."}
//! ```
//!
//! Instance `id`s are zero-based per category (`ordinal - 1`). A relation is
//! stored once, on its subject instance.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::types::{
    CategoryName, ColorName, InstanceRef, InstanceSpec, RelationKind, RelationSpec, StructuredScene,
};
use crate::error::{Error, Result};

pub const BENCHMARK_SCHEMA: &str = "scenebench/benchmark";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkEntry {
    pub id: u64,
    pub seed: u64,
    pub scene: StructuredScene,
    pub prompt: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub schema: String,
    pub version: u32,
}

impl Header {
    pub fn new(schema: &str) -> Self {
        Header {
            schema: schema.into(),
            version: FORMAT_VERSION,
        }
    }

    pub(crate) fn check(line: &str, expected: &str) -> Result<()> {
        let header: Header = from_line(line, 1)?;
        if header.schema != expected {
            return Err(Error::parse(
                1,
                "schema",
                format!("expected `{expected}`, found `{}`", header.schema),
            ));
        }
        if header.version != FORMAT_VERSION {
            return Err(Error::parse(
                1,
                "version",
                format!("unsupported version {}", header.version),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationRecord {
    kind: RelationKind,
    category: CategoryName,
    id: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<ColorName>,
    #[serde(default)]
    relations: Vec<RelationRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryRecord {
    category: CategoryName,
    instances: Vec<InstanceRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRecord {
    total_number: usize,
    objects: Vec<CategoryRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRecord {
    id: u64,
    seed: u64,
    total_number: usize,
    objects: Vec<CategoryRecord>,
    prompt: String,
}

/// Deserialize one JSON line, reporting the failing field path.
pub(crate) fn from_line<T: DeserializeOwned>(line: &str, line_no: usize) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(line_no, path, e.into_inner().to_string())
    })
}

/// Deserialize a multi-line JSON document, reporting line and field path.
pub(crate) fn from_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::parse(inner.line(), path, inner.to_string())
    })
}

fn to_records(scene: &StructuredScene) -> Vec<CategoryRecord> {
    scene
        .categories()
        .into_iter()
        .map(|category| CategoryRecord {
            category: category.clone(),
            instances: scene
                .instances()
                .iter()
                .filter(|i| &i.category == category)
                .map(|inst| InstanceRecord {
                    id: inst.ordinal - 1,
                    color: inst.color,
                    relations: scene
                        .relations()
                        .iter()
                        .filter(|r| r.subject == inst.key())
                        .map(|r| RelationRecord {
                            kind: r.kind,
                            category: r.object.category.clone(),
                            id: r.object.ordinal - 1,
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect()
}

fn from_records(objects: Vec<CategoryRecord>, total_number: usize, line: usize) -> Result<StructuredScene> {
    let mut instances = Vec::new();
    let mut relations = Vec::new();
    let mut seen: Vec<CategoryName> = Vec::new();
    for (ci, group) in objects.into_iter().enumerate() {
        if seen.contains(&group.category) {
            return Err(Error::parse(
                line,
                format!("objects[{ci}].category"),
                format!("category `{}` listed twice", group.category),
            ));
        }
        seen.push(group.category.clone());
        for (ii, inst) in group.instances.into_iter().enumerate() {
            if inst.id as usize != ii {
                return Err(Error::parse(
                    line,
                    format!("objects[{ci}].instances[{ii}].id"),
                    format!("expected id {ii}, found {}", inst.id),
                ));
            }
            let subject = InstanceRef::new(group.category.clone(), inst.id + 1);
            for rel in inst.relations {
                relations.push(RelationSpec {
                    subject: subject.clone(),
                    object: InstanceRef::new(rel.category, rel.id + 1),
                    kind: rel.kind,
                });
            }
            instances.push(InstanceSpec {
                category: group.category.clone(),
                ordinal: inst.id + 1,
                color: inst.color,
            });
        }
    }
    if instances.len() != total_number {
        return Err(Error::parse(
            line,
            "total_number",
            format!("declares {total_number} but lists {}", instances.len()),
        ));
    }
    Ok(StructuredScene::from_parts(instances, relations))
}

/// Canonical single-line JSON record of a scene.
pub fn serialize_scene(scene: &StructuredScene) -> String {
    let record = SceneRecord {
        total_number: scene.total_number(),
        objects: to_records(scene),
    };
    serde_json::to_string(&record).expect("scene serializes")
}

pub fn parse_scene(text: &str) -> Result<StructuredScene> {
    let record: SceneRecord = from_line(text.trim(), 1)?;
    from_records(record.objects, record.total_number, 1)
}

pub fn serialize_entry(entry: &BenchmarkEntry) -> String {
    let record = EntryRecord {
        id: entry.id,
        seed: entry.seed,
        total_number: entry.scene.total_number(),
        objects: to_records(&entry.scene),
        prompt: entry.prompt.clone(),
    };
    serde_json::to_string(&record).expect("entry serializes")
}

pub fn parse_entry(line: &str, line_no: usize) -> Result<BenchmarkEntry> {
    let record: EntryRecord = from_line(line, line_no)?;
    Ok(BenchmarkEntry {
        id: record.id,
        seed: record.seed,
        scene: from_records(record.objects, record.total_number, line_no)?,
        prompt: record.prompt,
    })
}

pub fn write_benchmark(entries: &[BenchmarkEntry]) -> String {
    let mut out = serde_json::to_string(&Header::new(BENCHMARK_SCHEMA)).expect("header serializes");
    out.push('\n');
    for entry in entries {
        out.push_str(&serialize_entry(entry));
        out.push('\n');
    }
    out
}

pub fn read_benchmark(text: &str) -> Result<Vec<BenchmarkEntry>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "schema", "empty benchmark file"))?;
    Header::check(header, BENCHMARK_SCHEMA)?;
    let mut entries: Vec<BenchmarkEntry> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let entry = parse_entry(line, i + 1)?;
        if entries.iter().any(|e| e.id == entry.id) {
            return Err(Error::parse(i + 1, "id", format!("duplicate id {}", entry.id)));
        }
        entries.push(entry);
    }
    Ok(entries)
}
