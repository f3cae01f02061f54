//! Scene domain types, validation and the benchmark file format.

mod acyclic;
pub mod format;
mod types;
mod validate;
mod vocab;

pub use acyclic::{axis_edge, check_acyclic, cyclic_relations, RingCheck};
pub use format::{parse_scene, read_benchmark, serialize_scene, write_benchmark, BenchmarkEntry};
pub use types::{
    Axis, CategoryName, ColorName, InstanceRef, InstanceSpec, RelationKind, RelationSpec,
    SceneBuilder, StructuredScene,
};
pub use validate::{validate_scene, validate_scene_with, SceneLimits, Violation};
pub use vocab::CompatibilityTable;
