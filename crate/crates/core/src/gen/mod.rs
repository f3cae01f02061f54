//! Procedural benchmark generation.

mod benchmark;
mod sampler;
mod template;

pub use crate::scene::{check_acyclic, RingCheck};
pub use benchmark::{benchmark_stats, build_benchmark, entry_seed, generate_entry, BenchmarkStats};
pub use sampler::{generate_relations, generate_scene, sample_scene, GeneratorConfig, RELATION_ATTEMPTS};
pub use template::{fill_template, number_word, ordinal_word, word_count, PROMPT_PREFIX};
