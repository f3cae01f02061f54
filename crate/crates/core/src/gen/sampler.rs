use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::template::{fill_template, word_count};
use crate::error::{Error, Result};
use crate::scene::{
    check_acyclic, cyclic_relations, Axis, CompatibilityTable, InstanceSpec, RelationKind,
    RelationSpec, RingCheck, SceneLimits, StructuredScene,
};

/// Resampling attempts before offending relations are dropped instead.
pub const RELATION_ATTEMPTS: usize = 16;

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    /// Per-pair probability of each of the four relation kinds.
    pub relation_probability: f64,
    pub max_instances: usize,
    pub max_relations: usize,
    pub max_categories: usize,
    pub max_prompt_words: usize,
    pub seed: u64,
    pub table: Arc<CompatibilityTable>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            relation_probability: 0.05,
            max_instances: 5,
            max_relations: 6,
            max_categories: 5,
            max_prompt_words: 78,
            seed: 0,
            table: Arc::new(CompatibilityTable::builtin()),
        }
    }
}

impl GeneratorConfig {
    pub fn check(&self) -> Result<()> {
        let p = self.relation_probability;
        if !(0.0..=0.25).contains(&p) {
            return Err(Error::Config(format!(
                "relation probability {p} outside [0, 0.25] (four kinds share one pair)"
            )));
        }
        if self.max_instances == 0 || self.max_relations == 0 || self.max_categories == 0 {
            return Err(Error::Config("maxima must be at least 1".into()));
        }
        if self.max_instances > 10 {
            return Err(Error::Config(format!(
                "max instances {} exceeds the template's number words (10)",
                self.max_instances
            )));
        }
        if self.max_categories > self.table.len() {
            return Err(Error::Config(format!(
                "max categories {} exceeds vocabulary size {}",
                self.max_categories,
                self.table.len()
            )));
        }
        Ok(())
    }

    pub fn limits(&self) -> SceneLimits {
        SceneLimits {
            max_instances: self.max_instances,
            max_relations: self.max_relations,
        }
    }
}

/// Sample categories, per-category counts and colors; the scene has no relations.
///
/// The category count is uniform on `1..=min(max_categories, max_instances)`,
/// the categories are drawn without replacement (draw order is prompt
/// order), the total is uniform on `K..=max_instances`, and each instance
/// beyond the first per category goes to a uniformly chosen category.
pub fn sample_scene<R: Rng + ?Sized>(config: &GeneratorConfig, rng: &mut R) -> Result<StructuredScene> {
    config.check()?;
    let table = &config.table;
    let max_k = config.max_categories.min(config.max_instances);
    let k = rng.gen_range(1..=max_k);
    let picked = index::sample(rng, table.len(), k).into_vec();
    let total = rng.gen_range(k..=config.max_instances);
    let mut counts = vec![1usize; k];
    for _ in k..total {
        counts[rng.gen_range(0..k)] += 1;
    }
    let mut instances = Vec::with_capacity(total);
    for (&ci, &n) in picked.iter().zip(&counts) {
        let (category, colors) = &table.entries()[ci];
        for ordinal in 1..=n as u32 {
            let color = *colors.choose(rng).expect("table entries have colors");
            instances.push(InstanceSpec {
                category: category.clone(),
                ordinal,
                color: Some(color),
            });
        }
    }
    Ok(StructuredScene::from_parts(instances, Vec::new()))
}

/// One pass over unordered pairs `(i, j)`, `i < j` in canonical order; the
/// lower-indexed instance is the subject.
fn sample_pairs<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize, RelationKind)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.gen();
            let slot = (u / p).floor();
            if p > 0.0 && slot < 4.0 {
                out.push((i, j, RelationKind::ALL[slot as usize]));
            }
        }
    }
    out
}

fn is_acyclic(n: usize, rels: &[(usize, usize, RelationKind)]) -> bool {
    check_acyclic(n, rels, Axis::Horizontal) == RingCheck::NoRing
        && check_acyclic(n, rels, Axis::Vertical) == RingCheck::NoRing
}

/// Sample relations for a relation-free scene.
///
/// Each pair independently receives each kind with probability `p`. Excess
/// relations over the cap are dropped uniformly. A relation set with a
/// cycle on either axis is resampled; after [`RELATION_ATTEMPTS`] failures
/// the latest-sampled relation lying on a cycle is dropped until none remain.
pub fn generate_relations<R: Rng + ?Sized>(
    scene: &StructuredScene,
    config: &GeneratorConfig,
    rng: &mut R,
) -> Vec<RelationSpec> {
    let n = scene.total_number();
    let mut rels = Vec::new();
    for _ in 0..RELATION_ATTEMPTS {
        rels = sample_pairs(n, config.relation_probability, rng);
        if rels.len() > config.max_relations {
            let mut keep = index::sample(rng, rels.len(), config.max_relations).into_vec();
            keep.sort_unstable();
            rels = keep.into_iter().map(|i| rels[i]).collect();
        }
        if is_acyclic(n, &rels) {
            break;
        }
    }
    for axis in [Axis::Horizontal, Axis::Vertical] {
        while let Some(&last) = cyclic_relations(n, &rels, axis).last() {
            rels.remove(last);
        }
    }
    let instances = scene.instances();
    rels.into_iter()
        .map(|(s, o, kind)| RelationSpec {
            subject: instances[s].key(),
            object: instances[o].key(),
            kind,
        })
        .collect()
}

/// Full scene: instances, relations, and a prompt within the word budget.
/// Relations are dropped latest-first while the prompt is too long.
pub fn generate_scene<R: Rng + ?Sized>(
    config: &GeneratorConfig,
    rng: &mut R,
) -> Result<(StructuredScene, String)> {
    let base = sample_scene(config, rng)?;
    let mut relations = generate_relations(&base, config, rng);
    loop {
        let scene = StructuredScene::from_parts(base.instances().to_vec(), relations.clone());
        let prompt = fill_template(&scene)?;
        if word_count(&prompt) <= config.max_prompt_words {
            return Ok((scene, prompt));
        }
        if relations.pop().is_none() {
            return Err(Error::Config(format!(
                "relation-free prompt already exceeds {} words",
                config.max_prompt_words
            )));
        }
    }
}
