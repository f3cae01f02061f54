use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sampler::{generate_scene, GeneratorConfig};
use crate::error::{Error, Result};
use crate::scene::{validate_scene_with, BenchmarkEntry};

/// Seed of entry `id`'s private stream (SplitMix64 finalizer over master seed and id).
pub fn entry_seed(master: u64, id: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(id.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Regenerate one entry from its recorded seed.
pub fn generate_entry(config: &GeneratorConfig, id: u64, seed: u64) -> Result<BenchmarkEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (scene, prompt) = generate_scene(config, &mut rng)?;
    if let Err(violations) = validate_scene_with(&scene, &config.table, config.limits()) {
        let joined: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidScene(format!("entry {id}: {}", joined.join("; "))));
    }
    Ok(BenchmarkEntry {
        id,
        seed,
        scene,
        prompt,
    })
}

/// `count` entries with ids `0..count`; entries are generated in parallel
/// from independent per-entry streams, so the result depends only on the
/// configuration.
pub fn build_benchmark(config: &GeneratorConfig, count: usize) -> Result<Vec<BenchmarkEntry>> {
    if count == 0 {
        return Err(Error::Config("benchmark size must be at least 1".into()));
    }
    config.check()?;
    (0..count as u64)
        .into_par_iter()
        .map(|id| generate_entry(config, id, entry_seed(config.seed, id)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BenchmarkStats {
    pub size: usize,
    pub total_instances: BTreeMap<usize, usize>,
    pub categories: BTreeMap<usize, usize>,
    pub relations: BTreeMap<usize, usize>,
    pub max_same_category: BTreeMap<usize, usize>,
    pub max_prompt_words: usize,
}

impl BenchmarkStats {
    /// `(split label, entry count)` for every histogram bin.
    pub fn splits(&self) -> Vec<(String, usize)> {
        let named = [
            ("total_instances", &self.total_instances),
            ("categories", &self.categories),
            ("relations", &self.relations),
            ("max_same_category", &self.max_same_category),
        ];
        named
            .into_iter()
            .flat_map(|(name, hist)| hist.iter().map(move |(k, v)| (format!("{name}={k}"), *v)))
            .collect()
    }

    /// Splits holding fewer than `min` entries.
    pub fn small_splits(&self, min: usize) -> Vec<(String, usize)> {
        self.splits().into_iter().filter(|(_, n)| *n < min).collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("split\tvalue\tcount\n");
        for (label, n) in self.splits() {
            let (name, value) = label.split_once('=').expect("labels are name=value");
            out.push_str(&format!("{name}\t{value}\t{n}\n"));
        }
        out.push_str(&format!("size\t-\t{}\n", self.size));
        out.push_str(&format!("max_prompt_words\t-\t{}\n", self.max_prompt_words));
        out
    }
}

pub fn benchmark_stats(entries: &[BenchmarkEntry]) -> Result<BenchmarkStats> {
    if entries.is_empty() {
        return Err(Error::Empty("benchmark has no entries".into()));
    }
    let mut stats = BenchmarkStats {
        size: entries.len(),
        ..BenchmarkStats::default()
    };
    for e in entries {
        *stats.total_instances.entry(e.scene.total_number()).or_default() += 1;
        *stats.categories.entry(e.scene.category_count()).or_default() += 1;
        *stats.relations.entry(e.scene.relations().len()).or_default() += 1;
        *stats.max_same_category.entry(e.scene.max_same_category()).or_default() += 1;
        stats.max_prompt_words = stats
            .max_prompt_words
            .max(super::template::word_count(&e.prompt));
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry_reproducible_from_seed() {
        let cfg = GeneratorConfig {
            seed: 5,
            ..GeneratorConfig::default()
        };
        let entries = build_benchmark(&cfg, 1).unwrap();
        let again = generate_entry(&cfg, 0, entries[0].seed).unwrap();
        assert_eq!(entries[0], again);
    }

    #[test]
    fn zero_count_rejected() {
        assert!(build_benchmark(&GeneratorConfig::default(), 0).is_err());
    }

    #[test]
    fn stats_of_one_entry() {
        let cfg = GeneratorConfig::default();
        let entries = build_benchmark(&cfg, 1).unwrap();
        let stats = benchmark_stats(&entries).unwrap();
        let n = entries[0].scene.total_number();
        assert_eq!(stats.total_instances, BTreeMap::from([(n, 1)]));
        assert!(benchmark_stats(&[]).is_err());
    }

    #[test]
    fn seeds_differ_per_entry() {
        assert_ne!(entry_seed(0, 0), entry_seed(0, 1));
        assert_ne!(entry_seed(0, 1), entry_seed(1, 0));
    }
}
