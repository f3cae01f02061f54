use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use scenebench::gen::{benchmark_stats, build_benchmark, GeneratorConfig};
use scenebench::scene::{write_benchmark, CompatibilityTable};
use serde::Serialize;

use crate::output::{flag_check, Run};
use crate::CONFIG_DIR_ENV;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Number of entries.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Master seed; each entry's seed is derived from it and the entry id.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-pair probability of each relation kind (at most 0.25).
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    #[arg(long, default_value_t = 5)]
    pub max_instances: usize,
    #[arg(long, default_value_t = 6)]
    pub max_relations: usize,
    #[arg(long, default_value_t = 5)]
    pub max_categories: usize,
    #[arg(long, default_value_t = 78)]
    pub max_words: usize,
    /// Category/color compatibility table. Defaults to
    /// `$SCENEBENCH_CONFIG_DIR/compatibility.json` if present, else the built-in table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a split-size table (TSV).
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

fn table_path(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(CONFIG_DIR_ENV)?;
    let p = Path::new(&dir).join("compatibility.json");
    p.is_file().then_some(p)
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    let mut run = Run::new("generate", &args, Some(args.seed));
    let table = match table_path(args.table.as_deref()) {
        Some(path) => {
            let text = run.read(&path)?;
            CompatibilityTable::from_json(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => CompatibilityTable::builtin(),
    };
    let config = GeneratorConfig {
        relation_probability: args.p,
        max_instances: args.max_instances,
        max_relations: args.max_relations,
        max_categories: args.max_categories,
        max_prompt_words: args.max_words,
        seed: args.seed,
        table: Arc::new(table),
    };
    flag_check(config.check())?;
    let entries = build_benchmark(&config, args.count as usize)?;
    run.write(&args.out, &write_benchmark(&entries))?;
    if let Some(path) = &args.stats {
        run.write(path, &benchmark_stats(&entries)?.to_table())?;
    }
    run.finish()
}
