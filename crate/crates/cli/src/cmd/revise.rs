use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use scenebench::revise::{build_enforce_pair, diagnose_with_counts, write_enforce_pairs, EnforceRecord};
use scenebench::scene::read_benchmark;
use scenebench::score::ScoreFile;
use serde::Serialize;

use crate::output::Run;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    pub benchmark: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    let mut run = Run::new("revise", &args, None);
    let bench = run.read(&args.benchmark)?;
    let entries = read_benchmark(&bench).with_context(|| format!("in {}", args.benchmark.display()))?;
    let scores = run.read(&args.scores)?;
    let file = ScoreFile::parse(&scores).with_context(|| format!("in {}", args.scores.display()))?;
    let by_id: HashMap<u64, _> = entries.iter().map(|e| (e.id, e)).collect();

    let mut out = Vec::new();
    for record in &file.records {
        let Some(entry) = by_id.get(&record.prompt_id) else {
            bail!("score record {} has no benchmark entry", record.prompt_id);
        };
        let report = record
            .to_report(&entry.scene)
            .with_context(|| format!("score record {}", record.prompt_id))?;
        let mis = diagnose_with_counts(&report, &entry.scene, &record.detected_counts());
        if mis.is_empty() {
            continue;
        }
        let pair = build_enforce_pair(&mis)?;
        out.push(EnforceRecord {
            prompt_id: entry.id,
            c1: pair.c1,
            c2: pair.c2,
            seed: entry.seed,
        });
    }
    if out.is_empty() {
        eprintln!("note: every entry is fully aligned; nothing to enforce");
    }
    run.write(&args.out, &write_enforce_pairs(&out))?;
    run.finish()
}
