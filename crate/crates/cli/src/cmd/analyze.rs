use std::path::PathBuf;

use anyhow::Context;
use scenebench::score::ScoreFile;
use scenebench::stats::{group_scores, relation_direction_accuracy, stability_report, GroupKey};
use serde::Serialize;

use crate::output::{usage, Run};

#[derive(clap::Args, Debug, Serialize)]
#[command(group = clap::ArgGroup::new("report").required(true).args(["group_by", "directions", "stability"]))]
pub struct Args {
    /// Score file; repeat for `--stability`.
    #[arg(long, required = true)]
    pub scores: Vec<PathBuf>,
    /// Group by total, categories, relations, max-same or kind.
    #[arg(long)]
    pub group_by: Option<String>,
    /// Keep only entries with this many instances before grouping.
    #[arg(long, requires = "group_by")]
    pub fix_total: Option<usize>,
    /// Accuracy per relation kind.
    #[arg(long)]
    pub directions: bool,
    /// Mean and sample sd of dataset metrics across the score files.
    #[arg(long)]
    pub stability: bool,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    if !args.stability && args.scores.len() != 1 {
        return Err(usage("give exactly one --scores file unless --stability is set"));
    }
    if args.stability && args.scores.len() < 2 {
        return Err(usage("--stability needs at least two --scores files"));
    }
    let key = match &args.group_by {
        Some(k) => Some(k.parse::<GroupKey>().map_err(|e| usage(e.to_string()))?),
        None => None,
    };
    let mut run = Run::new("analyze", &args, None);
    let mut files = Vec::new();
    for path in &args.scores {
        let text = run.read(path)?;
        files.push(ScoreFile::parse(&text).with_context(|| format!("in {}", path.display()))?);
    }
    let table = if let Some(key) = key {
        let filter = args.fix_total.map(|n| (GroupKey::TotalInstances, n));
        let g = group_scores(&files[0].records, key, filter)?;
        for n in &g.notes {
            eprintln!("note: {n}");
        }
        g.to_table()
    } else if args.directions {
        relation_direction_accuracy(&files[0].records).to_table()
    } else {
        let runs: Vec<_> = files.iter().map(|f| f.aggregate.clone()).collect();
        stability_report(&runs)?.to_table()
    };
    run.write(&args.out, &table)?;
    run.finish()
}
