use std::path::PathBuf;

use anyhow::{bail, Context};
use rayon::prelude::*;
use scenebench::detect::{DetectionRecord, PostProcessConfig};
use scenebench::scene::read_benchmark;
use scenebench::score::{evaluate_raw, ScoreFile, ScoreRecord};
use serde::Serialize;

use crate::output::{flag_check, Run};

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    pub benchmark: PathBuf,
    /// Directory of detection records named `<entry id>.json`. A missing
    /// record is scored as an empty detection set and flagged.
    #[arg(long)]
    pub detections: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0.9)]
    pub dedup_iou: f64,
    #[arg(long, default_value_t = 5.0)]
    pub min_side: f64,
    /// Relation offset coefficient.
    #[arg(long, default_value_t = 0.1)]
    pub offset: f64,
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = PostProcessConfig {
        confidence_threshold: args.confidence,
        dedup_iou: args.dedup_iou,
        min_side: args.min_side,
        offset_coefficient: args.offset,
    };
    flag_check(cfg.check())?;
    let mut run = Run::new("score", &args, None);
    let text = run.read(&args.benchmark)?;
    let entries = read_benchmark(&text).with_context(|| format!("in {}", args.benchmark.display()))?;
    if !args.detections.is_dir() {
        bail!("detection directory {} does not exist", args.detections.display());
    }

    let mut records = Vec::with_capacity(entries.len());
    for entry in &entries {
        let path = args.detections.join(format!("{}.json", entry.id));
        if !path.exists() {
            records.push((DetectionRecord::empty(entry.id), true));
            continue;
        }
        let text = run.read(&path)?;
        let rec = DetectionRecord::parse(&text).with_context(|| format!("in {}", path.display()))?;
        if rec.image_id != entry.id {
            bail!("{}: image_id {} does not match entry {}", path.display(), rec.image_id, entry.id);
        }
        records.push((rec, false));
    }

    let scored: Vec<ScoreRecord> = entries
        .par_iter()
        .zip(&records)
        .map(|(entry, (rec, missing))| {
            let (dets, report) = evaluate_raw(&entry.scene, &rec.detections, &cfg);
            ScoreRecord::new(entry, &dets, &report, *missing)
        })
        .collect();
    let missing = records.iter().filter(|(_, m)| *m).count();
    if missing > 0 {
        eprintln!("note: {missing} entries had no detection record and were scored as empty");
    }
    let file = ScoreFile::new(scored)?;
    eprintln!(
        "scored {} entries: acc {:.4}, bias {:.4}, align score {:.4}",
        file.aggregate.count, file.aggregate.mean_acc, file.aggregate.mean_bias, file.aggregate.align_score
    );
    run.write(&args.out, &file.to_json())?;
    run.finish()
}
