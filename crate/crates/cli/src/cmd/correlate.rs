use std::path::PathBuf;

use anyhow::{bail, Context};
use scenebench::stats::{kendall_tau, krippendorff_alpha, mean_ratings, pearson, spearman};
use serde::Serialize;

use crate::output::{usage, Run};

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// CSV with a header row. Empty cells are missing ratings.
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding the metric values.
    #[arg(long, default_value = "metric")]
    pub metric: String,
    /// Rating columns, one per annotator; averaged per row before correlating.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratings: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

fn cell(text: &str, row: usize, column: &str) -> anyhow::Result<Option<f64>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse::<f64>()
        .map(Some)
        .with_context(|| format!("row {row}, column `{column}`: `{t}` is not a number"))
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    let mut run = Run::new("correlate", &args, None);
    let text = run.read(&args.input)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().context("reading CSV header")?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| usage(format!("column `{name}` not in {}", args.input.display())))
    };
    let metric_col = index(&args.metric)?;
    let rating_cols = args.ratings.iter().map(|r| index(r)).collect::<anyhow::Result<Vec<_>>>()?;

    let mut metric = Vec::new();
    let mut ratings: Vec<Vec<Option<f64>>> = vec![Vec::new(); rating_cols.len()];
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.with_context(|| format!("reading CSV row {line}"))?;
        let Some(m) = cell(&row[metric_col], line, &args.metric)? else {
            bail!("row {line}: metric value is missing");
        };
        metric.push(m);
        for (k, &c) in rating_cols.iter().enumerate() {
            ratings[k].push(cell(&row[c], line, &args.ratings[k])?);
        }
    }

    let averaged = mean_ratings(&ratings)?;
    let (x, y): (Vec<f64>, Vec<f64>) = metric
        .iter()
        .zip(&averaged)
        .filter_map(|(&m, r)| r.map(|r| (m, r)))
        .unzip();
    let mut table = String::from("statistic\tvalue\n");
    table.push_str(&format!("n\t{}\n", x.len()));
    table.push_str(&format!("pearson\t{:.10}\n", pearson(&x, &y)?));
    table.push_str(&format!("spearman\t{:.10}\n", spearman(&x, &y)?));
    table.push_str(&format!("kendall_tau_b\t{:.10}\n", kendall_tau(&x, &y)?));
    if ratings.len() >= 2 {
        table.push_str(&format!("krippendorff_alpha_interval\t{:.10}\n", krippendorff_alpha(&ratings)?));
    }
    run.write(&args.out, &table)?;
    run.finish()
}
