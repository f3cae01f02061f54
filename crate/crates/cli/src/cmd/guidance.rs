use std::path::PathBuf;

use anyhow::Context;
use scenebench::guidance::{denoise_loop, Denoiser, GuidanceMode, GuidanceSpec};
use scenebench::ToyDenoiser;
use serde::Serialize;

use crate::output::{flag_check, usage, Run};

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// cfg, rte, negative or positive.
    #[arg(long)]
    pub mode: String,
    /// Guidance weight.
    #[arg(long)]
    pub w: f64,
    /// Weight of the paired-prompt term; defaults to w / 2.
    #[arg(long)]
    pub wprime: Option<f64>,
    /// Toy denoiser fixture (matrix and condition embeddings).
    #[arg(long)]
    pub fixture: PathBuf,
    #[arg(long)]
    pub c0: String,
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long)]
    pub c2: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Initial state, comma separated; defaults to all ones.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args) -> anyhow::Result<Vec<PathBuf>> {
    let mode: GuidanceMode = args.mode.parse().map_err(|e: scenebench::Error| usage(e.to_string()))?;
    let mut run = Run::new("guidance-demo", &args, None);
    let text = run.read(&args.fixture)?;
    let toy = ToyDenoiser::from_json(&text).with_context(|| format!("in {}", args.fixture.display()))?;
    let spec = GuidanceSpec {
        mode,
        w: args.w,
        w_prime: args.wprime.unwrap_or(GuidanceSpec::default_w_prime(args.w)),
        c0: args.c0.clone(),
        c1: args.c1.clone(),
        c2: args.c2.clone(),
    };
    flag_check(spec.check())?;
    if args.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let x0 = args.x0.clone().unwrap_or_else(|| vec![1.0; toy.dim()]);
    if x0.len() != toy.dim() {
        return Err(usage(format!("--x0 has {} values, the fixture state has {}", x0.len(), toy.dim())));
    }
    let states = denoise_loop(&toy, &spec, &x0, args.steps, args.eta)?;

    let mut table = String::from("step");
    for i in 0..toy.dim() {
        table.push_str(&format!("\tx{i}"));
    }
    table.push('\n');
    for (t, x) in states.iter().enumerate() {
        table.push_str(&t.to_string());
        for v in x {
            // shortest round-trip form
            table.push_str(&format!("\t{v:?}"));
        }
        table.push('\n');
    }
    run.write(&args.out, &table)?;
    run.finish()
}
