use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Result};
use mapi::stochastic::{
    minibatch_mapi_momentum, minibatch_mapi_momentum_from, rank_order, synth_dataset,
    MomentumConfig, MomentumRun, SyntheticSpec,
};
use mapi::trace::CSV_HEADER;
use mapi::MavpOperator;
use serde::Serialize;

use crate::manifest::RunManifest;

pub struct Args {
    pub n: usize,
    pub d: usize,
    pub gap: f64,
    pub batch: usize,
    pub beta: f64,
    pub iters: usize,
    pub op: String,
    pub seed: u64,
    pub switch_at: Option<usize>,
}

#[derive(Serialize)]
struct StochasticReport {
    manifest: RunManifest,
    variant: String,
    switch_at: Option<usize>,
    final_alignment_error: f64,
    final_vector: Vec<f64>,
    rank_order: Vec<usize>,
    dominant_eigenvector: Vec<f64>,
}

pub fn run(out: &Path, threads: usize, args: Args) -> Result<ExitCode> {
    let operator: MavpOperator = args.op.parse()?;
    if !matches!(operator, MavpOperator::Min1 | MavpOperator::RegularDot) {
        bail!("stochastic track supports --op min1 or dot");
    }
    if let Some(k) = args.switch_at {
        if k >= args.iters {
            bail!("--switch-at {k} must be below --iters {}", args.iters);
        }
        if operator != MavpOperator::Min1 {
            bail!("--switch-at only applies to --op min1");
        }
    }

    let spec = SyntheticSpec {
        n_samples: args.n,
        dim: args.d,
        eigen_gap: args.gap,
        seed: args.seed,
    };
    let (x, u1) = synth_dataset(&spec)?;

    let variant_name = match args.switch_at {
        Some(k) => format!("min1-switch-{k}"),
        None => operator.name().to_string(),
    };
    let cfg = MomentumConfig {
        batch_size: args.batch,
        momentum: args.beta,
        iterations: args.switch_at.unwrap_or(args.iters),
        seed: args.seed,
    };

    super::ensure_dir(out)?;
    let trace_path = out.join("trace.csv");
    let mut csv = BufWriter::new(File::create(&trace_path)?);
    writeln!(csv, "{CSV_HEADER},variant")?;

    let final_run: MomentumRun = match args.switch_at {
        None => {
            let run = minibatch_mapi_momentum(&x, &cfg, operator, &u1)?;
            run.trace.write_csv_rows(&mut csv, Some(operator.name()))?;
            run
        }
        Some(k) => {
            let phase1 = minibatch_mapi_momentum(&x, &cfg, MavpOperator::Min1, &u1)?;
            phase1.trace.write_csv_rows(&mut csv, Some("min1"))?;
            let rest = MomentumConfig {
                iterations: args.iters - k,
                ..cfg
            };
            let phase2 = minibatch_mapi_momentum_from(
                &x,
                &rest,
                MavpOperator::RegularDot,
                &u1,
                phase1.state,
                k + 1,
            )?;
            phase2.trace.write_csv_rows(&mut csv, Some("dot"))?;
            phase2
        }
    };
    csv.flush()?;

    let final_alignment = final_run
        .trace
        .last()
        .and_then(|r| r.alignment_error)
        .unwrap_or(f64::NAN);
    let ranks = rank_order(&final_run.vector);
    println!(
        "stochastic [{variant_name}]: n={} d={} gap={} batch={} beta={} iters={}",
        args.n, args.d, args.gap, args.batch, args.beta, args.iters
    );
    println!("final alignment error: {final_alignment:.6e}");
    println!("rank order (0-based): {ranks:?}");

    let manifest = RunManifest::new(
        "stochastic",
        args.seed,
        threads,
        serde_json::json!({
            "n": args.n,
            "d": args.d,
            "gap": args.gap,
            "batch": args.batch,
            "beta": args.beta,
            "iters": args.iters,
            "op": operator,
            "seed": args.seed,
            "switch_at": args.switch_at,
        }),
    )?;
    super::write_json(
        &out.join("stochastic_report.json"),
        &StochasticReport {
            manifest,
            variant: variant_name,
            switch_at: args.switch_at,
            final_alignment_error: final_alignment,
            final_vector: final_run.vector.as_slice().to_vec(),
            rank_order: ranks,
            dominant_eigenvector: u1.as_slice().to_vec(),
        },
    )?;
    Ok(ExitCode::SUCCESS)
}
