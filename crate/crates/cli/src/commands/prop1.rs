use std::path::Path;
use std::process::ExitCode;

use anyhow::Result;
use mapi::rng::seeded_rng;
use mapi::{diamond_fixed_point, mapi as mapi_run, DenseMatrix, MavpOperator, PowerIterConfig};
use rand::Rng;
use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Serialize)]
struct Prop1Report {
    manifest: RunManifest,
    n: usize,
    max_abs_error_at_t2: f64,
    max_abs_error_t3_to_t5: f64,
    passed: bool,
}

pub fn run(out: &Path, threads: usize, n: usize, seed: u64) -> Result<ExitCode> {
    let mut rng = seeded_rng(seed);
    let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(0.01..5.0))?;
    let want = diamond_fixed_point(&a)?;

    let mut err_t2 = 0.0f64;
    let mut err_rest = 0.0f64;
    for t in 2..=5 {
        let cfg = PowerIterConfig::new(MavpOperator::Diamond, t)
            .with_seed(seed)
            .with_positive_init(true);
        let run = mapi_run(&a, &cfg)?;
        let max_abs = (0..n)
            .map(|i| (run.vector[i] - want[i]).abs())
            .fold(0.0f64, f64::max);
        if t == 2 {
            err_t2 = max_abs;
        } else {
            err_rest = err_rest.max(max_abs);
        }
    }
    let passed = err_t2 <= 1e-12 && err_rest <= 1e-12;
    println!(
        "prop1: n={n} seed={seed}  max abs error at t=2: {err_t2:.3e}  t=3..5: {err_rest:.3e}  -> {}",
        if passed { "PASS" } else { "FAIL" }
    );

    let manifest = RunManifest::new(
        "prop1",
        seed,
        threads,
        serde_json::json!({ "n": n, "seed": seed }),
    )?;
    super::ensure_dir(out)?;
    super::write_json(
        &out.join("prop1_report.json"),
        &Prop1Report {
            manifest,
            n,
            max_abs_error_at_t2: err_t2,
            max_abs_error_t3_to_t5: err_rest,
            passed,
        },
    )?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
