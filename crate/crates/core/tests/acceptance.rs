//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`; cargo's own per-test lines
//! mirror them).
//!
//! Criterion 5 needs the Gnutella08 snapshot on disk (see README); the
//! test reports SKIPPED when the file is absent.

use mapi::pagerank::{google_matvec, load_snap_edgelist, pagerank, topk_overlap, CsrGraph,
    PageRankConfig, PageRankMethod};
use mapi::pca::{self, occlusion_experiment, OcclusionConfig};
use mapi::rng::{seeded_rng, seeded_unit_vector};
use mapi::stochastic::{minibatch_mapi_momentum, orient_toward, rank_order, synth_dataset,
    MomentumConfig, SyntheticSpec};
use mapi::{
    diamond_fixed_point, l1_norm, mapi as mapi_run, mavp_dot, mavp_matvec, rpi, DenseMatrix,
    MavpOperator, OpCounter, PowerIterConfig, Vector,
};
use rand::Rng;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} - {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

/// Criterion 1: min1/min2 self-products equal the l1 norm within 1e-12
/// relative, over 1000 seeded vectors with mixed signs and zeros.
#[test]
fn c01_l1_norm_induction() {
    let mut rng = seeded_rng(1001);
    let mut max_rel = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=256);
        let data: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.random_range(0..5) == 0 {
                    0.0
                } else {
                    rng.random_range(-100.0..100.0)
                }
            })
            .collect();
        let x = Vector::new(data).unwrap();
        let mut c = OpCounter::new();
        let l1 = l1_norm(&x, &mut c);
        let scale = l1.max(1.0);
        for op in [MavpOperator::Min1, MavpOperator::Min2] {
            let v = mavp_dot(op, &x, &x, &mut c).unwrap();
            max_rel = max_rel.max((v - l1).abs() / scale);
        }
    }
    let pass = max_rel <= 1e-12;
    report("1 l1-induction", pass, &format!("max relative error {max_rel:.3e}"));
    assert!(pass);
}

/// Criterion 2: diamond MAPI hits the closed-form fixed point at t = 2 and
/// stays there through t = 5, for 100 positive matrices and positive starts.
#[test]
fn c02_proposition_1_exactness() {
    let mut rng = seeded_rng(2002);
    let mut max_abs = 0.0f64;
    for case in 0..100u64 {
        let n = rng.random_range(2..=50);
        let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(0.01..4.0)).unwrap();
        let want = diamond_fixed_point(&a).unwrap();
        for t in 2..=5 {
            let cfg = PowerIterConfig::new(MavpOperator::Diamond, t)
                .with_seed(7000 + case)
                .with_positive_init(true);
            let run = mapi_run(&a, &cfg).unwrap();
            for i in 0..n {
                max_abs = max_abs.max((run.vector[i] - want[i]).abs());
            }
        }
    }
    let pass = max_abs <= 1e-12;
    report("2 proposition-1", pass, &format!("max abs deviation {max_abs:.3e}"));
    assert!(pass);
}

/// Criterion 3: on a 512x512 matrix one MAPI iteration records exactly 0
/// multiplications and 512 divisions; one RPI iteration records at least
/// 512^2 multiplications.
#[test]
fn c03_operation_count_claim() {
    let n = 512;
    let mut rng = seeded_rng(3003);
    let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(0.01..1.0)).unwrap();

    let mapi_cfg = PowerIterConfig::new(MavpOperator::Min1, 1).with_seed(1);
    let mapi_ops = mapi_run(&a, &mapi_cfg).unwrap().trace.records[0].ops;

    let rpi_cfg = PowerIterConfig::new(MavpOperator::RegularDot, 1).with_seed(1);
    let rpi_ops = rpi(&a, &rpi_cfg).unwrap().trace.records[0].ops;

    let pass = mapi_ops.multiplications == 0
        && mapi_ops.divisions == n as u64
        && rpi_ops.multiplications >= (n * n) as u64;
    report(
        "3 op-count",
        pass,
        &format!(
            "MAPI {} mults / {} divs; RPI {} mults",
            mapi_ops.multiplications, mapi_ops.divisions, rpi_ops.multiplications
        ),
    );
    assert!(pass);
}

fn random_graph_with_dangling(n: usize, seed: u64) -> CsrGraph {
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    for s in 0..n as u64 {
        for t in 0..n as u64 {
            if s != t && rng.random_range(0.0..1.0) < 0.05 {
                edges.push((s, t));
            }
        }
    }
    let d1 = (n - 1) as u64;
    let d2 = (n / 3) as u64;
    edges.retain(|&(s, _)| s != d1 && s != d2);
    edges.push((0, d1));
    edges.push((0, d2));
    CsrGraph::from_edges(&edges).unwrap()
}

/// Criterion 4: the PageRank fast path equals a dense materialized-G MAVP
/// product within 1e-14 on 50 random graphs with dangling nodes.
#[test]
fn c04_pagerank_fast_path_oracle() {
    let alpha = 0.85;
    let mut max_abs = 0.0f64;
    for seed in 0..50u64 {
        let g = random_graph_with_dangling(40 + (seed as usize * 7) % 161, seed);
        let n = g.n_nodes();
        let c = (1.0 - alpha) / n as f64;
        let mut dense = DenseMatrix::from_fn(n, n, |_, _| c).unwrap();
        for j in 0..n {
            let d = g.out_degree(j);
            if d == 0 {
                for i in 0..n {
                    dense.set(i, j, alpha / n as f64 + c);
                }
            } else {
                for &i in g.out_neighbors(j) {
                    dense.set(i as usize, j, alpha / d as f64 + c);
                }
            }
        }
        let mut rng = seeded_rng(4000 + seed);
        let w = Vector::new((0..n).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
        let mut ops = OpCounter::new();
        let fast = google_matvec(&g, alpha, &w, PageRankMethod::MapiMin1, &mut ops).unwrap();
        let want = mavp_matvec(MavpOperator::Min1, &dense, &w, &mut ops).unwrap();
        for i in 0..n {
            max_abs = max_abs.max((fast[i] - want[i]).abs());
        }
    }
    let pass = max_abs <= 1e-14;
    report("4 fastpath-oracle", pass, &format!("max abs deviation {max_abs:.3e}"));
    assert!(pass);
}

fn find_dataset(name: &str) -> Option<std::path::PathBuf> {
    let mut candidates = Vec::new();
    if let Ok(dir) = std::env::var("MAPI_DATA_DIR") {
        candidates.push(std::path::PathBuf::from(dir).join(name));
    }
    candidates.push(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data")
            .join(name),
    );
    candidates.push(std::path::PathBuf::from("data").join(name));
    candidates.into_iter().find(|p| p.exists())
}

/// Criterion 5: Gnutella08, 10 iterations at alpha 0.85 - both methods
/// contract their delta curves tenfold, MAPI sits below RPI at iteration
/// 5, and the top-10 rankings overlap in at least 6 nodes.
#[test]
fn c05_gnutella_rank_overlap() {
    let Some(path) = find_dataset("p2p-Gnutella08.txt") else {
        report(
            "5 gnutella-overlap",
            true,
            "SKIPPED - dataset not found; fetch it with `mapi datasets` and place it under data/ \
             or $MAPI_DATA_DIR",
        );
        return;
    };
    let g = load_snap_edgelist(&path).unwrap();
    assert_eq!(g.n_nodes(), 6301, "node count of the published snapshot");
    assert_eq!(g.edge_count(), 20777, "edge count of the published snapshot");

    let mut runs = Vec::new();
    for method in [PageRankMethod::Rpi, PageRankMethod::MapiMin1] {
        let cfg = PageRankConfig {
            alpha: 0.85,
            iterations: 10,
            method,
            seed: 0,
            init_jitter: 0.0,
        };
        runs.push(pagerank(&g, &cfg).unwrap());
    }
    let (rpi_run, mapi_run) = (&runs[0], &runs[1]);
    let contraction = |trace: &mapi::IterationTrace| {
        let first = trace.records.first().unwrap().delta_l1;
        let last = trace.records.last().unwrap().delta_l1;
        last < first / 10.0
    };
    let both_converge = contraction(&rpi_run.trace) && contraction(&mapi_run.trace);
    let mapi_below_rpi_at_5 =
        mapi_run.trace.records[4].delta_l1 < rpi_run.trace.records[4].delta_l1;
    let overlap = topk_overlap(
        &rank_order(&rpi_run.scores),
        &rank_order(&mapi_run.scores),
        10,
    );
    let pass = both_converge && mapi_below_rpi_at_5 && overlap >= 6;
    report(
        "5 gnutella-overlap",
        pass,
        &format!(
            "converged={both_converge}, mapi_below_rpi@5={mapi_below_rpi_at_5}, top10 overlap={overlap}"
        ),
    );
    assert!(pass);
}

/// Criterion 6: stochastic PCA at the pinned parameters (n = 1e5, d = 10,
/// gap 0.1, s = 128, beta = 0.225, 10 seeds): min1 alignment below 0.05 by
/// iteration 25 in >= 9 seeds, final residual above 1e-4, and rank
/// agreement with the regular variant in >= 9 seeds.
///
/// The batch size pinned here is not attainable: the batch estimate of the
/// Gram matrix carries entrywise noise ~0.9/sqrt(128) = 0.08, i.e. an
/// operator-norm perturbation ~0.5 against an eigen-gap of 0.1, so no
/// power-method variant can hold 0.05 alignment (the regular method fails
/// equally). See the decisions ledger; the full-batch run in
/// tests/pipeline.rs demonstrates every claim at a feasible batch size.
#[test]
fn c06_stochastic_pca_convergence() {
    let mut ok_e25 = 0;
    let mut ok_final = 0;
    let mut ok_rank = 0;
    let seeds = 10u64;
    for seed in 0..seeds {
        let (x, u1) = synth_dataset(&SyntheticSpec {
            n_samples: 100_000,
            dim: 10,
            eigen_gap: 0.1,
            seed: 60_000 + seed,
        })
        .unwrap();
        let cfg = MomentumConfig {
            batch_size: 128,
            momentum: 0.225,
            iterations: 100,
            seed: 61_000 + seed,
        };
        let run_min1 = minibatch_mapi_momentum(&x, &cfg, MavpOperator::Min1, &u1).unwrap();
        let (w_min1, trace) = (run_min1.vector, run_min1.trace);
        let e25 = trace.records[24].alignment_error.unwrap();
        let e_final = trace.records.last().unwrap().alignment_error.unwrap();
        let rpi_cfg = MomentumConfig {
            seed: 62_000 + seed,
            ..cfg
        };
        let w_rpi = minibatch_mapi_momentum(&x, &rpi_cfg, MavpOperator::RegularDot, &u1).unwrap().vector;
        if e25 < 0.05 {
            ok_e25 += 1;
        }
        if e_final > 1e-4 {
            ok_final += 1;
        }
        if rank_order(&orient_toward(&w_min1, &u1)) == rank_order(&orient_toward(&w_rpi, &u1)) {
            ok_rank += 1;
        }
    }
    let pass = ok_e25 >= 9 && ok_final == 10 && ok_rank >= 9;
    report(
        "6 stochastic-pca",
        pass,
        &format!(
            "align<0.05@25: {ok_e25}/10 (need 9), final>1e-4: {ok_final}/10, ranks agree: {ok_rank}/10 (need 9)"
        ),
    );
    assert!(
        pass,
        "pinned batch size 128 cannot reach 0.05 alignment (noise/gap ~ 5); \
         see decisions ledger and the full-batch demonstration in tests/pipeline.rs \
         [align<0.05@25: {ok_e25}/10, final>1e-4: {ok_final}/10, ranks: {ok_rank}/10]"
    );
}

/// Criterion 7: occlusion benchmark on the three bundled 64x64 images,
/// N = 10 copies, 16x16 tiles, 3 per copy, 5 seeds: min2 beats the
/// occluded inputs by 4 dB and sits within 0.5 dB of the regular-dot
/// pipeline.
#[test]
fn c07_image_reconstruction_relative_psnr() {
    let images = pca::samples::bundled_images();
    let mut occ = Vec::new();
    let mut min2 = Vec::new();
    let mut rpi_db = Vec::new();
    for (_, img) in &images {
        for seed in 0..5u64 {
            for (op, sink) in [(MavpOperator::Min2, &mut min2), (MavpOperator::RegularDot, &mut rpi_db)] {
                // MAPI is stationary well before 20 iterations; the
                // regular method gets a longer budget to converge
                let iters = if op == MavpOperator::Min2 { 20 } else { 30 };
                let cfg = OcclusionConfig::new(op, iters, seed);
                let r = occlusion_experiment(img, &cfg).unwrap();
                sink.push(r.psnr_reconstructed_mean_db);
                if op == MavpOperator::Min2 {
                    occ.push(r.psnr_occluded_mean_db);
                }
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (occ_m, min2_m, rpi_m) = (mean(&occ), mean(&min2), mean(&rpi_db));
    let pass = min2_m >= occ_m + 4.0 && min2_m >= rpi_m - 0.5;
    report(
        "7 image-reconstruction",
        pass,
        &format!(
            "occluded {occ_m:.2} dB, min2 {min2_m:.2} dB (+{:.2}), regular {rpi_m:.2} dB ({:+.2})",
            min2_m - occ_m,
            min2_m - rpi_m
        ),
    );
    assert!(pass);
}

/// Criterion 8: with the regular dot operator the pipeline matches a dense
/// eigendecomposition 2-component PCA reconstruction within 0.1 dB on
/// 16x16 images.
#[test]
fn c08_classical_pca_crosscheck() {
    let mut max_diff = 0.0f64;
    for seed in 0..3u64 {
        let img = pca::ImageGrid::from_fn(16, 16, |x, y| {
            let t = (x as f64 / 15.0 + 0.5) * (0.3 + 0.4 * (y as f64 / 15.0));
            (0.1 + t / 2.0).clamp(0.0, 1.0)
        })
        .unwrap();
        let copies: Vec<pca::ImageGrid> = (0..10)
            .map(|i| pca::occlude(&img, 4, 3, pca::occlusion_seed(seed, i)).unwrap())
            .collect();

        // pipeline route
        let cfg = PowerIterConfig::new(MavpOperator::RegularDot, 600)
            .with_seed(seed)
            .with_tolerance(1e-15);
        let batch =
            pca::reconstruct_all(&copies, MavpOperator::RegularDot, &cfg, Some(&img)).unwrap();

        // independent oracle: dense symmetric eigendecomposition
        let m = 256;
        let n = copies.len();
        let mut mean = vec![0.0; m];
        for c in &copies {
            for (a, &p) in mean.iter_mut().zip(c.pixels()) {
                *a += p;
            }
        }
        for a in &mut mean {
            *a /= n as f64;
        }
        let mut cov = nalgebra::DMatrix::<f64>::zeros(m, m);
        for c in &copies {
            let r: Vec<f64> = c
                .pixels()
                .iter()
                .zip(&mean)
                .map(|(&p, &mu)| p - mu)
                .collect();
            for i in 0..m {
                for j in 0..m {
                    cov[(i, j)] += r[i] * r[j] / (n as f64 - 1.0);
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let w1 = eig.eigenvectors.column(order[0]);
        let w2 = eig.eigenvectors.column(order[1]);

        for (t, c) in copies.iter().enumerate() {
            let r: Vec<f64> = c
                .pixels()
                .iter()
                .zip(&mean)
                .map(|(&p, &mu)| p - mu)
                .collect();
            let p1: f64 = (0..m).map(|i| w1[i] * r[i]).sum();
            let p2: f64 = (0..m).map(|i| w2[i] * r[i]).sum();
            let recon: Vec<f64> = (0..m)
                .map(|i| (mean[i] + p1 * w1[i] + p2 * w2[i]).clamp(0.0, 1.0))
                .collect();
            let oracle_img = pca::ImageGrid::new(16, 16, recon).unwrap();
            let oracle_psnr = pca::psnr(&img, &oracle_img).unwrap();
            let pipe_psnr = batch.outcomes[t].psnr_reconstructed_db.unwrap();
            max_diff = max_diff.max((oracle_psnr - pipe_psnr).abs());
        }
    }
    let pass = max_diff <= 0.1;
    report(
        "8 classical-pca-crosscheck",
        pass,
        &format!("max PSNR difference {max_diff:.4} dB"),
    );
    assert!(pass);
}
