//! Runtime kernel self-checks, exposed through the CLI as `kernel-check`.
//!
//! The suites mirror the core correctness arguments: l1 induction,
//! product symmetry, the sign(0) = 0 convention, the diamond closed form,
//! and oracle equivalence for both the dense products and the PageRank
//! fast path.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{DenseMatrix, Vector};
use crate::mavp::{l1_norm, mavp_dot, mavp_matmat, mavp_matvec, signum, MavpOperator};
use crate::ops::OpCounter;
use crate::pagerank::{google_matvec, CsrGraph, PageRankMethod};
use crate::power::{diamond_fixed_point, mapi, PowerIterConfig};
use crate::rng::seeded_rng;

/// Outcome of one named check suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub max_error: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, cases: usize, max_error: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: max_error <= tolerance,
            cases,
            max_error,
            detail,
        }
    }
}

fn random_vector_with_zeros(rng: &mut impl Rng, dim: usize) -> Vector {
    Vector::new(
        (0..dim)
            .map(|_| {
                if rng.random_range(0..6) == 0 {
                    0.0
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect(),
    )
    .expect("finite")
}

/// l1 induction: x (+) x equals the l1 norm for min1 and min2, on 1000
/// seeded vectors of dimension 1..=256 with mixed signs and zeros.
pub fn check_l1_induction() -> CheckResult {
    let mut rng = seeded_rng(101);
    let mut max_rel = 0.0f64;
    let cases = 1000;
    for _ in 0..cases {
        let dim = rng.random_range(1..=256);
        let x = random_vector_with_zeros(&mut rng, dim);
        let mut c = OpCounter::new();
        let l1 = l1_norm(&x, &mut c);
        let scale = l1.max(1.0);
        for op in [MavpOperator::Min1, MavpOperator::Min2] {
            let v = mavp_dot(op, &x, &x, &mut c).expect("same dims");
            max_rel = max_rel.max((v - l1).abs() / scale);
        }
    }
    CheckResult::new(
        "l1-induction",
        cases,
        max_rel,
        1e-12,
        "min1/min2 self-products against the l1 norm (relative)".into(),
    )
}

/// Symmetry of all three MAVPs under operand swap.
pub fn check_symmetry() -> CheckResult {
    let mut rng = seeded_rng(202);
    let mut max_abs = 0.0f64;
    let cases = 500;
    for _ in 0..cases {
        let dim = rng.random_range(1..=64);
        let w = random_vector_with_zeros(&mut rng, dim);
        let x = random_vector_with_zeros(&mut rng, dim);
        let mut c = OpCounter::new();
        for op in [MavpOperator::Min1, MavpOperator::Min2, MavpOperator::Diamond] {
            let ab = mavp_dot(op, &w, &x, &mut c).expect("same dims");
            let ba = mavp_dot(op, &x, &w, &mut c).expect("same dims");
            max_abs = max_abs.max((ab - ba).abs());
        }
    }
    CheckResult::new(
        "mavp-symmetry",
        cases,
        max_abs,
        0.0,
        "operand-order invariance of min1/min2/diamond".into(),
    )
}

/// sign(0) = 0 convention: scalar cases plus diamond sums over zeros,
/// which change value if sign(0) is mutated to either nonzero choice.
pub fn check_zero_convention() -> CheckResult {
    let mut worst = 0.0f64;
    if signum(0.0) != 0 || signum(-0.0) != 0 {
        worst = 1.0;
    }
    let mut c = OpCounter::new();
    let w = Vector::new(vec![0.0, 2.0]).expect("finite");
    let x = Vector::new(vec![3.0, 4.0]).expect("finite");
    let d = mavp_dot(MavpOperator::Diamond, &w, &x, &mut c).expect("same dims");
    worst = worst.max((d - 6.0).abs());
    // zero entries contribute nothing to min products in either route
    let z = Vector::new(vec![0.0, -1.0, 0.0, 5.0]).expect("finite");
    let l1 = l1_norm(&z, &mut c);
    for op in [MavpOperator::Min1, MavpOperator::Min2] {
        let v = mavp_dot(op, &z, &z, &mut c).expect("same dims");
        worst = worst.max((v - l1).abs());
    }
    CheckResult::new(
        "zero-sign-convention",
        3,
        worst,
        0.0,
        "sign(0) = 0 in scalar, diamond, and induction cases".into(),
    )
}

/// Diamond MAPI equals its closed-form fixed point at t = 2..=5 for 100
/// seeded strictly positive matrices with positive starts.
pub fn check_proposition_fixed_point() -> CheckResult {
    let mut rng = seeded_rng(303);
    let mut max_abs = 0.0f64;
    let cases = 100;
    for case in 0..cases {
        let n = rng.random_range(2..=50);
        let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(0.01..5.0)).expect("finite");
        let want = diamond_fixed_point(&a).expect("positive");
        for t in 2..=5 {
            let cfg = PowerIterConfig::new(MavpOperator::Diamond, t)
                .with_seed(9000 + case as u64)
                .with_positive_init(true);
            let run = mapi(&a, &cfg).expect("positive matrix");
            for i in 0..n {
                max_abs = max_abs.max((run.vector[i] - want[i]).abs());
            }
        }
    }
    CheckResult::new(
        "diamond-fixed-point",
        cases,
        max_abs,
        1e-12,
        "diamond MAPI vs closed form at iterations 2..=5 (max abs)".into(),
    )
}

/// Dense product kernels against an independent scalar loop.
pub fn check_matmat_oracle() -> CheckResult {
    let sgn = |t: f64| {
        if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    let scalar = |op: MavpOperator, a: f64, b: f64| -> f64 {
        match op {
            MavpOperator::Min1 => sgn(a) * sgn(b) * a.abs().min(b.abs()),
            MavpOperator::Min2 => {
                if sgn(a) == sgn(b) {
                    a.abs().min(b.abs())
                } else {
                    0.0
                }
            }
            MavpOperator::Diamond => sgn(b) * a + sgn(a) * b,
            MavpOperator::RegularDot => a * b,
        }
    };
    let mut rng = seeded_rng(404);
    let mut max_abs = 0.0f64;
    let cases = 50;
    for _ in 0..cases {
        let n = rng.random_range(1..=12);
        let m = rng.random_range(1..=12);
        let p = rng.random_range(1..=12);
        let w = DenseMatrix::from_fn(n, m, |_, _| rng.random_range(-5.0..5.0)).expect("finite");
        let x = DenseMatrix::from_fn(n, p, |_, _| rng.random_range(-5.0..5.0)).expect("finite");
        let mut c = OpCounter::new();
        for op in [
            MavpOperator::Min1,
            MavpOperator::Min2,
            MavpOperator::Diamond,
            MavpOperator::RegularDot,
        ] {
            let got = mavp_matmat(op, &w, &x, &mut c).expect("shared rows");
            for i in 0..m {
                for j in 0..p {
                    let mut want = 0.0;
                    for k in 0..n {
                        want += scalar(op, w.get(k, i), x.get(k, j));
                    }
                    max_abs = max_abs.max((got.get(i, j) - want).abs());
                }
            }
        }
    }
    CheckResult::new(
        "matmat-oracle",
        cases,
        max_abs,
        1e-12,
        "matrix MAVPs vs scalar-loop oracle (max abs)".into(),
    )
}

/// PageRank fast path against a materialized Google matrix.
pub fn check_pagerank_fastpath() -> CheckResult {
    let mut rng = seeded_rng(505);
    let mut max_abs = 0.0f64;
    let cases = 25;
    for _ in 0..cases {
        let n = rng.random_range(10..=60usize);
        let mut edges = Vec::new();
        for s in 0..n as u64 {
            for t in 0..n as u64 {
                if s != t && rng.random_range(0.0..1.0) < 0.08 {
                    edges.push((s, t));
                }
            }
        }
        edges.retain(|&(s, _)| s != 0);
        edges.push((1 % n as u64, 0));
        let g = match CsrGraph::from_edges(&edges) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let nn = g.n_nodes();
        let c = (1.0 - 0.85) / nn as f64;
        let mut dense = DenseMatrix::from_fn(nn, nn, |_, _| c).expect("finite");
        for j in 0..nn {
            let d = g.out_degree(j);
            if d == 0 {
                for i in 0..nn {
                    dense.set(i, j, 0.85 / nn as f64 + c);
                }
            } else {
                for &i in g.out_neighbors(j) {
                    dense.set(i as usize, j, 0.85 / d as f64 + c);
                }
            }
        }
        let w = Vector::new((0..nn).map(|_| rng.random_range(0.0..1.0)).collect()).expect("finite");
        let mut ops = OpCounter::new();
        let fast = google_matvec(&g, 0.85, &w, PageRankMethod::MapiMin1, &mut ops).expect("valid");
        let want = mavp_matvec(MavpOperator::Min1, &dense, &w, &mut ops).expect("same dims");
        for i in 0..nn {
            max_abs = max_abs.max((fast[i] - want[i]).abs());
        }
    }
    CheckResult::new(
        "pagerank-fastpath-oracle",
        cases,
        max_abs,
        1e-14,
        "sparse teleport product vs dense MAVP (max abs)".into(),
    )
}

/// Run every suite.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_l1_induction(),
        check_symmetry(),
        check_zero_convention(),
        check_proposition_fixed_point(),
        check_matmat_oracle(),
        check_pagerank_fastpath(),
    ]
}
