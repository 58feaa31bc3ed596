//! Synthetic eigen-gap datasets and mini-batch power iteration with
//! momentum, in a regular and a multiplication-avoiding (min1) variant.
//!
//! The dataset is X = U diag(1, sqrt(1-gap), ...) V^T with orthonormal U
//! and orthogonal V, so X^T X has eigenvalues {1, 1-gap, ...} and its
//! dominant eigenvector is the first column of V. Mini-batches draw rows
//! of X; the batch second moment is scaled by n/s so it estimates the full
//! Gram matrix X^T X (whose eigen-gap the dataset pins). Without that
//! scaling the batch matrix entries sit orders of magnitude below the
//! iterate entries and every min comparison resolves to the matrix side,
//! collapsing min1 into sign-vector dynamics that track nothing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::mavp::MavpOperator;
use crate::ops::OpCounter;
use crate::rng::{seeded_rng, seeded_unit_vector};
use crate::trace::{IterationRecord, IterationTrace};

/// Parameters of the synthetic dataset.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub dim: usize,
    /// Eigen-gap of X^T X, in (0,1].
    pub eigen_gap: f64,
    pub seed: u64,
}

/// Mini-batch momentum configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentumConfig {
    pub batch_size: usize,
    /// Momentum coefficient, < 1.
    pub momentum: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Draw a standard normal via Box-Muller.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Modified Gram-Schmidt with one reorthogonalization pass; columns of a
/// row-major rows x cols buffer.
fn orthonormalize_columns(data: &mut [f64], rows: usize, cols: usize) {
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += data[r * cols + k] * data[r * cols + j];
                }
                for r in 0..rows {
                    data[r * cols + j] -= dot * data[r * cols + k];
                }
            }
        }
        let norm: f64 = (0..rows)
            .map(|r| data[r * cols + j] * data[r * cols + j])
            .sum::<f64>()
            .sqrt();
        for r in 0..rows {
            data[r * cols + j] /= norm;
        }
    }
}

/// Generate X (n x d) with singular spectrum {1, sqrt(1-gap), ...} and
/// return it with the dominant eigenvector u1 of X^T X.
pub fn synth_dataset(spec: &SyntheticSpec) -> Result<(DenseMatrix, Vector)> {
    let (n, d) = (spec.n_samples, spec.dim);
    if n < d {
        return Err(Error::TooFewSamples { needed: d, got: n });
    }
    let mut rng = seeded_rng(spec.seed);
    let mut u: Vec<f64> = (0..n * d).map(|_| gaussian(&mut rng)).collect();
    orthonormalize_columns(&mut u, n, d);
    let mut v: Vec<f64> = (0..d * d).map(|_| gaussian(&mut rng)).collect();
    orthonormalize_columns(&mut v, d, d);

    let mut sigma = vec![(1.0 - spec.eigen_gap).sqrt(); d];
    sigma[0] = 1.0;

    // X = (U * sigma) V^T, row by row
    let mut x = vec![0.0; n * d];
    for r in 0..n {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += u[r * d + k] * sigma[k] * v[j * d + k];
            }
            x[r * d + j] = acc;
        }
    }
    let u1 = Vector::new((0..d).map(|j| v[j * d]).collect())?;
    Ok((DenseMatrix::new(n, d, x)?, u1))
}

/// The two normalized iterates the momentum recursion carries.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub w: Vector,
    pub w_prev: Vector,
}

/// Run outcome: the final l2-normalized vector, the raw momentum state
/// (resumable, e.g. to switch variants mid-run), and the trace.
#[derive(Debug, Clone)]
pub struct MomentumRun {
    pub vector: Vector,
    pub state: MomentumState,
    pub trace: IterationTrace,
}

/// Mini-batch power iteration with momentum.
///
/// `op` selects the variant: `Min1` replaces products with the min1 MAVP
/// and normalizes by the l1 norm; `RegularDot` is the reference method
/// with l2 normalization. min2 cannot represent the negative entries the
/// eigenvector may have and diamond has no l2 analogue here; both are
/// rejected. The trace records the alignment error against `u1` and keeps
/// batch-formation operations separate from iteration-product operations.
pub fn minibatch_mapi_momentum(
    x: &DenseMatrix,
    cfg: &MomentumConfig,
    op: MavpOperator,
    u1: &Vector,
) -> Result<MomentumRun> {
    run_momentum(x, cfg, op, u1, None, 1)
}

/// Resume a momentum run from a previous state (the hybrid schedule runs
/// min1 first and then switches to the regular variant). `first_iteration`
/// continues the trace numbering.
pub fn minibatch_mapi_momentum_from(
    x: &DenseMatrix,
    cfg: &MomentumConfig,
    op: MavpOperator,
    u1: &Vector,
    state: MomentumState,
    first_iteration: usize,
) -> Result<MomentumRun> {
    run_momentum(x, cfg, op, u1, Some(state), first_iteration)
}

fn run_momentum(
    x: &DenseMatrix,
    cfg: &MomentumConfig,
    op: MavpOperator,
    u1: &Vector,
    start: Option<MomentumState>,
    first_iteration: usize,
) -> Result<MomentumRun> {
    let (n, d) = (x.rows(), x.cols());
    if !matches!(op, MavpOperator::Min1 | MavpOperator::RegularDot) {
        return Err(Error::InvalidOperator {
            expected: "min1|dot".into(),
            found: op.to_string(),
        });
    }
    if cfg.batch_size > n {
        return Err(Error::BatchTooLarge {
            batch: cfg.batch_size,
            samples: n,
        });
    }
    if u1.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: u1.len(),
        });
    }
    let s = cfg.batch_size;
    let full_batch = s == n;
    let scale = n as f64 / s as f64;
    let mut batch_rng = seeded_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);

    let (mut w, mut w_prev) = match start {
        Some(state) => {
            if state.w.len() != d || state.w_prev.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: state.w.len(),
                });
            }
            (state.w.into_vec(), state.w_prev.into_vec())
        }
        None => (seeded_unit_vector(d, cfg.seed, false).into_vec(), vec![0.0; d]),
    };
    let mut reported = w.clone();
    let mut trace = IterationTrace::new();
    let mut gram = DenseMatrix::zeros(d, d);

    for t in first_iteration..first_iteration + cfg.iterations {
        // batch phase: A_t = (n/s) * sum over sampled rows of x x^T
        let mut batch_ops = OpCounter::new();
        gram.as_mut_slice().fill(0.0);
        if full_batch {
            // s == n runs one deterministic pass over the whole dataset
            for r in 0..n {
                accumulate_outer(&mut gram, x.row(r));
            }
        } else {
            for _ in 0..s {
                accumulate_outer(&mut gram, x.row(batch_rng.random_range(0..n)));
            }
        }
        batch_ops.charge_multiplications(s * d * (d + 1) / 2);
        batch_ops.charge_additions(s * d * (d + 1) / 2);
        if scale != 1.0 {
            for e in gram.as_mut_slice().iter_mut() {
                *e *= scale;
            }
            batch_ops.charge_multiplications(d * d);
        }
        mirror_upper(&mut gram);

        // iteration product phase
        let mut ops = OpCounter::new();
        let wv = Vector::new(w.clone())?;
        let aw = crate::mavp::mavp_matvec(op, &gram, &wv, &mut ops)?;
        let mut next: Vec<f64> = if cfg.momentum != 0.0 {
            ops.charge_multiplications(d);
            ops.charge_additions(d);
            aw.iter()
                .zip(&w_prev)
                .map(|(&a, &p)| a - cfg.momentum * p)
                .collect()
        } else {
            aw.as_slice().to_vec()
        };
        let norm = match op {
            MavpOperator::Min1 => {
                ops.charge_l1_norm(d);
                next.iter().map(|v| v.abs()).sum::<f64>()
            }
            _ => {
                ops.charge_l2_norm(d);
                next.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
        };
        if norm == 0.0 {
            return Err(Error::DegenerateIterate { iteration: t });
        }
        // both the new and the trailing iterate are rescaled by the new norm
        for v in &mut next {
            *v /= norm;
        }
        let mut trailing = w;
        for v in &mut trailing {
            *v /= norm;
        }
        ops.charge_divisions(2 * d);
        w_prev = trailing;
        w = next;

        let (delta_l1, delta_l2) = diff_norms(&w, &reported);
        let align = alignment(&w, u1.as_slice());
        trace.push(IterationRecord {
            iteration: t,
            delta_l1,
            delta_l2,
            alignment_error: Some(align),
            ops,
            batch_ops: Some(batch_ops),
        });
        reported = w.clone();
    }

    let state = MomentumState {
        w: Vector::new(w.clone())?,
        w_prev: Vector::new(w_prev)?,
    };
    let l2: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if l2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    for v in &mut w {
        *v /= l2;
    }
    Ok(MomentumRun {
        vector: Vector::new(w)?,
        state,
        trace,
    })
}

fn accumulate_outer(gram: &mut DenseMatrix, row: &[f64]) {
    let d = gram.cols();
    let data = gram.as_mut_slice();
    for i in 0..d {
        let xi = row[i];
        for j in i..d {
            data[i * d + j] += xi * row[j];
        }
    }
}

fn mirror_upper(m: &mut DenseMatrix) {
    let d = m.cols();
    for i in 0..d {
        for j in 0..i {
            let v = m.get(j, i);
            m.set(i, j, v);
        }
    }
}

fn diff_norms(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        l1 += d.abs();
        l2 += d * d;
    }
    (l1, l2.sqrt())
}

fn alignment(w: &[f64], u: &[f64]) -> f64 {
    let dot: f64 = w.iter().zip(u).map(|(&a, &b)| a * b).sum();
    let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = dot / norm;
    (1.0 - c * c).max(0.0)
}

/// Indices of `w` sorted by descending entry value; ties break toward the
/// smaller index. Indices are 0-based.
pub fn rank_order(w: &Vector) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| {
        w[b].partial_cmp(&w[a])
            .expect("finite entries")
            .then(a.cmp(&b))
    });
    idx
}

/// Flip `w` so that it points toward `u` (used before comparing rank
/// orders across methods, since power iterations fix direction only up to
/// sign).
pub fn orient_toward(w: &Vector, u: &Vector) -> Vector {
    let dot: f64 = w.iter().zip(u.iter()).map(|(&a, &b)| a * b).sum();
    if dot < 0.0 {
        Vector::new(w.iter().map(|v| -v).collect()).expect("finite")
    } else {
        w.clone()
    }
}
