//! Regular and multiplication-avoiding power iteration.
//!
//! Regular power iteration (RPI) iterates b <- A b / |A b|_2 and needs
//! N^2 + N multiplications per iteration on an N x N matrix. MAPI swaps
//! the inner products for an MAVP and the normalization for an l1 norm,
//! leaving N divisions and zero multiplications per iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::mavp::{l1_norm, l2_norm, mavp_matvec, MavpOperator};
use crate::ops::OpCounter;
use crate::rng::seeded_unit_vector;
use crate::trace::{IterationRecord, IterationTrace};

/// Configuration for a single power-iteration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterConfig {
    pub operator: MavpOperator,
    /// Fixed iteration budget T (>= 1).
    pub max_iterations: usize,
    /// Early stop once the l1 delta drops to this value; 0 disables.
    pub tolerance: f64,
    /// Apply one final l2 normalization after the loop.
    pub final_l2_normalize: bool,
    /// Seed for the random start vector.
    pub seed: u64,
    /// Draw the start from (0,1) instead of (-1,1).
    pub positive_init: bool,
}

impl PowerIterConfig {
    pub fn new(operator: MavpOperator, max_iterations: usize) -> Self {
        PowerIterConfig {
            operator,
            max_iterations,
            tolerance: 0.0,
            final_l2_normalize: false,
            seed: 0,
            positive_init: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_positive_init(mut self, positive: bool) -> Self {
        self.positive_init = positive;
        self
    }

    pub fn with_final_l2_normalize(mut self, yes: bool) -> Self {
        self.final_l2_normalize = yes;
        self
    }
}

/// Result of one run: the final iterate and its per-iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIterRun {
    pub vector: Vector,
    pub trace: IterationTrace,
}

fn require_square(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            rows: a.rows(),
            cols: a.cols(),
            len: a.as_slice().len(),
        });
    }
    Ok(())
}

/// Uncounted diagnostics between consecutive iterates.
fn deltas(new: &[f64], old: &[f64]) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for (&a, &b) in new.iter().zip(old) {
        let d = a - b;
        l1 += d.abs();
        l2 += d * d;
    }
    (l1, l2.sqrt())
}

fn alignment_value(w: &[f64], u: &[f64]) -> f64 {
    let dot: f64 = w.iter().zip(u).map(|(&a, &b)| a * b).sum();
    let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = dot / norm;
    (1.0 - c * c).max(0.0)
}

/// 1 - (w.u / |w|_2)^2, the squared sine of the angle between `w` and a
/// unit-norm reference `u`.
pub fn alignment_error(w: &Vector, u: &Vector) -> Result<f64> {
    if w.len() != u.len() {
        return Err(Error::DimensionMismatch {
            left: w.len(),
            right: u.len(),
        });
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(alignment_value(w.as_slice(), u.as_slice()))
}

enum Normalization {
    L1,
    L2,
}

fn run_loop(
    a: &DenseMatrix,
    start: Vector,
    cfg: &PowerIterConfig,
    reference: Option<&Vector>,
    norm_kind: Normalization,
) -> Result<PowerIterRun> {
    let n = a.rows();
    if let Some(u) = reference {
        if u.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: u.len(),
            });
        }
    }
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: start.len(),
        });
    }

    let mut w = start;
    let mut trace = IterationTrace::new();
    for t in 1..=cfg.max_iterations {
        let mut ops = OpCounter::new();
        let y = mavp_matvec(cfg.operator, a, &w, &mut ops)?;
        let norm = match norm_kind {
            Normalization::L1 => l1_norm(&y, &mut ops),
            Normalization::L2 => l2_norm(&y, &mut ops),
        };
        if norm == 0.0 {
            return Err(Error::DegenerateIterate { iteration: t });
        }
        ops.charge_divisions(n);
        let next = Vector::new(y.iter().map(|v| v / norm).collect())?;
        let (delta_l1, delta_l2) = deltas(next.as_slice(), w.as_slice());
        let alignment = reference.map(|u| alignment_value(next.as_slice(), u.as_slice()));
        trace.push(IterationRecord {
            iteration: t,
            delta_l1,
            delta_l2,
            alignment_error: alignment,
            ops,
            batch_ops: None,
        });
        w = next;
        if cfg.tolerance > 0.0 && delta_l1 <= cfg.tolerance {
            break;
        }
    }

    if cfg.final_l2_normalize {
        let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        w = Vector::new(w.iter().map(|v| v / norm).collect())?;
    }
    Ok(PowerIterRun { vector: w, trace })
}

/// Regular power iteration from a seeded random unit start.
pub fn rpi(a: &DenseMatrix, cfg: &PowerIterConfig) -> Result<PowerIterRun> {
    let start = seeded_unit_vector(a.rows(), cfg.seed, cfg.positive_init);
    rpi_from(a, start, cfg, None)
}

/// Regular power iteration with an explicit start vector and optional
/// reference for alignment tracking.
pub fn rpi_from(
    a: &DenseMatrix,
    start: Vector,
    cfg: &PowerIterConfig,
    reference: Option<&Vector>,
) -> Result<PowerIterRun> {
    require_square(a)?;
    if cfg.operator != MavpOperator::RegularDot {
        return Err(Error::InvalidOperator {
            expected: "dot".into(),
            found: cfg.operator.to_string(),
        });
    }
    run_loop(a, start, cfg, reference, Normalization::L2)
}

/// Multiplication-avoiding power iteration from a seeded random unit start.
pub fn mapi(a: &DenseMatrix, cfg: &PowerIterConfig) -> Result<PowerIterRun> {
    let start = seeded_unit_vector(a.rows(), cfg.seed, cfg.positive_init);
    mapi_from(a, start, cfg, None)
}

/// MAPI with an explicit start vector and optional alignment reference.
pub fn mapi_from(
    a: &DenseMatrix,
    start: Vector,
    cfg: &PowerIterConfig,
    reference: Option<&Vector>,
) -> Result<PowerIterRun> {
    require_square(a)?;
    if !cfg.operator.is_multiplication_avoiding() {
        return Err(Error::InvalidOperator {
            expected: "min1|min2|diamond".into(),
            found: cfg.operator.to_string(),
        });
    }
    run_loop(a, start, cfg, reference, Normalization::L1)
}

/// Closed-form limit of diamond MAPI on a strictly positive matrix:
/// [1 + |a_1|_1, ..., 1 + |a_N|_1] normalized to unit l1 norm, reached in
/// at most two iterations.
pub fn diamond_fixed_point(a: &DenseMatrix) -> Result<Vector> {
    require_square(a)?;
    for i in 0..a.rows() {
        for (j, &v) in a.row(i).iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    let mut entries: Vec<f64> = a
        .row_iter()
        .map(|row| 1.0 + row.iter().map(|v| v.abs()).sum::<f64>())
        .collect();
    let total: f64 = entries.iter().sum();
    for e in &mut entries {
        *e /= total;
    }
    Vector::new(entries)
}
