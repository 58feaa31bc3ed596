//! Multiplication-avoiding vector products.
//!
//! Three kernels replace the Euclidean inner product with combinations of
//! sign, minimum, and addition only:
//!
//! * min1: sum of sign(w_i x_i) * min(|w_i|, |x_i|)
//! * min2: like min1 but gated by a sign-agreement indicator, never negative
//! * diamond: sum of sign(x_i) w_i + sign(w_i) x_i
//!
//! All three induce the l1 norm on the diagonal: x (+) x = ||x||_1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::ops::OpCounter;

/// Selects which product a kernel computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MavpOperator {
    Min1,
    Min2,
    Diamond,
    RegularDot,
}

impl MavpOperator {
    pub fn is_multiplication_avoiding(self) -> bool {
        !matches!(self, MavpOperator::RegularDot)
    }

    pub fn name(self) -> &'static str {
        match self {
            MavpOperator::Min1 => "min1",
            MavpOperator::Min2 => "min2",
            MavpOperator::Diamond => "diamond",
            MavpOperator::RegularDot => "dot",
        }
    }
}

impl std::fmt::Display for MavpOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MavpOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min1" => Ok(MavpOperator::Min1),
            "min2" => Ok(MavpOperator::Min2),
            "diamond" => Ok(MavpOperator::Diamond),
            "dot" | "regular" => Ok(MavpOperator::RegularDot),
            other => Err(Error::InvalidOperator {
                expected: "min1|min2|diamond|dot".into(),
                found: other.into(),
            }),
        }
    }
}

/// Sign of a finite real with sign(0) = 0.
#[inline]
pub fn signum(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Branchless sign on f64, with sign(0) = sign(-0) = 0.
#[inline(always)]
fn fsign(v: f64) -> f64 {
    f64::from(v > 0.0) - f64::from(v < 0.0)
}

/// Sum `f(w_i, x_i)` over four independent accumulator lanes, so the
/// floating-point additions pipeline instead of forming one serial chain.
/// Short vectors take a plain loop (the lane plumbing costs more than it
/// saves there). Lane assignment is fixed, so results are deterministic
/// and symmetric under operand swap whenever `f` is.
#[inline(always)]
fn lane_sum(w: &[f64], x: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    if w.len() < 32 {
        let mut acc = 0.0;
        for (&wi, &xi) in w.iter().zip(x) {
            acc += f(wi, xi);
        }
        return acc;
    }
    let mut lanes = [0.0f64; 4];
    let wc = w.chunks_exact(4);
    let xc = x.chunks_exact(4);
    let (wr, xr) = (wc.remainder(), xc.remainder());
    for (cw, cx) in wc.zip(xc) {
        for k in 0..4 {
            lanes[k] += f(cw[k], cx[k]);
        }
    }
    for (k, (&wi, &xi)) in wr.iter().zip(xr).enumerate() {
        lanes[k] += f(wi, xi);
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
}

/// Uncounted scalar-loop value of the product; callers charge the counter.
///
/// The loops are branch-free so they pipeline; the sign products take
/// values in {-1, 0, 1} exactly, so results match the defining sums. The
/// min2 indicator is the arithmetic map s -> (s^2 + s) / 2 of the sign
/// product, which is exactly {0, 0, 1} on {-1, 0, 1} and keeps the hot
/// loop free of data-dependent branches.
#[inline]
pub(crate) fn dot_value(op: MavpOperator, w: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(w.len(), x.len());
    match op {
        MavpOperator::Min1 => lane_sum(w, x, |wi, xi| {
            fsign(wi) * fsign(xi) * wi.abs().min(xi.abs())
        }),
        MavpOperator::Min2 => lane_sum(w, x, |wi, xi| {
            let s = fsign(wi) * fsign(xi);
            0.5 * (s * s + s) * wi.abs().min(xi.abs())
        }),
        MavpOperator::Diamond => lane_sum(w, x, |wi, xi| fsign(xi) * wi + fsign(wi) * xi),
        MavpOperator::RegularDot => lane_sum(w, x, |wi, xi| wi * xi),
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Vector product under `op`. MAVP operators record zero multiplications.
pub fn mavp_dot(op: MavpOperator, w: &Vector, x: &Vector, counter: &mut OpCounter) -> Result<f64> {
    check_dims(w.len(), x.len())?;
    counter.charge_dot(op, w.len());
    Ok(dot_value(op, w.as_slice(), x.as_slice()))
}

/// Matrix-vector product: entry i is the `op`-product of row i with `x`.
pub fn mavp_matvec(
    op: MavpOperator,
    a: &DenseMatrix,
    x: &Vector,
    counter: &mut OpCounter,
) -> Result<Vector> {
    check_dims(a.cols(), x.len())?;
    counter.charge_dots(op, a.cols(), a.rows());
    let xs = x.as_slice();
    let out: Vec<f64> = if a.rows() >= 64 {
        a.as_slice()
            .par_chunks_exact(a.cols().max(1))
            .map(|row| dot_value(op, row, xs))
            .collect()
    } else {
        a.row_iter().map(|row| dot_value(op, row, xs)).collect()
    };
    Vector::new(out)
}

/// Matrix product in the column convention: for `w` (n x m) and `x` (n x p),
/// the result is m x p with entry (i, j) the `op`-product of column i of `w`
/// with column j of `x`.
pub fn mavp_matmat(
    op: MavpOperator,
    w: &DenseMatrix,
    x: &DenseMatrix,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    check_dims(w.rows(), x.rows())?;
    let (m, p) = (w.cols(), x.cols());
    counter.charge_dots(op, w.rows(), m * p);
    let mut out = DenseMatrix::zeros(m, p);
    for i in 0..m {
        let wi = w.col(i);
        for j in 0..p {
            let xj = x.col(j);
            out.set(i, j, dot_value(op, &wi, &xj));
        }
    }
    Ok(out)
}

/// l1 norm; multiplication-free.
pub fn l1_norm(x: &Vector, counter: &mut OpCounter) -> f64 {
    counter.charge_l1_norm(x.len());
    x.iter().map(|v| v.abs()).sum()
}

/// l2 norm.
pub fn l2_norm(x: &Vector, counter: &mut OpCounter) -> f64 {
    counter.charge_l2_norm(x.len());
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
