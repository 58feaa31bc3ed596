//! Operation-count instrumentation.
//!
//! Counters are explicit scoped accumulators passed into kernels, never
//! global state. Parallel sections give each worker its own counter and
//! merge by summation, so totals are exact regardless of thread count.

use serde::{Deserialize, Serialize};

use crate::mavp::MavpOperator;

/// Tally of scalar operations executed inside counted kernels.
///
/// The cost model matches the branchless kernel implementations: a MAVP
/// summand costs two sign extractions plus at most one comparison, a
/// regular-dot summand costs one multiplication, and every accumulation
/// costs one addition. Divisions are charged where normalizations happen.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub multiplications: u64,
    pub divisions: u64,
    pub additions: u64,
    pub comparisons: u64,
    pub sign_extractions: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fold another counter into this one (used to join per-worker counters).
    pub fn merge(&mut self, other: &OpCounter) {
        self.multiplications += other.multiplications;
        self.divisions += other.divisions;
        self.additions += other.additions;
        self.comparisons += other.comparisons;
        self.sign_extractions += other.sign_extractions;
    }

    /// Difference since an earlier snapshot of the same counting scope.
    pub fn since(&self, snapshot: &OpCounter) -> OpCounter {
        OpCounter {
            multiplications: self.multiplications - snapshot.multiplications,
            divisions: self.divisions - snapshot.divisions,
            additions: self.additions - snapshot.additions,
            comparisons: self.comparisons - snapshot.comparisons,
            sign_extractions: self.sign_extractions - snapshot.sign_extractions,
        }
    }

    /// Charge one inner product of dimension `dim` under `op`.
    pub fn charge_dot(&mut self, op: MavpOperator, dim: usize) {
        self.charge_dots(op, dim, 1);
    }

    /// Charge `count` inner products of dimension `dim` under `op`.
    pub fn charge_dots(&mut self, op: MavpOperator, dim: usize, count: usize) {
        let n = (dim as u64) * (count as u64);
        match op {
            MavpOperator::RegularDot => {
                self.multiplications += n;
                self.additions += n;
            }
            MavpOperator::Min1 | MavpOperator::Min2 => {
                // sign(w), sign(x), one comparison for the min, one add
                self.sign_extractions += 2 * n;
                self.comparisons += n;
                self.additions += n;
            }
            MavpOperator::Diamond => {
                // sign(w), sign(x), two adds, no comparison
                self.sign_extractions += 2 * n;
                self.additions += 2 * n;
            }
        }
    }

    /// Charge an l1 norm of dimension `dim` (abs + accumulate, no multiplies).
    pub fn charge_l1_norm(&mut self, dim: usize) {
        self.sign_extractions += dim as u64;
        self.additions += dim as u64;
    }

    /// Charge an l2 norm of dimension `dim` (square + accumulate).
    pub fn charge_l2_norm(&mut self, dim: usize) {
        self.multiplications += dim as u64;
        self.additions += dim as u64;
    }

    pub fn charge_divisions(&mut self, count: usize) {
        self.divisions += count as u64;
    }

    pub fn charge_multiplications(&mut self, count: usize) {
        self.multiplications += count as u64;
    }

    pub fn charge_additions(&mut self, count: usize) {
        self.additions += count as u64;
    }

    pub fn charge_comparisons(&mut self, count: usize) {
        self.comparisons += count as u64;
    }
}
