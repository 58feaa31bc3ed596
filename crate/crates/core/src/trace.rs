//! Per-iteration convergence records shared by all experiment tracks.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::ops::OpCounter;

/// One iteration of a power-method run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// l1 norm of the change between consecutive iterates.
    pub delta_l1: f64,
    /// l2 norm of the change between consecutive iterates.
    pub delta_l2: f64,
    /// 1 - (w.u / |w|)^2 against a reference vector, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment_error: Option<f64>,
    /// Operations charged by the algorithm during this iteration.
    pub ops: OpCounter,
    /// Operations spent forming the mini-batch matrix, when applicable
    /// (kept separate so the iteration-product claim stays auditable).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_ops: Option<OpCounter>,
}

/// Ordered per-iteration records of a single run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

pub const CSV_HEADER: &str = "iter,delta_l1,delta_l2,alignment_error,mults,divs,adds,cmps";

/// 17 significant digits, enough to round-trip an f64.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl IterationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: IterationRecord) {
        debug_assert!(self
            .records
            .last()
            .map(|r| r.iteration < record.iteration)
            .unwrap_or(true));
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Total operations across all iterations.
    pub fn total_ops(&self) -> OpCounter {
        let mut total = OpCounter::new();
        for r in &self.records {
            total.merge(&r.ops);
            if let Some(b) = &r.batch_ops {
                total.merge(b);
            }
        }
        total
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        self.write_csv_with_variant(out, None)
    }

    /// CSV with an optional constant `variant` column appended.
    pub fn write_csv_with_variant(&self, out: &mut dyn Write, variant: Option<&str>) -> io::Result<()> {
        match variant {
            Some(_) => writeln!(out, "{CSV_HEADER},variant")?,
            None => writeln!(out, "{CSV_HEADER}")?,
        }
        self.write_csv_rows(out, variant)
    }

    /// Data rows only (multi-phase runs share one header).
    pub fn write_csv_rows(&self, out: &mut dyn Write, variant: Option<&str>) -> io::Result<()> {
        for r in &self.records {
            let align = r.alignment_error.map(fmt_float).unwrap_or_default();
            write!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.iteration,
                fmt_float(r.delta_l1),
                fmt_float(r.delta_l2),
                align,
                r.ops.multiplications,
                r.ops.divisions,
                r.ops.additions,
                r.ops.comparisons,
            )?;
            match variant {
                Some(v) => writeln!(out, ",{v}")?,
                None => writeln!(out)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
