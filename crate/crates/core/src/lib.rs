//! Multiplication-avoiding vector products (MAVPs) and power iteration.
//!
//! The kernels in [`mavp`] replace multiply-accumulate inner products with
//! sign/min/add combinations that induce the l1 norm. [`power`] builds
//! regular and multiplication-avoiding power iteration on top of them,
//! and the [`pca`], [`stochastic`], and [`pagerank`] modules reproduce the
//! three experiment tracks (occluded-image reconstruction, mini-batch
//! eigenvector extraction with momentum, and graph ranking) with full
//! operation-count instrumentation and deterministic seeding.

pub mod error;
pub mod linalg;
pub mod mavp;
pub mod ops;
pub mod pagerank;
pub mod pca;
pub mod power;
pub mod rng;
pub mod selfcheck;
pub mod stochastic;
pub mod trace;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Vector};
pub use mavp::{l1_norm, l2_norm, mavp_dot, mavp_matmat, mavp_matvec, signum, MavpOperator};
pub use ops::OpCounter;
pub use power::{
    alignment_error, diamond_fixed_point, mapi, mapi_from, rpi, rpi_from, PowerIterConfig,
    PowerIterRun,
};
pub use trace::{IterationRecord, IterationTrace};
