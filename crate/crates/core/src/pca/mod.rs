//! Min-covariance PCA and occluded-image reconstruction.
//!
//! The pipeline: vectorize N corrupted copies of an image, subtract the
//! per-pixel mean, build the (min-)covariance matrix, extract two dominant
//! (pseudo-)eigenvectors by power iteration, and reconstruct each copy as
//! m + (W (+) W^T)(v - m), clamped back to [0,1].
//!
//! Component normalization is operator-dependent: the regular-dot pipeline
//! is classical PCA (unit-l2 eigenvectors, projector deflation), while the
//! MAVP pipelines keep the l1-normalized iterates MAPI produces. Scaling an
//! MAVP weight vector to unit l2 norm inflates the self-product matrix by
//! roughly |w|_1 (the min kernel is not a projector), which drives the
//! deflated matrix entirely negative and starves min2 iterations to death;
//! the l1 scale keeps |P C| bounded by |C|.

mod image;
mod kernel;
pub mod pgm;
pub mod samples;

pub use image::{occlude, psnr, ImageGrid};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::mavp::{dot_value, MavpOperator};
use crate::ops::OpCounter;
use crate::power::{mapi, rpi, PowerIterConfig, PowerIterRun};
use crate::trace::IterationTrace;
use kernel::GramKernel;

/// Divisor convention for sample covariance matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceDivisor {
    /// 1/N
    Samples,
    /// 1/(N-1)
    SamplesMinusOne,
}

impl CovarianceDivisor {
    fn value(self, n: usize) -> f64 {
        match self {
            CovarianceDivisor::Samples => n as f64,
            CovarianceDivisor::SamplesMinusOne => (n - 1) as f64,
        }
    }
}

fn covariance_impl(
    v: &DenseMatrix,
    op: MavpOperator,
    divisor: f64,
    counter: &mut OpCounter,
) -> DenseMatrix {
    let m = v.rows();
    let n = v.cols();
    counter.charge_dots(op, n, m * (m + 1) / 2);
    counter.charge_divisions(m * (m + 1) / 2);
    let mut out = DenseMatrix::zeros(m, m);
    {
        let data = out.as_mut_slice();
        data.par_chunks_exact_mut(m).enumerate().for_each(|(i, row)| {
            let vi = v.row(i);
            for j in i..m {
                row[j] = dot_value(op, vi, v.row(j)) / divisor;
            }
        });
    }
    // MAVP products are exactly symmetric, so mirror the upper triangle
    for i in 0..m {
        for j in 0..i {
            let upper = out.get(j, i);
            out.set(i, j, upper);
        }
    }
    out
}

/// Sample covariance (1/N) X X^T of a D x N data matrix (columns are
/// samples; caller centers).
pub fn l2_covariance(x: &DenseMatrix, counter: &mut OpCounter) -> DenseMatrix {
    covariance_impl(x, MavpOperator::RegularDot, x.cols() as f64, counter)
}

/// Min-covariance matrix (1/(N-1)) V (+) V^T: entry (i,j) is the MAVP of
/// rows i and j of `v`.
pub fn min_covariance(
    v: &DenseMatrix,
    op: MavpOperator,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    min_covariance_with_divisor(v, op, CovarianceDivisor::SamplesMinusOne, counter)
}

/// Min-covariance with an explicit divisor convention.
pub fn min_covariance_with_divisor(
    v: &DenseMatrix,
    op: MavpOperator,
    divisor: CovarianceDivisor,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    let needed = match divisor {
        CovarianceDivisor::Samples => 1,
        CovarianceDivisor::SamplesMinusOne => 2,
    };
    if v.cols() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: v.cols(),
        });
    }
    Ok(covariance_impl(v, op, divisor.value(v.cols()), counter))
}

/// Remove the first component: C - P C where P(i,j) is the scalar MAVP of
/// (w1_i, w1_j) and P C is a regular matrix product.
///
/// Under `RegularDot` with unit-l2 `w1` this is the classical projector
/// deflation (I - w1 w1^T) C. P is never materialized; the product runs
/// through the order-statistics kernel in O(M^2).
pub fn deflate(
    c: &DenseMatrix,
    w1: &Vector,
    op: MavpOperator,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    let m = c.rows();
    if !c.is_square() {
        return Err(Error::ShapeMismatch {
            rows: c.rows(),
            cols: c.cols(),
            len: c.as_slice().len(),
        });
    }
    if w1.len() != m {
        return Err(Error::DimensionMismatch {
            left: m,
            right: w1.len(),
        });
    }
    let kernel = GramKernel::new(op, w1.as_slice(), counter);
    kernel.charge_applies(counter, m);
    counter.charge_additions(m * m);

    // work on the transpose so each column of C is a contiguous row
    let mut t = c.clone();
    t.transpose_in_place();
    t.as_mut_slice().par_chunks_exact_mut(m).for_each(|col| {
        let mut pc = vec![0.0; m];
        kernel.apply(col, &mut pc);
        for (c_entry, p_entry) in col.iter_mut().zip(&pc) {
            *c_entry -= p_entry;
        }
    });
    t.transpose_in_place();
    DenseMatrix::new(m, m, t.into_vec())
}

/// Convergence traces of the two component extractions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionTraces {
    pub first: IterationTrace,
    pub second: IterationTrace,
}

/// Outcome of reconstructing one input copy.
#[derive(Debug, Clone, Serialize)]
pub struct TargetOutcome {
    pub target_index: usize,
    /// PSNR of the occluded input against the clean reference; None when no
    /// reference was supplied or the pair is identical (unbounded PSNR).
    pub psnr_occluded_db: Option<f64>,
    pub psnr_reconstructed_db: Option<f64>,
    #[serde(skip)]
    pub image: ImageGrid,
}

/// Report for a single-target reconstruction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub operator: MavpOperator,
    pub psnr_occluded_db: Option<f64>,
    pub psnr_reconstructed_db: Option<f64>,
    pub traces: ReconstructionTraces,
}

/// Full-batch reconstruction: one component extraction shared by all
/// targets.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionBatch {
    pub operator: MavpOperator,
    pub traces: ReconstructionTraces,
    /// Operations outside the traced power iterations (covariance,
    /// deflation, kernel application).
    pub pipeline_ops: OpCounter,
    pub outcomes: Vec<TargetOutcome>,
}

fn image_matrix(images: &[ImageGrid]) -> Result<(usize, usize, DenseMatrix)> {
    let first = &images[0];
    let (w, h) = (first.width(), first.height());
    let m = w * h;
    for img in images {
        if img.width() != w || img.height() != h {
            return Err(Error::DimensionMismatch {
                left: m,
                right: img.width() * img.height(),
            });
        }
    }
    let n = images.len();
    let mut data = vec![0.0; m * n];
    for (j, img) in images.iter().enumerate() {
        for (i, &p) in img.pixels().iter().enumerate() {
            data[i * n + j] = p;
        }
    }
    Ok((w, h, DenseMatrix::new(m, n, data)?))
}

fn extract_pair(
    c: &DenseMatrix,
    op: MavpOperator,
    cfg: &PowerIterConfig,
    counter: &mut OpCounter,
) -> Result<(PowerIterRun, PowerIterRun)> {
    let base = PowerIterConfig {
        operator: op,
        final_l2_normalize: false,
        ..*cfg
    };
    let second = PowerIterConfig {
        seed: base.seed.wrapping_add(1),
        ..base
    };
    if op == MavpOperator::RegularDot {
        let run1 = rpi(c, &base)?;
        let c2 = deflate(c, &run1.vector, op, counter)?;
        let run2 = rpi(&c2, &second)?;
        Ok((run1, run2))
    } else {
        let run1 = mapi(c, &base)?;
        let c2 = deflate(c, &run1.vector, op, counter)?;
        let run2 = mapi(&c2, &second)?;
        Ok((run1, run2))
    }
}

fn psnr_opt(reference: &ImageGrid, test: &ImageGrid) -> Result<Option<f64>> {
    match psnr(reference, test) {
        Ok(v) => Ok(Some(v)),
        Err(Error::IdenticalImages) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Reconstruct every input copy with one shared component extraction.
///
/// `reference`, when given, is the clean image used to fill the PSNR
/// fields (the algorithm itself never sees it).
pub fn reconstruct_all(
    images: &[ImageGrid],
    op: MavpOperator,
    cfg: &PowerIterConfig,
    reference: Option<&ImageGrid>,
) -> Result<ReconstructionBatch> {
    reconstruct_all_with_divisor(images, op, cfg, reference, CovarianceDivisor::SamplesMinusOne)
}

/// [`reconstruct_all`] with an explicit covariance divisor convention.
pub fn reconstruct_all_with_divisor(
    images: &[ImageGrid],
    op: MavpOperator,
    cfg: &PowerIterConfig,
    reference: Option<&ImageGrid>,
    divisor: CovarianceDivisor,
) -> Result<ReconstructionBatch> {
    if images.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: images.len(),
        });
    }
    let (width, height, v) = image_matrix(images)?;
    let m = v.rows();
    let n = v.cols();
    let mut pipeline_ops = OpCounter::new();

    // per-pixel mean over copies, then center
    let mean: Vec<f64> = v
        .row_iter()
        .map(|row| row.iter().sum::<f64>() / n as f64)
        .collect();
    pipeline_ops.charge_additions(m * n);
    pipeline_ops.charge_divisions(m);
    let mut centered = v.clone();
    for i in 0..m {
        let mi = mean[i];
        for e in centered.row_mut(i).iter_mut() {
            *e -= mi;
        }
    }
    pipeline_ops.charge_additions(m * n);

    let zero_variance = centered.as_slice().iter().all(|&e| e == 0.0);
    let (traces, kernels) = if zero_variance {
        // identical copies: the centered data is zero and the reconstruction
        // is exactly the mean image
        (ReconstructionTraces::default(), None)
    } else {
        let c = min_covariance_with_divisor(&centered, op, divisor, &mut pipeline_ops)?;
        let (run1, run2) = extract_pair(&c, op, cfg, &mut pipeline_ops)?;
        let k1 = GramKernel::new(op, run1.vector.as_slice(), &mut pipeline_ops);
        let k2 = GramKernel::new(op, run2.vector.as_slice(), &mut pipeline_ops);
        (
            ReconstructionTraces {
                first: run1.trace,
                second: run2.trace,
            },
            Some((k1, k2)),
        )
    };

    let mut outcomes = Vec::with_capacity(n);
    let mut residual = vec![0.0; m];
    let mut projected = vec![0.0; m];
    let mut scratch = vec![0.0; m];
    for target in 0..n {
        for i in 0..m {
            residual[i] = v.get(i, target) - mean[i];
        }
        pipeline_ops.charge_additions(m);
        let raw: Vec<f64> = if let Some((k1, k2)) = &kernels {
            k1.apply(&residual, &mut projected);
            k2.apply(&residual, &mut scratch);
            k1.charge_applies(&mut pipeline_ops, 1);
            k2.charge_applies(&mut pipeline_ops, 1);
            pipeline_ops.charge_additions(2 * m);
            (0..m)
                .map(|i| projected[i] + scratch[i] + mean[i])
                .collect()
        } else {
            mean.clone()
        };
        let image = ImageGrid::from_clamped(width, height, raw)?;
        let (occ, rec) = match reference {
            Some(r) => (psnr_opt(r, &images[target])?, psnr_opt(r, &image)?),
            None => (None, None),
        };
        outcomes.push(TargetOutcome {
            target_index: target,
            psnr_occluded_db: occ,
            psnr_reconstructed_db: rec,
            image,
        });
    }

    Ok(ReconstructionBatch {
        operator: op,
        traces,
        pipeline_ops,
        outcomes,
    })
}

/// Reconstruct a single input copy (index `target_index`).
pub fn reconstruct(
    images: &[ImageGrid],
    op: MavpOperator,
    cfg: &PowerIterConfig,
    target_index: usize,
    reference: Option<&ImageGrid>,
) -> Result<(ImageGrid, ReconstructionReport)> {
    if target_index >= images.len() {
        return Err(Error::DimensionMismatch {
            left: target_index,
            right: images.len(),
        });
    }
    let batch = reconstruct_all(images, op, cfg, reference)?;
    let outcome = batch.outcomes.into_iter().nth(target_index).expect("index checked");
    let report = ReconstructionReport {
        operator: op,
        psnr_occluded_db: outcome.psnr_occluded_db,
        psnr_reconstructed_db: outcome.psnr_reconstructed_db,
        traces: batch.traces,
    };
    Ok((outcome.image, report))
}

/// Configuration of one occlusion-benchmark run on a clean image.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OcclusionConfig {
    pub operator: MavpOperator,
    /// Number of corrupted copies (N).
    pub n_copies: usize,
    /// Tile edge length in pixels.
    pub tile: usize,
    /// Tiles replaced with noise per copy.
    pub n_tiles: usize,
    /// Power-iteration budget per component.
    pub iterations: usize,
    pub seed: u64,
    pub divisor: CovarianceDivisor,
}

impl OcclusionConfig {
    pub fn new(operator: MavpOperator, iterations: usize, seed: u64) -> Self {
        OcclusionConfig {
            operator,
            n_copies: 10,
            tile: 16,
            n_tiles: 3,
            iterations,
            seed,
            divisor: CovarianceDivisor::SamplesMinusOne,
        }
    }
}

/// Aggregated benchmark outcome for one image.
#[derive(Debug, Clone, Serialize)]
pub struct OcclusionReport {
    pub operator: MavpOperator,
    pub psnr_occluded_mean_db: f64,
    pub psnr_reconstructed_mean_db: f64,
    /// Averaging baseline: PSNR of the mean of the occluded copies.
    pub psnr_mean_image_db: Option<f64>,
    pub outcomes: Vec<TargetOutcome>,
    pub traces: ReconstructionTraces,
    pub pipeline_ops: OpCounter,
}

/// Occlude `original` into N copies and reconstruct each of them.
pub fn occlusion_experiment(original: &ImageGrid, cfg: &OcclusionConfig) -> Result<OcclusionReport> {
    let copies: Vec<ImageGrid> = (0..cfg.n_copies)
        .map(|i| occlude(original, cfg.tile, cfg.n_tiles, occlusion_seed(cfg.seed, i)))
        .collect::<Result<_>>()?;
    let power = PowerIterConfig::new(cfg.operator, cfg.iterations)
        .with_seed(cfg.seed.wrapping_mul(1000).wrapping_add(100));
    let batch =
        reconstruct_all_with_divisor(&copies, cfg.operator, &power, Some(original), cfg.divisor)?;

    let mean_image = {
        let m = original.width() * original.height();
        let mut acc = vec![0.0; m];
        for c in &copies {
            for (a, &p) in acc.iter_mut().zip(c.pixels()) {
                *a += p;
            }
        }
        let n = copies.len() as f64;
        ImageGrid::from_clamped(
            original.width(),
            original.height(),
            acc.into_iter().map(|v| v / n).collect(),
        )?
    };

    let mean_of = |vals: Vec<f64>| vals.iter().sum::<f64>() / vals.len() as f64;
    let occs: Vec<f64> = batch.outcomes.iter().filter_map(|o| o.psnr_occluded_db).collect();
    let recs: Vec<f64> = batch
        .outcomes
        .iter()
        .filter_map(|o| o.psnr_reconstructed_db)
        .collect();
    Ok(OcclusionReport {
        operator: cfg.operator,
        psnr_occluded_mean_db: mean_of(occs),
        psnr_reconstructed_mean_db: mean_of(recs),
        psnr_mean_image_db: psnr_opt(original, &mean_image)?,
        outcomes: batch.outcomes,
        traces: batch.traces,
        pipeline_ops: batch.pipeline_ops,
    })
}

/// Seed for occluded copy `index` of a benchmark run.
pub fn occlusion_seed(base: u64, index: usize) -> u64 {
    base.wrapping_mul(1000).wrapping_add(index as u64)
}
