//! Phase timing for one occlusion benchmark run (dev tool).

use std::time::Instant;

use mapi::pca::{self, samples};
use mapi::{DenseMatrix, MavpOperator, OpCounter, PowerIterConfig};

fn main() {
    let img = samples::orbs(64);
    let copies: Vec<pca::ImageGrid> = (0..10)
        .map(|i| pca::occlude(&img, 16, 3, pca::occlusion_seed(0, i)).unwrap())
        .collect();
    let n = copies.len();
    let m = 64 * 64;

    let t0 = Instant::now();
    let mut data = vec![0.0; m * n];
    for (j, c) in copies.iter().enumerate() {
        for (i, &p) in c.pixels().iter().enumerate() {
            data[i * n + j] = p;
        }
    }
    let v = DenseMatrix::new(m, n, data).unwrap();
    let mean: Vec<f64> = v.row_iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let mut centered = v.clone();
    for i in 0..m {
        let mu = mean[i];
        for e in centered.row_mut(i).iter_mut() {
            *e -= mu;
        }
    }
    println!("assemble+center: {:?}", t0.elapsed());

    let mut ops = OpCounter::new();
    let t1 = Instant::now();
    let c = pca::min_covariance(&centered, MavpOperator::Min2, &mut ops).unwrap();
    println!("min_covariance : {:?}", t1.elapsed());

    let t2 = Instant::now();
    let cfg = PowerIterConfig::new(MavpOperator::Min2, 30).with_seed(77);
    let run1 = mapi::mapi(&c, &cfg).unwrap();
    println!("mapi w1 (30 it): {:?}", t2.elapsed());

    let t3 = Instant::now();
    let c2 = pca::deflate(&c, &run1.vector, MavpOperator::Min2, &mut ops).unwrap();
    println!("deflate        : {:?}", t3.elapsed());

    let t4 = Instant::now();
    let run2 = mapi::mapi(&c2, &cfg).unwrap();
    println!("mapi w2 (30 it): {:?}", t4.elapsed());

    let t5 = Instant::now();
    let full = pca::occlusion_experiment(
        &img,
        &pca::OcclusionConfig {
            operator: MavpOperator::Min2,
            n_copies: 10,
            tile: 16,
            n_tiles: 3,
            iterations: 30,
            seed: 0,
        },
    )
    .unwrap();
    println!("full experiment: {:?} (recon mean {:.2} dB)", t5.elapsed(), full.psnr_reconstructed_mean_db);
}
