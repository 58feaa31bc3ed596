//! Matvec micro-timing (dev tool).

use std::time::Instant;

use mapi::pca::{self, samples};
use mapi::rng::seeded_unit_vector;
use mapi::{mavp_matvec, MavpOperator, OpCounter, PowerIterConfig};

fn time_matvec(label: &str, a: &mapi::DenseMatrix, op: MavpOperator) {
    let w = seeded_unit_vector(a.rows(), 3, true);
    let mut ops = OpCounter::new();
    let t = Instant::now();
    let mut out = mavp_matvec(op, a, &w, &mut ops).unwrap();
    for _ in 0..9 {
        out = mavp_matvec(op, a, &w, &mut ops).unwrap();
    }
    let per = t.elapsed().as_secs_f64() / 10.0;
    let denorm_out = out.iter().filter(|v| v.abs() < 1e-300 && **v != 0.0).count();
    println!("{label}: {:.1} ms/matvec ({denorm_out} denormal outputs)", per * 1e3);
}

fn main() {
    let img = samples::orbs(64);
    let copies: Vec<pca::ImageGrid> = (0..10)
        .map(|i| pca::occlude(&img, 16, 3, pca::occlusion_seed(0, i)).unwrap())
        .collect();
    let cfg = PowerIterConfig::new(MavpOperator::Min2, 30).with_seed(77);
    let mut ops = OpCounter::new();

    // rebuild covariance and deflated covariance
    let n = copies.len();
    let m = 64 * 64;
    let mut data = vec![0.0; m * n];
    for (j, c) in copies.iter().enumerate() {
        for (i, &p) in c.pixels().iter().enumerate() {
            data[i * n + j] = p;
        }
    }
    let v = mapi::DenseMatrix::new(m, n, data).unwrap();
    let mean: Vec<f64> = v.row_iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let mut centered = v.clone();
    for i in 0..m {
        let mu = mean[i];
        for e in centered.row_mut(i).iter_mut() {
            *e -= mu;
        }
    }
    let c = pca::min_covariance(&centered, MavpOperator::Min2, &mut ops).unwrap();
    let run1 = mapi::mapi(&c, &cfg).unwrap();
    let c2 = pca::deflate(&c, &run1.vector, MavpOperator::Min2, &mut ops).unwrap();

    let tiny_c = c.as_slice().iter().filter(|v| v.abs() < 1e-300 && **v != 0.0).count();
    let tiny_c2 = c2.as_slice().iter().filter(|v| v.abs() < 1e-300 && **v != 0.0).count();
    println!("denormals: C {tiny_c}, C2 {tiny_c2}");

    time_matvec("dot  on C ", &c, MavpOperator::RegularDot);
    time_matvec("min2 on C ", &c, MavpOperator::Min2);
    time_matvec("min2 on C2", &c2, MavpOperator::Min2);
    time_matvec("min1 on C2", &c2, MavpOperator::Min1);
}
