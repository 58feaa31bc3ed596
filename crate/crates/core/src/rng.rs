//! Seeded random-vector initialization shared by the experiment tracks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Vector;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded start vector with unit l2 norm.
///
/// Entries are uniform on (-1, 1), or on (0, 1) when `positive` is set
/// (used by the positive-orthant tracks).
pub fn seeded_unit_vector(dim: usize, seed: u64, positive: bool) -> Vector {
    let mut rng = seeded_rng(seed);
    let mut data: Vec<f64> = (0..dim)
        .map(|_| {
            if positive {
                rng.random_range(1e-6..1.0)
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    let norm = data.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut data {
            *v /= norm;
        }
    }
    Vector::new(data).expect("finite by construction")
}
