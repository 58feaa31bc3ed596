//! Procedurally generated grayscale test images.
//!
//! Three 64x64 scenes with structure at several scales, used by the
//! occlusion benchmark and bundled with the repository as PGM files
//! (assets/images). The functions here are the source of truth; a test
//! keeps the committed files in sync.

use crate::error::Result;
use crate::pca::image::ImageGrid;

pub const SAMPLE_SIZE: usize = 64;
pub const SAMPLE_NAMES: [&str; 3] = ["orbs", "waves", "shapes"];

fn unit_coords(x: usize, y: usize, n: usize) -> (f64, f64) {
    let d = (n - 1) as f64;
    (x as f64 / d, y as f64 / d)
}

/// Horizontal gradient with a bright and a dark gaussian blob.
pub fn orbs(n: usize) -> ImageGrid {
    ImageGrid::from_fn(n, n, |xi, yi| {
        let (x, y) = unit_coords(xi, yi, n);
        let base = 0.25 + 0.5 * x;
        let bright = 0.45 * (-((x - 0.3).powi(2) + (y - 0.35).powi(2)) / 0.02).exp();
        let dark = -0.35 * (-((x - 0.72).powi(2) + (y - 0.7).powi(2)) / 0.04).exp();
        (base + bright + dark).clamp(0.02, 0.98)
    })
    .expect("values clamped into range")
}

/// Crossed sinusoidal bands.
pub fn waves(n: usize) -> ImageGrid {
    use std::f64::consts::TAU;
    ImageGrid::from_fn(n, n, |xi, yi| {
        let (x, y) = unit_coords(xi, yi, n);
        let v = 0.5 + 0.28 * (TAU * (2.0 * x + y)).sin() + 0.14 * (TAU * 3.5 * y).cos();
        v.clamp(0.02, 0.98)
    })
    .expect("values clamped into range")
}

/// Flat background, sky gradient, a building with a window, and a roof.
pub fn shapes(n: usize) -> ImageGrid {
    ImageGrid::from_fn(n, n, |xi, yi| {
        let (x, y) = unit_coords(xi, yi, n);
        let mut v = 0.2;
        if y < 0.5 {
            v += 0.45 * (0.5 - y);
        }
        if x > 0.12 && x < 0.5 && y > 0.5 && y < 0.92 {
            v = 0.75;
        }
        if x > 0.2 && x < 0.32 && y > 0.62 && y < 0.8 {
            v = 0.35;
        }
        if y > 0.25 && y < 0.55 && (x - 0.7).abs() < (y - 0.25) * 0.6 {
            v = 0.88;
        }
        v.clamp(0.02, 0.98)
    })
    .expect("values clamped into range")
}

/// The three bundled benchmark images at the default 64x64 size.
pub fn bundled_images() -> Vec<(&'static str, ImageGrid)> {
    vec![
        ("orbs", orbs(SAMPLE_SIZE)),
        ("waves", waves(SAMPLE_SIZE)),
        ("shapes", shapes(SAMPLE_SIZE)),
    ]
}

/// Write the bundled images as PGM files into `dir`.
pub fn write_bundled_images(dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, img) in bundled_images() {
        crate::pca::pgm::write_pgm(&dir.join(format!("{name}.pgm")), &img)?;
    }
    Ok(())
}
