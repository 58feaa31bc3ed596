//! Grayscale images on [0,1], tile occlusion, and PSNR.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Row-major grayscale image with pixel values in [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::ShapeMismatch {
                rows: height,
                cols: width,
                len: pixels.len(),
            });
        }
        for (i, &v) in pixels.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { value: v, index: i });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::PixelOutOfRange { value: v, index: i });
            }
        }
        Ok(ImageGrid {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub(crate) fn from_clamped(width: usize, height: usize, raw: Vec<f64>) -> Result<Self> {
        let pixels = raw.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Self::new(width, height, pixels)
    }
}

/// Replace `n_tiles` distinct, uniformly chosen tiles with i.i.d. uniform
/// [0,1] noise. The image must divide evenly into `tile` x `tile` blocks.
pub fn occlude(img: &ImageGrid, tile: usize, n_tiles: usize, rng_seed: u64) -> Result<ImageGrid> {
    if tile == 0 || img.width % tile != 0 || img.height % tile != 0 {
        return Err(Error::TileMismatch {
            width: img.width,
            height: img.height,
            tile,
        });
    }
    let tiles_x = img.width / tile;
    let tiles_y = img.height / tile;
    let total = tiles_x * tiles_y;
    if n_tiles > total {
        return Err(Error::TooManyTiles {
            requested: n_tiles,
            available: total,
        });
    }
    let mut rng = seeded_rng(rng_seed);
    let mut chosen = rand::seq::index::sample(&mut rng, total, n_tiles).into_vec();
    chosen.sort_unstable();
    let mut out = img.clone();
    for t in chosen {
        let ty = t / tiles_x;
        let tx = t % tiles_x;
        for dy in 0..tile {
            let row = (ty * tile + dy) * img.width + tx * tile;
            for dx in 0..tile {
                out.pixels[row + dx] = rng.random_range(0.0..1.0);
            }
        }
    }
    Ok(out)
}

/// Peak signal-to-noise ratio in dB with peak 1.0.
///
/// Identical inputs have no finite PSNR and are reported as an error so
/// callers can decide how to present them.
pub fn psnr(reference: &ImageGrid, test: &ImageGrid) -> Result<f64> {
    if reference.width != test.width || reference.height != test.height {
        return Err(Error::DimensionMismatch {
            left: reference.pixels.len(),
            right: test.pixels.len(),
        });
    }
    let n = reference.pixels.len();
    let mse: f64 = reference
        .pixels
        .iter()
        .zip(&test.pixels)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / n as f64;
    if mse == 0.0 {
        return Err(Error::IdenticalImages);
    }
    Ok(10.0 * (1.0 / mse).log10())
}
