//! Grayscale image demo: patch extraction, patchwise codebook denoising and
//! PSNR.

mod patches;
mod pgm;

pub use patches::{extract_patches, patch_denoise, patch_offsets, reassemble_average, Patches};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;

/// Row-major grayscale image on the `[0, 1]` scale.
///
/// Pixels may leave `[0, 1]` transiently (e.g. after adding noise);
/// [`GrayImage::clamped`] and every reconstruction path bring them back.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::domain("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::Dimension {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("image contains non-finite pixels"));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        GrayImage::new(width, height, vec![value; width * height])
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

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn clamped(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        }
    }

    /// Adds i.i.d. `N(0, sigma^2)` noise; the result is not clamped.
    pub fn with_awgn(&self, sigma: f64, seed: u64) -> Result<GrayImage> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        let mut rng = rng::stream(seed);
        let pixels = self
            .pixels
            .iter()
            .map(|p| p + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        GrayImage::new(self.width, self.height, pixels)
    }

    /// Deterministic piecewise-constant test card: 16x16 blocks at five
    /// gray levels, plus a bright bar and a dark disc.
    pub fn piecewise_constant(width: usize, height: usize) -> Result<GrayImage> {
        let mut pixels = Vec::with_capacity(width * height);
        let (cx, cy, r) = (width as f64 * 0.65, height as f64 * 0.35, height.min(width) as f64 * 0.18);
        for row in 0..height {
            for col in 0..width {
                let (bx, by) = (col / 16, row / 16);
                let mut v = ((bx * 3 + by * 5) % 5) as f64 / 4.0;
                if (height / 2..height / 2 + 6).contains(&row) && col >= width / 8 && col < width * 7 / 8 {
                    v = 0.9;
                }
                let (dx, dy) = (col as f64 + 0.5 - cx, row as f64 + 0.5 - cy);
                if dx * dx + dy * dy <= r * r {
                    v = 0.1;
                }
                pixels.push(v);
            }
        }
        GrayImage::new(width, height, pixels)
    }
}

/// Peak signal-to-noise ratio in dB for unit peak. Identical images give
/// `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Dimension {
            expected: a.pixels.len(),
            actual: b.pixels.len(),
        });
    }
    let mut acc = 0.0;
    for (x, y) in a.pixels.iter().zip(&b.pixels) {
        acc += (x - y) * (x - y);
    }
    let mse = acc / a.pixels.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}
