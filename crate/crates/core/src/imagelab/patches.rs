use rayon::prelude::*;

use super::GrayImage;
use crate::codebook::Codebook;
use crate::denoise::nn_denoise;
use crate::error::{Error, Result};
use crate::signal::{check_dims, Signal};

/// Flattened `k x k` patches together with their top-left `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Patches {
    pub k: usize,
    pub width: usize,
    pub height: usize,
    pub offsets: Vec<(usize, usize)>,
    pub signals: Vec<Signal>,
}

/// Offsets `0, stride, 2 stride, ...` that fit in `len`, plus `len - k` when
/// the regular grid stops short of the far edge.
fn axis_offsets(len: usize, k: usize, stride: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=len - k).step_by(stride).collect();
    if *out.last().unwrap() + k < len {
        out.push(len - k);
    }
    out
}

/// Row-major list of patch origins covering a `width x height` image.
pub fn patch_offsets(width: usize, height: usize, k: usize, stride: usize) -> Result<Vec<(usize, usize)>> {
    if k == 0 || k > width.min(height) {
        return Err(Error::domain(format!(
            "patch size {k} must be in 1..={}",
            width.min(height)
        )));
    }
    // stride > k would leave pixels no patch covers
    if stride == 0 || stride > k {
        return Err(Error::domain(format!("stride must be in 1..={k}, got {stride}")));
    }
    let rows = axis_offsets(height, k, stride);
    let cols = axis_offsets(width, k, stride);
    Ok(rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .collect())
}

pub fn extract_patches(image: &GrayImage, k: usize, stride: usize) -> Result<Patches> {
    let offsets = patch_offsets(image.width(), image.height(), k, stride)?;
    let signals = offsets
        .iter()
        .map(|&(r, c)| {
            let mut v = Vec::with_capacity(k * k);
            for row in r..r + k {
                let start = row * image.width() + c;
                v.extend_from_slice(&image.pixels()[start..start + k]);
            }
            Signal::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Patches {
        k,
        width: image.width(),
        height: image.height(),
        offsets,
        signals,
    })
}

/// Averages overlapping patches back into an image, clamped to `[0, 1]`.
///
/// Each pixel keeps a running mean, so a pixel covered only by equal values
/// reproduces that value exactly.
pub fn reassemble_average(
    patches: &[Signal],
    offsets: &[(usize, usize)],
    width: usize,
    height: usize,
    k: usize,
) -> Result<GrayImage> {
    if patches.len() != offsets.len() {
        return Err(Error::Dimension {
            expected: offsets.len(),
            actual: patches.len(),
        });
    }
    let mut mean = vec![0.0; width * height];
    let mut count = vec![0u32; width * height];
    for (patch, &(r, c)) in patches.iter().zip(offsets) {
        check_dims(k * k, patch.dim())?;
        if r + k > height || c + k > width {
            return Err(Error::domain(format!(
                "patch at ({r}, {c}) extends past the {width}x{height} image"
            )));
        }
        for (i, &v) in patch.as_slice().iter().enumerate() {
            let idx = (r + i / k) * width + c + i % k;
            count[idx] += 1;
            mean[idx] += (v - mean[idx]) / f64::from(count[idx]);
        }
    }
    if let Some(idx) = count.iter().position(|&n| n == 0) {
        return Err(Error::Coverage {
            row: idx / width,
            col: idx % width,
        });
    }
    GrayImage::new(width, height, mean.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Replaces every patch of `noisy` with its nearest codeword and averages
/// the overlaps.
pub fn patch_denoise(noisy: &GrayImage, codebook: &Codebook, k: usize, stride: usize) -> Result<GrayImage> {
    check_dims(k * k, codebook.dim())?;
    let patches = extract_patches(noisy, k, stride)?;
    let projected = patches
        .signals
        .par_iter()
        .map(|p| nn_denoise(codebook, p).map(|(_, c)| c))
        .collect::<Result<Vec<_>>>()?;
    reassemble_average(&projected, &patches.offsets, noisy.width(), noisy.height(), k)
}
