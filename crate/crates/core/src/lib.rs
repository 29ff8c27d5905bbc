//! Compression-based maximum-likelihood denoising over explicit codebooks.
//!
//! A rate-`R` codebook `C = {c_1, ..., c_M}`, `M = 2^R`, doubles as a
//! denoiser: the estimate of a clean signal from an observation `y` is the
//! codeword that makes `y` most likely. Under additive white Gaussian noise
//! this is the nearest codeword in L2.
//!
//! Alongside the denoiser the crate provides the closed-form quantities used
//! to reason about it ([`rdp`], [`bounds`]) and a seeded Monte Carlo harness
//! that checks them empirically ([`sim`]). [`imagelab`] applies the same
//! denoiser patchwise to 8-bit grayscale images.

pub mod bounds;
pub mod codebook;
pub mod codec;
pub mod denoise;
pub mod error;
pub mod imagelab;
pub mod noise;
pub mod rdp;
pub mod rng;
pub mod signal;
pub mod sim;

pub use codebook::{CodeIndex, Codebook};
pub use error::{Error, Result};
pub use noise::NoiseSpec;
pub use signal::{inner_product, l2_distance, Signal};
