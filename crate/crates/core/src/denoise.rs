//! Compression-based maximum-likelihood denoising.
//!
//! The estimate is the codeword with the smallest negative log-likelihood
//! for the observation. Under AWGN that is the nearest codeword in L2
//! ([`nn_denoise`]); [`ml_denoise`] evaluates the likelihood directly and
//! works for any [`NoiseSpec`].

use std::f64::consts::PI;

use crate::codebook::{CodeIndex, Codebook};
use crate::codec::nearest;
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::signal::{check_dims, squared_distance, Signal};

fn check_poisson_observation(y: &[f64]) -> Result<()> {
    for (i, &v) in y.iter().enumerate() {
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::domain(format!(
                "Poisson observation y[{i}] = {v} is not a non-negative integer"
            )));
        }
    }
    Ok(())
}

fn poisson_nll(c: &[f64], y: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (i, (&rate, &count)) in c.iter().zip(y).enumerate() {
        if rate <= 0.0 {
            return Err(Error::domain(format!(
                "Poisson rate c[{i}] = {rate} must be positive"
            )));
        }
        acc += rate - count * rate.ln() + libm::lgamma(count + 1.0);
    }
    Ok(acc)
}

/// `-sum_i log p(y_i | c_i)`, normalization constants included.
pub fn neg_log_likelihood(c: &Signal, y: &Signal, noise: NoiseSpec) -> Result<f64> {
    check_dims(c.dim(), y.dim())?;
    match noise {
        NoiseSpec::Gaussian { sigma } => {
            let n = c.dim() as f64;
            let quad = squared_distance(c.as_slice(), y.as_slice());
            Ok(n * (sigma * (2.0 * PI).sqrt()).ln() + quad / (2.0 * sigma * sigma))
        }
        NoiseSpec::Poisson { .. } => {
            check_poisson_observation(y.as_slice())?;
            poisson_nll(c.as_slice(), y.as_slice())
        }
    }
}

/// Most likely codeword for `y`; ties go to the smallest index.
pub fn ml_denoise(codebook: &Codebook, y: &Signal, noise: NoiseSpec) -> Result<(CodeIndex, Signal)> {
    check_dims(codebook.dim(), y.dim())?;
    if let NoiseSpec::Poisson { .. } = noise {
        check_poisson_observation(y.as_slice())?;
    }
    let mut best = 0;
    let mut best_nll = f64::INFINITY;
    for (i, c) in codebook.codewords().iter().enumerate() {
        let nll = neg_log_likelihood(c, y, noise)?;
        if nll < best_nll {
            best = i;
            best_nll = nll;
        }
    }
    Ok((CodeIndex::from_offset(best), codebook.codewords()[best].clone()))
}

/// Projection of `y` onto the nearest codeword (same rule as the encoder).
pub fn nn_denoise(codebook: &Codebook, y: &Signal) -> Result<(CodeIndex, Signal)> {
    check_dims(codebook.dim(), y.dim())?;
    let (best, _) = nearest(codebook, y.as_slice());
    Ok((CodeIndex::from_offset(best), codebook.codewords()[best].clone()))
}
