//! Distortion–perception function and a scalar Gaussian reference for its
//! parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MMSE distortion `d_star` and the perception index `p_star` of the MMSE
/// estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    d_star: f64,
    p_star: f64,
}

impl DpParams {
    pub fn new(d_star: f64, p_star: f64) -> Result<Self> {
        for (name, v) in [("d_star", d_star), ("p_star", p_star)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(DpParams { d_star, p_star })
    }

    pub fn d_star(&self) -> f64 {
        self.d_star
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }
}

/// `D(P) = D* + ((P* - P)_+)^2`.
///
/// Non-increasing in `perception`, and equal to `d_star` once
/// `perception >= p_star`.
pub fn dp_function(params: DpParams, perception: f64) -> Result<f64> {
    if perception.is_nan() || perception < 0.0 {
        return Err(Error::domain(format!(
            "perception level must be non-negative, got {perception}"
        )));
    }
    let gap = (params.p_star - perception).max(0.0);
    Ok(params.d_star + gap * gap)
}

/// Closed-form `(D*, P*)` for `x ~ N(0, s^2)` observed through
/// `y = x + n`, `n ~ N(0, sigma^2)`.
///
/// The posterior mean is `s^2 / (s^2 + sigma^2) * y`, with squared error
/// `s^2 sigma^2 / (s^2 + sigma^2)`. Its output is `N(0, s^4 / (s^2 + sigma^2))`,
/// and W2 between centered Gaussians is the difference of their standard
/// deviations.
pub fn gaussian_mmse_reference(source_std: f64, noise_std: f64) -> Result<DpParams> {
    for (name, v) in [("source_std", source_std), ("noise_std", noise_std)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let s2 = source_std * source_std;
    let n2 = noise_std * noise_std;
    let total = s2 + n2;
    let d_star = s2 * n2 / total;
    let p_star = (source_std - s2 / total.sqrt()).abs();
    DpParams::new(d_star, p_star)
}

/// Wasserstein-2 distance between two equal-size 1-D empirical measures,
/// computed exactly by the sorted (monotone) coupling.
pub fn wasserstein2_1d(samples_a: &[f64], samples_b: &[f64]) -> Result<f64> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::domain("empirical measures must be non-empty"));
    }
    if samples_a.len() != samples_b.len() {
        return Err(Error::domain(format!(
            "sample sizes differ: {} vs {}",
            samples_a.len(),
            samples_b.len()
        )));
    }
    if samples_a.iter().chain(samples_b).any(|v| v.is_nan()) {
        return Err(Error::domain("samples contain NaN"));
    }
    let mut a = samples_a.to_vec();
    let mut b = samples_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(&b) {
        acc += (x - y) * (x - y);
    }
    Ok((acc / a.len() as f64).sqrt())
}
