use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Memoryless, homogeneous observation model `p(y_i | x_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    /// `y_i = x_i + n_i`, `n_i ~ N(0, sigma^2)`.
    Gaussian { sigma: f64 },
    /// `y_i ~ Poisson(x_i)`, with signals pre-scaled so the peak amplitude
    /// equals `peak`. The scaling is the caller's job.
    Poisson { peak: f64 },
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(NoiseSpec::Gaussian { sigma })
    }

    pub fn poisson(peak: f64) -> Result<Self> {
        if !(peak.is_finite() && peak > 0.0) {
            return Err(Error::domain(format!("peak must be positive, got {peak}")));
        }
        Ok(NoiseSpec::Poisson { peak })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_parameters() {
        assert!(NoiseSpec::gaussian(0.0).is_err());
        assert!(NoiseSpec::gaussian(-1.0).is_err());
        assert!(NoiseSpec::gaussian(f64::NAN).is_err());
        assert!(NoiseSpec::poisson(0.0).is_err());
        assert_eq!(
            NoiseSpec::gaussian(2.0).unwrap(),
            NoiseSpec::Gaussian { sigma: 2.0 }
        );
        assert!(NoiseSpec::poisson(10.0).is_ok());
    }
}
