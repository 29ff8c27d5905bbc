//! Real-valued signals and the exact vector primitives built on them.
//!
//! All reductions run left to right over the coordinate order, so a given
//! input always produces the same bits.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real vector of dimension `n >= 1`.
///
/// Used for clean signals, noisy observations, noise realizations and
/// error vectors alike.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("signal must have dimension >= 1"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "signal value at position {i} is not finite"
            )));
        }
        Ok(Signal { values })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Signal::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        squared_norm(&self.values).sqrt()
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        check_dims(self.dim(), other.dim())?;
        Ok(Signal {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Componentwise `self + other`.
    pub fn add(&self, other: &Signal) -> Result<Signal> {
        check_dims(self.dim(), other.dim())?;
        Signal::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Result<Signal> {
        Signal::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Unit vector in the direction of `self`, or a domain error for the
    /// zero vector.
    pub fn unit(&self) -> Result<Signal> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        self.scale(1.0 / norm)
    }
}

impl Index<usize> for Signal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Signal::new(values)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Vec<f64> {
        s.values
    }
}

pub(crate) fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension { expected, actual });
    }
    Ok(())
}

/// Squared Euclidean distance over equal-length slices, summed left to right.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub(crate) fn squared_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Euclidean distance `||a - b||`.
pub fn l2_distance(a: &Signal, b: &Signal) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(squared_distance(&a.values, &b.values).sqrt())
}

/// Inner product `<a, b>`.
pub fn inner_product(a: &Signal, b: &Signal) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot(&a.values, &b.values))
}
