//! The codebook `C = {c_1, ..., c_M}` induced by a rate-`R` decoder.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{check_dims, Signal};

/// Largest supported rate. Keeps `2^R` well inside `usize` and the file
/// format's `u32` fields.
pub const MAX_RATE_BITS: u32 = 24;

/// One-based index of a codeword, `1 <= m <= M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CodeIndex(usize);

impl CodeIndex {
    pub fn new(m: usize) -> Option<Self> {
        (m >= 1).then_some(CodeIndex(m))
    }

    pub(crate) fn from_offset(offset: usize) -> Self {
        CodeIndex(offset + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Zero-based position in the codeword list.
    pub fn offset(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for CodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An ordered list of exactly `2^rate_bits` codewords of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    dim: usize,
    rate_bits: u32,
    codewords: Vec<Signal>,
}

impl Codebook {
    pub fn new(rate_bits: u32, codewords: Vec<Signal>) -> Result<Self> {
        if rate_bits == 0 || rate_bits > MAX_RATE_BITS {
            return Err(Error::domain(format!(
                "rate_bits must be in 1..={MAX_RATE_BITS}, got {rate_bits}"
            )));
        }
        let size = 1usize << rate_bits;
        if codewords.len() != size {
            return Err(Error::domain(format!(
                "codebook of rate {rate_bits} needs {size} codewords, got {}",
                codewords.len()
            )));
        }
        let dim = codewords[0].dim();
        for c in &codewords {
            check_dims(dim, c.dim())?;
        }
        Ok(Codebook {
            dim,
            rate_bits,
            codewords,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rate_bits(&self) -> u32 {
        self.rate_bits
    }

    /// Number of codewords, `M = 2^R`.
    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[Signal] {
        &self.codewords
    }

    pub fn codeword(&self, m: CodeIndex) -> Result<&Signal> {
        self.codewords.get(m.offset()).ok_or(Error::Index {
            index: m.get(),
            size: self.size(),
        })
    }

    pub fn indices(&self) -> impl Iterator<Item = CodeIndex> {
        (1..=self.size()).map(CodeIndex)
    }

    /// Fails with [`Error::DegenerateCodewords`] on the first pair of
    /// identical codewords.
    pub fn ensure_distinct(&self) -> Result<()> {
        for (i, a) in self.codewords.iter().enumerate() {
            for (j, b) in self.codewords.iter().enumerate().skip(i + 1) {
                if a == b {
                    return Err(Error::DegenerateCodewords(format!(
                        "c_{} and c_{} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}
