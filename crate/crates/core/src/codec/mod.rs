//! Codebook construction, the encoder/decoder pair and empirical distortion.

mod file;
mod lloyd;

pub use file::{load_codebook, read_codebook, save_codebook, write_codebook, MAGIC, VERSION};
pub use lloyd::{lloyd_codebook, LloydResult};

use rand::seq::index;

use crate::codebook::{CodeIndex, Codebook};
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::{check_dims, squared_distance, Signal};

fn check_training(samples: &[Signal], rate_bits: u32) -> Result<usize> {
    if rate_bits == 0 || rate_bits > crate::codebook::MAX_RATE_BITS {
        return Err(Error::domain(format!("unsupported rate_bits {rate_bits}")));
    }
    let size = 1usize << rate_bits;
    if samples.len() < size {
        return Err(Error::InsufficientData {
            needed: size,
            got: samples.len(),
        });
    }
    let dim = samples[0].dim();
    for s in samples {
        check_dims(dim, s.dim())?;
    }
    Ok(size)
}

/// Draws `2^R` training samples uniformly without replacement.
pub fn build_random_codebook(
    training_samples: &[Signal],
    rate_bits: u32,
    seed: u64,
) -> Result<Codebook> {
    let size = check_training(training_samples, rate_bits)?;
    let mut rng = rng::stream(seed);
    let picks = index::sample(&mut rng, training_samples.len(), size);
    let codewords = picks
        .iter()
        .map(|i| training_samples[i].clone())
        .collect();
    Codebook::new(rate_bits, codewords)
}

/// Exhaustive nearest-codeword scan: zero-based offset and squared distance.
/// Ties go to the smallest index.
pub(crate) fn nearest(codebook: &Codebook, x: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, c) in codebook.codewords().iter().enumerate() {
        let d = squared_distance(c.as_slice(), x);
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    (best, best_dist)
}

/// The encoder `f`: index of the nearest codeword.
pub fn encode(codebook: &Codebook, x: &Signal) -> Result<CodeIndex> {
    check_dims(codebook.dim(), x.dim())?;
    Ok(CodeIndex::from_offset(nearest(codebook, x.as_slice()).0))
}

/// The decoder `g`: codeword `m` by value.
pub fn decode(codebook: &Codebook, m: CodeIndex) -> Result<Signal> {
    codebook.codeword(m).cloned()
}

/// Decodes a raw one-based index, rejecting 0 and anything above `M`.
pub fn decode_index(codebook: &Codebook, m: usize) -> Result<Signal> {
    let idx = CodeIndex::new(m).ok_or(Error::Index {
        index: m,
        size: codebook.size(),
    })?;
    decode(codebook, idx)
}

/// Mean squared reconstruction error `(1/N) sum ||x - g(f(x))||^2`.
pub fn codebook_distortion(codebook: &Codebook, samples: &[Signal]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("distortion needs at least one sample"));
    }
    let mut acc = 0.0;
    for s in samples {
        check_dims(codebook.dim(), s.dim())?;
        acc += nearest(codebook, s.as_slice()).1;
    }
    Ok(acc / samples.len() as f64)
}
