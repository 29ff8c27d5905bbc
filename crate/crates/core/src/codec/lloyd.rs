//! Generalized Lloyd (k-means) codebook design.

use rayon::prelude::*;

use super::{build_random_codebook, nearest};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::signal::{squared_distance, Signal};

#[derive(Clone, Debug)]
pub struct LloydResult {
    pub codebook: Codebook,
    /// Mean squared distortion of the accepted codebook after each iteration.
    pub distortion_history: Vec<f64>,
    /// Distortion of the random initialization.
    pub initial_distortion: f64,
}

/// Assigns every sample to its nearest centroid. Returns per-sample
/// (offset, squared distance) in sample order.
fn assign(codebook: &Codebook, samples: &[Signal]) -> Vec<(usize, f64)> {
    samples
        .par_iter()
        .map(|s| nearest(codebook, s.as_slice()))
        .collect()
}

fn mean_distortion(assignment: &[(usize, f64)]) -> f64 {
    let mut acc = 0.0;
    for &(_, d) in assignment {
        acc += d;
    }
    acc / assignment.len() as f64
}

/// Runs Lloyd iterations from a [`build_random_codebook`] start.
///
/// Each iteration moves every centroid to the mean of its cell, reseeds
/// empty cells with the samples farthest from their updated centroids, then
/// reassigns. Iteration stops once the relative decrease falls below
/// `rel_tol` or after `max_iters` iterations. A step that would raise the
/// distortion (possible only through rounding) is discarded and ends the
/// run, so the history is non-increasing.
pub fn lloyd_codebook(
    training_samples: &[Signal],
    rate_bits: u32,
    max_iters: usize,
    rel_tol: f64,
    seed: u64,
) -> Result<LloydResult> {
    if max_iters == 0 {
        return Err(Error::domain("max_iters must be at least 1"));
    }
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(Error::domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let mut codebook = build_random_codebook(training_samples, rate_bits, seed)?;
    let dim = codebook.dim();
    let size = codebook.size();

    let mut assignment = assign(&codebook, training_samples);
    let initial_distortion = mean_distortion(&assignment);
    let mut prev = initial_distortion;
    let mut history = Vec::new();

    for _ in 0..max_iters {
        let mut sums = vec![0.0; size * dim];
        let mut counts = vec![0usize; size];
        for (s, &(cell, _)) in training_samples.iter().zip(&assignment) {
            counts[cell] += 1;
            for (acc, v) in sums[cell * dim..(cell + 1) * dim].iter_mut().zip(s.as_slice()) {
                *acc += v;
            }
        }
        let mut centroids: Vec<Vec<f64>> = (0..size)
            .map(|cell| {
                if counts[cell] == 0 {
                    codebook.codewords()[cell].as_slice().to_vec()
                } else {
                    let n = counts[cell] as f64;
                    sums[cell * dim..(cell + 1) * dim].iter().map(|v| v / n).collect()
                }
            })
            .collect();

        let empty: Vec<usize> = (0..size).filter(|&c| counts[c] == 0).collect();
        if !empty.is_empty() {
            let mut far: Vec<(usize, f64)> = training_samples
                .iter()
                .zip(&assignment)
                .enumerate()
                .map(|(i, (s, &(cell, _)))| (i, squared_distance(s.as_slice(), &centroids[cell])))
                .collect();
            // Descending distance, ties by sample order.
            far.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            for (cell, &(sample, _)) in empty.iter().zip(&far) {
                centroids[*cell] = training_samples[sample].as_slice().to_vec();
            }
        }

        let candidate = Codebook::new(
            rate_bits,
            centroids.into_iter().map(Signal::new).collect::<Result<_>>()?,
        )?;
        let next_assignment = assign(&candidate, training_samples);
        let cur = mean_distortion(&next_assignment);
        if cur > prev {
            history.push(prev);
            break;
        }
        codebook = candidate;
        assignment = next_assignment;
        history.push(cur);
        if prev == 0.0 || (prev - cur) / prev < rel_tol {
            break;
        }
        prev = cur;
    }

    Ok(LloydResult {
        codebook,
        distortion_history: history,
        initial_distortion,
    })
}
