//! Seeded Monte Carlo harness for the reconstruction-error envelope and the
//! decoding error probability.
//!
//! Trial `i` draws everything from `derive_seed(master_seed, i)`, results
//! land in a slot per trial, and aggregation walks the slots in order. The
//! report is therefore identical for any rayon worker count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{envelope_offset, theorem2_envelope};
use crate::codebook::{CodeIndex, Codebook};
use crate::codec::nearest;
use crate::denoise::nn_denoise;
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed, GENERATOR_NAME};
use crate::signal::{check_dims, dot, l2_distance, squared_norm, Signal};

/// Floating-point slack for the per-trial intermediate inequality.
pub const PART1_SLACK: f64 = 1e-9;

/// Confidence level of every reported Wilson interval.
pub const WILSON_CONFIDENCE: f64 = 0.95;

/// `x + n`, `n_i ~ N(0, sigma^2)` i.i.d. from the stream seeded by `seed`.
pub fn sample_awgn(x: &Signal, sigma: f64, seed: u64) -> Result<Signal> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    let mut rng = rng::stream(seed);
    let values = x
        .as_slice()
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Signal::new(values)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::domain("Wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::domain(format!(
            "successes {successes} exceed trials {trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if successes == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((low, high))
}

/// Where clean signals come from.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    /// Uniform draw from the codebook itself.
    Codewords,
    /// Uniform draw from a pool of clean samples.
    Samples(&'a [Signal]),
}

#[derive(Clone, Copy, Debug)]
pub struct TrialConfig<'a> {
    pub codebook: &'a Codebook,
    pub sigma: f64,
    pub eta: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    pub source: Source<'a>,
}

impl TrialConfig<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::domain("n_trials must be at least 1"));
        }
        // Checks sigma and eta.
        envelope_offset(self.sigma, self.codebook.rate_bits(), self.eta)?;
        if let Source::Samples(pool) = self.source {
            if pool.is_empty() {
                return Err(Error::domain("sample pool is empty"));
            }
            for s in pool {
                check_dims(self.codebook.dim(), s.dim())?;
            }
        }
        Ok(())
    }
}

/// Outcome of one denoising trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// One-based position of `x` in the codebook or the sample pool.
    pub source_index: usize,
    /// `||x - x_hat||`
    pub err_norm: f64,
    /// `||x - x_tilde||`
    pub dist_norm: f64,
    /// `dist_norm` plus the envelope offset.
    pub upper: f64,
    pub violated: bool,
    pub decode_error: bool,
    /// Smallest `||x - c_m||` over the whole codebook, by direct scan.
    pub min_codeword_dist: f64,
    /// `||e||^2`
    pub part1_lhs: f64,
    /// `||d||^2 + 2|<n, e>| + 2|<n, d>|`
    pub part1_rhs: f64,
    pub decoded: CodeIndex,
    pub reference: CodeIndex,
}

impl TrialReport {
    /// `violation_wilson_high - violation_rate`
    pub fn violation_half_width(&self) -> f64 {
        self.violation_wilson_high - self.violation_rate
    }
}

impl TrialRecord {
    pub fn lower_bound_holds(&self) -> bool {
        self.err_norm >= self.min_codeword_dist
    }

    pub fn part1_holds(&self) -> bool {
        self.part1_lhs <= self.part1_rhs + PART1_SLACK
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub generator: String,
    pub master_seed: u64,
    pub n_trials: usize,
    pub rate_bits: u32,
    pub dim: usize,
    pub sigma: f64,
    pub eta: f64,
    pub envelope_offset: f64,
    pub guarantee_prob: f64,
    pub mean_err_sq: f64,
    pub violations: u64,
    pub violation_rate: f64,
    pub violation_wilson_low: f64,
    pub violation_wilson_high: f64,
    pub decode_errors: u64,
    pub empirical_pe: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub lower_bound_failures: u64,
    pub part1_failures: u64,
    pub trials: Vec<TrialRecord>,
}

fn run_trial(config: &TrialConfig<'_>, offset: f64, trial: usize) -> Result<TrialRecord> {
    let codebook = config.codebook;
    let seed = derive_seed(config.master_seed, trial as u64);
    let mut rng = rng::stream(seed);
    let (source_index, x) = match config.source {
        Source::Codewords => {
            let m = rng.random_range(0..codebook.size());
            (m + 1, &codebook.codewords()[m])
        }
        Source::Samples(pool) => {
            let i = rng.random_range(0..pool.len());
            (i + 1, &pool[i])
        }
    };
    let y = sample_awgn(x, config.sigma, derive_seed(seed, 0))?;

    let (decoded, x_hat) = nn_denoise(codebook, &y)?;
    let (ref_offset, _) = nearest(codebook, x.as_slice());
    let reference = CodeIndex::from_offset(ref_offset);
    let x_tilde = &codebook.codewords()[ref_offset];

    let e = x_hat.sub(x)?;
    let d = x_tilde.sub(x)?;
    let n = y.sub(x)?;
    let err_norm = l2_distance(x, &x_hat)?;
    let dist_norm = l2_distance(x, x_tilde)?;
    let min_codeword_dist = codebook
        .codewords()
        .iter()
        .map(|c| l2_distance(x, c))
        .try_fold(f64::INFINITY, |acc, r| r.map(|v| acc.min(v)))?;
    let part1_lhs = squared_norm(e.as_slice());
    let part1_rhs = squared_norm(d.as_slice())
        + 2.0 * dot(n.as_slice(), e.as_slice()).abs()
        + 2.0 * dot(n.as_slice(), d.as_slice()).abs();
    let upper = dist_norm + offset;

    Ok(TrialRecord {
        trial,
        source_index,
        err_norm,
        dist_norm,
        upper,
        violated: err_norm > upper,
        decode_error: decoded != reference,
        min_codeword_dist,
        part1_lhs,
        part1_rhs,
        decoded,
        reference,
    })
}

/// Runs `n_trials` denoising trials and checks each against the
/// per-instance envelope `||x - x_hat|| <= ||d|| + offset`.
pub fn run_denoise_trials(config: &TrialConfig<'_>) -> Result<TrialReport> {
    config.validate()?;
    let offset = envelope_offset(config.sigma, config.codebook.rate_bits(), config.eta)?;
    let envelope = theorem2_envelope(0.0, config.sigma, config.codebook.rate_bits(), config.eta)?;
    let trials = (0..config.n_trials)
        .into_par_iter()
        .map(|i| run_trial(config, offset, i))
        .collect::<Result<Vec<_>>>()?;

    let mut sum_err_sq = 0.0;
    let (mut violations, mut decode_errors, mut lower_fail, mut part1_fail) = (0u64, 0u64, 0u64, 0u64);
    for t in &trials {
        sum_err_sq += t.err_norm * t.err_norm;
        violations += u64::from(t.violated);
        decode_errors += u64::from(t.decode_error);
        lower_fail += u64::from(!t.lower_bound_holds());
        part1_fail += u64::from(!t.part1_holds());
    }
    let n = config.n_trials as u64;
    let (wilson_low, wilson_high) = wilson_interval(decode_errors, n, WILSON_CONFIDENCE)?;
    let (violation_wilson_low, violation_wilson_high) = wilson_interval(violations, n, WILSON_CONFIDENCE)?;
    Ok(TrialReport {
        generator: GENERATOR_NAME.to_string(),
        master_seed: config.master_seed,
        n_trials: config.n_trials,
        rate_bits: config.codebook.rate_bits(),
        dim: config.codebook.dim(),
        sigma: config.sigma,
        eta: config.eta,
        envelope_offset: offset,
        guarantee_prob: envelope.guarantee_prob,
        mean_err_sq: sum_err_sq / n as f64,
        violations,
        violation_rate: violations as f64 / n as f64,
        violation_wilson_low,
        violation_wilson_high,
        decode_errors,
        empirical_pe: decode_errors as f64 / n as f64,
        wilson_low,
        wilson_high,
        lower_bound_failures: lower_fail,
        part1_failures: part1_fail,
        trials,
    })
}

/// Monte Carlo estimate of the codeword-identification error probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeEstimate {
    pub errors: u64,
    pub trials: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl PeEstimate {
    /// Distance from the estimate up to the top of its interval.
    pub fn upper_half_width(&self) -> f64 {
        self.wilson_high - self.estimate
    }
}

/// Draws `c_m` uniformly, observes `y = c_m - d + n` with
/// `d = sqrt(dP) * unit(direction)`, and counts `nn_denoise(y) != m`.
pub fn empirical_pe(
    codebook: &Codebook,
    d_direction: Option<&Signal>,
    dp: f64,
    sigma: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<PeEstimate> {
    if n_trials == 0 {
        return Err(Error::domain("n_trials must be at least 1"));
    }
    if !(dp.is_finite() && dp >= 0.0) {
        return Err(Error::domain(format!("D(P) must be non-negative, got {dp}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    let d = match (d_direction, dp > 0.0) {
        (_, false) => Signal::zeros(codebook.dim())?,
        (None, true) => return Err(Error::domain("D(P) > 0 needs a direction for d")),
        (Some(dir), true) => {
            check_dims(codebook.dim(), dir.dim())?;
            dir.unit()?.scale(dp.sqrt())?
        }
    };
    let sources = codebook
        .codewords()
        .iter()
        .map(|c| c.sub(&d))
        .collect::<Result<Vec<_>>>()?;

    let outcomes = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i as u64);
            let mut rng = rng::stream(seed);
            let m = rng.random_range(0..codebook.size());
            let y = sample_awgn(&sources[m], sigma, derive_seed(seed, 0))?;
            Ok(nn_denoise(codebook, &y)?.0.offset() != m)
        })
        .collect::<Result<Vec<bool>>>()?;

    let errors = outcomes.iter().filter(|&&e| e).count() as u64;
    let trials = n_trials as u64;
    let (wilson_low, wilson_high) = wilson_interval(errors, trials, WILSON_CONFIDENCE)?;
    Ok(PeEstimate {
        errors,
        trials,
        estimate: errors as f64 / trials as f64,
        wilson_low,
        wilson_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{q_function, union_bound_pe};

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn gaussian_codebook(seed: u64, rate: u32, dim: usize) -> Codebook {
        let mut rng = rng::stream(seed);
        let cw = (0..1usize << rate)
            .map(|_| Signal::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).unwrap())
            .collect();
        Codebook::new(rate, cw).unwrap()
    }

    #[test]
    fn awgn_vanishing_noise() {
        let x = sig(&[1.0, -2.0, 3.5]);
        let y = sample_awgn(&x, 1e-12, 4).unwrap();
        assert!(l2_distance(&x, &y).unwrap() < 1e-10);
        assert!(sample_awgn(&x, 0.0, 4).is_err());
    }

    #[test]
    fn awgn_deterministic() {
        let x = sig(&[0.0; 8]);
        let a = sample_awgn(&x, 1.0, 99).unwrap();
        let b = sample_awgn(&x, 1.0, 99).unwrap();
        let bits = |s: &Signal| s.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&sample_awgn(&x, 1.0, 100).unwrap()));
    }

    #[test]
    fn awgn_moments() {
        let x = sig(&[1.5]);
        let sigma = 2.0;
        let n = 1_000_000usize;
        let draws: Vec<f64> = (0..n)
            .map(|i| sample_awgn(&x, sigma, derive_seed(31, i as u64)).unwrap()[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.5).abs() <= 3.0 * sigma / (n as f64).sqrt(), "mean {mean}");
        // SE of the sample variance of a Gaussian: sigma^2 sqrt(2 / (n - 1))
        let var_se = sigma * sigma * (2.0 / (n - 1) as f64).sqrt();
        assert!((var - 4.0).abs() <= 3.0 * var_se, "var {var}");
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        // Closed form with z = 1.959963984540054 evaluated by hand.
        let z = 1.959963984540054f64;
        let half = z / (1.0 + z * z / 100.0) * (0.25 / 100.0 + z * z / 40000.0).sqrt();
        assert!((lo - (0.5 - half)).abs() < 1e-12);
        assert!((lo - 0.40384).abs() < 1e-4 && (hi - 0.59616).abs() < 1e-4);
        assert_eq!(wilson_interval(0, 37, 0.95).unwrap().0, 0.0);
        assert_eq!(wilson_interval(37, 37, 0.95).unwrap().1, 1.0);
    }

    #[test]
    fn wilson_domain_errors() {
        assert!(wilson_interval(1, 0, 0.95).is_err());
        assert!(wilson_interval(5, 4, 0.95).is_err());
        assert!(wilson_interval(1, 4, 1.0).is_err());
        assert!(wilson_interval(1, 4, 0.0).is_err());
    }

    #[test]
    fn wilson_brackets_estimate() {
        for n in [1u64, 2, 7, 100, 10_000] {
            for k in 0..=n.min(50) {
                let (lo, hi) = wilson_interval(k, n, 0.95).unwrap();
                let p = k as f64 / n as f64;
                assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
            }
        }
    }

    #[test]
    fn noiseless_trials_are_perfect() {
        let cb = gaussian_codebook(1, 4, 6);
        let config = TrialConfig {
            codebook: &cb,
            sigma: 1e-12,
            eta: 0.5,
            n_trials: 500,
            master_seed: 3,
            source: Source::Codewords,
        };
        let report = run_denoise_trials(&config).unwrap();
        assert_eq!(report.violation_rate, 0.0);
        assert_eq!(report.empirical_pe, 0.0);
        assert_eq!(report.part1_failures, 0);
    }

    #[test]
    fn per_trial_invariants_with_sample_pool() {
        let cb = gaussian_codebook(2, 5, 8);
        let mut rng = rng::stream(77);
        let pool: Vec<Signal> = (0..300)
            .map(|_| Signal::new((0..8).map(|_| 1.3 * rng.sample::<f64, _>(StandardNormal)).collect()).unwrap())
            .collect();
        for sigma in [0.1, 1.0, 5.0] {
            let config = TrialConfig {
                codebook: &cb,
                sigma,
                eta: 0.3,
                n_trials: 2000,
                master_seed: 11,
                source: Source::Samples(&pool),
            };
            let report = run_denoise_trials(&config).unwrap();
            assert_eq!(report.part1_failures, 0);
            assert_eq!(report.lower_bound_failures, 0);
            assert_eq!(report.violation_rate, report.violations as f64 / 2000.0);
            for t in &report.trials {
                assert!(t.err_norm >= t.dist_norm);
                assert_eq!(t.dist_norm, t.min_codeword_dist);
            }
        }
    }

    #[test]
    fn config_validation() {
        let cb = gaussian_codebook(3, 2, 3);
        let base = TrialConfig {
            codebook: &cb,
            sigma: 1.0,
            eta: 0.5,
            n_trials: 10,
            master_seed: 0,
            source: Source::Codewords,
        };
        assert!(run_denoise_trials(&TrialConfig { n_trials: 0, ..base }).is_err());
        assert!(run_denoise_trials(&TrialConfig { eta: 1.5, ..base }).is_err());
        assert!(run_denoise_trials(&TrialConfig { sigma: -1.0, ..base }).is_err());
        let bad_pool = vec![sig(&[1.0])];
        assert!(matches!(
            run_denoise_trials(&TrialConfig { source: Source::Samples(&bad_pool), ..base }),
            Err(Error::Dimension { .. })
        ));
        assert!(run_denoise_trials(&TrialConfig { source: Source::Samples(&[]), ..base }).is_err());
    }

    #[test]
    fn pe_two_codewords_matches_tail() {
        let cb = Codebook::new(1, vec![sig(&[0.0, 0.0]), sig(&[2.0, 0.0])]).unwrap();
        let est = empirical_pe(&cb, None, 0.0, 1.0, 100_000, 5).unwrap();
        let q1 = q_function(1.0).unwrap();
        let se = (q1 * (1.0 - q1) / 1e5).sqrt();
        assert!((est.estimate - q1).abs() <= 3.0 * se, "estimate {}", est.estimate);
    }

    #[test]
    fn pe_noiseless_is_zero() {
        let cb = gaussian_codebook(4, 3, 4);
        assert_eq!(empirical_pe(&cb, None, 0.0, 1e-9, 2000, 1).unwrap().estimate, 0.0);
    }

    #[test]
    fn pe_needs_direction() {
        let cb = gaussian_codebook(5, 1, 2);
        assert!(empirical_pe(&cb, None, 0.5, 1.0, 10, 1).is_err());
        let zero = Signal::zeros(2).unwrap();
        assert!(empirical_pe(&cb, Some(&zero), 0.5, 1.0, 10, 1).is_err());
        assert!(empirical_pe(&cb, None, 0.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn pe_dominated_by_union_bound() {
        let cb = gaussian_codebook(6, 3, 4);
        let dir = sig(&[1.0, -1.0, 0.5, 0.0]);
        for (dp, sigma) in [(0.0, 0.5), (0.05, 0.5), (0.2, 1.0)] {
            let est = empirical_pe(&cb, Some(&dir), dp, sigma, 10_000, 9).unwrap();
            let d = dir.unit().unwrap().scale(dp.sqrt()).unwrap();
            let ub = union_bound_pe(&cb, &d, sigma).unwrap();
            assert!(est.estimate <= ub + est.upper_half_width());
        }
    }

    #[test]
    fn reports_independent_of_worker_count() {
        let cb = gaussian_codebook(7, 4, 6);
        let config = TrialConfig {
            codebook: &cb,
            sigma: 0.8,
            eta: 0.5,
            n_trials: 3000,
            master_seed: 2024,
            source: Source::Codewords,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (run_denoise_trials(&config).unwrap(), empirical_pe(&cb, None, 0.0, 0.8, 3000, 2024).unwrap()))
        };
        assert_eq!(run(1), run(4));
    }
}
