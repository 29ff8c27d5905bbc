//! Closed-form reconstruction-error envelope and decoding-error bounds for
//! nearest-codeword denoising under AWGN.

use std::f64::consts::{LN_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::signal::{check_dims, dot, squared_distance, Signal};

/// Gaussian tail `Q(t) = P(Z > t)` for standard normal `Z`.
pub fn q_function(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::domain("Q(t) undefined for NaN"));
    }
    Ok(0.5 * libm::erfc(t / SQRT_2))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

/// Two-sided high-probability envelope on `||x - x_hat||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    /// `sqrt(D(P))`
    pub lower: f64,
    pub upper: f64,
    /// `max(0, 1 - 2^(2 - eta R))`
    pub guarantee_prob: f64,
    pub eta: f64,
    pub rate_bits: u32,
    pub sigma: f64,
}

impl BoundEnvelope {
    /// True when `eta * R <= 2`, where the probability statement says nothing.
    pub fn is_vacuous(&self) -> bool {
        self.guarantee_prob == 0.0
    }
}

/// Noise-driven slack `2 sigma sqrt(2 ln2 R) (1 + 2 sqrt(eta))` added to the
/// codebook distortion in the envelope.
pub fn envelope_offset(sigma: f64, rate_bits: u32, eta: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_eta(eta)?;
    if rate_bits == 0 {
        return Err(Error::domain("rate_bits must be at least 1"));
    }
    let r = f64::from(rate_bits);
    Ok(2.0 * sigma * (2.0 * LN_2 * r).sqrt() * (1.0 + 2.0 * eta.sqrt()))
}

/// `sqrt(D(P)) <= ||x - x_hat|| <= sqrt(D(P)) + 2 sigma sqrt(2 ln2 R)(1 + 2 sqrt(eta))`
/// with probability at least `1 - 2^(2 - eta R)`.
pub fn theorem2_envelope(dp: f64, sigma: f64, rate_bits: u32, eta: f64) -> Result<BoundEnvelope> {
    if !(dp.is_finite() && dp >= 0.0) {
        return Err(Error::domain(format!("D(P) must be non-negative, got {dp}")));
    }
    let offset = envelope_offset(sigma, rate_bits, eta)?;
    let lower = dp.sqrt();
    let guarantee_prob = (1.0 - 2f64.powf(2.0 - eta * f64::from(rate_bits))).max(0.0);
    Ok(BoundEnvelope {
        lower,
        upper: lower + offset,
        guarantee_prob,
        eta,
        rate_bits,
        sigma,
    })
}

/// Tail argument `(||c_m - c_v|| / 2 + <d, u>) / sigma`, `u = (c_v - c_m)/||c_v - c_m||`.
/// `None` when the codewords coincide.
fn pairwise_argument(cm: &[f64], cv: &[f64], d: &[f64], sigma: f64) -> Option<f64> {
    let sep = squared_distance(cm, cv).sqrt();
    if sep == 0.0 {
        return None;
    }
    let diff: Vec<f64> = cv.iter().zip(cm).map(|(v, m)| v - m).collect();
    let proj = dot(d, &diff) / sep;
    Some((0.5 * sep + proj) / sigma)
}

/// Probability that `c_v` beats the correct codeword `c_m` when
/// `y = c_m - d + n`, `n ~ N(0, sigma^2 I)`.
pub fn pairwise_error_prob(c_m: &Signal, c_v: &Signal, d: &Signal, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_dims(c_m.dim(), c_v.dim())?;
    check_dims(c_m.dim(), d.dim())?;
    let arg = pairwise_argument(c_m.as_slice(), c_v.as_slice(), d.as_slice(), sigma)
        .ok_or_else(|| Error::DegenerateCodewords("c_m and c_v coincide".into()))?;
    q_function(arg)
}

/// `(1/M) sum_m sum_{v != m} Q(arg(m, v))`, clamped at 1. Partial sums per
/// `m` are reduced in index order.
fn averaged_pair_sum(
    codebook: &Codebook,
    sigma: f64,
    term: impl Fn(&[f64], &[f64]) -> f64 + Sync,
) -> Result<f64> {
    check_sigma(sigma)?;
    codebook.ensure_distinct()?;
    let cw = codebook.codewords();
    let partials: Vec<f64> = (0..cw.len())
        .into_par_iter()
        .map(|m| {
            let mut acc = 0.0;
            for (v, cv) in cw.iter().enumerate() {
                if v != m {
                    acc += term(cw[m].as_slice(), cv.as_slice());
                }
            }
            acc
        })
        .collect();
    let mut total = 0.0;
    for p in partials {
        total += p;
    }
    Ok((total / cw.len() as f64).min(1.0))
}

/// Union bound on the decoding error probability for distortion vector
/// `d = x_tilde - x`.
pub fn union_bound_pe(codebook: &Codebook, d: &Signal, sigma: f64) -> Result<f64> {
    check_dims(codebook.dim(), d.dim())?;
    let d = d.as_slice();
    averaged_pair_sum(codebook, sigma, |cm, cv| {
        let arg = pairwise_argument(cm, cv, d, sigma).expect("codewords checked distinct");
        0.5 * libm::erfc(arg / SQRT_2)
    })
}

/// Direction-free version of [`union_bound_pe`]: the projection of `d` is
/// replaced by its worst value `-sqrt(dP)`.
pub fn worst_case_union_bound(codebook: &Codebook, dp: f64, sigma: f64) -> Result<f64> {
    if !(dp.is_finite() && dp >= 0.0) {
        return Err(Error::domain(format!("D(P) must be non-negative, got {dp}")));
    }
    let radius = dp.sqrt();
    averaged_pair_sum(codebook, sigma, |cm, cv| {
        let arg = (0.5 * squared_distance(cm, cv).sqrt() - radius) / sigma;
        0.5 * libm::erfc(arg / SQRT_2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Normal CDF by Marsaglia's Taylor series; independent of erfc.
    fn phi_series(t: f64) -> f64 {
        let mut term = t;
        let mut sum = t;
        let t2 = t * t;
        let mut k = 1.0;
        while term.abs() > 1e-300 && k < 2000.0 {
            term *= t2 / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        0.5 + sum * (-0.5 * t2).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn random_codebook(rng: &mut ChaCha8Rng, rate: u32, dim: usize) -> Codebook {
        let cw = (0..1usize << rate)
            .map(|_| Signal::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).unwrap())
            .collect();
        Codebook::new(rate, cw).unwrap()
    }

    fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Signal {
        Signal::new((0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .unwrap()
            .unit()
            .unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_function(0.0).unwrap(), 0.5);
        let q1 = q_function(1.0).unwrap();
        assert!((q1 - (1.0 - phi_series(1.0))).abs() < 1e-12);
        assert!((q1 - 0.158655).abs() < 1e-6);
        assert!(q_function(f64::NAN).is_err());
    }

    #[test]
    fn q_matches_series_oracle() {
        let mut t = -8.0;
        while t <= 8.0 {
            let q = q_function(t).unwrap();
            assert!((q - (1.0 - phi_series(t))).abs() <= 1e-12, "t = {t}");
            t += 0.0625;
        }
    }

    proptest! {
        #[test]
        fn q_complement(t in -30.0..30.0f64) {
            let sum = q_function(t).unwrap() + q_function(-t).unwrap();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn q_strictly_decreasing(a in -8.0..8.0f64, gap in 1e-3..4.0f64) {
            let (qa, qb) = (q_function(a).unwrap(), q_function(a + gap).unwrap());
            prop_assert!(qb < qa);
            prop_assert!(qa > 0.0 && qa < 1.0);
        }
    }

    #[test]
    fn envelope_examples() {
        let e = theorem2_envelope(0.0, 1.0, 9, 4.0 / 9.0).unwrap();
        let expected = 2.0 * (2.0 * LN_2 * 9.0).sqrt() * (7.0 / 3.0);
        assert!((e.upper - expected).abs() < 1e-12);
        assert!((e.upper - 16.4837).abs() < 1e-4);
        assert!((e.guarantee_prob - 0.75).abs() < 1e-12);
        assert_eq!(e.lower, 0.0);

        let e = theorem2_envelope(4.0, 1e-12, 5, 0.5).unwrap();
        assert_eq!(e.lower, 2.0);
        assert!((e.upper - 2.0).abs() < 1e-10);

        let e = theorem2_envelope(1.0, 1.0, 2, 0.5).unwrap();
        assert_eq!(e.guarantee_prob, 0.0);
        assert!(e.is_vacuous());
    }

    #[test]
    fn envelope_domain_errors() {
        for eta in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            assert!(theorem2_envelope(1.0, 1.0, 4, eta).is_err());
        }
        assert!(theorem2_envelope(-1.0, 1.0, 4, 0.5).is_err());
        assert!(theorem2_envelope(1.0, 0.0, 4, 0.5).is_err());
        assert!(theorem2_envelope(1.0, 1.0, 0, 0.5).is_err());
    }

    #[test]
    fn envelope_upper_increasing_in_each_parameter() {
        let base = |s: f64, r: u32, e: f64| theorem2_envelope(0.25, s, r, e).unwrap().upper;
        for i in 1..50 {
            let lo = i as f64 * 0.1;
            assert!(base(lo, 4, 0.5) < base(lo + 0.1, 4, 0.5));
        }
        for r in 1..30 {
            assert!(base(1.0, r, 0.5) < base(1.0, r + 1, 0.5));
        }
        for i in 1..98 {
            let e = i as f64 * 0.01;
            assert!(base(1.0, 4, e) < base(1.0, 4, e + 0.01));
        }
    }

    #[test]
    fn pairwise_examples() {
        let (cm, cv) = (sig(&[0.0, 0.0]), sig(&[2.0, 0.0]));
        let p = pairwise_error_prob(&cm, &cv, &sig(&[0.0, 0.0]), 1.0).unwrap();
        assert!((p - (1.0 - phi_series(1.0))).abs() < 1e-12);
        let p = pairwise_error_prob(&cm, &cv, &sig(&[-1.0, 0.0]), 1.0).unwrap();
        assert_eq!(p, 0.5);
        assert!(matches!(
            pairwise_error_prob(&cm, &cm, &sig(&[0.0, 0.0]), 1.0),
            Err(Error::DegenerateCodewords(_))
        ));
    }

    #[test]
    fn pairwise_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let v = |rng: &mut ChaCha8Rng| sig(&(0..5).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>());
            let (cm, cv, d) = (v(&mut rng), v(&mut rng), v(&mut rng));
            let sigma = rng.random_range(0.2..3.0);
            let k = rng.random_range(0.01..100.0);
            let base = pairwise_error_prob(&cm, &cv, &d, sigma).unwrap();
            let scaled = pairwise_error_prob(
                &cm.scale(k).unwrap(),
                &cv.scale(k).unwrap(),
                &d.scale(k).unwrap(),
                sigma * k,
            )
            .unwrap();
            assert!((base - scaled).abs() < 1e-12);
        }
    }

    #[test]
    fn union_bound_two_codewords() {
        let cb = Codebook::new(1, vec![sig(&[0.0, 0.0]), sig(&[3.0, 1.0])]).unwrap();
        let zero = Signal::zeros(2).unwrap();
        let sigma = 0.8;
        let ub = union_bound_pe(&cb, &zero, sigma).unwrap();
        let single = q_function(10f64.sqrt() / (2.0 * sigma)).unwrap();
        assert!((ub - single).abs() < 1e-15);
    }

    #[test]
    fn union_bound_vanishes_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cb = random_codebook(&mut rng, 3, 4);
        let d = random_direction(&mut rng, 4).scale(1e-3).unwrap();
        assert!(union_bound_pe(&cb, &d, 1e-4).unwrap() < 1e-100);
    }

    #[test]
    fn union_bound_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let cb = random_codebook(&mut rng, 2, 3);
            let d = random_direction(&mut rng, 3).scale(0.3).unwrap();
            let sigma = rng.random_range(0.2..2.0);
            let cw = cb.codewords();
            let mut oracle = 0.0;
            for m in 0..4 {
                for v in 0..4 {
                    if m == v {
                        continue;
                    }
                    let diff = cw[v].sub(&cw[m]).unwrap();
                    let sep = diff.norm();
                    let proj = crate::signal::inner_product(&d, &diff).unwrap() / sep;
                    oracle += 1.0 - phi_series((sep / 2.0 + proj) / sigma);
                }
            }
            let oracle = (oracle / 4.0).min(1.0);
            assert!((union_bound_pe(&cb, &d, sigma).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn union_bound_rejects_duplicates() {
        let cb = Codebook::new(1, vec![sig(&[1.0]), sig(&[1.0])]).unwrap();
        assert!(matches!(
            union_bound_pe(&cb, &sig(&[0.0]), 1.0),
            Err(Error::DegenerateCodewords(_))
        ));
        assert!(worst_case_union_bound(&cb, 0.0, 1.0).is_err());
    }

    #[test]
    fn union_bound_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cb = random_codebook(&mut rng, 5, 2);
        assert_eq!(union_bound_pe(&cb, &Signal::zeros(2).unwrap(), 50.0).unwrap(), 1.0);
    }

    #[test]
    fn doubling_separation_never_raises_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let cb = random_codebook(&mut rng, 3, 4);
            let cw = cb.codewords();
            let mut min_half = f64::INFINITY;
            for (i, a) in cw.iter().enumerate() {
                for b in &cw[i + 1..] {
                    min_half = min_half.min(0.5 * a.sub(b).unwrap().norm());
                }
            }
            // Keep every tail argument non-negative.
            let d = random_direction(&mut rng, 4).scale(0.9 * min_half).unwrap();
            let doubled = Codebook::new(3, cw.iter().map(|c| c.scale(2.0).unwrap()).collect()).unwrap();
            let sigma = rng.random_range(0.1..2.0);
            let before = union_bound_pe(&cb, &d, sigma).unwrap();
            let after = union_bound_pe(&doubled, &d.scale(2.0).unwrap(), sigma).unwrap();
            assert!(after <= before);
        }
    }

    #[test]
    fn worst_case_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cb = random_codebook(&mut rng, 3, 4);
        let zero = Signal::zeros(4).unwrap();
        assert_eq!(
            worst_case_union_bound(&cb, 0.0, 0.7).unwrap(),
            union_bound_pe(&cb, &zero, 0.7).unwrap()
        );

        let pair = Codebook::new(1, vec![sig(&[0.0, 0.0]), sig(&[2.0, 0.0])]).unwrap();
        assert!(worst_case_union_bound(&pair, 1.0, 0.5).unwrap() >= 0.5);
        assert!(worst_case_union_bound(&pair, 4.0, 0.5).unwrap() >= 0.5);
        assert!(worst_case_union_bound(&pair, -1.0, 0.5).is_err());
    }

    #[test]
    fn worst_case_dominates_every_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for rate in [1, 2, 4] {
            let cb = random_codebook(&mut rng, rate, 6);
            for dp in [0.01, 0.3, 2.0] {
                let worst = worst_case_union_bound(&cb, dp, 0.6).unwrap();
                for _ in 0..100 {
                    let d = random_direction(&mut rng, 6).scale(dp.sqrt()).unwrap();
                    assert!(union_bound_pe(&cb, &d, 0.6).unwrap() <= worst + 1e-12);
                }
            }
        }
    }
}
