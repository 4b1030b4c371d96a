//! Click-level Monte Carlo: categorical sampling of joint detector outcomes.
//!
//! Each pair yields exactly one of the four joint outcomes (D1,D2), (D1,D4),
//! (D3,D2), (D3,D4) — ideal unit-efficiency detectors. Sampling happens at
//! the joint-outcome level: drawing each arm's click independently cannot
//! reproduce the coincidence correlations, so the joint law is sampled
//! directly. Serves as the statistical oracle for the analytic rates.

use rand::Rng;

use crate::coincidence::joint_probabilities;
use crate::ensemble::{EnsembleConfig, PairState};
use crate::singles::AnalyzerSettings;
use crate::streams;
use crate::{Error, Result, Scalar};

/// Tallies over the four joint detector outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub n_ab: u64,
    pub n_ad: u64,
    pub n_cb: u64,
    pub n_cd: u64,
}

impl OutcomeCounts {
    pub fn n_total(&self) -> u64 {
        self.n_ab + self.n_ad + self.n_cb + self.n_cd
    }

    /// Merges tallies from two chunks.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            n_ab: self.n_ab + other.n_ab,
            n_ad: self.n_ad + other.n_ad,
            n_cb: self.n_cb + other.n_cb,
            n_cd: self.n_cd + other.n_cd,
        }
    }
}

/// A rate (or statistic) estimate with its standard error and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate<R> {
    pub value: R,
    pub stderr: R,
    pub n: u64,
}

/// Estimates for the four detector pairs, in units of `I0²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimates<R> {
    pub ab: RateEstimate<R>,
    pub ad: RateEstimate<R>,
    pub cb: RateEstimate<R>,
    pub cd: RateEstimate<R>,
}

impl<R: Scalar> RateEstimates<R> {
    pub fn total(&self) -> R {
        self.ab.value + self.ad.value + self.cb.value + self.cd.value
    }
}

/// Single-detector click probabilities recovered from joint tallies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginals<R> {
    pub d1: R,
    pub d2: R,
    pub d3: R,
    pub d4: R,
}

impl<R: Scalar> Marginals<R> {
    pub fn as_array(&self) -> [R; 4] {
        [self.d1, self.d2, self.d3, self.d4]
    }
}

/// Draws `config.n` independent joint outcomes from the Born-rule
/// probabilities at `settings`. Deterministic under the seed; counts sum
/// exactly to `n`. Uses the same counter-based stream layout as ensemble
/// generation, so chunked sampling merges to the monolithic tally.
pub fn sample_outcomes<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    state: &PairState<R>,
    config: &EnsembleConfig,
) -> Result<OutcomeCounts> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let p = joint_probabilities(settings, state);
    let [p_ab, p_ad, p_cb, _] = p.as_array().map(|x| x.to_f64().expect("probability fits f64"));
    let c1 = p_ab;
    let c2 = c1 + p_ad;
    let c3 = c2 + p_cb;
    let mut counts = OutcomeCounts::default();
    let mut rng = streams::stream_at(config.seed, 0);
    for _ in 0..config.n {
        let u: f64 = rng.gen();
        if u < c1 {
            counts.n_ab += 1;
        } else if u < c2 {
            counts.n_ad += 1;
        } else if u < c3 {
            counts.n_cb += 1;
        } else {
            counts.n_cd += 1;
        }
    }
    Ok(counts)
}

/// Converts tallies to rate estimates in `I0²` units via the flat total
/// `I0²/2`, with binomial standard errors scaled identically.
pub fn estimate_rates<R: Scalar>(
    counts: &OutcomeCounts,
    state: &PairState<R>,
) -> Result<RateEstimates<R>> {
    let n = counts.n_total();
    if n == 0 {
        return Err(Error::InvalidArgument("counts must be non-empty".into()));
    }
    let nf = R::from_u64(n).unwrap();
    let i0 = state.intensity_unit();
    let scale = i0 * i0 * R::half();
    let est = |k: u64| {
        let p = R::from_u64(k).unwrap() / nf;
        RateEstimate {
            value: p * scale,
            stderr: (p * (R::one() - p) / nf).sqrt() * scale,
            n,
        }
    };
    Ok(RateEstimates {
        ab: est(counts.n_ab),
        ad: est(counts.n_ad),
        cb: est(counts.n_cb),
        cd: est(counts.n_cd),
    })
}

/// Correlation estimate `Ê = (n_ab + n_cd − n_ad − n_cb)/n` from one tally.
pub fn estimate_correlation<R: Scalar>(counts: &OutcomeCounts) -> Result<RateEstimate<R>> {
    let n = counts.n_total();
    if n == 0 {
        return Err(Error::InvalidArgument("counts must be non-empty".into()));
    }
    let nf = R::from_u64(n).unwrap();
    let same = R::from_u64(counts.n_ab + counts.n_cd).unwrap();
    let diff = R::from_u64(counts.n_ad + counts.n_cb).unwrap();
    let e = (same - diff) / nf;
    // per-event value is ±1, so var(Ê) = (1 − Ê²)/n
    let var = (R::one() - e * e).max(R::zero()) / nf;
    Ok(RateEstimate {
        value: e,
        stderr: var.sqrt(),
        n,
    })
}

/// Monte Carlo CHSH estimate. Runs [`sample_outcomes`] at the four analyzer
/// pairs `(a,b), (a,b2), (a2,b), (a2,b2)` with sub-seeds derived from
/// `config.seed` by setting index ([`streams::mix_seed`]), combines the four
/// correlation estimates into `Ŝ`, and propagates their uncorrelated errors.
pub fn estimate_chsh<R: Scalar>(
    a: R,
    a2: R,
    b: R,
    b2: R,
    state: &PairState<R>,
    config: &EnsembleConfig,
) -> Result<RateEstimate<R>> {
    let pairs = [(a, b), (a, b2), (a2, b), (a2, b2)];
    let mut e = [R::zero(); 4];
    let mut var_sum = R::zero();
    for (i, (x, y)) in pairs.into_iter().enumerate() {
        let settings = AnalyzerSettings::new(x, y)?;
        let sub = EnsembleConfig {
            seed: streams::mix_seed(config.seed, i as u64),
            ..*config
        };
        let counts = sample_outcomes(&settings, state, &sub)?;
        let est = estimate_correlation::<R>(&counts)?;
        e[i] = est.value;
        var_sum += est.stderr * est.stderr;
    }
    Ok(RateEstimate {
        value: e[0] - e[1] + e[2] + e[3],
        stderr: var_sum.sqrt(),
        n: config.n,
    })
}

/// Click probabilities of the individual detectors; each converges to 1/2
/// at every setting (the click-level face of local randomness).
pub fn singles_marginals<R: Scalar>(counts: &OutcomeCounts) -> Result<Marginals<R>> {
    let n = counts.n_total();
    if n == 0 {
        return Err(Error::InvalidArgument("counts must be non-empty".into()));
    }
    let nf = R::from_u64(n).unwrap();
    let frac = |k: u64| R::from_u64(k).unwrap() / nf;
    Ok(Marginals {
        d1: frac(counts.n_ab + counts.n_ad),
        d2: frac(counts.n_ab + counts.n_cb),
        d3: frac(counts.n_cb + counts.n_cd),
        d4: frac(counts.n_ad + counts.n_cd),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coincidence::{canonical_chsh_angles, rate_hh};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, SQRT_2};

    fn state() -> PairState<f64> {
        PairState::standard()
    }

    fn settings(theta: f64, xi: f64) -> AnalyzerSettings<f64> {
        AnalyzerSettings::new(theta, xi).unwrap()
    }

    #[test]
    fn equal_settings_never_produce_cross_outcomes() {
        let cfg = EnsembleConfig::new(100_000, 17).unwrap();
        let counts = sample_outcomes(&settings(0.3, 0.3), &state(), &cfg).unwrap();
        assert_eq!(counts.n_ad, 0);
        assert_eq!(counts.n_cb, 0);
        assert_eq!(counts.n_total(), cfg.n);
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = EnsembleConfig::new(10_000, 99).unwrap();
        let s = settings(0.8, 0.1);
        assert_eq!(
            sample_outcomes(&s, &state(), &cfg).unwrap(),
            sample_outcomes(&s, &state(), &cfg).unwrap()
        );
    }

    #[test]
    fn all_equal_case_within_binomial_band() {
        let n = 1_000_000u64;
        let cfg = EnsembleConfig::new(n, 21).unwrap();
        let counts = sample_outcomes(&settings(FRAC_PI_4, 0.0), &state(), &cfg).unwrap();
        let band = 4.0 * (n as f64 * 0.25 * 0.75).sqrt();
        for k in [counts.n_ab, counts.n_ad, counts.n_cb, counts.n_cd] {
            assert!((k as f64 - n as f64 / 4.0).abs() < band);
        }
    }

    #[test]
    fn transmitted_pair_fraction_matches_closed_form() {
        let n = 1_000_000u64;
        let cfg = EnsembleConfig::new(n, 22).unwrap();
        let counts = sample_outcomes(&settings(FRAC_PI_8, 0.0), &state(), &cfg).unwrap();
        let p = f64::cos(FRAC_PI_8).powi(2) / 2.0;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        assert!((counts.n_ab as f64 / n as f64 - p).abs() < 4.0 * stderr);
    }

    #[test]
    fn rate_estimates_recover_closed_form() {
        let n = 1_000_000u64;
        let cfg = EnsembleConfig::new(n, 23).unwrap();
        let s = settings(FRAC_PI_3, 0.0);
        let counts = sample_outcomes(&s, &state(), &cfg).unwrap();
        let est = estimate_rates(&counts, &state()).unwrap();
        let expected = rate_hh(&s, &state());
        assert_abs_diff_eq!(expected, 1.0 / 16.0, epsilon = 1e-12);
        assert!((est.ab.value - expected).abs() < 4.0 * est.ab.stderr);
        assert_abs_diff_eq!(est.total(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_counts_give_quarter_rates() {
        let counts = OutcomeCounts {
            n_ab: 500,
            n_ad: 0,
            n_cb: 0,
            n_cd: 500,
        };
        let est = estimate_rates::<f64>(&counts, &state()).unwrap();
        assert_eq!(est.ab.value, 0.25);
        assert_eq!(est.ad.value, 0.0);
        let m = singles_marginals::<f64>(&counts).unwrap();
        assert_eq!(m.as_array(), [0.5; 4]);
    }

    #[test]
    fn empty_counts_rejected() {
        let counts = OutcomeCounts::default();
        assert!(estimate_rates::<f64>(&counts, &state()).is_err());
        assert!(singles_marginals::<f64>(&counts).is_err());
    }

    #[test]
    fn marginals_flat_across_settings() {
        let n = 100_000u64;
        let band = 4.0 * (0.25 / n as f64).sqrt();
        for k in 0..32 {
            let theta = k as f64 * std::f64::consts::TAU / 32.0;
            let cfg = EnsembleConfig::new(n, 31 + k).unwrap();
            let counts = sample_outcomes(&settings(theta, 0.4), &state(), &cfg).unwrap();
            let m = singles_marginals::<f64>(&counts).unwrap();
            for p in m.as_array() {
                assert!((p - 0.5).abs() < band);
            }
        }
    }

    #[test]
    fn chsh_estimate_reaches_tsirelson() {
        let [a, a2, b, b2] = canonical_chsh_angles::<f64>();
        let cfg = EnsembleConfig::new(1_000_000, 41).unwrap();
        let est = estimate_chsh(a, a2, b, b2, &state(), &cfg).unwrap();
        assert!((est.value - 2.0 * SQRT_2).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn chsh_estimate_degenerate_angles() {
        let cfg = EnsembleConfig::new(100_000, 43).unwrap();
        let est = estimate_chsh(0.5, 0.5, 0.5, 0.5, &state(), &cfg).unwrap();
        // E = 1 exactly at equal angles, so Ŝ = 2 with zero spread
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-12);
    }
}
