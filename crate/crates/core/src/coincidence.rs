//! Second-order (coincidence) correlation between the four detector pairs.
//!
//! Coincidence detection selects pairs born in the same crystal, which
//! deletes the mixed-origin (HV/VH) terms from the joint amplitude. What
//! survives is the `cos(θ−ξ)` / `sin(ξ−θ)` amplitude structure, full
//! visibility fringes, a settings-independent four-rate total of `I0²/2`,
//! and a `cos(2(θ−ξ))` correlation function that reaches the Tsirelson
//! bound `2√2` in the CHSH combination.

use num_complex::Complex;

use crate::ensemble::PairState;
use crate::jones::{hwp, pbs_project, Amplitude, JonesVector, PbsPort};
use crate::singles::AnalyzerSettings;
use crate::{ensure_finite, Result, Scalar};

/// Upper-arm detector port entering a coincidence: `A` (D1, transmitted) or
/// `C` (D3, reflected).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperPort {
    A,
    C,
}

/// Lower-arm detector port entering a coincidence: `B` (D2, transmitted) or
/// `D` (D4, reflected).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerPort {
    B,
    D,
}

impl From<UpperPort> for PbsPort {
    fn from(p: UpperPort) -> Self {
        match p {
            UpperPort::A => PbsPort::TransmitH,
            UpperPort::C => PbsPort::ReflectV,
        }
    }
}

impl From<LowerPort> for PbsPort {
    fn from(p: LowerPort) -> Self {
        match p {
            LowerPort::B => PbsPort::TransmitH,
            LowerPort::D => PbsPort::ReflectV,
        }
    }
}

/// Coincidence rates for the four detector pairs (D1,D2), (D1,D4), (D3,D2),
/// (D3,D4), in units of `I0²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceRates<R> {
    pub r_ab: R,
    pub r_ad: R,
    pub r_cb: R,
    pub r_cd: R,
}

impl<R: Scalar> CoincidenceRates<R> {
    /// Four-rate total; `I0²/2` independent of the analyzer settings.
    pub fn total(&self) -> R {
        self.r_ab + self.r_ad + self.r_cb + self.r_cd
    }
}

/// Normalized joint detection probabilities; sum to 1 and each single-
/// detector marginal is 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbabilities<R> {
    pub p_ab: R,
    pub p_ad: R,
    pub p_cb: R,
    pub p_cd: R,
}

impl<R: Scalar> JointProbabilities<R> {
    pub fn as_array(&self) -> [R; 4] {
        [self.p_ab, self.p_ad, self.p_cb, self.p_cd]
    }
}

// Projected single-arm amplitudes of the two photon origins, through the
// HWP + PBS pipeline. The vertical-origin term carries the source's −1
// coefficient (the ψ = π preparation).
fn origin_amplitudes<R: Scalar>(rotation: R, port: PbsPort) -> (Amplitude<R>, Amplitude<R>) {
    let plate = hwp(rotation * R::half()).expect("finite analyzer angle");
    let from_h = pbs_project(&plate.apply(&JonesVector::horizontal()), port);
    let from_v = -pbs_project(&plate.apply(&JonesVector::vertical()), port);
    (from_h, from_v)
}

/// Joint amplitude for one detector pair with an explicit combination phase
/// `ψ'` between the surviving same-origin (HH and VV) terms.
///
/// The two projected single-arm amplitudes are multiplied as a polynomial in
/// the origin tags; the mixed HV/VH terms are deleted (the coincidence
/// selection rule) and the HH and VV terms combine with relative phase `ψ'`,
/// scaled by `I0/2`. `ψ' = 0` gives the standard `cos(θ−ξ)` law; nonzero
/// values are exposed for experimentation only.
pub fn coincidence_amplitude_with_phase<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    upper: UpperPort,
    lower: LowerPort,
    state: &PairState<R>,
    psi_prime: R,
) -> Amplitude<R> {
    let (u_h, u_v) = origin_amplitudes(settings.theta(), upper.into());
    let (l_h, l_v) = origin_amplitudes(settings.xi(), lower.into());
    let hh = u_h * l_h;
    let vv = u_v * l_v;
    let phase = Complex::from_polar(R::one(), psi_prime);
    let scale = state.intensity_unit() * R::half();
    (hh + phase * vv) * scale
}

/// Joint amplitude with the standard combination phase `ψ' = 0`. The fixed
/// pair phase `ζ` cancels against its conjugate and never enters.
pub fn coincidence_amplitude<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    upper: UpperPort,
    lower: LowerPort,
    state: &PairState<R>,
) -> Amplitude<R> {
    coincidence_amplitude_with_phase(settings, upper, lower, state, R::zero())
}

/// Closed-form (D1,D2) rate: `I0²·cos²(θ−ξ)/4`.
pub fn rate_hh<R: Scalar>(settings: &AnalyzerSettings<R>, state: &PairState<R>) -> R {
    let i0 = state.intensity_unit();
    let quarter = R::half() * R::half();
    let c = (settings.theta() - settings.xi()).cos();
    i0 * i0 * quarter * c * c
}

/// Closed-form (D1,D4) rate: `I0²·sin²(ξ−θ)/4`.
pub fn rate_hv<R: Scalar>(settings: &AnalyzerSettings<R>, state: &PairState<R>) -> R {
    let i0 = state.intensity_unit();
    let quarter = R::half() * R::half();
    let s = (settings.xi() - settings.theta()).sin();
    i0 * i0 * quarter * s * s
}

/// All four rates via the two symmetry relations `r_cd = r_ab` and
/// `r_cb = r_ad`.
pub fn symmetric_rates<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    state: &PairState<R>,
) -> CoincidenceRates<R> {
    let hh = rate_hh(settings, state);
    let hv = rate_hv(settings, state);
    CoincidenceRates {
        r_ab: hh,
        r_ad: hv,
        r_cb: hv,
        r_cd: hh,
    }
}

/// Born-rule normalization of the rates: divides by the settings-independent
/// total `I0²/2`, so `p_ab = p_cd = cos²(θ−ξ)/2` and
/// `p_ad = p_cb = sin²(θ−ξ)/2`.
pub fn joint_probabilities<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    _state: &PairState<R>,
) -> JointProbabilities<R> {
    let half = R::half();
    let d = settings.theta() - settings.xi();
    let (s, c) = (d.sin(), d.cos());
    JointProbabilities {
        p_ab: half * c * c,
        p_ad: half * s * s,
        p_cb: half * s * s,
        p_cd: half * c * c,
    }
}

/// Correlation function
/// `E(θ,ξ) = (r_ab + r_cd − r_ad − r_cb) / (r_ab + r_cd + r_ad + r_cb)
///         = cos(2(θ−ξ))`.
pub fn correlation_e<R: Scalar>(settings: &AnalyzerSettings<R>, state: &PairState<R>) -> R {
    let r = symmetric_rates(settings, state);
    (r.r_ab + r.r_cd - r.r_ad - r.r_cb) / r.total()
}

/// CHSH statistic `S = E(a,b) − E(a,b2) + E(a2,b) + E(a2,b2)`. Bounded by
/// `2√2` for this correlation law.
pub fn chsh_s<R: Scalar>(a: R, a2: R, b: R, b2: R, state: &PairState<R>) -> Result<R> {
    for (v, name) in [(a, "a"), (a2, "a2"), (b, "b"), (b2, "b2")] {
        ensure_finite(v, name)?;
    }
    let e = |x, y| correlation_e(&AnalyzerSettings::new(x, y).expect("finite"), state);
    Ok(e(a, b) - e(a, b2) + e(a2, b) + e(a2, b2))
}

/// The canonical CHSH analyzer angles `(0, π/4, π/8, 3π/8)` in net-rotation
/// units; they maximize `S` at `2√2`.
pub fn canonical_chsh_angles<R: Scalar>() -> [R; 4] {
    let pi = R::PI();
    let eighth = pi / R::from_u8(8).unwrap();
    [
        R::zero(),
        pi / R::from_u8(4).unwrap(),
        eighth,
        eighth * R::from_u8(3).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_8, SQRT_2, TAU};

    const TOL: f64 = 1e-12;

    fn settings(theta: f64, xi: f64) -> AnalyzerSettings<f64> {
        AnalyzerSettings::new(theta, xi).unwrap()
    }

    #[test]
    fn amplitude_is_cos_difference_for_transmitted_pair() {
        let state = PairState::standard();
        for (theta, xi) in [(0.3, 1.1), (2.0, 0.4), (5.5, 5.5)] {
            let amp = coincidence_amplitude(&settings(theta, xi), UpperPort::A, LowerPort::B, &state);
            assert_abs_diff_eq!(amp.re, 0.5 * f64::cos(theta - xi), epsilon = TOL);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn amplitude_is_sin_difference_for_mixed_pair() {
        let state = PairState::standard();
        for (theta, xi) in [(0.3, 1.1), (2.0, 0.4)] {
            let amp = coincidence_amplitude(&settings(theta, xi), UpperPort::A, LowerPort::D, &state);
            assert_abs_diff_eq!(amp.re, 0.5 * f64::sin(xi - theta), epsilon = TOL);
        }
    }

    #[test]
    fn pure_hh_survives_at_zero_settings() {
        let state = PairState::standard();
        let amp = coincidence_amplitude(&settings(0.0, 0.0), UpperPort::A, LowerPort::B, &state);
        assert_abs_diff_eq!(amp.re, 0.5, epsilon = TOL);
    }

    #[test]
    fn rate_closed_forms() {
        let state = PairState::standard();
        assert_abs_diff_eq!(rate_hh(&settings(0.7, 0.7), &state), 0.25, epsilon = TOL);
        assert_abs_diff_eq!(
            rate_hh(&settings(FRAC_PI_2, 0.0), &state),
            0.0,
            epsilon = TOL
        );
        // cos²(π/4)/4 = 1/8
        assert_abs_diff_eq!(
            rate_hh(&settings(FRAC_PI_3, std::f64::consts::FRAC_PI_6 / 2.0), &state),
            0.125,
            epsilon = TOL
        );
        assert_abs_diff_eq!(rate_hv(&settings(0.7, 0.7), &state), 0.0, epsilon = TOL);
        assert_abs_diff_eq!(
            rate_hv(&settings(0.0, FRAC_PI_2), &state),
            0.25,
            epsilon = TOL
        );
    }

    #[test]
    fn rates_are_pythagorean_complements() {
        let state = PairState::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let s = settings(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU);
            assert_abs_diff_eq!(rate_hh(&s, &state) + rate_hv(&s, &state), 0.25, epsilon = TOL);
        }
    }

    #[test]
    fn symmetric_rates_fill_and_sum() {
        let state = PairState::standard();
        let r = symmetric_rates(&settings(FRAC_PI_8, FRAC_PI_8), &state);
        assert_abs_diff_eq!(r.r_ab, 0.25, epsilon = TOL);
        assert_abs_diff_eq!(r.r_cd, 0.25, epsilon = TOL);
        assert_abs_diff_eq!(r.r_ad, 0.0, epsilon = TOL);
        assert_abs_diff_eq!(r.r_cb, 0.0, epsilon = TOL);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let s = settings(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU);
            assert_abs_diff_eq!(symmetric_rates(&s, &state).total(), 0.5, epsilon = TOL);
            // exchange symmetry
            let swapped = settings(s.xi(), s.theta());
            assert_abs_diff_eq!(
                rate_hh(&s, &state),
                rate_hh(&swapped, &state),
                epsilon = TOL
            );
        }
    }

    #[test]
    fn rates_are_independent_of_zeta() {
        let s = settings(1.234, 0.456);
        for zeta in [0.0, 0.7, 2.9] {
            let state = PairState::new(std::f64::consts::PI, zeta, 1.0).unwrap();
            assert_abs_diff_eq!(rate_hh(&s, &state), rate_hh(&s, &PairState::standard()), epsilon = TOL);
            let amp = coincidence_amplitude(&s, UpperPort::A, LowerPort::B, &state);
            let amp0 = coincidence_amplitude(&s, UpperPort::A, LowerPort::B, &PairState::standard());
            assert_abs_diff_eq!((amp - amp0).norm(), 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn joint_probabilities_normalize() {
        let state = PairState::standard();
        let p = joint_probabilities(&settings(0.9, 0.9), &state);
        assert_abs_diff_eq!(p.p_ab, 0.5, epsilon = TOL);
        assert_abs_diff_eq!(p.p_ad, 0.0, epsilon = TOL);
        let p = joint_probabilities(&settings(std::f64::consts::FRAC_PI_4, 0.0), &state);
        for x in p.as_array() {
            assert_abs_diff_eq!(x, 0.25, epsilon = TOL);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let p = joint_probabilities(
                &settings(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU),
                &state,
            );
            let sum: f64 = p.as_array().into_iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = TOL);
            assert_abs_diff_eq!(p.p_ab + p.p_ad, 0.5, epsilon = TOL);
            assert_abs_diff_eq!(p.p_ab + p.p_cb, 0.5, epsilon = TOL);
        }
    }

    #[test]
    fn correlation_values() {
        let state = PairState::standard();
        assert_abs_diff_eq!(correlation_e(&settings(0.8, 0.8), &state), 1.0, epsilon = TOL);
        assert_abs_diff_eq!(
            correlation_e(&settings(FRAC_PI_8, 0.0), &state),
            SQRT_2 / 2.0,
            epsilon = TOL
        );
        assert_abs_diff_eq!(
            correlation_e(&settings(FRAC_PI_2, 0.0), &state),
            -1.0,
            epsilon = TOL
        );
    }

    #[test]
    fn chsh_at_canonical_angles_is_tsirelson() {
        let state = PairState::standard();
        let [a, a2, b, b2] = canonical_chsh_angles::<f64>();
        let s = chsh_s(a, a2, b, b2, &state).unwrap();
        assert_abs_diff_eq!(s, 2.0 * SQRT_2, epsilon = TOL);
    }

    #[test]
    fn chsh_degenerate_angles_give_classical_value() {
        let state = PairState::standard();
        let s = chsh_s(0.0, 0.0, 0.0, 0.0, &state).unwrap();
        assert_abs_diff_eq!(s, 2.0, epsilon = TOL);
    }

    #[test]
    fn chsh_rejects_non_finite_angles() {
        let state = PairState::<f64>::standard();
        assert!(chsh_s(f64::NAN, 0.0, 0.0, 0.0, &state).is_err());
    }

    // Grid-search oracle: over a 16^4 angle grid the maximum |S| is 2√2.
    #[test]
    fn chsh_grid_search_maximum() {
        let state = PairState::standard();
        let grid: Vec<f64> = (0..16).map(|k| k as f64 * TAU / 16.0).collect();
        let mut max_s = 0.0_f64;
        for &a in &grid {
            for &a2 in &grid {
                for &b in &grid {
                    for &b2 in &grid {
                        max_s = max_s.max(chsh_s(a, a2, b, b2, &state).unwrap().abs());
                    }
                }
            }
        }
        assert_abs_diff_eq!(max_s, 2.0 * SQRT_2, epsilon = 1e-9);
    }
}
