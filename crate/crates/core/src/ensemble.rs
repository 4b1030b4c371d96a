//! The prepared two-photon state and reproducible ensembles of pair events.
//!
//! Each generated pair carries one random ensemble phase `η_j`, identical in
//! both arms. Within a pair the phase is shared (the coherence behind the
//! coincidence fringes); across pairs it is uniform random (the incoherence
//! behind the singles washout).

use num_complex::Complex;
use rand::Rng;

use crate::jones::JonesVector;
use crate::streams;
use crate::{ensure_finite, Error, Result, Scalar};

/// The prepared two-photon state: relative phase `ψ` between the HH and VV
/// amplitudes (set by the quarter-wave plate), a fixed pair phase `ζ` common
/// to all pairs, and the single-photon field amplitude `e0`.
///
/// The intensity unit is `I0 = e0²`; singles are reported in `I0` and
/// coincidences in `I0²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState<R> {
    psi: R,
    zeta: R,
    e0: R,
}

impl<R: Scalar> PairState<R> {
    /// Builds a state with phases reduced into `[0, 2π)`.
    pub fn new(psi: R, zeta: R, e0: R) -> Result<Self> {
        let psi = ensure_finite(psi, "psi")?;
        let zeta = ensure_finite(zeta, "zeta")?;
        let e0 = ensure_finite(e0, "e0")?;
        if e0 <= R::zero() {
            return Err(Error::InvalidArgument("e0 must be positive".into()));
        }
        Ok(Self {
            psi: reduce_mod_tau(psi),
            zeta: reduce_mod_tau(zeta),
            e0,
        })
    }

    /// The standard preparation: `ψ = π`, `ζ = 0`, `e0 = 1`.
    pub fn standard() -> Self {
        Self::new(R::PI(), R::zero(), R::one()).expect("standard state is valid")
    }

    pub fn psi(&self) -> R {
        self.psi
    }

    pub fn zeta(&self) -> R {
        self.zeta
    }

    pub fn e0(&self) -> R {
        self.e0
    }

    /// `I0 = e0·e0*`.
    pub fn intensity_unit(&self) -> R {
        self.e0 * self.e0
    }
}

fn reduce_mod_tau<R: Scalar>(angle: R) -> R {
    let tau = R::TAU();
    let r = angle % tau;
    if r < R::zero() {
        r + tau
    } else {
        r
    }
}

/// One generated pair: its index in the ensemble and the ensemble phase
/// `η_j` shared by both arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEvent<R> {
    pub index: u64,
    pub eta: R,
}

/// Phase law for the ensemble. The source's spectral envelope is simplified
/// to a uniform phase distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseDistribution {
    #[default]
    Uniform,
}

/// Reproducible ensemble description: identical `(n, seed)` always yields
/// the identical event sequence, chunked or monolithic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n: u64,
    pub seed: u64,
    pub phase_distribution: PhaseDistribution,
}

impl EnsembleConfig {
    pub fn new(n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("ensemble size must be >= 1".into()));
        }
        Ok(Self {
            n,
            seed,
            phase_distribution: PhaseDistribution::Uniform,
        })
    }
}

/// Generates the full event sequence for `config`.
pub fn draw_ensemble<R: Scalar>(config: &EnsembleConfig) -> Result<Vec<PairEvent<R>>> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("ensemble size must be >= 1".into()));
    }
    Ok(draw_chunk(config, 0, config.n))
}

/// Generates events `[start, start + len)` of the sequence. Concatenating
/// chunks that partition `0..n` reproduces [`draw_ensemble`] exactly; this is
/// the contract that makes parallel generation safe.
pub fn draw_chunk<R: Scalar>(config: &EnsembleConfig, start: u64, len: u64) -> Vec<PairEvent<R>> {
    let tau = std::f64::consts::TAU;
    let mut rng = streams::stream_at(config.seed, start);
    (start..start + len)
        .map(|index| PairEvent {
            index,
            eta: R::from_f64_lossy(tau * rng.gen::<f64>()),
        })
        .collect()
}

/// Which arm of the pair; both arms of one event carry the same field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Upper,
    Lower,
}

/// The single-arm field of one pair event, `(e0/√2)·(Ĥ − e^{iη}·V̂)`.
///
/// This is the `ψ = π` preparation; the minus sign on the vertical component
/// is that phase. Both arms return the same vector, and the intensity is
/// exactly `I0` for every `η`.
pub fn arm_field<R: Scalar>(state: &PairState<R>, event: &PairEvent<R>, _arm: Arm) -> JonesVector<R> {
    let scale = state.e0() / R::SQRT_2();
    let h = Complex::new(scale, R::zero());
    let v = -Complex::from_polar(scale, event.eta);
    JonesVector::new(h, v)
}
