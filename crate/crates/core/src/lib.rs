//! Simulator and analytic toolkit for polarization-entangled SPDC photon pairs.
//!
//! Models the standard two-crystal source feeding a half-wave plate plus
//! polarizing beam splitter in each arm, with four ideal detectors behind the
//! PBS ports. Two complementary views of the same optical pipeline are
//! provided:
//!
//! * **Singles** ([`singles`]): each pair carries a random ensemble phase, so
//!   first-order intensities at every port average to `I0/2` — no fringes,
//!   regardless of the analyzer angles.
//! * **Coincidences** ([`coincidence`]): within a pair the phase is shared, so
//!   joint detection rates show full-visibility `cos²(θ−ξ)` / `sin²(ξ−θ)`
//!   fringes and violate the CHSH bound.
//!
//! Closed-form rates are cross-checked against the amplitude pipeline and
//! against a seeded, click-level Monte Carlo ([`sampler`]).
//!
//! All math is generic over the scalar type via [`Scalar`]; concrete `f64`
//! and `f32` aliases live at the crate root.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

pub mod coincidence;
pub mod ensemble;
pub mod jones;
pub mod sampler;
pub mod singles;
pub mod streams;

/// Scalar type the simulator is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `f64`; used when feeding `f64`
    /// random streams into generic code.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 -> Scalar conversion")
    }

    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Error type for all fallible operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite<R: Scalar>(value: R, name: &str) -> Result<R> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite")))
    }
}

// Concrete aliases for the common double-precision instantiation.
pub type Amplitude64 = jones::Amplitude<f64>;
pub type JonesVector64 = jones::JonesVector<f64>;
pub type JonesMatrix64 = jones::JonesMatrix<f64>;
pub type PairState64 = ensemble::PairState<f64>;
pub type PairEvent64 = ensemble::PairEvent<f64>;
pub type AnalyzerSettings64 = singles::AnalyzerSettings<f64>;
pub type SinglesReport64 = singles::SinglesReport<f64>;
pub type CoincidenceRates64 = coincidence::CoincidenceRates<f64>;
pub type JointProbabilities64 = coincidence::JointProbabilities<f64>;
pub type RateEstimate64 = sampler::RateEstimate<f64>;

// Single-precision aliases, for consumers that trade accuracy for size.
pub type JonesVector32 = jones::JonesVector<f32>;
pub type JonesMatrix32 = jones::JonesMatrix<f32>;
pub type PairState32 = ensemble::PairState<f32>;
pub type AnalyzerSettings32 = singles::AnalyzerSettings<f32>;
