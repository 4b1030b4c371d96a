//! Two-component Jones calculus: polarization vectors, wave-plate matrices
//! and the polarizing-beam-splitter projection.
//!
//! Conventions: vectors are `(h, v)` coefficients on the horizontal and
//! vertical unit polarizations. `rotation_matrix(θ)` rotates a polarization
//! vector counter-clockwise by `θ`; a half-wave plate at physical angle `α`
//! acts as that rotation by `2α` composed with a vertical-axis flip (it is a
//! reflection, not a rotation). The flip is what makes the
//! half-wave-plate-then-PBS pipeline reproduce the transmitted amplitude
//! `(cosθ − sinθ·e^{iη})/√2` for a diagonal input field.

use num_complex::Complex;

use crate::{ensure_finite, Result, Scalar};

/// Complex field amplitude; `|amplitude|²` is intensity in units of `I0`.
pub type Amplitude<R> = Complex<R>;

/// Two-component complex polarization state of one photon's field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector<R> {
    pub h: Amplitude<R>,
    pub v: Amplitude<R>,
}

impl<R: Scalar> JonesVector<R> {
    pub fn new(h: Amplitude<R>, v: Amplitude<R>) -> Self {
        Self { h, v }
    }

    /// Unit horizontal polarization `(1, 0)`.
    pub fn horizontal() -> Self {
        Self::new(Complex::new(R::one(), R::zero()), Complex::new(R::zero(), R::zero()))
    }

    /// Unit vertical polarization `(0, 1)`.
    pub fn vertical() -> Self {
        Self::new(Complex::new(R::zero(), R::zero()), Complex::new(R::one(), R::zero()))
    }

    /// Total intensity `|h|² + |v|²`.
    pub fn intensity(&self) -> R {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// Multiplies both components by a global phase `e^{iφ}`.
    /// Measurement outcomes are invariant under this.
    pub fn phase_shifted(&self, phi: R) -> Self {
        let phase = Complex::from_polar(R::one(), phi);
        Self::new(self.h * phase, self.v * phase)
    }
}

/// 2×2 complex operator on Jones vectors, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix<R> {
    pub hh: Amplitude<R>,
    pub hv: Amplitude<R>,
    pub vh: Amplitude<R>,
    pub vv: Amplitude<R>,
}

impl<R: Scalar> JonesMatrix<R> {
    pub fn new(hh: Amplitude<R>, hv: Amplitude<R>, vh: Amplitude<R>, vv: Amplitude<R>) -> Self {
        Self { hh, hv, vh, vv }
    }

    pub fn identity() -> Self {
        let one = Complex::new(R::one(), R::zero());
        let zero = Complex::new(R::zero(), R::zero());
        Self::new(one, zero, zero, one)
    }

    /// Applies the operator to a field.
    pub fn apply(&self, field: &JonesVector<R>) -> JonesVector<R> {
        JonesVector::new(
            self.hh * field.h + self.hv * field.v,
            self.vh * field.h + self.vv * field.v,
        )
    }

    /// Matrix product `self · rhs` (rhs acts first).
    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new(
            self.hh * rhs.hh + self.hv * rhs.vh,
            self.hh * rhs.hv + self.hv * rhs.vv,
            self.vh * rhs.hh + self.vv * rhs.vh,
            self.vh * rhs.hv + self.vv * rhs.vv,
        )
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::new(self.hh.conj(), self.vh.conj(), self.hv.conj(), self.vv.conj())
    }

    /// Max-norm distance to another matrix; used by the unitarity checks.
    pub fn max_abs_diff(&self, other: &Self) -> R {
        let d = [
            (self.hh - other.hh).norm(),
            (self.hv - other.hv).norm(),
            (self.vh - other.vh).norm(),
            (self.vv - other.vv).norm(),
        ];
        d.into_iter().fold(R::zero(), R::max)
    }
}

/// Real rotation of the polarization basis by `angle`:
/// `[[cosθ, −sinθ], [sinθ, cosθ]]`, so `(1,0) ↦ (cosθ, sinθ)`.
pub fn rotation_matrix<R: Scalar>(angle: R) -> Result<JonesMatrix<R>> {
    let angle = ensure_finite(angle, "rotation angle")?;
    let (sin, cos) = (angle.sin(), angle.cos());
    let re = |x| Complex::new(x, R::zero());
    Ok(JonesMatrix::new(re(cos), re(-sin), re(sin), re(cos)))
}

/// Half-wave plate at `physical_angle`. Net polarization rotation is twice
/// the physical angle; the matrix is `rotation_matrix(2α)` composed with
/// `diag(1, −1)`, i.e. `[[cos2α, sin2α], [sin2α, −cos2α]]` (unitary and
/// Hermitian).
pub fn hwp<R: Scalar>(physical_angle: R) -> Result<JonesMatrix<R>> {
    let physical_angle = ensure_finite(physical_angle, "HWP angle")?;
    let theta = R::two() * physical_angle;
    let (sin, cos) = (theta.sin(), theta.cos());
    let re = |x| Complex::new(x, R::zero());
    Ok(JonesMatrix::new(re(cos), re(sin), re(sin), re(-cos)))
}

/// Relative phase `ψ` imprinted by the quarter-wave plate tilt. The
/// tilt-to-phase map is the identity; the hardware calibration curve is not
/// modeled.
pub fn qwp_relative_phase<R: Scalar>(tilt_setting: R) -> R {
    tilt_setting
}

/// Output port of the polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsPort {
    /// Transmitted, horizontal component.
    TransmitH,
    /// Reflected, vertical component.
    ReflectV,
}

/// Projects a field onto one PBS port. Port intensities sum to the input
/// intensity.
pub fn pbs_project<R: Scalar>(field: &JonesVector<R>, port: PbsPort) -> Amplitude<R> {
    match port {
        PbsPort::TransmitH => field.h,
        PbsPort::ReflectV => field.v,
    }
}
