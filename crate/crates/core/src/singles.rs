//! First-order (singles) intensities at the four PBS ports.
//!
//! Per-event intensities depend on the analyzer angle and the event phase
//! `η`; averaging over the ensemble washes every fringe out to `I0/2`.
//! [`coherent_singles_prediction`] gives the counterfactual fringe that a
//! fully phase-locked ensemble (all pairs sharing one phase `ζ`) would show.
//! The contrast between the two is **not** about averaging amplitudes versus
//! averaging intensities — both routes average intensities — it is shared-`ζ`
//! versus per-event-`η` phase structure.

use num_complex::Complex;

use crate::ensemble::{Arm, PairEvent, PairState};
use crate::jones::Amplitude;
use crate::{Error, Result, Scalar};

/// Net polarization-rotation angles of the two analyzers: `θ` for the upper
/// arm, `ξ` for the lower. Stored unreduced; trigonometry handles
/// periodicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSettings<R> {
    theta: R,
    xi: R,
}

impl<R: Scalar> AnalyzerSettings<R> {
    pub fn new(theta: R, xi: R) -> Result<Self> {
        let theta = crate::ensure_finite(theta, "theta")?;
        let xi = crate::ensure_finite(xi, "xi")?;
        Ok(Self { theta, xi })
    }

    pub fn theta(&self) -> R {
        self.theta
    }

    pub fn xi(&self) -> R {
        self.xi
    }

    /// The analyzer angle seen by one arm.
    pub fn angle(&self, arm: Arm) -> R {
        match arm {
            Arm::Upper => self.theta,
            Arm::Lower => self.xi,
        }
    }
}

/// Detector port behind the PBSs: `A`/`C` are the transmitted/reflected
/// upper-arm ports (detectors D1/D3), `B`/`D` the lower-arm ones (D2/D4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    A,
    B,
    C,
    D,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::A, Port::B, Port::C, Port::D];

    fn arm(self) -> Arm {
        match self {
            Port::A | Port::C => Arm::Upper,
            Port::B | Port::D => Arm::Lower,
        }
    }
}

/// Transmitted-port amplitude of one arm for one event:
/// `(e0/√2)·(cos a − e^{iη}·sin a)` with `a` the arm's analyzer angle.
pub fn transmitted_amplitude<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    arm: Arm,
    event: &PairEvent<R>,
    state: &PairState<R>,
) -> Amplitude<R> {
    let a = settings.angle(arm);
    let scale = state.e0() / R::SQRT_2();
    let phase = Complex::from_polar(R::one(), event.eta);
    Complex::new(scale * a.cos(), R::zero()) - phase * (scale * a.sin())
}

/// Reflected-port amplitude of one arm for one event:
/// `(e0/√2)·(sin a + e^{iη}·cos a)`.
pub fn reflected_amplitude<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    arm: Arm,
    event: &PairEvent<R>,
    state: &PairState<R>,
) -> Amplitude<R> {
    let a = settings.angle(arm);
    let scale = state.e0() / R::SQRT_2();
    let phase = Complex::from_polar(R::one(), event.eta);
    Complex::new(scale * a.sin(), R::zero()) + phase * (scale * a.cos())
}

/// Per-event intensity at one port, in units of `I0`:
/// `I_A = I0(1 − sin2θ·cosη)/2` and `I_C = I0 − I_A` (likewise B/D with ξ).
/// The reflected ports are computed by subtraction so that the per-event
/// port sum is exactly `I0`.
pub fn singles_intensity_event<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    port: Port,
    event: &PairEvent<R>,
    state: &PairState<R>,
) -> R {
    let i0 = state.intensity_unit();
    let a = settings.angle(port.arm());
    let transmitted = i0 * R::half() * (R::one() - (R::two() * a).sin() * event.eta.cos());
    match port {
        Port::A | Port::B => transmitted,
        Port::C | Port::D => i0 - transmitted,
    }
}

/// Ensemble means and standard errors of the four port intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglesReport<R> {
    pub n: u64,
    pub mean_a: R,
    pub mean_b: R,
    pub mean_c: R,
    pub mean_d: R,
    pub stderr_a: R,
    pub stderr_b: R,
    pub stderr_c: R,
    pub stderr_d: R,
    /// Sum of the four means; `2·I0` by energy conservation.
    pub total: R,
}

impl<R: Scalar> SinglesReport<R> {
    pub fn mean(&self, port: Port) -> R {
        match port {
            Port::A => self.mean_a,
            Port::B => self.mean_b,
            Port::C => self.mean_c,
            Port::D => self.mean_d,
        }
    }

    pub fn stderr(&self, port: Port) -> R {
        match port {
            Port::A => self.stderr_a,
            Port::B => self.stderr_b,
            Port::C => self.stderr_c,
            Port::D => self.stderr_d,
        }
    }
}

// Compensated accumulator; keeps million-event means at machine precision.
struct Kahan<R> {
    sum: R,
    c: R,
}

impl<R: Scalar> Kahan<R> {
    fn new() -> Self {
        Self {
            sum: R::zero(),
            c: R::zero(),
        }
    }

    fn add(&mut self, x: R) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Averages the per-event port intensities over an ensemble. Sequential and
/// deterministic; standard errors use the sample standard deviation.
pub fn singles_ensemble<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    events: &[PairEvent<R>],
    state: &PairState<R>,
) -> Result<SinglesReport<R>> {
    if events.is_empty() {
        return Err(Error::InvalidArgument("ensemble must be non-empty".into()));
    }
    let n = events.len() as u64;
    let nf = R::from_u64(n).unwrap();
    let mut sums = [Kahan::new(), Kahan::new(), Kahan::new(), Kahan::new()];
    let mut sq = [R::zero(); 4];
    for event in events {
        for (k, port) in Port::ALL.into_iter().enumerate() {
            let x = singles_intensity_event(settings, port, event, state);
            sums[k].add(x);
            sq[k] += x * x;
        }
    }
    let mean: Vec<R> = sums.iter().map(|k| k.sum / nf).collect();
    let stderr: Vec<R> = (0..4)
        .map(|k| {
            if n < 2 {
                R::zero()
            } else {
                let var = (sq[k] - nf * mean[k] * mean[k]) / (nf - R::one());
                (var.max(R::zero()) / nf).sqrt()
            }
        })
        .collect();
    Ok(SinglesReport {
        n,
        mean_a: mean[0],
        mean_b: mean[1],
        mean_c: mean[2],
        mean_d: mean[3],
        stderr_a: stderr[0],
        stderr_b: stderr[1],
        stderr_c: stderr[2],
        stderr_d: stderr[3],
        total: mean.iter().copied().sum(),
    })
}

/// Counterfactual singles intensity if every pair shared the single phase
/// `ζ`: `I_A = I0(1 − sin2θ·cosζ)/2`, a full-visibility fringe in `θ`. This
/// is the fringe the incoherent ensemble washes out.
pub fn coherent_singles_prediction<R: Scalar>(
    settings: &AnalyzerSettings<R>,
    port: Port,
    zeta: R,
    state: &PairState<R>,
) -> R {
    let event = PairEvent { index: 0, eta: zeta };
    singles_intensity_event(settings, port, &event, state)
}
