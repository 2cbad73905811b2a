//! Physical parameters of the free damped oscillator, regime classification,
//! the Riccati family parameter, and coefficient parametrizations.
//!
//! All quantities are dimensionless: the time unit is absorbed into `beta`,
//! `omega0` and `gamma`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the critical band on `alpha^2`, in units of `omega0^2`.
pub const TOL_CRIT: f64 = 1e-9;

/// Relative width of the excluded window around the blow-up instant.
pub const GUARD_REL: f64 = 1e-8;

/// Friction constant per unit mass (`beta`) and natural frequency (`omega0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    beta: f64,
    omega0: f64,
}

impl DampingParams {
    pub fn new(beta: f64, omega0: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be finite and > 0, got {beta}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be finite and > 0, got {omega0}"
            )));
        }
        Ok(Self { beta, omega0 })
    }

    /// Builds the parameters from `omega0^2`, which is how the reference figure sets fix them.
    pub fn from_omega0_sq(beta: f64, omega0_sq: f64) -> Result<Self> {
        if !(omega0_sq.is_finite() && omega0_sq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega0^2 must be finite and > 0, got {omega0_sq}"
            )));
        }
        Self::new(beta, omega0_sq.sqrt())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega0_sq(&self) -> f64 {
        self.omega0 * self.omega0
    }

    /// `alpha^2 = beta^2 - omega0^2`, the eigenvalue of the Newton operator.
    pub fn alpha_sq(&self) -> f64 {
        self.beta * self.beta - self.omega0_sq()
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    Underdamped,
    Critical,
    Overdamped,
}

impl RegimeTag {
    pub fn name(self) -> &'static str {
        match self {
            RegimeTag::Underdamped => "underdamped",
            RegimeTag::Critical => "critical",
            RegimeTag::Overdamped => "overdamped",
        }
    }
}

/// Damping regime with its characteristic rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `alpha^2 < 0`; carries `omega1 = sqrt(omega0^2 - beta^2)`.
    Underdamped { omega1: f64 },
    Critical,
    /// `alpha^2 > 0`; carries `alpha = sqrt(beta^2 - omega0^2)`.
    Overdamped { alpha: f64 },
}

impl Regime {
    pub fn tag(&self) -> RegimeTag {
        match self {
            Regime::Underdamped { .. } => RegimeTag::Underdamped,
            Regime::Critical => RegimeTag::Critical,
            Regime::Overdamped { .. } => RegimeTag::Overdamped,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Regime::Overdamped { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn omega1(&self) -> Option<f64> {
        match *self {
            Regime::Underdamped { omega1 } => Some(omega1),
            _ => None,
        }
    }

    /// Whether coefficient conversions use the trigonometric (cos) form.
    fn is_trig(&self) -> bool {
        !matches!(self, Regime::Overdamped { .. })
    }
}

pub fn classify_regime(p: &DampingParams) -> Regime {
    let alpha_sq = p.alpha_sq();
    let band = TOL_CRIT * p.omega0_sq();
    if alpha_sq < -band {
        Regime::Underdamped {
            omega1: (-alpha_sq).sqrt(),
        }
    } else if alpha_sq > band {
        Regime::Overdamped {
            alpha: alpha_sq.sqrt(),
        }
    } else {
        Regime::Critical
    }
}

/// The Riccati family parameter `gamma`, inverse of the integration constant `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiParam {
    gamma: f64,
}

impl RiccatiParam {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and nonzero, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Time scale `T = 1/gamma`.
    pub fn time_scale(&self) -> f64 {
        1.0 / self.gamma
    }

    /// Blow-up instant `t* = -1/gamma`.
    pub fn t_star(&self) -> f64 {
        -self.time_scale()
    }

    /// Half-width of the excluded window around `t*`, in time units:
    /// `1e-8 * max(1, |t*|)`.
    pub fn guard_time(&self) -> f64 {
        GUARD_REL * self.t_star().abs().max(1.0)
    }

    /// The same window expressed on `|gamma t + 1| = |gamma| |t - t*|`.
    pub fn guard_band(&self) -> f64 {
        GUARD_REL * self.gamma.abs().max(1.0)
    }

    pub fn is_singular(&self, t: f64) -> bool {
        (self.gamma * t + 1.0).abs() <= self.guard_band()
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.is_singular(t) {
            Err(Error::SingularTime {
                t,
                t_star: self.t_star(),
            })
        } else {
            Ok(())
        }
    }
}

/// Coefficients of a general solution: the superposition weights `(A, B)`
/// or the amplitude/phase view `(A~, phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Coefficients {
    AB { a: f64, b: f64 },
    AmpPhase { amp: f64, phase: f64 },
}

impl Coefficients {
    /// Canonical `(A, B)` form for the given regime.
    pub fn to_ab(&self, regime: &Regime) -> Result<(f64, f64)> {
        match *self {
            Coefficients::AB { a, b } => Ok((a, b)),
            Coefficients::AmpPhase { amp, phase } => amplitude_phase_to_ab(amp, phase, regime),
        }
    }

    pub fn to_amplitude_phase(&self, regime: &Regime) -> Result<(f64, f64)> {
        match *self {
            Coefficients::AB { a, b } => ab_to_amplitude_phase(a, b, regime),
            Coefficients::AmpPhase { amp, phase } => Ok((amp, phase)),
        }
    }
}

/// Converts `(A, B)` to `(A~, phi)` with `A~ = 2 sqrt|AB|`.
///
/// Trigonometric regimes take `phi = Arcos((A+B)/A~)`, hyperbolic takes
/// `phi = Arcosh((A+B)/A~)`. In both cases `phi` carries the sign of `A - B`
/// so that [`amplitude_phase_to_ab`] inverts it; the hyperbolic angle is
/// evaluated as `ln(A/B)/2`, which equals the signed Arcosh without its
/// cancellation near `A = B`.
pub fn ab_to_amplitude_phase(a: f64, b: f64, regime: &Regime) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite coefficients ({a}, {b})")));
    }
    let amp = 2.0 * (a * b).abs().sqrt();
    let sum = a + b;
    if regime.is_trig() {
        if amp == 0.0 {
            return if sum == 0.0 {
                Ok((0.0, 0.0))
            } else {
                Err(Error::Domain(format!(
                    "A+B = {sum} with A~ = 0 has no cosine representation"
                )))
            };
        }
        let arg = sum / amp;
        if arg.abs() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "Arcos argument (A+B)/A~ = {arg} outside [-1, 1]"
            )));
        }
        let phase = arg.clamp(-1.0, 1.0).acos();
        Ok((amp, if a < b { -phase } else { phase }))
    } else {
        if !(a * b > 0.0 && sum > 0.0) {
            return Err(Error::Domain(format!(
                "hyperbolic form needs A, B > 0, got ({a}, {b})"
            )));
        }
        Ok((amp, 0.5 * (a / b).ln()))
    }
}

/// Inverse of [`ab_to_amplitude_phase`].
///
/// In the trigonometric case the pair solves `A+B = A~ cos(phi)`,
/// `2 sqrt|AB| = A~`: the equal root `A = B` when `|cos(phi)| = 1`,
/// otherwise the opposite-sign pair ordered by the sign of `phi`.
pub fn amplitude_phase_to_ab(amp: f64, phase: f64, regime: &Regime) -> Result<(f64, f64)> {
    if !(amp.is_finite() && phase.is_finite()) || amp < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be finite and >= 0, got ({amp}, {phase})"
        )));
    }
    if regime.is_trig() {
        let c = phase.cos();
        let sum = amp * c;
        if c.abs() == 1.0 {
            return Ok((0.5 * sum, 0.5 * sum));
        }
        let diff = (sum * sum + amp * amp).sqrt().copysign(phase);
        Ok((0.5 * (sum + diff), 0.5 * (sum - diff)))
    } else {
        Ok((0.5 * amp * phase.exp(), 0.5 * amp * (-phase).exp()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn figure_parameter_sets_classify() {
        let p = DampingParams::from_omega0_sq(0.1, 1.01).unwrap();
        let r = classify_regime(&p);
        assert_eq!(r.tag(), RegimeTag::Underdamped);
        assert_relative_eq!(r.omega1().unwrap(), 1.0, max_relative = 1e-14);
        assert!(r.alpha().is_none());

        let p = DampingParams::new(1.0, 1.0).unwrap();
        assert_eq!(classify_regime(&p), Regime::Critical);

        let p = DampingParams::from_omega0_sq(1.0, 24.0 / 25.0).unwrap();
        let r = classify_regime(&p);
        assert_eq!(r.tag(), RegimeTag::Overdamped);
        assert_relative_eq!(r.alpha().unwrap(), 0.2, max_relative = 1e-13);
    }

    #[test]
    fn critical_band() {
        let p = DampingParams::from_omega0_sq(1.0, 1.0 + 0.5e-9).unwrap();
        assert_eq!(p.regime(), Regime::Critical);
        let p = DampingParams::from_omega0_sq(1.0, 1.0 + 1e-8).unwrap();
        assert_eq!(p.regime().tag(), RegimeTag::Underdamped);
    }

    #[test]
    fn rejects_nonphysical() {
        assert!(DampingParams::new(-0.1, 1.0).is_err());
        assert!(DampingParams::new(0.0, 1.0).is_err());
        assert!(DampingParams::new(0.1, f64::NAN).is_err());
        assert!(RiccatiParam::new(0.0).is_err());
    }

    #[test]
    fn riccati_param_derived_times() {
        let r = RiccatiParam::new(0.5).unwrap();
        assert_eq!(r.time_scale(), 2.0);
        assert_eq!(r.t_star(), -2.0);
        assert!(r.check(-2.0).is_err());
        assert!(r.check(0.0).is_ok());
    }

    #[test]
    fn ab_conversion_examples() {
        let under = Regime::Underdamped { omega1: 1.0 };
        let over = Regime::Overdamped { alpha: 0.2 };
        assert_eq!(ab_to_amplitude_phase(1.0, 1.0, &under).unwrap(), (2.0, 0.0));
        assert_eq!(ab_to_amplitude_phase(1.0, 1.0, &over).unwrap(), (2.0, 0.0));
        assert!(matches!(
            ab_to_amplitude_phase(1.0, -1.0, &over),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ab_to_amplitude_phase(1.0, 3.0, &under),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn amplitude_phase_examples() {
        let under = Regime::Underdamped { omega1: 1.0 };
        assert_eq!(amplitude_phase_to_ab(2.0, 0.0, &under).unwrap(), (1.0, 1.0));
        assert_eq!(amplitude_phase_to_ab(0.0, 0.0, &under).unwrap(), (0.0, 0.0));
        assert_eq!(
            amplitude_phase_to_ab(0.0, 0.0, &Regime::Overdamped { alpha: 1.0 }).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(amplitude_phase_to_ab(0.0, 0.0, &Regime::Critical).unwrap(), (0.0, 0.0));

        // Quarter phase: A + B = 0 and 2 sqrt|AB| = 1, i.e. A = 1/2, B = -1/2.
        let (a, b) = amplitude_phase_to_ab(1.0, std::f64::consts::FRAC_PI_2, &under).unwrap();
        assert!((a + b).abs() < 1e-15);
        assert_relative_eq!(2.0 * (a * b).abs().sqrt(), 1.0, max_relative = 1e-15);
        let (amp, phase) = ab_to_amplitude_phase(a, b, &under).unwrap();
        assert_relative_eq!(amp, 1.0, max_relative = 1e-12);
        assert_relative_eq!(phase, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn regime_partition(beta in 1e-3f64..10.0, omega0 in 1e-3f64..10.0) {
            let p = DampingParams::new(beta, omega0).unwrap();
            match classify_regime(&p) {
                Regime::Underdamped { omega1 } => {
                    let lhs = beta * beta + omega1 * omega1;
                    prop_assert!((lhs - p.omega0_sq()).abs() <= 1e-14 * p.omega0_sq().max(lhs) * 4.0);
                }
                Regime::Overdamped { alpha } => {
                    let lhs = beta * beta - alpha * alpha;
                    prop_assert!((lhs - p.omega0_sq()).abs() <= 1e-14 * (beta * beta) * 4.0);
                }
                Regime::Critical => prop_assert!(p.alpha_sq().abs() <= TOL_CRIT * p.omega0_sq()),
            }
        }

        #[test]
        fn hyperbolic_round_trip(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let r = Regime::Overdamped { alpha: 0.5 };
            let (amp, phase) = ab_to_amplitude_phase(a, b, &r).unwrap();
            let (a2, b2) = amplitude_phase_to_ab(amp, phase, &r).unwrap();
            prop_assert!((a2 - a).abs() <= 1e-12 * a.abs());
            prop_assert!((b2 - b).abs() <= 1e-12 * b.abs());
        }

        #[test]
        fn trig_round_trip(amp in 1e-3f64..1e3, phase in 0.1f64..3.04, flip in any::<bool>()) {
            let phase = if flip { -phase } else { phase };
            let r = Regime::Underdamped { omega1: 1.0 };
            let (a, b) = amplitude_phase_to_ab(amp, phase, &r).unwrap();
            let (amp2, phase2) = ab_to_amplitude_phase(a, b, &r).unwrap();
            prop_assert!((amp2 - amp).abs() <= 1e-12 * amp);
            prop_assert!((phase2 - phase).abs() <= 1e-12 * phase.abs());
        }

        #[test]
        fn trig_ab_round_trip(a in -1e3f64..1e3, ratio in 0.2f64..5.0) {
            // Opposite signs with A^2 + 6AB + B^2 < 0, i.e. |A+B| < 2 sqrt|AB|.
            prop_assume!(a.abs() > 1e-3);
            let b = -a * ratio;
            prop_assume!(a * a + 6.0 * a * b + b * b < -1e-3 * a * a);
            let r = Regime::Critical;
            let (amp, phase) = ab_to_amplitude_phase(a, b, &r).unwrap();
            let (a2, b2) = amplitude_phase_to_ab(amp, phase, &r).unwrap();
            let scale = a.abs().max(b.abs());
            prop_assert!((a2 - a).abs() <= 1e-12 * scale);
            prop_assert!((b2 - b).abs() <= 1e-12 * scale);
        }
    }
}
