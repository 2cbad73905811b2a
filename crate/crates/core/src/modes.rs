//! Closed-form damping modes with analytic derivatives.
//!
//! Seed modes are the free (Newtonian) general solutions. Tilde modes are
//! their images `A^- y` under the lowering operator built from the general
//! Riccati solution, which solve
//! `y'' + 2 beta y' + omega0^2 y - 2 gamma^2/(gamma t + 1)^2 y = 0`.
//!
//! Critical tilde modes use the `(A, D)` pair: the `B` slot of
//! [`Coefficients::AB`] carries `D`, the weight of the independent second
//! solution `D (gamma t + 1)^2/gamma^2 e^{-beta t}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::params::{Coefficients, DampingParams, Regime, RegimeTag, RiccatiParam};
use crate::riccati::h_jet_unchecked;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Seed,
    Tilde(RiccatiParam),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Value, first and second derivative of a mode at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEval {
    pub t: f64,
    pub y: f64,
    pub dy: f64,
    pub d2y: f64,
}

impl ModeEval {
    fn from_jet(t: f64, j: &Jet) -> Self {
        Self {
            t,
            y: j.0[0],
            dy: j.0[1],
            d2y: j.0[2],
        }
    }
}

/// Coefficients resolved into the form each regime evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Trig { amp: f64, phase: f64, omega1: f64 },
    Polynomial { a: f64, b: f64 },
    CoshForm { amp: f64, phase: f64, alpha: f64 },
    ExpPair { a: f64, b: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    params: DampingParams,
    regime: Regime,
    coeffs: Coefficients,
    family: Family,
    shape: Shape,
}

impl ModeSpec {
    pub fn new(params: DampingParams, coeffs: Coefficients, family: Family) -> Result<Self> {
        let regime = params.regime();
        let shape = match (regime, coeffs) {
            (Regime::Underdamped { omega1 }, c) => {
                let (amp, phase) = c.to_amplitude_phase(&regime)?;
                Shape::Trig { amp, phase, omega1 }
            }
            (Regime::Critical, c) => {
                let (a, b) = c.to_ab(&regime)?;
                Shape::Polynomial { a, b }
            }
            (Regime::Overdamped { alpha }, Coefficients::AmpPhase { amp, phase }) => {
                if !(amp.is_finite() && phase.is_finite()) || amp < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "amplitude must be finite and >= 0, got ({amp}, {phase})"
                    )));
                }
                Shape::CoshForm { amp, phase, alpha }
            }
            (Regime::Overdamped { alpha }, Coefficients::AB { a, b }) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidParameter(format!("non-finite coefficients ({a}, {b})")));
                }
                Shape::ExpPair { a, b, alpha }
            }
        };
        Ok(Self {
            params,
            regime,
            coeffs,
            family,
            shape,
        })
    }

    pub fn seed(params: DampingParams, coeffs: Coefficients) -> Result<Self> {
        Self::new(params, coeffs, Family::Seed)
    }

    pub fn tilde(params: DampingParams, coeffs: Coefficients, riccati: RiccatiParam) -> Result<Self> {
        Self::new(params, coeffs, Family::Tilde(riccati))
    }

    pub fn params(&self) -> &DampingParams {
        &self.params
    }

    pub fn regime(&self) -> &Regime {
        &self.regime
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn riccati(&self) -> Option<RiccatiParam> {
        match self.family {
            Family::Seed => None,
            Family::Tilde(r) => Some(r),
        }
    }

    /// Same coefficients with a different family.
    pub fn with_family(&self, family: Family) -> Self {
        Self { family, ..*self }
    }

    /// `[y, y', y'', y''']` of the mode at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet> {
        match self.family {
            Family::Seed => Ok(self.seed_jet(t)),
            Family::Tilde(r) => {
                r.check(t)?;
                Ok(self.tilde_jet(r, t))
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<ModeEval> {
        self.jet(t).map(|j| ModeEval::from_jet(t, &j))
    }

    fn seed_jet(&self, t: f64) -> Jet {
        let decay = Jet::exp(-self.params.beta(), t);
        let p = match self.shape {
            Shape::Trig { amp, phase, omega1 } => Jet::cos(omega1, phase, t).scale(amp),
            Shape::Polynomial { a, b } => Jet::linear(a, b, t),
            Shape::CoshForm { amp, phase, alpha } => Jet::cosh(alpha, phase, t).scale(amp),
            Shape::ExpPair { a, b, alpha } => {
                Jet::exp(alpha, t).scale(a) + Jet::exp(-alpha, t).scale(b)
            }
        };
        decay * p
    }

    fn tilde_jet(&self, r: RiccatiParam, t: f64) -> Jet {
        let decay = Jet::exp(-self.params.beta(), t);
        let h = h_jet_unchecked(r.gamma(), t);
        let p = match self.shape {
            Shape::Trig { amp, phase, omega1 } => {
                let s = Jet::sin(omega1, phase, t).scale(omega1);
                (s + h * Jet::cos(omega1, phase, t)).scale(-amp)
            }
            Shape::Polynomial { a, b: d } => {
                // (gamma t + 1)^2 / gamma^2 = (t - t*)^2
                Jet::square_shift(r.t_star(), t).scale(d) - h.scale(a)
            }
            Shape::CoshForm { amp, phase, alpha } => {
                let s = Jet::sinh(alpha, phase, t).scale(alpha);
                (s - h * Jet::cosh(alpha, phase, t)).scale(amp)
            }
            Shape::ExpPair { a, b, alpha } => {
                let plus = (Jet::constant(alpha) - h) * Jet::exp(alpha, t);
                let minus = (Jet::constant(-alpha) - h) * Jet::exp(-alpha, t);
                plus.scale(a) + minus.scale(b)
            }
        };
        decay * p
    }
}

/// Evaluates the free (seed) mode carried by `spec`'s coefficients.
pub fn eval_seed(spec: &ModeSpec, t: f64) -> ModeEval {
    ModeEval::from_jet(t, &spec.seed_jet(t))
}

pub fn eval_tilde(spec: &ModeSpec, t: f64) -> Result<ModeEval> {
    match spec.family {
        Family::Tilde(r) => {
            r.check(t)?;
            Ok(ModeEval::from_jet(t, &spec.tilde_jet(r, t)))
        }
        Family::Seed => Err(Error::InvalidParameter(
            "eval_tilde needs a tilde-family spec".into(),
        )),
    }
}

/// `gamma -> 0` limit of the tilde family: `(d/dt + beta) y`.
pub fn eval_tilde_limit(spec: &ModeSpec, t: f64) -> ModeEval {
    let y = spec.seed_jet(t).0;
    let beta = spec.params.beta();
    ModeEval {
        t,
        y: y[1] + beta * y[0],
        dy: y[2] + beta * y[1],
        d2y: y[3] + beta * y[2],
    }
}

fn exponent(p: &DampingParams, sign: Sign, op: &'static str) -> Result<f64> {
    match p.regime() {
        Regime::Overdamped { alpha } => Ok(-p.beta() + sign.factor() * alpha),
        Regime::Critical => Ok(-p.beta()),
        r @ Regime::Underdamped { .. } => Err(Error::Regime {
            expected: op,
            actual: r.tag().name(),
        }),
    }
}

/// Elementary eigenmode `y_+- = e^{(-beta +- alpha) t}` as a jet.
pub fn seed_pm_jet(p: &DampingParams, sign: Sign, t: f64) -> Result<Jet> {
    Ok(Jet::exp(exponent(p, sign, "overdamped or critical")?, t))
}

pub fn eval_seed_pm(p: &DampingParams, sign: Sign, t: f64) -> Result<ModeEval> {
    seed_pm_jet(p, sign, t).map(|j| ModeEval::from_jet(t, &j))
}

/// `y~_+- = (+-alpha - gamma/(gamma t + 1)) e^{(-beta +- alpha) t}` as a jet.
pub fn tilde_pm_jet(p: &DampingParams, r: &RiccatiParam, sign: Sign, t: f64) -> Result<Jet> {
    let Regime::Overdamped { alpha } = p.regime() else {
        return Err(Error::Regime {
            expected: "overdamped",
            actual: p.regime().tag().name(),
        });
    };
    r.check(t)?;
    let k = sign.factor() * alpha;
    let h = h_jet_unchecked(r.gamma(), t);
    Ok((Jet::constant(k) - h) * Jet::exp(k - p.beta(), t))
}

pub fn eval_tilde_pm(p: &DampingParams, r: &RiccatiParam, sign: Sign, t: f64) -> Result<ModeEval> {
    tilde_pm_jet(p, r, sign, t).map(|j| ModeEval::from_jet(t, &j))
}

/// Second critical tilde solution `D (gamma t + 1)^2/gamma^2 e^{-beta t}`,
/// obtained by reduction of order from `y~_+`.
pub fn critical_second_solution(p: &DampingParams, r: &RiccatiParam, d: f64, t: f64) -> Result<ModeEval> {
    if p.regime().tag() != RegimeTag::Critical {
        return Err(Error::Regime {
            expected: "critical",
            actual: p.regime().tag().name(),
        });
    }
    let j = Jet::exp(-p.beta(), t) * Jet::square_shift(r.t_star(), t).scale(d);
    Ok(ModeEval::from_jet(t, &j))
}

/// Antirestoring acceleration `2 gamma^2/(gamma t + 1)^2 * y~(t)`.
pub fn antirestoring_acceleration(spec: &ModeSpec, t: f64) -> Result<f64> {
    let y = eval_tilde(spec, t)?.y;
    let r = spec.riccati().expect("eval_tilde checked the family");
    let h = r.gamma() / (r.gamma() * t + 1.0);
    Ok(2.0 * h * h * y)
}

/// Blow-up instant `t* = -1/gamma`: negative for `gamma > 0`, positive for `gamma < 0`.
pub fn blow_up_time(r: &RiccatiParam) -> f64 {
    r.t_star()
}

/// Residual of the free damping law and its largest term magnitude.
pub fn seed_residual(p: &DampingParams, e: &ModeEval) -> (f64, f64) {
    let terms = [e.d2y, 2.0 * p.beta() * e.dy, p.omega0_sq() * e.y];
    (terms.iter().sum(), max_abs(&terms))
}

/// Residual of the modified Newton law with the antirestoring term, and its
/// largest term magnitude.
pub fn tilde_residual(p: &DampingParams, r: &RiccatiParam, e: &ModeEval) -> (f64, f64) {
    let h = r.gamma() / (r.gamma() * e.t + 1.0);
    let terms = [
        e.d2y,
        2.0 * p.beta() * e.dy,
        p.omega0_sq() * e.y,
        -2.0 * h * h * e.y,
    ];
    (terms.iter().sum(), max_abs(&terms))
}

pub fn wronskian(u: &ModeEval, v: &ModeEval) -> f64 {
    u.y * v.dy - u.dy * v.y
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1() -> DampingParams {
        DampingParams::from_omega0_sq(0.1, 1.01).unwrap()
    }
    fn fig2() -> DampingParams {
        DampingParams::new(1.0, 1.0).unwrap()
    }
    fn fig3() -> DampingParams {
        DampingParams::from_omega0_sq(1.0, 24.0 / 25.0).unwrap()
    }
    fn gamma(g: f64) -> RiccatiParam {
        RiccatiParam::new(g).unwrap()
    }
    const UNIT: Coefficients = Coefficients::AmpPhase { amp: 1.0, phase: 0.0 };
    const ONES: Coefficients = Coefficients::AB { a: 1.0, b: 1.0 };

    #[test]
    fn seed_examples() {
        let e = eval_seed(&ModeSpec::seed(fig1(), UNIT).unwrap(), 0.0);
        assert_eq!(e.y, 1.0);
        let e = eval_seed(&ModeSpec::seed(fig2(), ONES).unwrap(), 0.0);
        assert_eq!((e.y, e.dy), (1.0, 0.0));
        let e = eval_seed(&ModeSpec::seed(fig3(), UNIT).unwrap(), 0.0);
        assert_eq!(e.y, 1.0);
        assert_relative_eq!(e.dy, -1.0, max_relative = 1e-15);
    }

    #[test]
    fn tilde_examples() {
        let e = eval_tilde(&ModeSpec::tilde(fig1(), UNIT, gamma(1.0)).unwrap(), 0.0).unwrap();
        assert_eq!(e.y, -1.0);
        let e = eval_tilde(&ModeSpec::tilde(fig2(), ONES, gamma(5.0)).unwrap(), 0.0).unwrap();
        assert_relative_eq!(e.y, -4.96, max_relative = 1e-15);
        let e = eval_tilde(&ModeSpec::tilde(fig3(), UNIT, gamma(1.0)).unwrap(), 0.0).unwrap();
        assert_eq!(e.y, -1.0);
    }

    #[test]
    fn tilde_rejects_seed_spec_and_pole() {
        let seed = ModeSpec::seed(fig1(), UNIT).unwrap();
        assert!(eval_tilde(&seed, 0.0).is_err());
        let spec = ModeSpec::tilde(fig1(), UNIT, gamma(0.5)).unwrap();
        assert!(matches!(eval_tilde(&spec, -2.0), Err(Error::SingularTime { .. })));
        assert!(matches!(
            antirestoring_acceleration(&spec, -2.0),
            Err(Error::SingularTime { .. })
        ));
    }

    #[test]
    fn overdamped_forms_agree() {
        let p = fig3();
        let r = p.regime();
        let (a, b) = crate::params::amplitude_phase_to_ab(1.3, 0.4, &r).unwrap();
        for fam in [Family::Seed, Family::Tilde(gamma(0.7))] {
            let amp = ModeSpec::new(p, Coefficients::AmpPhase { amp: 1.3, phase: 0.4 }, fam).unwrap();
            let ab = ModeSpec::new(p, Coefficients::AB { a, b }, fam).unwrap();
            for i in 0..20 {
                let t = i as f64 * 0.5;
                let (x, y) = (amp.jet(t).unwrap(), ab.jet(t).unwrap());
                for k in 0..4 {
                    assert!((x.0[k] - y.0[k]).abs() < 1e-13 * x.0[k].abs().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn tilde_pm_examples() {
        let e = eval_tilde_pm(&fig3(), &gamma(1.0), Sign::Plus, 0.0).unwrap();
        assert_relative_eq!(e.y, -0.8, max_relative = 1e-14);
        let e = eval_tilde_pm(&fig3(), &gamma(1e-9), Sign::Plus, 0.0).unwrap();
        assert!((e.y - 0.2).abs() < 1e-8);
        // (-0.2 - 0.5) e^{-1.2}, from an independent mpmath evaluation
        let e = eval_tilde_pm(&fig3(), &gamma(1.0), Sign::Minus, 1.0).unwrap();
        assert_relative_eq!(e.y, -0.210_835_948_338_541_47, max_relative = 1e-13);
        assert!(matches!(
            eval_tilde_pm(&fig2(), &gamma(1.0), Sign::Minus, 1.0),
            Err(Error::Regime { .. })
        ));
    }

    #[test]
    fn critical_second_solution_examples() {
        let p = fig2();
        assert_eq!(critical_second_solution(&p, &gamma(1.0), 1.0, 0.0).unwrap().y, 1.0);
        assert_relative_eq!(
            critical_second_solution(&p, &gamma(5.0), 1.0, 0.0).unwrap().y,
            1.0 / 25.0,
            max_relative = 1e-15
        );
        let e = critical_second_solution(&p, &gamma(1.0), 1.0, 2.0).unwrap();
        let (res, _) = tilde_residual(&p, &gamma(1.0), &e);
        assert!(res.abs() < 1e-11);
        assert!(critical_second_solution(&fig1(), &gamma(1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn acceleration_examples() {
        let a = antirestoring_acceleration(&ModeSpec::tilde(fig1(), UNIT, gamma(1.0)).unwrap(), 0.0);
        assert_eq!(a.unwrap(), -2.0);
        let a = antirestoring_acceleration(&ModeSpec::tilde(fig3(), UNIT, gamma(1.0)).unwrap(), 0.0);
        assert_eq!(a.unwrap(), -2.0);
    }

    #[test]
    fn blow_up_examples() {
        assert_eq!(blow_up_time(&gamma(1.0)), -1.0);
        assert_eq!(blow_up_time(&gamma(0.5)), -2.0);
        assert_eq!(blow_up_time(&gamma(-0.25)), 4.0);
    }

    #[test]
    fn underdamped_ab_outside_cosine_form_is_rejected() {
        let spec = ModeSpec::seed(fig1(), Coefficients::AB { a: 1.0, b: 3.0 });
        assert!(matches!(spec, Err(Error::Domain(_))));
    }

    #[test]
    fn critical_wronskian_closed_form() {
        let p = fig2();
        for g in [0.3, 1.0, 5.0] {
            let r = gamma(g);
            let plus = ModeSpec::tilde(p, Coefficients::AB { a: 1.0, b: 0.0 }, r).unwrap();
            for i in 0..=20 {
                let t = i as f64 * 0.5;
                let u = eval_tilde(&plus, t).unwrap();
                let v = critical_second_solution(&p, &r, 1.0, t).unwrap();
                let want = -3.0 * (-2.0 * t).exp();
                assert!((wronskian(&u, &v) - want).abs() <= 1e-12 * want.abs());
            }
        }
    }
}
