//! The oscillator's first- and second-order differential operators applied to
//! arbitrary functions of time.
//!
//! | kind       | action on `f`                                   |
//! |------------|-------------------------------------------------|
//! | `L`        | `f' + beta f`                                   |
//! | `Aplus`    | `f' + (beta + h) f`                             |
//! | `Aminus`   | `f' + (beta - h) f`                             |
//! | `N`        | `f'' + 2 beta f' + beta^2 f`                    |
//! | `Ng`       | `Aplus(Aminus f)`, evaluated by nesting          |
//! | `NgTilde`  | `f'' + 2 beta f' + (beta^2 - 2 h^2) f`          |
//! | `ModifiedNewton` | `f'' + 2 beta f' + (omega0^2 - 2 h^2) f`        |
//!
//! with `h = gamma/(gamma t + 1)`. Derivatives come from the function's
//! analytic evaluators when it has them, otherwise from central differences
//! with one level of Richardson extrapolation.

use crate::error::{Error, Result};
use crate::jet::{Jet, ORDER};
use crate::modes::{ModeSpec, Sign};
use crate::params::{DampingParams, RiccatiParam};
use crate::riccati::h_jet_unchecked;

/// A real function of time, optionally with analytic derivatives.
///
/// Implementations must be free of interior mutability; operators evaluate
/// them from many threads.
pub trait TimeFunction: Sync {
    fn value(&self, t: f64) -> f64;

    /// Analytic derivative of order `1..=3`, if the function provides one.
    fn derivative(&self, _order: usize, _t: f64) -> Option<f64> {
        None
    }

    /// A pole of the function that difference stencils must not cross.
    fn singularity(&self) -> Option<f64> {
        None
    }
}

/// A closure without derivative information; always takes the differencing path.
pub struct Sampled<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> TimeFunction for Sampled<F> {
    fn value(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// A closure returning the full derivative jet.
pub struct Analytic<F>(pub F);

impl<F: Fn(f64) -> Jet + Sync> TimeFunction for Analytic<F> {
    fn value(&self, t: f64) -> f64 {
        (self.0)(t).0[0]
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        (order <= ORDER).then(|| (self.0)(t).0[order])
    }
}

/// Polynomial `sum c_k t^k` with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    fn derivative_at(&self, order: usize, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.0.iter().enumerate().skip(order).rev() {
            let falling: f64 = (k - order + 1..=k).map(|j| j as f64).product();
            acc = acc * t + c * falling;
        }
        acc
    }
}

impl TimeFunction for Polynomial {
    fn value(&self, t: f64) -> f64 {
        self.derivative_at(0, t)
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        Some(self.derivative_at(order, t))
    }
}

/// Linear combination `sum w_i f_i`; analytic when every term is.
pub struct Combination<'a>(pub Vec<(f64, &'a dyn TimeFunction)>);

impl TimeFunction for Combination<'_> {
    fn value(&self, t: f64) -> f64 {
        self.0.iter().map(|(w, f)| w * f.value(t)).sum()
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        self.0
            .iter()
            .map(|(w, f)| f.derivative(order, t).map(|d| w * d))
            .sum()
    }

    fn singularity(&self) -> Option<f64> {
        self.0.iter().find_map(|(_, f)| f.singularity())
    }
}

impl TimeFunction for ModeSpec {
    fn value(&self, t: f64) -> f64 {
        self.jet(t).map_or(f64::NAN, |j| j.0[0])
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        if order > ORDER {
            return None;
        }
        self.jet(t).ok().map(|j| j.0[order])
    }

    fn singularity(&self) -> Option<f64> {
        self.riccati().map(|r| r.t_star())
    }
}

/// Elementary eigenmode `e^{(-beta +- alpha) t}` of `L`.
#[derive(Debug, Clone, Copy)]
pub struct SeedPm {
    pub params: DampingParams,
    pub sign: Sign,
}

impl TimeFunction for SeedPm {
    fn value(&self, t: f64) -> f64 {
        crate::modes::seed_pm_jet(&self.params, self.sign, t).map_or(f64::NAN, |j| j.0[0])
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        if order > ORDER {
            return None;
        }
        crate::modes::seed_pm_jet(&self.params, self.sign, t)
            .ok()
            .map(|j| j.0[order])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    L,
    Aplus,
    Aminus,
    N,
    Ng,
    NgTilde,
    ModifiedNewton,
}

impl OperatorKind {
    pub fn order(self) -> usize {
        match self {
            OperatorKind::L | OperatorKind::Aplus | OperatorKind::Aminus => 1,
            _ => 2,
        }
    }

    fn needs_riccati(self) -> bool {
        !matches!(self, OperatorKind::L | OperatorKind::N)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    params: DampingParams,
    riccati: Option<RiccatiParam>,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, params: DampingParams, riccati: Option<RiccatiParam>) -> Result<Self> {
        if kind.needs_riccati() && riccati.is_none() {
            return Err(Error::InvalidParameter(format!("{kind:?} needs a Riccati parameter")));
        }
        Ok(Self {
            kind,
            params,
            riccati,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    fn with_kind(&self, kind: OperatorKind) -> Self {
        Self { kind, ..*self }
    }

    /// `[h, h', h'', h''']`, zero for the operators without `gamma`.
    fn h_jet(&self, t: f64) -> Result<Jet> {
        match (self.kind.needs_riccati(), self.riccati) {
            (true, Some(r)) => {
                r.check(t)?;
                Ok(h_jet_unchecked(r.gamma(), t))
            }
            _ => Ok(Jet::constant(0.0)),
        }
    }

    /// Zeroth-order coefficient of the operator and its derivatives.
    fn potential(&self, t: f64) -> Result<Jet> {
        let beta = self.params.beta();
        let h = self.h_jet(t)?;
        Ok(match self.kind {
            OperatorKind::L => Jet::constant(beta),
            OperatorKind::Aplus => Jet::constant(beta) + h,
            OperatorKind::Aminus => Jet::constant(beta) - h,
            OperatorKind::N | OperatorKind::Ng => Jet::constant(beta * beta),
            OperatorKind::NgTilde => Jet::constant(beta * beta) - (h * h).scale(2.0),
            OperatorKind::ModifiedNewton => {
                Jet::constant(self.params.omega0_sq()) - (h * h).scale(2.0)
            }
        })
    }
}

/// How the derivatives entering an application were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differencing {
    Analytic,
    /// Central differences up to derivative order `derivative`, with the
    /// given truncation order in the step size.
    Central { derivative: usize, accuracy: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Application {
    pub value: f64,
    pub differencing: Differencing,
}

/// Central-difference settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Differencer {
    /// Base step is `step_factor[k-1] * L` for derivative order `k`, where the
    /// length scale `L` is `max(1, |t|)` capped by the distance to the nearest pole.
    pub step_factor: [f64; ORDER],
    pub richardson: bool,
    /// Smallest admissible fraction of the base step when shrinking near a pole.
    pub min_shrink: f64,
}

impl Default for Differencer {
    fn default() -> Self {
        let eps = f64::EPSILON;
        Self {
            step_factor: [eps.powf(1.0 / 5.0), eps.powf(1.0 / 6.0), eps.powf(1.0 / 7.0)],
            richardson: true,
            min_shrink: 1e-4,
        }
    }
}

impl Differencer {
    /// Steps for `depth` nested applications, each differencing the values
    /// of the one inside it. Every level uses `eps^(1/(depth + 3))`.
    ///
    /// Roundoff from the innermost stencil is divided by one step per level,
    /// so deeper chains need larger steps than a single derivative would.
    /// The exponent was chosen by scanning `eps^(1/q)` on the smooth test
    /// family, including points close to the pole: `q = 5` is best for two
    /// levels and `q = 6` for three.
    pub fn for_composition(depth: usize) -> Self {
        let step = f64::EPSILON.powf(1.0 / (depth as f64 + 3.0));
        Self {
            step_factor: [step; ORDER],
            ..Self::default()
        }
    }

    /// Plain second-order central differences with a fixed step.
    pub fn plain(step: f64) -> Self {
        Self {
            step_factor: [step; ORDER],
            richardson: false,
            min_shrink: 1e-4,
        }
    }

    fn accuracy(&self) -> usize {
        if self.richardson {
            4
        } else {
            2
        }
    }

    fn stencil(f: &dyn TimeFunction, order: usize, t: f64, h: f64) -> f64 {
        let v = |k: f64| f.value(t + k * h);
        match order {
            1 => (v(1.0) - v(-1.0)) / (2.0 * h),
            2 => (v(1.0) - 2.0 * v(0.0) + v(-1.0)) / (h * h),
            3 => (v(2.0) - 2.0 * v(1.0) + 2.0 * v(-1.0) - v(-2.0)) / (2.0 * h * h * h),
            _ => unreachable!("derivative order {order} not supported"),
        }
    }

    /// Central-difference estimate of `f^(order)(t)`, keeping every stencil
    /// point on the same side of the known poles.
    pub fn derivative(
        &self,
        f: &dyn TimeFunction,
        order: usize,
        t: f64,
        poles: &[f64],
    ) -> Result<f64> {
        assert!((1..=ORDER).contains(&order));
        let factor = self.step_factor[order - 1];
        let base = factor * t.abs().max(1.0);
        let reach = if order == 3 { 2.0 } else { 1.0 };
        let mut h = base;
        for &pole in poles {
            // Near a pole the function varies on the scale of the distance to it.
            let dist = (t - pole).abs();
            h = h.min(factor * dist).min(0.5 * dist / reach);
        }
        let unavailable = |pole: f64| Error::DerivativeUnavailable { t, t_star: pole };
        let nearest = || {
            poles
                .iter()
                .copied()
                .min_by(|a, b| (t - a).abs().total_cmp(&(t - b).abs()))
                .unwrap_or(f64::NAN)
        };
        if h < base * self.min_shrink {
            return Err(unavailable(nearest()));
        }
        let coarse = Self::stencil(f, order, t, h);
        let d = if self.richardson {
            let fine = Self::stencil(f, order, t, 0.5 * h);
            (4.0 * fine - coarse) / 3.0
        } else {
            coarse
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(unavailable(nearest()))
        }
    }
}

fn poles(op: &OperatorSpec, f: &dyn TimeFunction) -> Vec<f64> {
    let mut out = Vec::with_capacity(2);
    if op.kind.needs_riccati() {
        if let Some(r) = op.riccati {
            out.push(r.t_star());
        }
    }
    out.extend(f.singularity());
    out
}

/// Derivatives `f^(1..=upto)(t)`, analytic where available.
fn derivatives(
    f: &dyn TimeFunction,
    upto: usize,
    t: f64,
    poles: &[f64],
    diff: &Differencer,
) -> Result<([f64; ORDER], Differencing)> {
    let mut out = [0.0; ORDER];
    let mut differenced = 0;
    for k in 1..=upto {
        out[k - 1] = match f.derivative(k, t) {
            Some(d) => d,
            None => {
                differenced = k;
                diff.derivative(f, k, t, poles)?
            }
        };
    }
    let how = if differenced == 0 {
        Differencing::Analytic
    } else {
        Differencing::Central {
            derivative: differenced,
            accuracy: diff.accuracy(),
        }
    };
    Ok((out, how))
}

pub fn apply(op: &OperatorSpec, f: &dyn TimeFunction, t: f64) -> Result<Application> {
    let diff = if op.kind == OperatorKind::Ng {
        Differencer::for_composition(2)
    } else {
        Differencer::default()
    };
    apply_with(op, f, t, &diff)
}

pub fn apply_with(
    op: &OperatorSpec,
    f: &dyn TimeFunction,
    t: f64,
    diff: &Differencer,
) -> Result<Application> {
    let potential = op.potential(t)?;
    if op.kind == OperatorKind::Ng {
        let lowered = Applied::new(op.with_kind(OperatorKind::Aminus), f, *diff);
        return apply_with(&op.with_kind(OperatorKind::Aplus), &lowered, t, diff);
    }
    let poles = poles(op, f);
    let (d, differencing) = derivatives(f, op.kind.order(), t, &poles, diff)?;
    let v = f.value(t);
    let value = match op.kind.order() {
        1 => d[0] + potential.0[0] * v,
        _ => d[1] + 2.0 * op.params.beta() * d[0] + potential.0[0] * v,
    };
    Ok(Application {
        value,
        differencing,
    })
}

/// An operator applied to a function, itself usable as a [`TimeFunction`].
///
/// Derivatives of the result are analytic when the inner function carries
/// enough analytic derivatives; otherwise the outer operator differences the
/// composite values, raising the differencing order.
pub struct Applied<'a> {
    op: OperatorSpec,
    inner: &'a dyn TimeFunction,
    diff: Differencer,
}

impl<'a> Applied<'a> {
    pub fn new(op: OperatorSpec, inner: &'a dyn TimeFunction, diff: Differencer) -> Self {
        Self { op, inner, diff }
    }

    /// Derivative of the result from derivatives of the inner function,
    /// supplied by `inner_derivative(k, t)` for `k >= 1`.
    fn derivative_from(
        &self,
        order: usize,
        t: f64,
        inner_derivative: &dyn Fn(usize, f64) -> Option<f64>,
    ) -> Option<f64> {
        if self.op.kind == OperatorKind::Ng {
            let lowered = Applied::new(self.op.with_kind(OperatorKind::Aminus), self.inner, self.diff);
            let raised = Applied::new(self.op.with_kind(OperatorKind::Aplus), &lowered, self.diff);
            return raised.derivative_from(order, t, &|k, t| {
                lowered.derivative_from(k, t, inner_derivative)
            });
        }
        let need = order + self.op.kind.order();
        if need > ORDER {
            return None;
        }
        let mut f = [0.0; ORDER + 1];
        f[0] = self.inner.value(t);
        for (k, slot) in f.iter_mut().enumerate().skip(1).take(need) {
            *slot = inner_derivative(k, t)?;
        }
        let c = self.op.potential(t).ok()?.0;
        let beta = self.op.params.beta();
        // Leibniz on c f plus the derivative part.
        let product = |n: usize| -> f64 {
            const BINOM: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];
            (0..=n).map(|k| BINOM[n][k] * c[k] * f[n - k]).sum()
        };
        Some(match self.op.kind.order() {
            1 => f[order + 1] + product(order),
            _ => f[order + 2] + 2.0 * beta * f[order + 1] + product(order),
        })
    }
}

impl TimeFunction for Applied<'_> {
    fn value(&self, t: f64) -> f64 {
        apply_with(&self.op, self.inner, t, &self.diff).map_or(f64::NAN, |a| a.value)
    }

    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        self.derivative_from(order, t, &|k, t| self.inner.derivative(k, t))
    }

    fn singularity(&self) -> Option<f64> {
        match (self.op.kind.needs_riccati(), self.op.riccati) {
            (true, Some(r)) => Some(r.t_star()),
            _ => self.inner.singularity(),
        }
    }
}

/// `A+ A- f - N f`; vanishes for every `f` because `h' + h^2 = 0`.
pub fn factorization_defect(
    p: &DampingParams,
    r: &RiccatiParam,
    f: &dyn TimeFunction,
    t: f64,
) -> Result<f64> {
    factorization_defect_with(p, r, f, t, &Differencer::for_composition(2))
}

pub fn factorization_defect_with(
    p: &DampingParams,
    r: &RiccatiParam,
    f: &dyn TimeFunction,
    t: f64,
    diff: &Differencer,
) -> Result<f64> {
    let ng = OperatorSpec::new(OperatorKind::Ng, *p, Some(*r))?;
    let n = OperatorSpec::new(OperatorKind::N, *p, None)?;
    Ok(apply_with(&ng, f, t, diff)?.value - apply_with(&n, f, t, diff)?.value)
}

/// `N~g (A- f) - A- (Ng f)`; vanishes for every `f`.
pub fn intertwining_defect(
    p: &DampingParams,
    r: &RiccatiParam,
    f: &dyn TimeFunction,
    t: f64,
) -> Result<f64> {
    intertwining_defect_with(p, r, f, t, &Differencer::for_composition(3))
}

pub fn intertwining_defect_with(
    p: &DampingParams,
    r: &RiccatiParam,
    f: &dyn TimeFunction,
    t: f64,
    diff: &Differencer,
) -> Result<f64> {
    let minus = OperatorSpec::new(OperatorKind::Aminus, *p, Some(*r))?;
    let tilde = OperatorSpec::new(OperatorKind::NgTilde, *p, Some(*r))?;
    let ng = OperatorSpec::new(OperatorKind::Ng, *p, Some(*r))?;
    let lowered = Applied::new(minus, f, *diff);
    let product = Applied::new(ng, f, *diff);
    Ok(apply_with(&tilde, &lowered, t, diff)?.value - apply_with(&minus, &product, t, diff)?.value)
}
