//! The oscillator Riccati equation `-f' - f^2 + 2 beta f = beta^2` and its
//! general solution `f = beta + h`, `g = beta - h`, `h(t) = gamma/(gamma t + 1)`.
//!
//! All derivatives here are closed forms; no differencing.

use crate::error::Result;
use crate::jet::Jet;
use crate::params::{DampingParams, RiccatiParam};

/// A solution of `h' + h^2 = 0`: either the particular `h = 0` or the general
/// one-parameter branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiSolution {
    riccati: Option<RiccatiParam>,
}

impl RiccatiSolution {
    /// `h = 0`, i.e. `f = g = beta`.
    pub fn particular() -> Self {
        Self { riccati: None }
    }

    pub fn general(r: RiccatiParam) -> Self {
        Self { riccati: Some(r) }
    }

    pub fn param(&self) -> Option<RiccatiParam> {
        self.riccati
    }

    /// `[h, h', h'', h''']` at `t`.
    pub fn h_jet(&self, t: f64) -> Result<Jet> {
        match self.riccati {
            None => Ok(Jet::constant(0.0)),
            Some(r) => {
                r.check(t)?;
                Ok(h_jet_unchecked(r.gamma(), t))
            }
        }
    }

    pub fn h(&self, t: f64) -> Result<f64> {
        self.h_jet(t).map(|j| j.0[0])
    }

    pub fn h_prime(&self, t: f64) -> Result<f64> {
        self.h_jet(t).map(|j| j.0[1])
    }

    /// `f(t) = beta + h(t)` and `f'(t)`.
    pub fn f(&self, p: &DampingParams, t: f64) -> Result<(f64, f64)> {
        let h = self.h_jet(t)?;
        Ok((p.beta() + h.0[0], h.0[1]))
    }

    /// `g(t) = beta - h(t)` and `g'(t)`.
    pub fn g(&self, p: &DampingParams, t: f64) -> Result<(f64, f64)> {
        let h = self.h_jet(t)?;
        Ok((p.beta() - h.0[0], -h.0[1]))
    }
}

/// `h = gamma/(gamma t + 1)` with `h' = -h^2`, `h'' = 2 h^3`, `h''' = -6 h^4`.
pub(crate) fn h_jet_unchecked(gamma: f64, t: f64) -> Jet {
    let h = gamma / (gamma * t + 1.0);
    let h2 = h * h;
    Jet([h, -h2, 2.0 * h2 * h, -6.0 * h2 * h2])
}

pub fn h_eval(s: &RiccatiSolution, t: f64) -> Result<f64> {
    s.h(t)
}

/// `h'(t) + h(t)^2`, with `h'` from its own closed form `-gamma^2/(gamma t + 1)^2`.
pub fn riccati_residual(s: &RiccatiSolution, t: f64) -> Result<f64> {
    let h = s.h(t)?;
    let h_prime = match s.param() {
        None => 0.0,
        Some(r) => {
            let d = r.gamma() * t + 1.0;
            -(r.gamma() * r.gamma()) / (d * d)
        }
    };
    Ok(h_prime + h * h)
}

/// `-f' - f^2 + 2 beta f - beta^2` for `f = beta + h`.
pub fn full_riccati_residual(p: &DampingParams, s: &RiccatiSolution, t: f64) -> Result<f64> {
    let (f, f_prime) = s.f(p, t)?;
    let beta = p.beta();
    Ok(-f_prime - f * f + 2.0 * beta * f - beta * beta)
}

/// Defects of the two factorization conditions `f + g = 2 beta` and
/// `g' + f g = beta^2`.
pub fn factorization_conditions(p: &DampingParams, s: &RiccatiSolution, t: f64) -> Result<(f64, f64)> {
    let (f, _) = s.f(p, t)?;
    let (g, g_prime) = s.g(p, t)?;
    let beta = p.beta();
    Ok((f + g - 2.0 * beta, g_prime + f * g - beta * beta))
}
