//! Riccati-parameter (supersymmetric) damping modes of the free damped oscillator.
//!
//! The free damping law `y'' + 2 beta y' + omega0^2 y = 0` factorizes as
//! `A+ A- y = alpha^2 y` with `A+- = d/dt + beta +- gamma/(gamma t + 1)` for
//! any `gamma != 0`. Reversing the factors gives a partner operator whose
//! eigenmodes `y~ = A- y` form one-parameter families in each damping regime.
//!
//! - [`params`]: oscillator parameters, regimes, coefficient views
//! - [`riccati`]: the Riccati solution `h`, `f`, `g` and residuals
//! - [`modes`]: closed-form modes with analytic derivatives
//! - [`operators`]: the first- and second-order operators applied to functions
//! - [`oracle`]: an independent adaptive Runge-Kutta integrator
//! - [`verify`]: the named invariant suite
//! - [`cli`]: figure/eval/sweep/verify front end

pub mod cli;
pub mod error;
pub mod figures;
mod jet;
pub mod modes;
pub mod operators;
pub mod oracle;
pub mod params;
pub mod riccati;
pub mod verify;

pub use error::{Error, Result};
pub use jet::Jet;
pub use modes::{Family, ModeEval, ModeSpec, Sign};
pub use params::{Coefficients, DampingParams, Regime, RegimeTag, RiccatiParam};
