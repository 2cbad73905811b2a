//! Parameter sets of the six reference figures.
//!
//! Figures 1-3 plot a seed mode and three members of its tilde family;
//! figures 4-6 plot the antirestoring acceleration of the same families.

use crate::modes::ModeSpec;
use crate::params::{Coefficients, DampingParams, RiccatiParam};

/// One reference configuration: the seed mode and its tilde family members.
#[derive(Debug, Clone)]
pub struct FigureSet {
    pub number: u8,
    pub params: DampingParams,
    pub seed_coeffs: Coefficients,
    pub tilde_coeffs: Coefficients,
    /// `gamma` values with the labels used in column headers.
    pub gammas: Vec<(f64, &'static str)>,
    /// Emit `a(t)` instead of `y~(t)`.
    pub acceleration: bool,
}

impl FigureSet {
    pub fn seed(&self) -> ModeSpec {
        ModeSpec::seed(self.params, self.seed_coeffs).expect("figure seed is valid")
    }

    pub fn tilde(&self, gamma: f64) -> ModeSpec {
        let r = RiccatiParam::new(gamma).expect("figure gamma is nonzero");
        ModeSpec::tilde(self.params, self.tilde_coeffs, r).expect("figure family is valid")
    }

    pub fn tildes(&self) -> impl Iterator<Item = ModeSpec> + '_ {
        self.gammas.iter().map(|&(g, _)| self.tilde(g))
    }
}

const UNIT_COSINE: Coefficients = Coefficients::AmpPhase { amp: 1.0, phase: 0.0 };
const ONES: Coefficients = Coefficients::AB { a: 1.0, b: 1.0 };

/// Figure `n` in `1..=6`.
pub fn figure(n: u8) -> Option<FigureSet> {
    let base = match n {
        1 | 4 => FigureSet {
            number: n,
            // y_u = e^{-t/10} cos t: beta = 1/10, omega1 = 1
            params: DampingParams::from_omega0_sq(0.1, 1.01).unwrap(),
            seed_coeffs: UNIT_COSINE,
            tilde_coeffs: UNIT_COSINE,
            gammas: vec![(1.0, "1"), (0.5, "1/2"), (0.1, "1/10")],
            acceleration: n == 4,
        },
        2 | 5 => FigureSet {
            number: n,
            // y_c = e^{-t} (1 + t); tilde family with A = D = 1
            params: DampingParams::new(1.0, 1.0).unwrap(),
            seed_coeffs: ONES,
            tilde_coeffs: ONES,
            gammas: vec![(5.0, "5"), (5.0 / 3.0, "5/3"), (1.0, "1")],
            acceleration: n == 5,
        },
        3 | 6 => FigureSet {
            number: n,
            // y_o = e^{-t} cosh(t/5): beta = 1, alpha = 1/5
            params: DampingParams::from_omega0_sq(1.0, 24.0 / 25.0).unwrap(),
            seed_coeffs: UNIT_COSINE,
            tilde_coeffs: UNIT_COSINE,
            gammas: vec![(1.0, "1"), (0.5, "1/2"), (0.1, "1/10")],
            acceleration: n == 6,
        },
        _ => return None,
    };
    Some(base)
}

/// The three mode families (figures 1-3).
pub fn mode_figures() -> [FigureSet; 3] {
    [figure(1).unwrap(), figure(2).unwrap(), figure(3).unwrap()]
}
