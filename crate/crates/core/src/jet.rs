//! Truncated derivative jets `[f, f', f'', f''']` with Leibniz products.

use std::ops::{Add, Mul, Neg, Sub};

pub const ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; ORDER + 1]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    /// `e^{k t}` and its derivatives.
    pub fn exp(k: f64, t: f64) -> Self {
        let e = (k * t).exp();
        Jet([e, k * e, k * k * e, k * k * k * e])
    }

    /// `cos(w t + phi)`.
    pub fn cos(w: f64, phi: f64, t: f64) -> Self {
        let (s, c) = (w * t + phi).sin_cos();
        Jet([c, -w * s, -w * w * c, w * w * w * s])
    }

    /// `sin(w t + phi)`.
    pub fn sin(w: f64, phi: f64, t: f64) -> Self {
        let (s, c) = (w * t + phi).sin_cos();
        Jet([s, w * c, -w * w * s, -w * w * w * c])
    }

    /// `cosh(w t + phi)`.
    pub fn cosh(w: f64, phi: f64, t: f64) -> Self {
        let x = w * t + phi;
        let (s, c) = (x.sinh(), x.cosh());
        Jet([c, w * s, w * w * c, w * w * w * s])
    }

    /// `sinh(w t + phi)`.
    pub fn sinh(w: f64, phi: f64, t: f64) -> Self {
        let x = w * t + phi;
        let (s, c) = (x.sinh(), x.cosh());
        Jet([s, w * c, w * w * s, w * w * w * c])
    }

    /// `(t - t0)^2`.
    pub fn square_shift(t0: f64, t: f64) -> Self {
        let u = t - t0;
        Jet([u * u, 2.0 * u, 2.0, 0.0])
    }

    /// `a + b t`.
    pub fn linear(a: f64, b: f64, t: f64) -> Self {
        Jet([a + b * t, b, 0.0, 0.0])
    }

    pub fn scale(self, c: f64) -> Self {
        Jet(self.0.map(|v| c * v))
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Jet(out)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        const BINOM: [[f64; ORDER + 1]; ORDER + 1] = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ];
        let (f, g) = (self.0, rhs.0);
        let mut out = [0.0; ORDER + 1];
        for (n, o) in out.iter_mut().enumerate() {
            *o = (0..=n).map(|k| BINOM[n][k] * f[k] * g[n - k]).sum();
        }
        Jet(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz_matches_known_product() {
        // t^2 * e^t: derivatives e^t (t^2), e^t (t^2 + 2t), e^t (t^2 + 4t + 2), e^t (t^2 + 6t + 6)
        let t = 0.7;
        let p = Jet::square_shift(0.0, t) * Jet::exp(1.0, t);
        let e = t.exp();
        let want = [t * t, t * t + 2.0 * t, t * t + 4.0 * t + 2.0, t * t + 6.0 * t + 6.0];
        for (got, w) in p.0.iter().zip(want) {
            assert!((got - e * w).abs() < 1e-14 * e * w.abs().max(1.0));
        }
    }

    #[test]
    fn pythagorean_jet_is_constant() {
        let t = 1.3;
        let s = Jet::sin(2.0, 0.4, t);
        let c = Jet::cos(2.0, 0.4, t);
        let one = s * s + c * c;
        assert!((one.0[0] - 1.0).abs() < 1e-15);
        for d in &one.0[1..] {
            assert!(d.abs() < 1e-13);
        }
    }
}
