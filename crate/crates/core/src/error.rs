use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested amplitude/phase view does not represent the given (A, B) pair.
    #[error("domain error: {0}")]
    Domain(String),

    /// `t` lies inside the guard band around the blow-up instant `t_star = -1/gamma`.
    #[error("time {t} is within the guard band of the singular instant {t_star}")]
    SingularTime { t: f64, t_star: f64 },

    #[error("operation requires {expected} regime, got {actual}")]
    Regime {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("finite differencing at t = {t} would cross the singular instant {t_star}")]
    DerivativeUnavailable { t: f64, t_star: f64 },

    #[error("integration interval [{t0}, {t_end}] contains the singular instant {t_star}")]
    SingularInterval { t0: f64, t_end: f64, t_star: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
}
