//! Named invariant checks with thresholds and worst-case reporting.
//!
//! Every check draws its random points from its own ChaCha stream keyed by
//! `(seed, check_name)`, so reports are bit-identical for a given seed and
//! independent of which other checks run. Residuals are normalized by
//! `max(1, local magnitude)` unless the check states otherwise.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::figures::mode_figures;
use crate::jet::Jet;
use crate::modes::{self, ModeSpec, Sign};
use crate::operators::{
    self, apply, Analytic, Combination, Differencer, OperatorKind, OperatorSpec, Sampled, SeedPm,
    TimeFunction,
};
use crate::oracle::{self, Ivp};
use crate::params::{self, Coefficients, DampingParams, Regime, RiccatiParam, TOL_CRIT};
use crate::riccati::{self, RiccatiSolution};

/// Random points per check.
pub const POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    All,
    Core,
    Riccati,
    Factorization,
    Intertwining,
    ModifiedNewton,
    Limits,
    Wronskian,
    Oracle,
}

impl Scope {
    pub const NAMES: [&'static str; 9] = [
        "all",
        "core",
        "riccati",
        "factorization",
        "intertwining",
        "eq10",
        "limits",
        "wronskian",
        "oracle",
    ];
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all" => Scope::All,
            "core" => Scope::Core,
            "riccati" => Scope::Riccati,
            "factorization" => Scope::Factorization,
            "intertwining" => Scope::Intertwining,
            "eq10" => Scope::ModifiedNewton,
            "limits" => Scope::Limits,
            "wronskian" => Scope::Wronskian,
            "oracle" => Scope::Oracle,
            other => {
                return Err(format!(
                    "unknown scope '{other}' (expected one of {})",
                    Scope::NAMES.join(", ")
                ))
            }
        })
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Scope::All,
            Scope::Core,
            Scope::Riccati,
            Scope::Factorization,
            Scope::Intertwining,
            Scope::ModifiedNewton,
            Scope::Limits,
            Scope::Wronskian,
            Scope::Oracle,
        ]
        .iter()
        .position(|s| s == self)
        .unwrap();
        f.write_str(Scope::NAMES[i])
    }
}

/// Where the largest residual occurred. Fields that do not apply are `null`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct WorstPoint {
    pub beta: Option<f64>,
    pub omega0: Option<f64>,
    pub gamma: Option<f64>,
    pub t: Option<f64>,
}

impl WorstPoint {
    fn at(p: &DampingParams, gamma: Option<f64>, t: f64) -> Self {
        Self {
            beta: Some(p.beta()),
            omega0: Some(p.omega0()),
            gamma,
            t: Some(t),
        }
    }

    fn gamma_t(gamma: f64, t: f64) -> Self {
        Self {
            gamma: Some(gamma),
            t: Some(t),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: &'static str,
    /// `null` in JSON when a residual was not finite.
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub worst_point: WorstPoint,
}

/// Running maximum of a residual.
struct Worst {
    max: f64,
    point: WorstPoint,
    seen: bool,
}

impl Worst {
    fn new() -> Self {
        Self {
            max: 0.0,
            point: WorstPoint::default(),
            seen: false,
        }
    }

    fn record(&mut self, residual: f64, point: WorstPoint) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        if r > self.max || !self.seen {
            self.max = r;
            self.point = point;
            self.seen = true;
        }
    }

    fn fail(&mut self, point: WorstPoint) {
        self.record(f64::INFINITY, point);
    }

    fn report(self, check_name: &'static str, threshold: f64) -> CheckReport {
        CheckReport {
            check_name,
            max_residual: self.max,
            threshold,
            passed: self.max <= threshold,
            worst_point: self.point,
        }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, &'static str) -> CheckReport;

struct Check {
    name: &'static str,
    scope: Scope,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check { name: "core.classify_exhaustive", scope: Scope::Core, run: core_classify },
    Check { name: "core.coeff_roundtrip", scope: Scope::Core, run: core_roundtrip },
    Check { name: "core.frequency_partition", scope: Scope::Core, run: core_partition },
    Check { name: "modes.blow_up_sign", scope: Scope::ModifiedNewton, run: modes_blow_up_sign },
    Check { name: "modes.critical_wronskian", scope: Scope::Wronskian, run: modes_wronskian },
    Check { name: "modes.derivative_consistency", scope: Scope::ModifiedNewton, run: modes_derivatives },
    Check { name: "modes.eigen_seed", scope: Scope::ModifiedNewton, run: modes_eigen_seed },
    Check { name: "modes.eigen_tilde", scope: Scope::Intertwining, run: modes_eigen_tilde },
    Check { name: "modes.limit_overdamped", scope: Scope::Limits, run: modes_limit_over },
    Check { name: "modes.limit_underdamped", scope: Scope::Limits, run: modes_limit_under },
    Check { name: "modes.limit_underdamped_approach", scope: Scope::Limits, run: modes_limit_under_approach },
    Check { name: "modes.seed_residual", scope: Scope::ModifiedNewton, run: modes_seed_residual },
    Check { name: "modes.tilde_equation_residual", scope: Scope::ModifiedNewton, run: modes_tilde_equation },
    Check { name: "operators.aplus_not_eigen", scope: Scope::Factorization, run: ops_aplus_not_eigen },
    Check { name: "operators.factorization_analytic", scope: Scope::Factorization, run: ops_fact_analytic },
    Check { name: "operators.factorization_fd", scope: Scope::Factorization, run: ops_fact_fd },
    Check { name: "operators.fd_convergence", scope: Scope::Factorization, run: ops_fd_convergence },
    Check { name: "operators.intertwining_analytic", scope: Scope::Intertwining, run: ops_inter_analytic },
    Check { name: "operators.intertwining_fd", scope: Scope::Intertwining, run: ops_inter_fd },
    Check { name: "operators.linearity", scope: Scope::Factorization, run: ops_linearity },
    Check { name: "operators.modified_newton_shift", scope: Scope::Factorization, run: ops_modified_newton_shift },
    Check { name: "operators.susy_mapping", scope: Scope::Intertwining, run: ops_susy_mapping },
    Check { name: "oracle.closed_form_match", scope: Scope::Oracle, run: oracle_closed_form },
    Check { name: "oracle.order_verification", scope: Scope::Oracle, run: oracle_order },
    Check { name: "oracle.self_convergence", scope: Scope::Oracle, run: oracle_self_convergence },
    Check { name: "oracle.time_reversal", scope: Scope::Oracle, run: oracle_time_reversal },
    Check { name: "riccati.full_residual", scope: Scope::Riccati, run: riccati_full },
    Check { name: "riccati.gamma_zero_limit", scope: Scope::Riccati, run: riccati_gamma_zero },
    Check { name: "riccati.h_identity", scope: Scope::Riccati, run: riccati_h_identity },
    Check { name: "riccati.product_condition", scope: Scope::Riccati, run: riccati_product },
    Check { name: "riccati.sum_condition", scope: Scope::Riccati, run: riccati_sum },
];

/// Names of every registered check, in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Names of the checks a scope selects.
pub fn scope_checks(scope: Scope) -> Vec<&'static str> {
    CHECKS
        .iter()
        .filter(|c| scope == Scope::All || c.scope == scope)
        .map(|c| c.name)
        .collect()
}

fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a keeps the per-check stream stable across platforms and releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Runs every check in `scope`; reports are sorted by `check_name`.
pub fn run_suite(scope: Scope, seed: u64) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = CHECKS
        .iter()
        .filter(|c| scope == Scope::All || c.scope == scope)
        .map(|c| (c.run)(&mut stream(seed, c.name), c.name))
        .collect();
    reports.sort_by(|a, b| a.check_name.cmp(b.check_name));
    reports
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

// ---------------------------------------------------------------------------
// sampling helpers

fn random_params(rng: &mut ChaCha8Rng) -> DampingParams {
    DampingParams::new(rng.gen_range(0.05..2.0), rng.gen_range(0.05..2.0)).unwrap()
}

fn random_gamma(rng: &mut ChaCha8Rng) -> RiccatiParam {
    let mag = rng.gen_range(0.05..5.0);
    let g = if rng.gen_bool(0.5) { mag } else { -mag };
    RiccatiParam::new(g).unwrap()
}

/// Time in `[0, 10]` with `|gamma t + 1| >= margin`.
fn random_time(rng: &mut ChaCha8Rng, r: &RiccatiParam, margin: f64) -> f64 {
    loop {
        let t = rng.gen_range(0.0..=10.0);
        if (r.gamma() * t + 1.0).abs() >= margin {
            return t;
        }
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn h_at(r: &RiccatiParam, t: f64) -> f64 {
    r.gamma() / (r.gamma() * t + 1.0)
}

/// Smooth test functions with exact derivative jets.
#[derive(Debug, Clone, Copy)]
enum TestFn {
    Cubic([f64; 4]),
    Wave { w: f64, phi: f64, amp: f64 },
    Decay { k: f64, amp: f64 },
}

impl TestFn {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        match rng.gen_range(0..3) {
            0 => TestFn::Cubic([
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-0.1..0.1),
            ]),
            1 => TestFn::Wave {
                w: rng.gen_range(0.2..3.0),
                phi: rng.gen_range(0.0..std::f64::consts::TAU),
                amp: rng.gen_range(0.5..2.0),
            },
            _ => TestFn::Decay {
                k: rng.gen_range(-1.0..0.3),
                amp: rng.gen_range(0.5..2.0),
            },
        }
    }

    fn jet(&self, t: f64) -> Jet {
        match *self {
            TestFn::Cubic(c) => Jet([
                c[0] + t * (c[1] + t * (c[2] + t * c[3])),
                c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]),
                2.0 * c[2] + 6.0 * t * c[3],
                6.0 * c[3],
            ]),
            TestFn::Wave { w, phi, amp } => Jet::sin(w, phi, t).scale(amp),
            TestFn::Decay { k, amp } => Jet::exp(k, t).scale(amp),
        }
    }

    /// Largest derivative magnitude up to third order, floored at one.
    fn scale(&self, t: f64) -> f64 {
        max_abs(&self.jet(t).0).max(1.0)
    }
}

// ---------------------------------------------------------------------------
// core

fn core_classify(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for i in 0..POINTS {
        // Every tenth point sits on or next to the critical band edge.
        let p = if i % 10 == 0 {
            let w = rng.gen_range(0.05..2.0);
            let off = rng.gen_range(-3.0..3.0) * TOL_CRIT;
            DampingParams::from_omega0_sq((w * w * (1.0 + off)).sqrt(), w * w).unwrap()
        } else {
            random_params(rng)
        };
        let a2 = p.alpha_sq();
        let band = TOL_CRIT * p.omega0_sq();
        let ok = match params::classify_regime(&p) {
            Regime::Underdamped { omega1 } => a2 < -band && omega1 > 0.0,
            Regime::Overdamped { alpha } => a2 > band && alpha > 0.0,
            Regime::Critical => a2.abs() <= band,
        } && params::classify_regime(&p) == params::classify_regime(&p);
        worst.record(if ok { 0.0 } else { 1.0 }, WorstPoint::at(&p, None, f64::NAN));
    }
    worst.point.t = None;
    worst.report(name, 0.0)
}

fn core_partition(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..POINTS {
        let p = random_params(rng);
        let (b2, w2) = (p.beta() * p.beta(), p.omega0_sq());
        let res = match p.regime() {
            Regime::Underdamped { omega1 } => b2 + omega1 * omega1 - w2,
            Regime::Overdamped { alpha } => b2 - alpha * alpha - w2,
            Regime::Critical => 0.0,
        };
        let point = WorstPoint {
            beta: Some(p.beta()),
            omega0: Some(p.omega0()),
            ..WorstPoint::default()
        };
        worst.record(res / b2.max(w2), point);
    }
    worst.report(name, 1e-14)
}

fn core_roundtrip(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let trig = Regime::Underdamped { omega1: 1.0 };
    let hyper = Regime::Overdamped { alpha: 1.0 };
    let point = WorstPoint::default();
    for i in 0..POINTS {
        let res = match i % 3 {
            0 => {
                let (a, b) = (rng.gen_range(1e-3..10.0), rng.gen_range(1e-3..10.0));
                ab_roundtrip(a, b, &hyper)
            }
            1 => {
                // Opposite-sign pairs strictly inside |A+B| < 2 sqrt|AB|.
                let a: f64 = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let b = -a * rng.gen_range(0.25..4.0);
                if a * a + 6.0 * a * b + b * b > -1e-2 * a * a {
                    continue;
                }
                ab_roundtrip(a, b, &trig)
            }
            _ => {
                let a = rng.gen_range(-10.0..10.0);
                ab_roundtrip(a, a, &trig)
            }
        };
        worst.record(res, point);
    }
    worst.report(name, 1e-12)
}

fn ab_roundtrip(a: f64, b: f64, r: &Regime) -> f64 {
    let Ok((amp, phase)) = params::ab_to_amplitude_phase(a, b, r) else {
        return f64::INFINITY;
    };
    let Ok((a2, b2)) = params::amplitude_phase_to_ab(amp, phase, r) else {
        return f64::INFINITY;
    };
    let scale = a.abs().max(b.abs());
    (a2 - a).abs().max((b2 - b).abs()) / scale
}

// ---------------------------------------------------------------------------
// riccati

fn riccati_points(
    rng: &mut ChaCha8Rng,
    name: &'static str,
    threshold: f64,
    residual: impl Fn(&DampingParams, &RiccatiSolution, f64) -> crate::Result<f64>,
) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..POINTS {
        let p = random_params(rng);
        let r = random_gamma(rng);
        let s = RiccatiSolution::general(r);
        let t = random_time(rng, &r, 2.0 * r.guard_band());
        let point = WorstPoint::at(&p, Some(r.gamma()), t);
        match residual(&p, &s, t) {
            Ok(v) => worst.record(v, point),
            Err(_) => worst.fail(point),
        }
    }
    worst.report(name, threshold)
}

fn riccati_h_identity(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    riccati_points(rng, name, 1e-13, |_, s, t| {
        let h = s.h(t)?;
        Ok(riccati::riccati_residual(s, t)? / (h * h).max(1.0))
    })
}

fn riccati_full(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    riccati_points(rng, name, 1e-12, |p, s, t| {
        let (f, fp) = s.f(p, t)?;
        let scale = max_abs(&[f * f, fp, p.beta() * p.beta()]).max(1.0);
        Ok(riccati::full_riccati_residual(p, s, t)? / scale)
    })
}

fn riccati_sum(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    riccati_points(rng, name, 1e-12, |p, s, t| {
        let (sum, _) = riccati::factorization_conditions(p, s, t)?;
        let (f, g) = (s.f(p, t)?.0, s.g(p, t)?.0);
        Ok(sum / max_abs(&[f, g]).max(1.0))
    })
}

fn riccati_product(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    riccati_points(rng, name, 1e-12, |p, s, t| {
        let (_, prod) = riccati::factorization_conditions(p, s, t)?;
        let h = s.h(t)?;
        Ok(prod / max_abs(&[p.beta() * p.beta(), h * h]).max(1.0))
    })
}

fn riccati_gamma_zero(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let r = RiccatiParam::new(1e-8).unwrap();
    let s = RiccatiSolution::general(r);
    for t in oracle::uniform_grid(0.0, 10.0, POINTS) {
        let point = WorstPoint::gamma_t(r.gamma(), t);
        match s.h(t) {
            Ok(h) => worst.record(h, point),
            Err(_) => worst.fail(point),
        }
    }
    worst.report(name, 1e-7)
}

// ---------------------------------------------------------------------------
// modes

fn figure_times(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..POINTS).map(|_| rng.gen_range(0.0..=10.0)).collect()
}

fn modes_tilde_equation(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let ts = figure_times(rng);
    for fig in mode_figures() {
        for spec in fig.tildes() {
            let r = spec.riccati().unwrap();
            for &t in &ts {
                let point = WorstPoint::at(&fig.params, Some(r.gamma()), t);
                match modes::eval_tilde(&spec, t) {
                    Ok(e) => {
                        let (res, scale) = modes::tilde_residual(&fig.params, &r, &e);
                        worst.record(res / scale.max(1.0), point);
                    }
                    Err(_) => worst.fail(point),
                }
            }
        }
    }
    // The critical reduction-of-order solution on its own.
    let fig2 = &mode_figures()[1];
    for &(g, _) in &fig2.gammas {
        let r = RiccatiParam::new(g).unwrap();
        for &t in ts.iter().step_by(10) {
            let e = modes::critical_second_solution(&fig2.params, &r, 1.0, t).unwrap();
            let (res, scale) = modes::tilde_residual(&fig2.params, &r, &e);
            worst.record(res / scale.max(1.0), WorstPoint::at(&fig2.params, Some(g), t));
        }
    }
    worst.report(name, 1e-11)
}

fn modes_seed_residual(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let mut specs: Vec<ModeSpec> = mode_figures().iter().map(|f| f.seed()).collect();
    for _ in 0..20 {
        let p = random_params(rng);
        let c = match p.regime() {
            Regime::Overdamped { .. } => Coefficients::AB {
                a: rng.gen_range(-2.0..2.0),
                b: rng.gen_range(-2.0..2.0),
            },
            _ => Coefficients::AmpPhase {
                amp: rng.gen_range(0.0..2.0),
                phase: rng.gen_range(-3.0..3.0),
            },
        };
        specs.push(ModeSpec::seed(p, c).unwrap());
    }
    for spec in &specs {
        for _ in 0..POINTS / 10 {
            let t = rng.gen_range(0.0..=10.0);
            let e = modes::eval_seed(spec, t);
            let (res, scale) = modes::seed_residual(spec.params(), &e);
            worst.record(res / scale.max(1.0), WorstPoint::at(spec.params(), None, t));
        }
    }
    worst.report(name, 1e-12)
}

fn eigen_params() -> [DampingParams; 3] {
    [
        mode_figures()[2].params,
        DampingParams::new(1.0, 1.0).unwrap(),
        DampingParams::new(0.7, 0.3).unwrap(),
    ]
}

fn modes_eigen_seed(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for p in eigen_params() {
        let n = OperatorSpec::new(OperatorKind::N, p, None).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let y = SeedPm { params: p, sign };
            for _ in 0..POINTS / 6 {
                let t = rng.gen_range(0.0..=10.0);
                let point = WorstPoint::at(&p, None, t);
                match apply(&n, &y, t) {
                    Ok(a) => {
                        let j = modes::seed_pm_jet(&p, sign, t).unwrap().0;
                        let scale = max_abs(&[j[2], 2.0 * p.beta() * j[1], p.beta() * p.beta() * j[0]]);
                        worst.record((a.value - p.alpha_sq() * j[0]) / scale, point);
                    }
                    Err(_) => worst.fail(point),
                }
            }
        }
    }
    worst.report(name, 1e-12)
}

fn modes_eigen_tilde(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let params = [eigen_params()[0], eigen_params()[2]];
    for p in params {
        for &g in &[1.0, 0.5, 0.1, -0.05] {
            let r = RiccatiParam::new(g).unwrap();
            let op = OperatorSpec::new(OperatorKind::NgTilde, p, Some(r)).unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let y = Analytic(move |t: f64| {
                    modes::tilde_pm_jet(&p, &r, sign, t).unwrap_or(Jet([f64::NAN; 4]))
                });
                for _ in 0..POINTS / 16 {
                    let t = random_time(rng, &r, 0.05);
                    let point = WorstPoint::at(&p, Some(g), t);
                    match apply(&op, &y, t) {
                        Ok(a) => {
                            let j = y.0(t).0;
                            let h = h_at(&r, t);
                            let scale = max_abs(&[
                                j[2],
                                2.0 * p.beta() * j[1],
                                p.beta() * p.beta() * j[0],
                                2.0 * h * h * j[0],
                            ])
                            .max(1.0);
                            worst.record((a.value - p.alpha_sq() * j[0]) / scale, point);
                        }
                        Err(_) => worst.fail(point),
                    }
                }
            }
        }
    }
    worst.report(name, 1e-11)
}

fn modes_limit_over(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let p = mode_figures()[2].params;
    let alpha = p.regime().alpha().unwrap();
    let r = RiccatiParam::new(1e-6).unwrap();
    for t in oracle::uniform_grid(0.0, 10.0, POINTS) {
        let point = WorstPoint::at(&p, Some(r.gamma()), t);
        for sign in [Sign::Plus, Sign::Minus] {
            let tilde = modes::eval_tilde_pm(&p, &r, sign, t).unwrap().y;
            let seed = modes::eval_seed_pm(&p, sign, t).unwrap().y;
            worst.record(tilde / (sign.factor() * alpha * seed) - 1.0, point);
        }
    }
    worst.report(name, 1e-4)
}

fn underdamped_specs(rng: &mut ChaCha8Rng) -> Vec<(DampingParams, Coefficients)> {
    let mut out = vec![(mode_figures()[0].params, mode_figures()[0].tilde_coeffs)];
    while out.len() < 10 {
        let p = random_params(rng);
        if p.regime().omega1().is_some() {
            let c = Coefficients::AmpPhase {
                amp: rng.gen_range(0.1..2.0),
                phase: rng.gen_range(-3.0..3.0),
            };
            out.push((p, c));
        }
    }
    out
}

fn modes_limit_under(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for (p, c) in underdamped_specs(rng) {
        let seed = ModeSpec::seed(p, c).unwrap();
        let (amp, phase) = c.to_amplitude_phase(&p.regime()).unwrap();
        let w1 = p.regime().omega1().unwrap();
        for _ in 0..POINTS / 10 {
            let t = rng.gen_range(0.0..=10.0);
            let lim = modes::eval_tilde_limit(&seed, t);
            // Stated limit: -A~ omega1 sin(omega1 t + phi) e^{-beta t}
            let stated = -amp * w1 * (w1 * t + phase).sin() * (-p.beta() * t).exp();
            let (res, scale) = modes::seed_residual(&p, &lim);
            let point = WorstPoint::at(&p, None, t);
            worst.record(res / scale.max(1.0), point);
            worst.record((lim.y - stated) / stated.abs().max(1.0), point);
        }
    }
    worst.report(name, 1e-12)
}

fn modes_limit_under_approach(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let r = RiccatiParam::new(1e-6).unwrap();
    for (p, c) in underdamped_specs(rng) {
        let tilde = ModeSpec::tilde(p, c, r).unwrap();
        for _ in 0..POINTS / 10 {
            let t = rng.gen_range(0.0..=10.0);
            let lim = modes::eval_tilde_limit(&tilde, t).y;
            let y = modes::eval_tilde(&tilde, t).unwrap().y;
            worst.record((y - lim) / lim.abs().max(1.0), WorstPoint::at(&p, Some(r.gamma()), t));
        }
    }
    worst.report(name, 1e-4)
}

fn modes_wronskian(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let mut cases: Vec<(f64, f64)> = mode_figures()[1].gammas.iter().map(|&(g, _)| (1.0, g)).collect();
    for _ in 0..7 {
        cases.push((rng.gen_range(0.1..2.0), random_gamma(rng).gamma().abs()));
    }
    for (beta, g) in cases {
        let p = DampingParams::new(beta, beta).unwrap();
        let r = RiccatiParam::new(g).unwrap();
        let first = ModeSpec::tilde(p, Coefficients::AB { a: 1.0, b: 0.0 }, r).unwrap();
        for _ in 0..POINTS / 10 {
            let t = rng.gen_range(0.0..=10.0);
            let u = modes::eval_tilde(&first, t).unwrap();
            let v = modes::critical_second_solution(&p, &r, 1.0, t).unwrap();
            let want = -3.0 * (-2.0 * beta * t).exp();
            worst.record((modes::wronskian(&u, &v) - want) / want.abs(), WorstPoint::at(&p, Some(g), t));
        }
    }
    worst.report(name, 1e-12)
}

type ModeFn = Box<dyn Fn(f64) -> crate::Result<modes::ModeEval>>;

fn modes_derivatives(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    const STEP: f64 = 1e-5;
    let mut worst = Worst::new();
    let mut functions: Vec<(ModeFn, DampingParams, Option<f64>)> = Vec::new();
    for fig in mode_figures() {
        let seed = fig.seed();
        functions.push((Box::new(move |t| Ok(modes::eval_seed(&seed, t))), fig.params, None));
        for spec in fig.tildes() {
            let g = spec.riccati().map(|r| r.gamma());
            functions.push((Box::new(move |t| modes::eval_tilde(&spec, t)), fig.params, g));
        }
    }
    let over = mode_figures()[2].params;
    let crit = mode_figures()[1].params;
    let r = RiccatiParam::new(0.5).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        functions.push((Box::new(move |t| modes::eval_seed_pm(&over, sign, t)), over, None));
        functions.push((Box::new(move |t| modes::eval_tilde_pm(&over, &r, sign, t)), over, Some(0.5)));
    }
    functions.push((
        Box::new(move |t| modes::critical_second_solution(&crit, &r, 1.0, t)),
        crit,
        Some(0.5),
    ));
    for (f, p, g) in &functions {
        for _ in 0..POINTS / 10 {
            let t = rng.gen_range(0.0..=10.0);
            let point = WorstPoint::at(p, *g, t);
            let (Ok(e), Ok(up), Ok(down)) = (f(t), f(t + STEP), f(t - STEP)) else {
                worst.fail(point);
                continue;
            };
            let scale = max_abs(&[e.y, e.dy, e.d2y]).max(1.0);
            let dy = (up.y - down.y) / (2.0 * STEP);
            let d2y = (up.dy - down.dy) / (2.0 * STEP);
            worst.record((dy - e.dy) / scale, point);
            worst.record((d2y - e.d2y) / scale, point);
        }
    }
    worst.report(name, 1e-8)
}

fn modes_blow_up_sign(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..100 {
        let r = random_gamma(rng);
        let ts = modes::blow_up_time(&r);
        let ok = ts.signum() == -r.gamma().signum() && (ts * r.gamma() + 1.0).abs() <= 1e-15;
        worst.record(if ok { 0.0 } else { 1.0 }, WorstPoint::gamma_t(r.gamma(), ts));
    }
    worst.report(name, 0.0)
}

// ---------------------------------------------------------------------------
// operators

struct OperatorCase {
    p: DampingParams,
    r: RiccatiParam,
    f: TestFn,
    t: f64,
}

impl OperatorCase {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let p = random_params(rng);
        let r = random_gamma(rng);
        let f = TestFn::random(rng);
        let t = random_time(rng, &r, 0.1);
        Self { p, r, f, t }
    }

    fn point(&self) -> WorstPoint {
        WorstPoint::at(&self.p, Some(self.r.gamma()), self.t)
    }

    /// Magnitude of the terms entering an operator of the given order.
    fn scale(&self, order: i32) -> f64 {
        let h = h_at(&self.r, self.t).abs();
        self.f.scale(self.t) * self.p.beta().max(h).max(1.0).powi(order)
    }
}

fn ops_fact(rng: &mut ChaCha8Rng, name: &'static str, analytic: bool, threshold: f64) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..POINTS {
        let c = OperatorCase::random(rng);
        let f = c.f;
        let d = if analytic {
            operators::factorization_defect(&c.p, &c.r, &Analytic(move |t| f.jet(t)), c.t)
        } else {
            operators::factorization_defect(&c.p, &c.r, &Sampled(move |t| f.jet(t).0[0]), c.t)
        };
        match d {
            Ok(v) => worst.record(v / c.scale(2), c.point()),
            Err(_) => worst.fail(c.point()),
        }
    }
    worst.report(name, threshold)
}

fn ops_fact_analytic(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    ops_fact(rng, name, true, 1e-12)
}

fn ops_fact_fd(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    ops_fact(rng, name, false, 1e-6)
}

fn ops_inter(rng: &mut ChaCha8Rng, name: &'static str, analytic: bool, threshold: f64) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..POINTS {
        let c = OperatorCase::random(rng);
        let f = c.f;
        let d = if analytic {
            operators::intertwining_defect(&c.p, &c.r, &Analytic(move |t| f.jet(t)), c.t)
        } else {
            operators::intertwining_defect(&c.p, &c.r, &Sampled(move |t| f.jet(t).0[0]), c.t)
        };
        match d {
            Ok(v) => worst.record(v / c.scale(3), c.point()),
            Err(_) => worst.fail(c.point()),
        }
    }
    worst.report(name, threshold)
}

fn ops_inter_analytic(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    ops_inter(rng, name, true, 1e-10)
}

fn ops_inter_fd(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    ops_inter(rng, name, false, 1e-5)
}

const KINDS: [OperatorKind; 7] = [
    OperatorKind::L,
    OperatorKind::Aplus,
    OperatorKind::Aminus,
    OperatorKind::N,
    OperatorKind::Ng,
    OperatorKind::NgTilde,
    OperatorKind::ModifiedNewton,
];

fn ops_linearity(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for i in 0..POINTS {
        let c = OperatorCase::random(rng);
        let g = TestFn::random(rng);
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let kind = KINDS[i % KINDS.len()];
        let op = OperatorSpec::new(kind, c.p, Some(c.r)).unwrap();
        let (fj, gj) = (c.f, g);
        let f = Analytic(move |t| fj.jet(t));
        let g = Analytic(move |t| gj.jet(t));
        let combo = Combination(vec![(a, &f as &dyn TimeFunction), (b, &g)]);
        let result = (|| -> crate::Result<f64> {
            let lhs = apply(&op, &combo, c.t)?.value;
            let (af, bg) = (a * apply(&op, &f, c.t)?.value, b * apply(&op, &g, c.t)?.value);
            Ok((lhs - af - bg) / max_abs(&[af, bg]).max(1.0))
        })();
        match result {
            Ok(v) => worst.record(v, c.point()),
            Err(_) => worst.fail(c.point()),
        }
    }
    worst.report(name, 1e-10)
}

fn ops_modified_newton_shift(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for _ in 0..POINTS {
        let c = OperatorCase::random(rng);
        let fj = c.f;
        let f = Analytic(move |t| fj.jet(t));
        let newton = OperatorSpec::new(OperatorKind::ModifiedNewton, c.p, Some(c.r)).unwrap();
        let tilde = OperatorSpec::new(OperatorKind::NgTilde, c.p, Some(c.r)).unwrap();
        let result = (|| -> crate::Result<f64> {
            let (a, b) = (apply(&newton, &f, c.t)?.value, apply(&tilde, &f, c.t)?.value);
            let shift = -c.p.alpha_sq() * f.value(c.t);
            Ok((a - b - shift) / max_abs(&[a, b, shift]).max(1.0))
        })();
        match result {
            Ok(v) => worst.record(v, c.point()),
            Err(_) => worst.fail(c.point()),
        }
    }
    worst.report(name, 1e-12)
}

fn ops_susy_mapping(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let mut params = vec![mode_figures()[2].params];
    while params.len() < 5 {
        let p = random_params(rng);
        if p.regime().alpha().is_some() {
            params.push(p);
        }
    }
    for p in params {
        let alpha = p.regime().alpha().unwrap();
        for _ in 0..POINTS / 10 {
            let r = random_gamma(rng);
            let t = random_time(rng, &r, 0.1);
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let op = OperatorSpec::new(OperatorKind::Aminus, p, Some(r)).unwrap();
            let seed = SeedPm { params: p, sign };
            let point = WorstPoint::at(&p, Some(r.gamma()), t);
            match (apply(&op, &seed, t), modes::eval_tilde_pm(&p, &r, sign, t)) {
                (Ok(a), Ok(want)) => {
                    let y = seed.value(t);
                    let scale = max_abs(&[want.y, alpha * y, h_at(&r, t) * y]);
                    worst.record((a.value - want.y) / scale, point);
                }
                _ => worst.fail(point),
            }
        }
    }
    worst.report(name, 1e-12)
}

fn ops_fd_convergence(rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    // Residual is the inverse of the error reduction from halving the step.
    let mut worst = Worst::new();
    let mut n = 0;
    while n < 50 {
        let c = OperatorCase::random(rng);
        let f = c.f;
        if matches!(f, TestFn::Cubic(_)) {
            // Central differences are exact on cubics up to roundoff.
            continue;
        }
        if (c.t - c.r.t_star()).abs() < 0.5 {
            // Both steps must sit in the asymptotic range, far from the pole.
            continue;
        }
        n += 1;
        let sampled = Sampled(move |t| f.jet(t).0[0]);
        let defect = |h: f64| {
            operators::factorization_defect_with(&c.p, &c.r, &sampled, c.t, &Differencer::plain(h))
        };
        match (defect(0.02), defect(0.01)) {
            (Ok(coarse), Ok(fine)) => worst.record(fine.abs() / coarse.abs(), c.point()),
            _ => worst.fail(c.point()),
        }
    }
    worst.report(name, 1.0 / 3.5)
}

fn ops_aplus_not_eigen(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    // Residual is the inverse spread of A+ y_+ / y_+ over [0, 10]; a
    // constant ratio (an eigenfunction) would make it infinite.
    let mut worst = Worst::new();
    let p = mode_figures()[2].params;
    for &g in &[1.0, 0.5, 0.1] {
        let r = RiccatiParam::new(g).unwrap();
        let op = OperatorSpec::new(OperatorKind::Aplus, p, Some(r)).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let y = SeedPm { params: p, sign };
            let ratios: Vec<f64> = oracle::uniform_grid(0.0, 10.0, 100)
                .into_iter()
                .map(|t| apply(&op, &y, t).map_or(f64::NAN, |a| a.value / y.value(t)))
                .collect();
            let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
            let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
            worst.record(1.0 / (hi - lo), WorstPoint::at(&p, Some(g), 0.0));
        }
    }
    worst.point.t = None;
    worst.report(name, 1e6)
}

// ---------------------------------------------------------------------------
// oracle

/// Relative error of the oracle against a closed-form tilde mode on `[0, 10]`.
pub fn oracle_vs_closed_form(spec: &ModeSpec, rel_tol: f64, abs_tol: f64) -> crate::Result<(f64, f64)> {
    let grid = oracle::uniform_grid(0.0, 10.0, POINTS);
    let start = spec.eval(0.0)?;
    let ivp = Ivp::new(spec.params(), spec.riccati().as_ref(), 0.0, start.y, start.dy, 10.0);
    let tr = oracle::integrate(&ivp, rel_tol, abs_tol, &grid)?;
    let mut worst = (0.0f64, 0.0);
    for (&t, &y) in tr.ts.iter().zip(&tr.ys) {
        let want = spec.eval(t)?.y;
        let err = (y - want).abs() / want.abs().max(1.0);
        if err > worst.0 {
            worst = (err, t);
        }
    }
    Ok(worst)
}

fn oracle_closed_form(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    for fig in mode_figures() {
        for spec in fig.tildes() {
            let g = spec.riccati().map(|r| r.gamma());
            match oracle_vs_closed_form(&spec, oracle::DEFAULT_REL_TOL, oracle::DEFAULT_ABS_TOL) {
                Ok((err, t)) => worst.record(err, WorstPoint::at(&fig.params, g, t)),
                Err(_) => worst.fail(WorstPoint::at(&fig.params, g, f64::NAN)),
            }
        }
    }
    worst.report(name, oracle::DEFAULT_REL_TOL * 100.0)
}

fn oracle_self_convergence(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let grid = oracle::uniform_grid(0.0, 10.0, 200);
    for fig in mode_figures() {
        for spec in fig.tildes() {
            let r = spec.riccati().unwrap();
            let e = spec.eval(0.0).unwrap();
            let ivp = Ivp::new(&fig.params, Some(&r), 0.0, e.y, e.dy, 10.0);
            let point = WorstPoint::at(&fig.params, Some(r.gamma()), 0.0);
            match oracle::self_convergence(&ivp, &grid) {
                Ok(v) => worst.record(v, point),
                Err(_) => worst.fail(point),
            }
        }
    }
    worst.point.t = None;
    worst.report(name, 1e-7)
}

/// Global error at `t = 10` of fixed-step RK4 on the free critical problem.
pub fn rk4_critical_error(step: f64) -> crate::Result<f64> {
    let p = DampingParams::new(1.0, 1.0)?;
    let ivp = Ivp::new(&p, None, 0.0, 1.0, 0.0, 10.0);
    let grid = oracle::uniform_grid(0.0, 10.0, 10);
    let tr = oracle::integrate_fixed(&ivp, step, &grid)?;
    Ok(tr
        .ts
        .iter()
        .zip(&tr.ys)
        .map(|(t, y)| (y - (-t).exp() * (1.0 + t)).abs())
        .fold(0.0, f64::max))
}

fn oracle_order(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    // Residual is err(h/2)/err(h); fourth order needs at most 1/16.
    let mut worst = Worst::new();
    let p = DampingParams::new(1.0, 1.0).unwrap();
    for step in [0.2, 0.1] {
        let point = WorstPoint::at(&p, None, 10.0);
        match (rk4_critical_error(step), rk4_critical_error(0.5 * step)) {
            (Ok(coarse), Ok(fine)) => worst.record(fine / coarse, point),
            _ => worst.fail(point),
        }
    }
    worst.report(name, 1.0 / 16.0)
}

fn oracle_time_reversal(_rng: &mut ChaCha8Rng, name: &'static str) -> CheckReport {
    let mut worst = Worst::new();
    let mut cases: Vec<(DampingParams, Option<RiccatiParam>, f64, f64)> =
        vec![(DampingParams::new(1.0, 1.0).unwrap(), None, 1.0, 0.0)];
    for fig in mode_figures() {
        for spec in fig.tildes() {
            let e = spec.eval(0.0).unwrap();
            cases.push((fig.params, spec.riccati(), e.y, e.dy));
        }
    }
    for (p, r, y0, dy0) in cases {
        let point = WorstPoint::at(&p, r.map(|r| r.gamma()), 0.0);
        let result = (|| -> crate::Result<f64> {
            let fwd = Ivp::new(&p, r.as_ref(), 0.0, y0, dy0, 5.0);
            let out = oracle::integrate(&fwd, oracle::DEFAULT_REL_TOL, oracle::DEFAULT_ABS_TOL, &[5.0])?;
            let back = Ivp::new(&p, r.as_ref(), 5.0, out.ys[0], out.dys[0], 0.0);
            let home = oracle::integrate(&back, oracle::DEFAULT_REL_TOL, oracle::DEFAULT_ABS_TOL, &[0.0])?;
            let scale = max_abs(&[y0, dy0]).max(1e-300);
            Ok(((home.ys[0] - y0).abs()).max((home.dys[0] - dy0).abs()) / scale)
        })();
        match result {
            Ok(v) => worst.record(v, point),
            Err(_) => worst.fail(point),
        }
    }
    worst.report(name, 1e-7)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_unique() {
        let names = check_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }

    #[test]
    fn every_scope_parses_and_selects_checks() {
        for name in Scope::NAMES {
            let scope: Scope = name.parse().unwrap();
            assert_eq!(scope.to_string(), name);
            assert!(!scope_checks(scope).is_empty(), "{name}");
        }
        assert!("bogus".parse::<Scope>().is_err());
    }

    #[test]
    fn scopes_partition_the_registry() {
        let mut union: Vec<&str> = Scope::NAMES[1..]
            .iter()
            .flat_map(|s| scope_checks(s.parse().unwrap()))
            .collect();
        union.sort();
        assert_eq!(union, check_names());
    }
}
