//! Command-line front end: figure data, mode evaluation, gamma sweeps,
//! the verification suite and blow-up diagnostics.
//!
//! All quantities are dimensionless (the time unit is absorbed into beta,
//! omega0 and gamma). CSV output is comma-separated with `\n` line endings,
//! `#` metadata lines before the header, and numbers in shortest
//! round-trip decimal form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::figures;
use crate::modes::{self, Family, ModeSpec};
use crate::params::{Coefficients, DampingParams, RegimeTag, RiccatiParam};
use crate::verify::{self, Scope};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Figure grid: t in [0, 10], step 0.01.
pub const FIGURE_POINTS: usize = 1000;
pub const FIGURE_T_END: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed: {0} check(s) did not pass")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "susy-damp",
    version,
    about = "Riccati-parameter damping modes of the free damped oscillator",
    long_about = "Evaluates free damping modes and their one-parameter (gamma) supersymmetric \
families, reproduces the reference figure data, and runs the identity checks. \
All quantities are dimensionless: time is measured in the unit absorbed into beta, omega0 and gamma."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the data behind reference figure N (1-6) as CSV.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one mode (seed or tilde family) on a time grid.
    Eval(EvalArgs),
    /// Evaluate a metric for a list of gamma values.
    Sweep(SweepArgs),
    /// Run the verification suite and write a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        scope: Scope,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the blow-up instant t* = -1/gamma.
    Blowup {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
}

/// Mode selection flags shared by `eval` and `sweep`; every one may also come
/// from the JSON config file under the same name.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeArgs {
    /// Flat JSON object with the same keys as the flags; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Friction constant per unit mass.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Natural frequency.
    #[arg(long, conflicts_with = "omega0_sq")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Natural frequency squared (alternative to --omega0).
    #[arg(long = "omega0-sq")]
    #[serde(rename = "omega0-sq", skip_serializing_if = "Option::is_none")]
    pub omega0_sq: Option<f64>,
    /// Superposition weight A.
    #[arg(long = "A", allow_hyphen_values = true)]
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Superposition weight B.
    #[arg(long = "B", allow_hyphen_values = true)]
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Weight D of the second critical tilde solution (critical tilde family only).
    #[arg(long = "D", allow_hyphen_values = true)]
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Amplitude A~ of the cos/cosh form.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amp: Option<f64>,
    /// Phase phi of the cos/cosh form.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    /// Grid start (default 0).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    /// Grid end, inclusive (default 10).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    /// Grid step (default 0.01; 0.001 for max_abs sweeps).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Seed,
    Tilde,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mode: ModeArgs,
    /// Riccati family parameter; selects the tilde family.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Explicit family; defaults to tilde when --gamma is given.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[value(name = "value_at_t", alias = "value-at-t")]
    ValueAtT,
    #[value(name = "max_abs", alias = "max-abs")]
    MaxAbs,
    #[value(name = "blowup_time", alias = "blowup-time")]
    BlowupTime,
}

impl Metric {
    fn column(self) -> &'static str {
        match self {
            Metric::ValueAtT => "value_at_t",
            Metric::MaxAbs => "max_abs",
            Metric::BlowupTime => "blowup_time",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mode: ModeArgs,
    /// Comma-separated gamma values; fractions such as 5/3 are accepted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<String>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    /// Evaluation time for value_at_t.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

// ---------------------------------------------------------------------------
// formatting

/// Shortest round-trip decimal form (at most 17 significant digits); `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn metadata(command: &str, config: &impl Serialize) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    format!("# susy-damp {VERSION}\n# command: {command}\n# config: {json}\n")
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `1`, `-0.25`, `5/3`.
pub fn parse_number(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("cannot parse number '{s}'"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

// ---------------------------------------------------------------------------
// figure

#[derive(Serialize)]
struct FigureMeta {
    figure: u8,
    beta: f64,
    omega0: f64,
    regime: &'static str,
    seed_coefficients: Coefficients,
    tilde_coefficients: Coefficients,
    gammas: Vec<f64>,
    quantity: &'static str,
    t0: f64,
    t1: f64,
    dt: f64,
}

/// CSV contents for figure `n` (1-6).
pub fn figure_csv(n: u8) -> CliResult<String> {
    let fig = figures::figure(n).ok_or_else(|| CliError::Usage(format!("no figure {n}")))?;
    let quantity = if fig.acceleration { "a" } else { "ytilde" };
    let meta = FigureMeta {
        figure: n,
        beta: fig.params.beta(),
        omega0: fig.params.omega0(),
        regime: fig.params.regime().tag().name(),
        seed_coefficients: fig.seed_coeffs,
        tilde_coefficients: fig.tilde_coeffs,
        gammas: fig.gammas.iter().map(|g| g.0).collect(),
        quantity: if fig.acceleration {
            "antirestoring acceleration 2 gamma^2/(gamma t+1)^2 ytilde"
        } else {
            "ytilde"
        },
        t0: 0.0,
        t1: FIGURE_T_END,
        dt: FIGURE_T_END / FIGURE_POINTS as f64,
    };
    let mut out = metadata(&format!("figure {n}"), &meta);
    out.push_str("t,y");
    for (_, label) in &fig.gammas {
        write!(out, ",{quantity}[gamma={label}]").unwrap();
    }
    out.push('\n');
    let seed = fig.seed();
    let tildes: Vec<ModeSpec> = fig.tildes().collect();
    for i in 0..=FIGURE_POINTS {
        let t = i as f64 / 100.0;
        out.push_str(&fmt_num(t));
        out.push(',');
        out.push_str(&fmt_num(modes::eval_seed(&seed, t).y));
        for spec in &tildes {
            let v = if fig.acceleration {
                modes::antirestoring_acceleration(spec, t)?
            } else {
                modes::eval_tilde(spec, t)?.y
            };
            out.push(',');
            out.push_str(&fmt_num(v));
        }
        out.push('\n');
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// eval / sweep

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

macro_rules! overlay {
    ($base:expr, $flags:expr, [$($field:ident),*]) => {
        $( if $flags.$field.is_some() { $base.$field = $flags.$field.clone(); } )*
    };
}

impl ModeArgs {
    fn overlay(&mut self, flags: &ModeArgs) {
        overlay!(self, flags, [beta, omega0, omega0_sq, a, b, d, amp, phase, t0, t1, dt, out]);
    }

    fn params(&self) -> CliResult<DampingParams> {
        let beta = self.beta.ok_or_else(|| CliError::Usage("--beta is required".into()))?;
        let p = match (self.omega0, self.omega0_sq) {
            (Some(w), None) => DampingParams::new(beta, w)?,
            (None, Some(w2)) => DampingParams::from_omega0_sq(beta, w2)?,
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("give --omega0 or --omega0-sq, not both".into()))
            }
            (None, None) => return Err(CliError::Usage("--omega0 is required".into())),
        };
        Ok(p)
    }

    fn coefficients(&self, regime: RegimeTag, tilde: bool) -> CliResult<Coefficients> {
        let critical_tilde = tilde && regime == RegimeTag::Critical;
        if self.d.is_some() && !critical_tilde {
            return Err(CliError::Usage("--D applies only to the critical tilde family".into()));
        }
        if critical_tilde && self.b.is_some() && self.d.is_some() {
            return Err(CliError::Usage("give --D (or --B as its alias), not both".into()));
        }
        let second = if critical_tilde { self.d.or(self.b) } else { self.b };
        let ab = self.a.is_some() || second.is_some();
        let ap = self.amp.is_some() || self.phase.is_some();
        match (ab, ap) {
            (true, true) => Err(CliError::Usage(
                "give either --A/--B(/--D) or --amp/--phase, not both".into(),
            )),
            (true, false) => Ok(Coefficients::AB {
                a: self.a.unwrap_or(0.0),
                b: second.unwrap_or(0.0),
            }),
            (false, true) => Ok(Coefficients::AmpPhase {
                amp: self.amp.unwrap_or(1.0),
                phase: self.phase.unwrap_or(0.0),
            }),
            (false, false) => Err(CliError::Usage(
                "coefficients missing: give --A/--B(/--D) or --amp/--phase".into(),
            )),
        }
    }

    fn grid(&self, default: (f64, f64, f64)) -> CliResult<Vec<f64>> {
        let t0 = self.t0.unwrap_or(default.0);
        let t1 = self.t1.unwrap_or(default.1);
        let dt = self.dt.unwrap_or(default.2);
        let ordered = t0.is_finite() && t1.is_finite() && t1 >= t0;
        if !(dt > 0.0 && dt.is_finite()) || !ordered {
            return Err(CliError::Usage(format!(
                "bad grid t0={t0} t1={t1} dt={dt}: need t1 >= t0 and dt > 0"
            )));
        }
        let n = ((t1 - t0) / dt + 1e-9).floor();
        if n > 1e8 {
            return Err(CliError::Usage("grid has more than 1e8 points".into()));
        }
        Ok((0..=n as usize).map(|i| t0 + i as f64 * dt).collect())
    }

    fn out(&self) -> CliResult<PathBuf> {
        self.out
            .clone()
            .ok_or_else(|| CliError::Usage("--out is required".into()))
    }
}

/// Effective eval configuration: config file overlaid by flags.
pub fn resolve_eval(flags: &EvalArgs) -> CliResult<EvalArgs> {
    let mut cfg: EvalArgs = load_config(flags.mode.config.as_deref())?;
    cfg.mode.overlay(&flags.mode);
    overlay!(cfg, flags, [gamma, family]);
    Ok(cfg)
}

pub fn resolve_sweep(flags: &SweepArgs) -> CliResult<SweepArgs> {
    let mut cfg: SweepArgs = load_config(flags.mode.config.as_deref())?;
    cfg.mode.overlay(&flags.mode);
    overlay!(cfg, flags, [gammas, metric, t]);
    Ok(cfg)
}

fn eval_spec(cfg: &EvalArgs) -> CliResult<ModeSpec> {
    let p = cfg.mode.params()?;
    let family = match (cfg.family, cfg.gamma) {
        (Some(FamilyArg::Seed), Some(_)) => {
            return Err(CliError::Usage("--gamma given with --family seed".into()))
        }
        (Some(FamilyArg::Tilde), None) => {
            return Err(CliError::Usage("--family tilde needs --gamma".into()))
        }
        (_, Some(g)) => Family::Tilde(RiccatiParam::new(g)?),
        (_, None) => Family::Seed,
    };
    let tilde = matches!(family, Family::Tilde(_));
    let coeffs = cfg.mode.coefficients(p.regime().tag(), tilde)?;
    Ok(ModeSpec::new(p, coeffs, family)?)
}

/// CSV contents for `eval`. Tilde rows inside the singular guard band keep
/// their `t`, leave the numeric columns empty and set `singular` to 1.
pub fn eval_csv(cfg: &EvalArgs) -> CliResult<String> {
    let spec = eval_spec(cfg)?;
    let grid = cfg.mode.grid((0.0, 10.0, 0.01))?;
    let mut out = metadata("eval", cfg);
    match spec.family() {
        Family::Seed => {
            out.push_str("t,y,dy,d2y\n");
            for t in grid {
                let e = modes::eval_seed(&spec, t);
                writeln!(out, "{},{},{},{}", fmt_num(t), fmt_num(e.y), fmt_num(e.dy), fmt_num(e.d2y)).unwrap();
            }
        }
        Family::Tilde(r) => {
            out.push_str("t,y,dy,d2y,a,singular\n");
            for t in grid {
                match modes::eval_tilde(&spec, t) {
                    Ok(e) => {
                        let h = r.gamma() / (r.gamma() * t + 1.0);
                        writeln!(
                            out,
                            "{},{},{},{},{},0",
                            fmt_num(t),
                            fmt_num(e.y),
                            fmt_num(e.dy),
                            fmt_num(e.d2y),
                            fmt_num(2.0 * h * h * e.y)
                        )
                        .unwrap();
                    }
                    Err(Error::SingularTime { .. }) => {
                        writeln!(out, "{},,,,,1", fmt_num(t)).unwrap();
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(out)
}

pub fn sweep_csv(cfg: &SweepArgs) -> CliResult<String> {
    let list = cfg
        .gammas
        .as_deref()
        .ok_or_else(|| CliError::Usage("--gammas is required".into()))?;
    let metric = cfg
        .metric
        .ok_or_else(|| CliError::Usage("--metric is required".into()))?;
    let gammas: Vec<f64> = list
        .split(',')
        .map(parse_number)
        .collect::<CliResult<_>>()?;
    if gammas.is_empty() {
        return Err(CliError::Usage("--gammas is empty".into()));
    }
    let riccati: Vec<RiccatiParam> = gammas
        .iter()
        .map(|&g| RiccatiParam::new(g))
        .collect::<Result<_, _>>()?;

    let mut values = Vec::with_capacity(riccati.len());
    if metric == Metric::BlowupTime {
        values.extend(riccati.iter().map(modes::blow_up_time));
    } else {
        let p = cfg.mode.params()?;
        let coeffs = cfg.mode.coefficients(p.regime().tag(), true)?;
        let grid = match metric {
            Metric::MaxAbs => cfg.mode.grid((0.0, 10.0, 1e-3))?,
            _ => vec![cfg
                .t
                .ok_or_else(|| CliError::Usage("value_at_t needs --t".into()))?],
        };
        for r in &riccati {
            let spec = ModeSpec::tilde(p, coeffs, *r)?;
            let mut best = 0.0f64;
            for &t in &grid {
                let y = modes::eval_tilde(&spec, t).map_err(|_| {
                    CliError::Usage(format!(
                        "gamma {} places the blow-up instant {} at grid point t = {t}",
                        r.gamma(),
                        r.t_star()
                    ))
                })?;
                best = if metric == Metric::MaxAbs { best.max(y.y.abs()) } else { y.y };
            }
            values.push(best);
        }
    }

    let mut out = metadata("sweep", cfg);
    writeln!(out, "gamma,{}", metric.column()).unwrap();
    for (g, v) in gammas.iter().zip(values) {
        writeln!(out, "{},{}", fmt_num(*g), fmt_num(v)).unwrap();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verify / blowup

/// JSON report and whether every check passed.
pub fn verify_json(scope: Scope, seed: u64) -> (String, usize) {
    let reports = verify::run_suite(scope, seed);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    json.push('\n');
    (json, failed)
}

#[derive(Serialize)]
struct BlowUp {
    gamma: f64,
    t_star: f64,
    time_scale: f64,
}

pub fn blowup_json(gamma: f64) -> CliResult<String> {
    let r = RiccatiParam::new(gamma)?;
    let b = BlowUp {
        gamma,
        t_star: modes::blow_up_time(&r),
        time_scale: r.time_scale(),
    };
    Ok(serde_json::to_string(&b).expect("serializes"))
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Figure { n, out } => write_file(&out, &figure_csv(n)?),
        Command::Eval(flags) => {
            let cfg = resolve_eval(&flags)?;
            let out = cfg.mode.out()?;
            write_file(&out, &eval_csv(&cfg)?)
        }
        Command::Sweep(flags) => {
            let cfg = resolve_sweep(&flags)?;
            let out = cfg.mode.out()?;
            write_file(&out, &sweep_csv(&cfg)?)
        }
        Command::Verify { scope, seed, out } => {
            let (json, failed) = verify_json(scope, seed);
            write_file(&out, &json)?;
            if failed > 0 {
                Err(CliError::VerificationFailed(failed))
            } else {
                Ok(())
            }
        }
        Command::Blowup { gamma } => {
            println!("{}", blowup_json(gamma)?);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(-4.96), "-4.96");
        assert_eq!(fmt_num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_number("5/3").unwrap(), 5.0 / 3.0);
        assert_eq!(parse_number(" -0.25").unwrap(), -0.25);
        assert!(parse_number("x").is_err());
        assert!(parse_number("1/0").is_err());
    }

    #[test]
    fn figure_one_first_row() {
        let csv = figure_csv(1).unwrap();
        let r = rows(&csv);
        assert_eq!(r[0], ["t", "y", "ytilde[gamma=1]", "ytilde[gamma=1/2]", "ytilde[gamma=1/10]"]);
        assert_eq!(r[1], ["0", "1", "-1", "-0.5", "-0.1"]);
        assert_eq!(r.len(), 1 + FIGURE_POINTS + 1);
        assert_eq!(r.last().unwrap()[0], "10");
    }

    #[test]
    fn eval_seed_grid() {
        let cfg = EvalArgs {
            mode: ModeArgs {
                beta: Some(0.1),
                omega0_sq: Some(1.01),
                amp: Some(1.0),
                phase: Some(0.0),
                t0: Some(0.0),
                t1: Some(1.0),
                dt: Some(0.5),
                ..ModeArgs::default()
            },
            ..EvalArgs::default()
        };
        let r = rows(&eval_csv(&cfg).unwrap());
        assert_eq!(r.len(), 4);
        assert_eq!(r[1][1], "1");
    }

    #[test]
    fn eval_marks_singular_rows() {
        let cfg = EvalArgs {
            mode: ModeArgs {
                beta: Some(0.1),
                omega0_sq: Some(1.01),
                amp: Some(1.0),
                t0: Some(-3.0),
                t1: Some(-1.0),
                dt: Some(0.5),
                ..ModeArgs::default()
            },
            gamma: Some(0.5),
            ..EvalArgs::default()
        };
        let r = rows(&eval_csv(&cfg).unwrap());
        let singular: Vec<&Vec<String>> = r[1..].iter().filter(|row| row[5] == "1").collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0][0], "-2");
        assert_eq!(singular[0][1], "");
    }

    #[test]
    fn inconsistent_flags_are_usage_errors() {
        let mut cfg = EvalArgs {
            mode: ModeArgs {
                beta: Some(1.0),
                omega0: Some(1.0),
                a: Some(1.0),
                b: Some(1.0),
                ..ModeArgs::default()
            },
            gamma: Some(1.0),
            family: Some(FamilyArg::Seed),
        };
        assert!(matches!(eval_csv(&cfg), Err(CliError::Usage(_))));
        cfg.family = None;
        cfg.mode.amp = Some(1.0);
        assert!(matches!(eval_csv(&cfg), Err(CliError::Usage(_))));
        cfg.mode.amp = None;
        cfg.gamma = None;
        cfg.mode.d = Some(1.0);
        assert!(matches!(eval_csv(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn sweep_blowup_and_values() {
        let cfg = SweepArgs {
            gammas: Some("1,1/2,-1/4".into()),
            metric: Some(Metric::BlowupTime),
            ..SweepArgs::default()
        };
        let r = rows(&sweep_csv(&cfg).unwrap());
        let v: Vec<&str> = r[1..].iter().map(|row| row[1].as_str()).collect();
        assert_eq!(v, ["-1", "-2", "4"]);

        let cfg = SweepArgs {
            mode: ModeArgs {
                beta: Some(0.1),
                omega0_sq: Some(1.01),
                amp: Some(1.0),
                phase: Some(0.0),
                ..ModeArgs::default()
            },
            gammas: Some("1,1/2,1/10".into()),
            metric: Some(Metric::ValueAtT),
            t: Some(0.0),
        };
        let r = rows(&sweep_csv(&cfg).unwrap());
        let v: Vec<&str> = r[1..].iter().map(|row| row[1].as_str()).collect();
        assert_eq!(v, ["-1", "-0.5", "-0.1"]);

        let bad = SweepArgs {
            gammas: Some("1,0".into()),
            metric: Some(Metric::BlowupTime),
            ..SweepArgs::default()
        };
        assert!(matches!(sweep_csv(&bad), Err(CliError::Usage(_))));
    }

    #[test]
    fn blowup_output() {
        assert_eq!(
            blowup_json(-0.25).unwrap(),
            r#"{"gamma":-0.25,"t_star":4.0,"time_scale":-4.0}"#
        );
        assert!(blowup_json(0.0).is_err());
    }
}
