//! Subcommand implementations. Each returns a [`RunReport`] plus the exit code the
//! binary should finish with.

use std::f64::consts::TAU;

use bohr_core::corpus::{random_schur, taylor_coeffs};
use bohr_core::operators::{majorant_of, quadrature_value, series_value, OperatorKind};
use bohr_core::radii::{radius_curve, solve_radius, ParameterSweep, RadiusFamily, RadiusProblem};
use bohr_core::series::{binomial_coeffs, identity_residual_of};
use bohr_core::sharpness::{
    concavity_check, decomposition, quadratic_remainder_check, ratio_spread, uniform_a_grid, violation_search,
    ExtremalProblem,
};
use bohr_core::{mix_seed, BohrError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Cell, RunReport, Table};

/// Maximum number of Blaschke zeros in verification samples.
pub const CORPUS_MAX_FACTORS: usize = 6;
/// Zero-radius cap for verification samples.
pub const CORPUS_RADIUS_CAP: f64 = 0.95;
/// Slack allowed above the bound before a sample counts as a violation.
pub const VIOLATION_SLACK: f64 = 1e-9;
/// Default majorant truncation accuracy.
pub const MAJORANT_EPS: f64 = 1e-12;
/// Default quadrature tolerance.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Largest allowed mismatch between a decomposition and the direct majorant.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Largest allowed spread of remainder ratios.
pub const REMAINDER_SPREAD_MAX: f64 = 4.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_RECONSTRUCTION: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn domain(message: impl Into<String>) -> Self {
        Self { code: EXIT_DOMAIN, message: message.into() }
    }
}

impl From<BohrError> for CliError {
    fn from(e: BohrError) -> Self {
        let code = match e {
            BohrError::ParameterDomain(_) | BohrError::Precondition(_) => EXIT_DOMAIN,
            BohrError::NoWitness { .. } => EXIT_VIOLATION,
            _ => EXIT_SOLVER,
        };
        Self { code, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Self { report, exit_code: EXIT_OK }
    }
}

/// Operator names accepted by `--op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OpName {
    Cesaro,
    Cbeta,
    Bernardi,
    Libera,
    Alexander,
    Primitive,
}

/// Operator selection shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, clap::Args)]
pub struct OpArgs {
    #[arg(long, value_enum)]
    pub op: OpName,
    /// Cesàro exponent (cesaro, cbeta).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Bernardi parameter (bernardi).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Order of the zero at the origin (bernardi).
    #[arg(long, default_value_t = 0)]
    pub m: usize,
}

impl OpArgs {
    pub fn new(op: OpName) -> Self {
        Self { op, beta: 1.0, gamma: 1.0, m: 0 }
    }

    pub fn kind(&self) -> Result<OperatorKind, CliError> {
        let kind = match self.op {
            OpName::Cesaro => OperatorKind::CesaroBeta(self.beta),
            OpName::Cbeta => OperatorKind::CBeta(self.beta),
            OpName::Bernardi => OperatorKind::Bernardi { gamma: self.gamma, m: self.m },
            OpName::Libera => OperatorKind::Libera,
            OpName::Alexander => OperatorKind::Alexander,
            OpName::Primitive => OperatorKind::PrimitiveI,
        };
        kind.validate()?;
        Ok(kind)
    }

    fn record(&self, report: &mut RunReport) {
        report.param("op", self.kind().map(|k| k.name()).unwrap_or("invalid"));
        match self.op {
            OpName::Cesaro | OpName::Cbeta => {
                report.param("beta", self.beta);
            }
            OpName::Bernardi => {
                report.param("gamma", self.gamma).param("m", self.m);
            }
            _ => {}
        }
    }

    fn extremal_problem(&self) -> Result<ExtremalProblem, CliError> {
        Ok(match RadiusFamily::from(self.kind()?) {
            RadiusFamily::CesaroBeta(beta) => ExtremalProblem::Cesaro { beta },
            RadiusFamily::Bernardi { gamma, m } => ExtremalProblem::Bernardi { gamma, m },
        })
    }
}

/// Radius of the Bohr inequality for the chosen operator.
pub fn cmd_radius(op: &OpArgs, tol: f64) -> Result<Outcome, CliError> {
    let family = RadiusFamily::from(op.kind()?);
    let res = solve_radius(&RadiusProblem::new(family), tol)?;
    let mut report = RunReport::new("radius", 0);
    op.record(&mut report);
    report.param("tol", tol);
    report.results = json!({
        "root": res.root,
        "residual": res.residual,
        "bracket": [res.bracket.0, res.bracket.1],
        "iterations": res.iterations,
    });
    report.table = Table::new(&["root", "residual", "bracket_lo", "bracket_hi", "iterations"]);
    report.table.push(vec![
        res.root.into(),
        res.residual.into(),
        res.bracket.0.into(),
        res.bracket.1.into(),
        res.iterations.into(),
    ]);
    Ok(Outcome::ok(report))
}

/// Grid for `curve`: explicit values, or `count` evenly spaced points from `start` to `stop`.
pub fn grid(values: &[f64], start: f64, stop: f64, count: Option<usize>) -> Vec<f64> {
    match count {
        Some(0) => Vec::new(),
        Some(1) => vec![start],
        Some(n) => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
        None => values.to_vec(),
    }
}

/// Radius as a function of β (cesaro/cbeta) or γ (bernardi, fixed m).
pub fn cmd_curve(op: OpName, m: usize, params: &[f64], tol: f64) -> Result<Outcome, CliError> {
    let sweep = match op {
        OpName::Cesaro | OpName::Cbeta => ParameterSweep::Beta(params.to_vec()),
        OpName::Bernardi => ParameterSweep::Gamma { m, values: params.to_vec() },
        other => return Err(CliError::domain(format!("curve sweeps need cesaro, cbeta or bernardi, got {other:?}"))),
    };
    let curve = radius_curve(&sweep, tol)?;
    let mut report = RunReport::new("curve", 0);
    report.param("op", format!("{op:?}").to_lowercase()).param("tol", tol).param("points", params.len());
    if op == OpName::Bernardi {
        report.param("m", m);
    }
    report.results = json!({
        "rows": curve.rows.iter().map(|r| json!({"param": r.param, "root": r.root, "residual": r.residual})).collect::<Vec<_>>(),
        "discontinuities": curve.discontinuities,
    });
    report.table = Table::new(&["param", "root", "residual"]);
    for r in &curve.rows {
        report.table.push(vec![r.param.into(), r.root.into(), r.residual.into()]);
    }
    Ok(Outcome::ok(report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RMode {
    /// r = 0.99 R; no violations allowed.
    Below,
    /// r = R; no violations allowed.
    At,
    /// r > R; an extremal violation witness is required.
    Above,
}

#[derive(Debug, Clone, Copy)]
struct SampleCheck {
    index: u64,
    seed: u64,
    excess: f64,
}

/// Checks the Bohr inequality on seeded corpus samples, or searches for a violation above the radius.
pub fn cmd_verify(op: &OpArgs, samples: usize, seed: u64, mode: RMode, r: Option<f64>) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::domain("samples must be at least 1"));
    }
    let kind = op.kind()?;
    let radius = solve_radius(&RadiusProblem::new(RadiusFamily::from(kind)), 1e-12)?.root;
    let mut report = RunReport::new("verify", seed);
    op.record(&mut report);
    report
        .param("samples", samples)
        .param("r_mode", format!("{mode:?}").to_lowercase())
        .param("max_factors", CORPUS_MAX_FACTORS)
        .param("radius_cap", CORPUS_RADIUS_CAP)
        .param("eps", MAJORANT_EPS);

    if mode == RMode::Above {
        let r = r.unwrap_or_else(|| (radius * 1.05).min(0.99));
        report.param("r", r);
        let problem = op.extremal_problem()?;
        report.table = Table::new(&["radius", "r", "witness_found", "a", "majorant", "bound"]);
        return match violation_search(&problem, r) {
            Ok(w) => {
                report.results = json!({
                    "radius": radius, "r": r, "witness_found": true,
                    "witness": {"a": w.a, "step": w.step, "majorant": w.majorant, "bound": w.bound},
                });
                report.table.push(vec![radius.into(), r.into(), true.into(), w.a.into(), w.majorant.into(), w.bound.into()]);
                Ok(Outcome::ok(report))
            }
            Err(BohrError::NoWitness { scanned }) => {
                eprintln!("no violation witness found above radius {radius} at r = {r} after {scanned} steps");
                report.results = json!({"radius": radius, "r": r, "witness_found": false});
                report.table.push(vec![radius.into(), r.into(), false.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]);
                Ok(Outcome { report, exit_code: EXIT_VIOLATION })
            }
            Err(e) => Err(e.into()),
        };
    }

    let r = match mode {
        RMode::Below => 0.99 * radius,
        _ => radius,
    };
    report.param("r", r);
    let bound = kind.sup_bound(r)?;
    let zeros = kind.required_zero_order();
    let checks: Vec<SampleCheck> = (0..samples as u64)
        .into_par_iter()
        .map(|index| {
            let sample_seed = mix_seed(seed, index);
            let f = random_schur(sample_seed, CORPUS_MAX_FACTORS, CORPUS_RADIUS_CAP)?.times_z_power(zeros);
            let m = majorant_of(kind, &f, r, MAJORANT_EPS)?;
            Ok(SampleCheck { index, seed: sample_seed, excess: m - bound })
        })
        .collect::<Result<_, BohrError>>()?;

    let violations: Vec<&SampleCheck> = checks.iter().filter(|c| c.excess > VIOLATION_SLACK).collect();
    let max_excess = checks.iter().map(|c| c.excess).fold(f64::NEG_INFINITY, f64::max);
    let first = violations.first().map(|c| json!({"index": c.index, "seed": c.seed, "excess": c.excess}));
    for v in &violations {
        eprintln!("violation: sample {} (seed {}) exceeds the bound by {:e}", v.index, v.seed, v.excess);
    }
    report.results = json!({
        "radius": radius,
        "r": r,
        "bound": bound,
        "checked": checks.len(),
        "violations": violations.len(),
        "max_excess": max_excess,
        "first_violation": first.unwrap_or(Value::Null),
    });
    report.table = Table::new(&["radius", "r", "bound", "checked", "violations", "max_excess"]);
    report.table.push(vec![
        radius.into(),
        r.into(),
        bound.into(),
        checks.len().into(),
        violations.len().into(),
        max_excess.into(),
    ]);
    let exit_code = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { report, exit_code })
}

/// Default extremal parameters for `sharpness`.
pub const DEFAULT_A_VALUES: [f64; 6] = [0.0, 0.5, 0.9, 0.99, 0.999, 1.0];

/// Three-term decompositions of the extremal majorant over an `a` grid, plus the
/// quadratic remainder ratios at a = 0.9, 0.99, 0.999.
pub fn cmd_sharpness(op: &OpArgs, r: f64, a_values: &[f64]) -> Result<Outcome, CliError> {
    let problem = op.extremal_problem()?;
    let radius = problem.radius()?;
    let mut report = RunReport::new("sharpness", 0);
    op.record(&mut report);
    report.param("r", r).param("a", a_values.to_vec());

    report.table = Table::new(&[
        "a",
        "bound_term",
        "deficit_term",
        "remainder",
        "total",
        "direct",
        "mismatch",
        "remainder_ratio",
    ]);
    let mut rows = Vec::new();
    let mut worst_mismatch: f64 = 0.0;
    for &a in a_values {
        let d = decomposition(&problem, a, r, 1e-14)?;
        let direct = problem.extremal_majorant(a, r, 1e-14)?;
        let mismatch = (d.total - direct).abs();
        worst_mismatch = worst_mismatch.max(mismatch);
        let ratio = if a < 1.0 { d.remainder / ((1.0 - a) * (1.0 - a)) } else { f64::NAN };
        rows.push(json!({
            "a": a, "bound_term": d.bound_term, "deficit_term": d.deficit_term,
            "remainder": d.remainder, "total": d.total, "direct": direct,
            "mismatch": mismatch, "remainder_ratio": ratio,
        }));
        report.table.push(vec![
            Cell::Num(a),
            d.bound_term.into(),
            d.deficit_term.into(),
            d.remainder.into(),
            d.total.into(),
            direct.into(),
            mismatch.into(),
            ratio.into(),
        ]);
    }
    let ratios = quadratic_remainder_check(&problem, r, &[0.9, 0.99, 0.999], 1e-14)?;
    let spread = ratio_spread(&ratios);
    report.results = json!({
        "radius": radius,
        "r": r,
        "rows": rows,
        "max_mismatch": worst_mismatch,
        "remainder_ratios": {"a": [0.9, 0.99, 0.999], "ratio": ratios, "spread": spread},
        "quadratic_ok": spread <= REMAINDER_SPREAD_MAX,
    });
    if worst_mismatch > RECONSTRUCTION_TOL {
        eprintln!("decomposition mismatch {worst_mismatch:e} exceeds {RECONSTRUCTION_TOL:e}");
        return Ok(Outcome { report, exit_code: EXIT_RECONSTRUCTION });
    }
    Ok(Outcome::ok(report))
}

/// Generator of binomial weight tables used by the identity suite.
pub type WeightGenerator = fn(f64, usize) -> Vec<f64>;

pub fn recurrence_weights(beta: f64, n_max: usize) -> Vec<f64> {
    binomial_coeffs(beta, n_max).map(|w| w.weights().to_vec()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub worst: f64,
    pub threshold: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.threshold
    }
}

pub fn identity_suite(weights: WeightGenerator) -> SuiteResult {
    let worst = [0.3, 0.5, 1.0, 2.0, 3.7, 10.0]
        .iter()
        .map(|&b| identity_residual_of(&weights(b, 200), &weights(b + 1.0, 200)))
        .fold(0.0, f64::max);
    SuiteResult { name: "identity", worst, threshold: 1e-12 }
}

fn concavity_suite() -> Result<SuiteResult, BohrError> {
    let grid = uniform_a_grid(101);
    let problems = [
        ExtremalProblem::Cesaro { beta: 0.5 },
        ExtremalProblem::Cesaro { beta: 1.0 },
        ExtremalProblem::Cesaro { beta: 2.0 },
        ExtremalProblem::Bernardi { gamma: 1.0, m: 0 },
        ExtremalProblem::Bernardi { gamma: 0.0, m: 1 },
        ExtremalProblem::ClassicalBohr,
    ];
    let mut worst = f64::NEG_INFINITY;
    for p in &problems {
        for &r in &[0.3, 0.5, 0.8] {
            worst = worst.max(concavity_check(p, r, &grid)?);
        }
    }
    Ok(SuiteResult { name: "concavity", worst, threshold: 1e-10 })
}

fn wiener_suite(seed: u64) -> Result<SuiteResult, BohrError> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let f = random_schur(mix_seed(seed, i), CORPUS_MAX_FACTORS, CORPUS_RADIUS_CAP)?;
        let s = taylor_coeffs(&f, 200)?;
        let a0 = s.entries()[0].norm();
        if a0 >= 1.0 - 1e-12 {
            continue;
        }
        for c in &s.entries()[1..] {
            worst = worst.max(c.norm() - (1.0 - a0 * a0));
        }
    }
    Ok(SuiteResult { name: "wiener", worst, threshold: 1e-12 })
}

fn quadrature_suite(seed: u64) -> Result<SuiteResult, BohrError> {
    let kinds = [
        OperatorKind::CesaroBeta(0.5),
        OperatorKind::CesaroBeta(2.0),
        OperatorKind::CBeta(1.0),
        OperatorKind::Bernardi { gamma: 0.5, m: 0 },
        OperatorKind::Bernardi { gamma: 2.0, m: 1 },
        OperatorKind::Libera,
        OperatorKind::Alexander,
        OperatorKind::PrimitiveI,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let base = random_schur(mix_seed(seed, i), 4, 0.9)?;
        for kind in kinds {
            let f = base.times_z_power(kind.required_zero_order());
            let z = Complex64::from_polar(0.5, TAU * i as f64 / 5.0);
            let s = series_value(kind, &f, z, 1e-13)?;
            let q = quadrature_value(kind, &f, z, QUADRATURE_TOL)?;
            worst = worst.max((s - q).norm());
        }
    }
    Ok(SuiteResult { name: "series_vs_quadrature", worst, threshold: 1e-8 })
}

fn radii_suite() -> Result<SuiteResult, BohrError> {
    let checks = [
        (RadiusProblem::cesaro(1.0), 0.5335),
        (RadiusProblem::bernardi(1.0, 0), 0.5828),
        (RadiusProblem::bernardi(0.0, 1), 0.5828),
    ];
    let mut worst: f64 = 0.0;
    for (p, expected) in checks {
        worst = worst.max((solve_radius(&p, 1e-12)?.root - expected).abs());
    }
    Ok(SuiteResult { name: "radii", worst, threshold: 1e-3 })
}

/// Runs every self-test suite with the given identity-suite weight generator.
pub fn selftest_with(seed: u64, weights: WeightGenerator) -> Result<Outcome, CliError> {
    let suites = vec![
        identity_suite(weights),
        concavity_suite()?,
        wiener_suite(seed)?,
        quadrature_suite(seed)?,
        radii_suite()?,
    ];
    let mut report = RunReport::new("selftest", seed);
    report.table = Table::new(&["suite", "passed", "worst", "threshold"]);
    for s in &suites {
        report.table.push(vec![s.name.into(), s.passed().into(), s.worst.into(), s.threshold.into()]);
    }
    let failed: Vec<&str> = suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
    report.results = json!({
        "suites": suites.iter().map(|s| json!({"name": s.name, "passed": s.passed(), "worst": s.worst, "threshold": s.threshold})).collect::<Vec<_>>(),
        "passed": suites.len() - failed.len(),
        "failed": failed,
    });
    for name in &failed {
        eprintln!("selftest suite failed: {name}");
    }
    let exit_code = if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE };
    Ok(Outcome { report, exit_code })
}

pub fn cmd_selftest(seed: u64) -> Result<Outcome, CliError> {
    selftest_with(seed, recurrence_weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        assert!(grid(&[], 0.0, 1.0, Some(0)).is_empty());
        assert_eq!(grid(&[], 0.5, 1.0, Some(1)), vec![0.5]);
        assert_eq!(grid(&[], 0.0, 1.0, Some(3)), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(&[2.0, 3.0], 0.0, 1.0, None), vec![2.0, 3.0]);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(BohrError::ParameterDomain("x".into())).code, EXIT_DOMAIN);
        assert_eq!(CliError::from(BohrError::NoSignChange("x".into())).code, EXIT_SOLVER);
        assert_eq!(CliError::from(BohrError::NoWitness { scanned: 40 }).code, EXIT_VIOLATION);
    }

    #[test]
    fn corrupted_recurrence_fails_identity_suite() {
        fn corrupted(beta: f64, n_max: usize) -> Vec<f64> {
            let mut w = recurrence_weights(beta, n_max);
            w[50] *= 1.0 + 1e-6;
            w
        }
        assert!(identity_suite(recurrence_weights).passed());
        assert!(!identity_suite(corrupted).passed());
    }
}
