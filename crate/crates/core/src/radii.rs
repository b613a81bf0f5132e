//! Closed-form sup bounds, the radius equations and a bracketing root finder.
//!
//! The β-Cesàro equation is
//! `Φ_β(x) = 3 [1 - (1-x)^(1-β)]/(1-β) - 2 [(1-x)^(-β) - 1]/β`,
//! and the Bernardi equation is
//! `Ψ(x) = x^m/(m+γ) - 2 Σ_{n>m} x^n/(n+γ)`.
//! Both are positive for small `x > 0` and negative past the radius.

use rayon::prelude::*;

use crate::error::{BohrError, Result};
use crate::series::check_beta;
use crate::summation::CompensatedSum;
use crate::operators::OperatorKind;

/// Within this distance of `β = 1` the logarithmic limit forms are used.
pub const BETA_LIMIT_BAND: f64 = 1e-8;

/// Term budget for the Bernardi series.
pub const MAX_SERIES_TERMS: usize = 100_000_000;

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default tail budget for the Bernardi series inside the radius equation.
pub const DEFAULT_SERIES_EPS: f64 = 1e-16;

/// Operator family whose radius equation is solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusFamily {
    CesaroBeta(f64),
    Bernardi { gamma: f64, m: usize },
}

impl RadiusFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::CesaroBeta(beta) => check_beta(beta),
            Self::Bernardi { gamma, m } => OperatorKind::Bernardi { gamma, m }.validate(),
        }
    }
}

impl From<OperatorKind> for RadiusFamily {
    /// `C_β` shares the `T_β` radius, the primitive shares the Libera radius.
    fn from(kind: OperatorKind) -> Self {
        match kind.normalized() {
            OperatorKind::CesaroBeta(beta) | OperatorKind::CBeta(beta) => Self::CesaroBeta(beta),
            OperatorKind::Bernardi { gamma, m } => Self::Bernardi { gamma, m },
            OperatorKind::PrimitiveI => Self::Bernardi { gamma: 1.0, m: 0 },
            OperatorKind::Libera | OperatorKind::Alexander => unreachable!("normalized"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusProblem {
    pub family: RadiusFamily,
    pub series_tail_eps: f64,
}

impl RadiusProblem {
    pub fn new(family: RadiusFamily) -> Self {
        Self { family, series_tail_eps: DEFAULT_SERIES_EPS }
    }

    pub fn cesaro(beta: f64) -> Self {
        Self::new(RadiusFamily::CesaroBeta(beta))
    }

    pub fn bernardi(gamma: f64, m: usize) -> Self {
        Self::new(RadiusFamily::Bernardi { gamma, m })
    }
}

/// Certified root of a radius equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusResult {
    pub root: f64,
    pub residual: f64,
    /// Final bisection bracket; the equation is positive at the left end and
    /// nonpositive at the right end.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

fn check_open_unit(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(BohrError::domain(format!("argument must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// `∫_0^r (1-t)^(-β) dt = [1 - (1-r)^(1-β)]/(1-β)`, or `log 1/(1-r)` at `β = 1`.
///
/// Inside the band around `β = 1` the quotient is expanded as
/// `-L (1 + dL/2 + (dL)²/6 + (dL)³/24)` with `d = 1 - β`, `L = log(1-r)`,
/// which reduces to the logarithm at `d = 0`.
pub fn cesaro_primitive(beta: f64, r: f64) -> f64 {
    let l = (-r).ln_1p();
    let d = 1.0 - beta;
    if d.abs() < BETA_LIMIT_BAND {
        let u = d * l;
        -l * (1.0 + u / 2.0 * (1.0 + u / 3.0 * (1.0 + u / 4.0)))
    } else {
        -(d * l).exp_m1() / d
    }
}

/// `∫_0^r (1-t)^(-β-1) dt = [(1-r)^(-β) - 1]/β`.
pub fn cesaro_primitive_shifted(beta: f64, r: f64) -> f64 {
    (-beta * (-r).ln_1p()).exp_m1() / beta
}

/// Sharp bound `(1/r) [1 - (1-r)^(1-β)]/(1-β)` on `|T_β[f]|` over `|z| = r`.
pub fn cesaro_bound(beta: f64, r: f64) -> Result<f64> {
    check_beta(beta)?;
    check_open_unit(r)?;
    Ok(cesaro_primitive(beta, r) / r)
}

/// Right-hand side of the Bohr inequality for the family.
pub fn closed_bound(family: RadiusFamily, r: f64) -> Result<f64> {
    family.validate()?;
    check_open_unit(r)?;
    match family {
        RadiusFamily::CesaroBeta(beta) => cesaro_bound(beta, r),
        RadiusFamily::Bernardi { gamma, m } => Ok(r.powi(m as i32) / (m as f64 + gamma)),
    }
}

/// `Σ_{n>=start} x^n / (n + γ)` to absolute accuracy `eps`.
pub fn bernardi_series(gamma: f64, start: usize, x: f64, eps: f64) -> Result<f64> {
    check_open_unit(x)?;
    if !(start as f64 + gamma > 0.0) {
        return Err(BohrError::domain(format!("series needs start + gamma > 0, got start={start}, gamma={gamma}")));
    }
    let mut sum = CompensatedSum::new();
    let mut power = x.powi(start as i32);
    let mut n = start;
    loop {
        let denom = n as f64 + gamma;
        sum.add(power / denom);
        n += 1;
        power *= x;
        let tail = power / ((denom + 1.0) * (1.0 - x));
        if tail <= eps {
            return Ok(sum.value());
        }
        if n - start >= MAX_SERIES_TERMS {
            return Err(BohrError::TruncationFailure { order: n, tail, eps });
        }
    }
}

/// The two terms of the equation, before subtraction.
fn equation_terms(problem: &RadiusProblem, x: f64) -> Result<(f64, f64)> {
    problem.family.validate()?;
    check_open_unit(x)?;
    match problem.family {
        RadiusFamily::CesaroBeta(beta) => {
            let lead = 3.0 * cesaro_primitive(beta, x);
            let sub = 2.0 * cesaro_primitive_shifted(beta, x);
            Ok((lead, sub))
        }
        RadiusFamily::Bernardi { gamma, m } => {
            let lead = x.powi(m as i32) / (m as f64 + gamma);
            let sub = 2.0 * bernardi_series(gamma, m + 1, x, problem.series_tail_eps)?;
            Ok((lead, sub))
        }
    }
}

/// `Φ_β(x)` or `Ψ(x)`.
pub fn radius_equation(problem: &RadiusProblem, x: f64) -> Result<f64> {
    let (lead, sub) = equation_terms(problem, x)?;
    Ok(lead - sub)
}

/// Magnitude scale of the equation at `x`, used to judge residuals.
pub fn equation_scale(problem: &RadiusProblem, x: f64) -> Result<f64> {
    let (lead, sub) = equation_terms(problem, x)?;
    Ok(lead.abs() + sub.abs())
}

/// Scan points: geometric in `x` from 1e-6 to 1/2, then geometric in `1 - x` down to 1e-6.
fn scan_points() -> impl Iterator<Item = f64> {
    const STEPS: i32 = 48;
    let lower = (0..=STEPS).map(|k| 1e-6 * (0.5f64 / 1e-6).powf(k as f64 / STEPS as f64));
    let upper = (1..=STEPS).map(|k| 1.0 - 0.5 * (1e-6f64 / 0.5).powf(k as f64 / STEPS as f64));
    lower.chain(upper)
}

/// Bracket the first sign change on the scan grid, bisect to width `tol`, then take
/// one secant step inside the final bracket.
pub fn solve_radius(problem: &RadiusProblem, tol: f64) -> Result<RadiusResult> {
    problem.family.validate()?;
    if !(1e-14..1.0).contains(&tol) {
        return Err(BohrError::domain(format!("tol must lie in [1e-14, 1), got {tol}")));
    }
    let eq = |x: f64| radius_equation(problem, x);

    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for x in scan_points() {
        let fx = eq(x)?;
        match prev {
            None if fx <= 0.0 => break,
            Some((xp, fp)) if fx <= 0.0 => {
                bracket = Some((xp, fp, x, fx));
                break;
            }
            _ => prev = Some((x, fx)),
        }
    }
    let (mut lo, mut flo, mut hi, mut fhi) =
        bracket.ok_or_else(|| BohrError::NoSignChange(format!("{:?}", problem.family)))?;

    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eq(mid)?;
        if fm > 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iterations += 1;
    }

    let mut root = if flo.abs() <= fhi.abs() { lo } else { hi };
    let mut residual = flo.abs().min(fhi.abs()) * if root == lo { flo.signum() } else { fhi.signum() };
    if flo != fhi {
        let x = (lo - flo * (hi - lo) / (fhi - flo)).clamp(lo, hi);
        let fx = eq(x)?;
        if fx.abs() < residual.abs() {
            root = x;
            residual = fx;
        }
    }
    Ok(RadiusResult { root, residual, bracket: (lo, hi), iterations })
}

/// Parameter grid for [`radius_curve`].
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterSweep {
    Beta(Vec<f64>),
    Gamma { m: usize, values: Vec<f64> },
}

impl ParameterSweep {
    fn values(&self) -> &[f64] {
        match self {
            Self::Beta(v) | Self::Gamma { values: v, .. } => v,
        }
    }

    fn problem(&self, p: f64) -> RadiusProblem {
        match self {
            Self::Beta(_) => RadiusProblem::cesaro(p),
            Self::Gamma { m, .. } => RadiusProblem::bernardi(p, *m),
        }
    }

    fn in_domain(&self, p: f64) -> bool {
        self.problem(p).family.validate().is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub param: f64,
    pub root: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusCurve {
    pub rows: Vec<CurveRow>,
    /// Indices `i` where rows `i` and `i + 1` jump by more than the local slope allows.
    pub discontinuities: Vec<usize>,
}

fn local_slope(sweep: &ParameterSweep, p: f64, tol: f64) -> Result<f64> {
    let h = 1e-4 * p.abs().max(1.0);
    let (a, b) = match (sweep.in_domain(p - h), sweep.in_domain(p + h)) {
        (true, true) => (p - h, p + h),
        (false, true) => (p, p + h),
        (true, false) => (p - h, p),
        (false, false) => return Ok(0.0),
    };
    let ra = solve_radius(&sweep.problem(a), tol)?.root;
    let rb = solve_radius(&sweep.problem(b), tol)?.root;
    Ok(((rb - ra) / (b - a)).abs())
}

/// Solves the radius equation at every grid point (in parallel, order preserved) and
/// flags adjacent pairs whose roots differ by more than ten times spacing times slope.
pub fn radius_curve(sweep: &ParameterSweep, tol: f64) -> Result<RadiusCurve> {
    let params = sweep.values();
    let solved: Vec<(CurveRow, f64)> = params
        .par_iter()
        .map(|&p| {
            let res = solve_radius(&sweep.problem(p), tol)?;
            let slope = local_slope(sweep, p, tol)?;
            Ok((CurveRow { param: p, root: res.root, residual: res.residual }, slope))
        })
        .collect::<Result<_>>()?;
    let discontinuities = solved
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let (a, b) = (&w[0], &w[1]);
            let allowed = 10.0 * (b.0.param - a.0.param).abs() * a.1.max(b.1) + 10.0 * tol;
            (b.0.root - a.0.root).abs() > allowed
        })
        .map(|(i, _)| i)
        .collect();
    Ok(RadiusCurve { rows: solved.into_iter().map(|(row, _)| row).collect(), discontinuities })
}
