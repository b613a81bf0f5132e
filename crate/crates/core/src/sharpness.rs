//! Sharpness of the radii: three-term decompositions of the extremal majorants,
//! quadratic vanishing of their remainders, concavity of the upper-bound functions
//! and the search for violations beyond the radius.

use crate::corpus::{taylor_coeffs, BoundedFunction};
use crate::error::{BohrError, Result};
use crate::operators::{bohr_majorant, majorant_of, OperatorKind};
use crate::quadrature::{integrate_real, QuadratureOptions};
use crate::radii::{
    bernardi_series, cesaro_bound, cesaro_primitive, cesaro_primitive_shifted, radius_equation, solve_radius,
    RadiusProblem, DEFAULT_TOL,
};
use crate::series::check_beta;
use crate::summation::CompensatedSum;

/// Slack above the bound required for a violation witness.
pub const WITNESS_MARGIN: f64 = 1e-12;

/// Number of steps `a = 1 - 2^-k` tried by [`violation_search`].
pub const WITNESS_STEPS: u32 = 40;

/// Truncation accuracy of the extremal majorants used in sharpness checks.
const MAJORANT_EPS: f64 = 1e-14;

/// The extremal-function problems whose radius is shown to be best possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtremalProblem {
    /// `T_β` with extremal `φ_a`.
    Cesaro { beta: f64 },
    /// `L_γ` with extremal `ψ_a = z^m φ_a`.
    Bernardi { gamma: f64, m: usize },
    /// `Σ |a_n| r^n <= 1` with extremal `φ_a`; radius 1/3.
    ClassicalBohr,
}

impl ExtremalProblem {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Cesaro { beta } => check_beta(beta),
            Self::Bernardi { gamma, m } => OperatorKind::Bernardi { gamma, m }.validate(),
            Self::ClassicalBohr => Ok(()),
        }
    }

    pub fn radius_problem(&self) -> Option<RadiusProblem> {
        match *self {
            Self::Cesaro { beta } => Some(RadiusProblem::cesaro(beta)),
            Self::Bernardi { gamma, m } => Some(RadiusProblem::bernardi(gamma, m)),
            Self::ClassicalBohr => None,
        }
    }

    /// Radius beyond which the inequality fails.
    pub fn radius(&self) -> Result<f64> {
        match self.radius_problem() {
            Some(p) => Ok(solve_radius(&p, DEFAULT_TOL)?.root),
            None => Ok(1.0 / 3.0),
        }
    }

    pub fn bound(&self, r: f64) -> Result<f64> {
        match *self {
            Self::Cesaro { beta } => cesaro_bound(beta, r),
            Self::Bernardi { gamma, m } => OperatorKind::Bernardi { gamma, m }.sup_bound(r),
            Self::ClassicalBohr => Ok(1.0),
        }
    }

    pub fn extremal(&self, a: f64) -> Result<BoundedFunction> {
        match *self {
            Self::Cesaro { .. } | Self::ClassicalBohr => BoundedFunction::extremal_phi(a),
            Self::Bernardi { m, .. } => BoundedFunction::extremal_psi(a, m),
        }
    }

    /// Majorant of the extremal function, summed directly from its coefficients.
    pub fn extremal_majorant(&self, a: f64, r: f64, eps: f64) -> Result<f64> {
        let f = self.extremal(a)?;
        match *self {
            Self::Cesaro { beta } => majorant_of(OperatorKind::CesaroBeta(beta), &f, r, eps),
            Self::Bernardi { gamma, m } => majorant_of(OperatorKind::Bernardi { gamma, m }, &f, r, eps),
            Self::ClassicalBohr => {
                let order = crate::corpus::geometric_tail_order(r, eps)?;
                bohr_majorant(&taylor_coeffs(&f, order)?, r, eps)
            }
        }
    }

    /// Upper-bound function of `a = |a_0|` obtained from Wiener's estimate:
    /// `φ(a) = (1/r)[(a²+a-1) X + (1-a²) Y]` for `T_β`, `ψ(a) = a P + (1-a²) S`
    /// for `L_γ`, and `a + (1-a²) r/(1-r)` for the classical sum.
    pub fn wiener_bound_function(&self, a: f64, r: f64) -> Result<f64> {
        check_open_unit(r)?;
        match *self {
            Self::Cesaro { beta } => {
                check_beta(beta)?;
                let x = cesaro_primitive(beta, r);
                let y = cesaro_primitive_shifted(beta, r);
                Ok(((a * a + a - 1.0) * x + (1.0 - a * a) * y) / r)
            }
            Self::Bernardi { gamma, m } => {
                let p = self.bound(r)?;
                let s = bernardi_series(gamma, m + 1, r, 1e-17)?;
                Ok(a * p + (1.0 - a * a) * s)
            }
            Self::ClassicalBohr => Ok(a + (1.0 - a * a) * r / (1.0 - r)),
        }
    }
}

fn check_open_unit(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(BohrError::domain(format!("radius must lie in (0, 1), got {r}")));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(BohrError::domain(format!("extremal parameter must lie in [0, 1], got {a}")));
    }
    Ok(())
}

/// `bound_term - deficit_term + remainder`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub bound_term: f64,
    pub deficit_term: f64,
    pub remainder: f64,
    pub total: f64,
}

impl Decomposition {
    fn assemble(bound_term: f64, deficit_term: f64, remainder: f64) -> Self {
        let total = bound_term - deficit_term + remainder;
        Self { bound_term, deficit_term, remainder, total }
    }
}

/// Splits the `T_β` majorant of `φ_a` at radius `r` into the sharp bound, the
/// deficit `(1-a)/r Φ_β(r)` and the remainder
/// `N_a(r) = 2(1-a)/r [X - Y] + (1-a²)/r ∫_0^r t / ((1-at)(1-t)^β) dt`.
pub fn decomposition_cesaro(beta: f64, a: f64, r: f64, eps: f64) -> Result<Decomposition> {
    check_beta(beta)?;
    check_a(a)?;
    check_open_unit(r)?;
    let x = cesaro_primitive(beta, r);
    let y = cesaro_primitive_shifted(beta, r);
    let bound = x / r;
    let deficit = (1.0 - a) / r * radius_equation(&RadiusProblem::cesaro(beta), r)?;
    let integral = integrate_real(
        |t| t / ((1.0 - a * t) * (1.0 - t).powf(beta)),
        0.0,
        r,
        QuadratureOptions { abs_tol: eps.min(1e-15), rel_tol: 1e-15, max_panels: 4000 },
    )?;
    let remainder = 2.0 * (1.0 - a) / r * (x - y) + (1.0 - a * a) / r * integral;
    Ok(Decomposition::assemble(bound, deficit, remainder))
}

/// `a^k - 1` without cancellation near `a = 1`.
fn power_minus_one(a: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        (k as f64 * a.ln()).exp_m1()
    }
}

/// Splits the `L_γ` majorant of `ψ_a = z^m φ_a` into `r^m/(m+γ)`, the deficit
/// `(1-a) Ψ(r)` and `M_a(r) = Σ_{n>m} [2(a-1) + (1-a²) a^(n-m-1)] r^n/(n+γ)`.
pub fn decomposition_bernardi(gamma: f64, m: usize, a: f64, r: f64, eps: f64) -> Result<Decomposition> {
    OperatorKind::Bernardi { gamma, m }.validate()?;
    check_a(a)?;
    check_open_unit(r)?;
    let problem = RadiusProblem { series_tail_eps: eps.min(1e-16), ..RadiusProblem::bernardi(gamma, m) };
    let bound = r.powi(m as i32) / (m as f64 + gamma);
    let deficit = (1.0 - a) * radius_equation(&problem, r)?;

    // 2(a-1) + (1-a²) a^k = (1-a) [(a^(k+1) - 1) + (a^k - 1)]
    let one_minus_a = 1.0 - a;
    let mut sum = CompensatedSum::new();
    let mut n = m + 1;
    let mut power = r.powi(n as i32);
    if one_minus_a > 0.0 {
        loop {
            let k = n - m - 1;
            let denom = n as f64 + gamma;
            let coeff = one_minus_a * (power_minus_one(a, k + 1) + power_minus_one(a, k));
            sum.add(coeff * power / denom);
            n += 1;
            power *= r;
            let tail = 2.0 * one_minus_a * power / ((denom + 1.0) * (1.0 - r));
            if tail <= eps.min(1e-16) {
                break;
            }
            if n > crate::radii::MAX_SERIES_TERMS {
                return Err(BohrError::TruncationFailure { order: n, tail, eps });
            }
        }
    }
    Ok(Decomposition::assemble(bound, deficit, sum.value()))
}

/// Decomposition for a Cesàro or Bernardi problem.
pub fn decomposition(problem: &ExtremalProblem, a: f64, r: f64, eps: f64) -> Result<Decomposition> {
    match *problem {
        ExtremalProblem::Cesaro { beta } => decomposition_cesaro(beta, a, r, eps),
        ExtremalProblem::Bernardi { gamma, m } => decomposition_bernardi(gamma, m, a, r, eps),
        ExtremalProblem::ClassicalBohr => {
            Err(BohrError::domain("the classical Bohr sum has no operator decomposition"))
        }
    }
}

/// Ratios `remainder / (1-a)²` for each `a` in `a_list`.
pub fn quadratic_remainder_check(problem: &ExtremalProblem, r: f64, a_list: &[f64], eps: f64) -> Result<Vec<f64>> {
    if a_list.windows(2).any(|w| w[0] >= w[1]) || a_list.iter().any(|&a| !(0.0..1.0).contains(&a)) {
        return Err(BohrError::domain("a_list must be strictly increasing within [0, 1)"));
    }
    a_list
        .iter()
        .map(|&a| Ok(decomposition(problem, a, r, eps)?.remainder / ((1.0 - a) * (1.0 - a))))
        .collect()
}

/// `max |ratio| / min |ratio|`; infinite if a ratio vanishes.
pub fn ratio_spread(ratios: &[f64]) -> f64 {
    let max = ratios.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let min = ratios.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Extremal parameter whose majorant exceeds the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub a: f64,
    pub step: u32,
    pub majorant: f64,
    pub bound: f64,
}

/// Scans `a = 1 - 2^-k`, `k = 1..=40`, and returns the first `a` whose extremal
/// majorant exceeds the bound by more than [`WITNESS_MARGIN`].
pub fn violation_search(problem: &ExtremalProblem, r: f64) -> Result<Witness> {
    problem.validate()?;
    check_open_unit(r)?;
    let radius = problem.radius()?;
    if !(r > radius + 10.0 * DEFAULT_TOL) {
        return Err(BohrError::Precondition(format!(
            "violations are only sought above the radius {radius}, got r = {r}"
        )));
    }
    let bound = problem.bound(r)?;
    for step in 1..=WITNESS_STEPS {
        let a = 1.0 - 0.5f64.powi(step as i32);
        let majorant = problem.extremal_majorant(a, r, MAJORANT_EPS)?;
        if majorant > bound + WITNESS_MARGIN {
            return Ok(Witness { a, step, majorant, bound });
        }
    }
    Err(BohrError::NoWitness { scanned: WITNESS_STEPS as usize })
}

/// Largest centered second difference of the Wiener upper-bound function over `a_grid`.
pub fn concavity_check(problem: &ExtremalProblem, r: f64, a_grid: &[f64]) -> Result<f64> {
    if a_grid.len() < 3 {
        return Err(BohrError::domain("concavity check needs at least three grid points"));
    }
    let values: Vec<f64> = a_grid
        .iter()
        .map(|&a| problem.wiener_bound_function(a, r))
        .collect::<Result<_>>()?;
    Ok(values
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `n` equispaced points `i / n` covering `[0, 1)`.
pub fn uniform_a_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::binomial_coeffs;

    #[test]
    fn cesaro_collapse_at_a_one() {
        let d = decomposition_cesaro(1.0, 1.0, 0.5, 1e-14).unwrap();
        assert_eq!(d.deficit_term, 0.0);
        assert_eq!(d.remainder, 0.0);
        assert!((d.total - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bernardi_collapse_at_a_one() {
        let d = decomposition_bernardi(1.0, 0, 1.0, 0.5, 1e-14).unwrap();
        assert_eq!(d.deficit_term, 0.0);
        assert_eq!(d.remainder, 0.0);
        assert_eq!(d.total, 1.0);
    }

    /// N_a(r) = -((1-a)²/r) ∫_0^r t(1+t) / ((1-at)(1-t)^(β+1)) dt, obtained by
    /// combining both terms of the displayed remainder under one integral.
    fn factored_remainder(beta: f64, a: f64, r: f64) -> f64 {
        let j = integrate_real(
            |t| t * (1.0 + t) / ((1.0 - a * t) * (1.0 - t).powf(beta + 1.0)),
            0.0,
            r,
            QuadratureOptions::absolute(1e-16),
        )
        .unwrap();
        -(1.0 - a) * (1.0 - a) / r * j
    }

    /// Series form of N_a(r) with c_n coefficients, valid for a > 0.
    fn series_remainder(beta: f64, a: f64, r: f64) -> f64 {
        let n_max = 400;
        let c = binomial_coeffs(beta, n_max).unwrap();
        let c1 = binomial_coeffs(beta + 1.0, n_max).unwrap();
        let mut s = CompensatedSum::new();
        for n in 0..=n_max {
            let conv: f64 = (0..=n).map(|k| c.get(n - k) * a.powi(k as i32)).sum();
            let coeff = -(1.0 - a).powi(2) / a * c.get(n) - 2.0 * (1.0 - a) * c1.get(n) + (1.0 - a * a) / a * conv;
            s.add(coeff / (n as f64 + 1.0) * r.powi(n as i32));
        }
        s.value()
    }

    #[test]
    fn cesaro_remainder_matches_independent_forms() {
        for &(beta, a, r) in &[(1.0, 0.9, 0.6), (0.5, 0.5, 0.3), (2.3, 0.99, 0.45), (0.7, 0.2, 0.7)] {
            let d = decomposition_cesaro(beta, a, r, 1e-14).unwrap();
            let f = factored_remainder(beta, a, r);
            let s = series_remainder(beta, a, r);
            assert!((d.remainder - f).abs() < 1e-12, "{beta} {a} {r}: {} vs {f}", d.remainder);
            assert!((d.remainder - s).abs() < 1e-10, "{beta} {a} {r}: {} vs {s}", d.remainder);
        }
    }

    #[test]
    fn cesaro_remainder_ratio_example() {
        let n1 = decomposition_cesaro(1.0, 0.9, 0.6, 1e-14).unwrap().remainder;
        let n2 = decomposition_cesaro(1.0, 0.99, 0.6, 1e-14).unwrap().remainder;
        let ratio = n1 / n2;
        assert!(ratio > 50.0 && ratio < 200.0, "{ratio}");
        // Oracle from the factored form.
        let oracle = factored_remainder(1.0, 0.9, 0.6) / factored_remainder(1.0, 0.99, 0.6);
        assert!((ratio - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn reconstruction_examples() {
        let d = decomposition_cesaro(0.5, 0.5, 0.3, 1e-14).unwrap();
        let direct = majorant_of(OperatorKind::CesaroBeta(0.5), &BoundedFunction::ExtremalPhi(0.5), 0.3, 1e-14).unwrap();
        assert!((d.total - direct).abs() < 1e-10);

        let d = decomposition_bernardi(0.0, 1, 0.5, 0.4, 1e-14).unwrap();
        let direct = majorant_of(
            OperatorKind::Bernardi { gamma: 0.0, m: 1 },
            &BoundedFunction::ExtremalPsi { a: 0.5, m: 1 },
            0.4,
            1e-14,
        )
        .unwrap();
        assert!((d.total - direct).abs() < 1e-10);
    }

    #[test]
    fn bernardi_remainder_ratio() {
        let p = ExtremalProblem::Bernardi { gamma: 1.0, m: 0 };
        let ratios = quadratic_remainder_check(&p, 0.65, &[0.99, 0.999], 1e-14).unwrap();
        assert!(ratio_spread(&ratios) < 2.0, "{ratios:?}");
        // Brute-force oracle with plain powers at a = 0.99.
        let a: f64 = 0.99;
        let brute: f64 = (1..3000)
            .map(|n| (2.0 * (a - 1.0) + (1.0 - a * a) * a.powi(n - 1)) / (n as f64 + 1.0) * 0.65f64.powi(n))
            .sum();
        assert!((ratios[0] * (1.0 - a).powi(2) - brute).abs() < 1e-13);
    }

    #[test]
    fn quadratic_remainder_rejects_bad_grid() {
        let p = ExtremalProblem::Cesaro { beta: 1.0 };
        assert!(quadratic_remainder_check(&p, 0.5, &[0.99, 0.9], 1e-14).is_err());
        assert!(quadratic_remainder_check(&p, 0.5, &[0.9, 1.0], 1e-14).is_err());
        assert!(quadratic_remainder_check(&ExtremalProblem::ClassicalBohr, 0.5, &[0.9], 1e-14).is_err());
    }

    #[test]
    fn witnesses_above_radius() {
        let w = violation_search(&ExtremalProblem::Cesaro { beta: 1.0 }, 0.55).unwrap();
        assert!(w.majorant > w.bound);
        assert!(violation_search(&ExtremalProblem::Bernardi { gamma: 1.0, m: 0 }, 0.60).is_ok());
        assert!(violation_search(&ExtremalProblem::ClassicalBohr, 0.40).is_ok());
        assert!(matches!(
            violation_search(&ExtremalProblem::Cesaro { beta: 1.0 }, 0.5),
            Err(BohrError::Precondition(_))
        ));
    }

    #[test]
    fn deficit_changes_sign_at_radius() {
        for p in [ExtremalProblem::Cesaro { beta: 0.6 }, ExtremalProblem::Bernardi { gamma: 2.0, m: 1 }] {
            let radius = p.radius().unwrap();
            let below = decomposition(&p, 0.7, radius * 0.95, 1e-14).unwrap();
            let above = decomposition(&p, 0.7, (radius * 1.05).min(0.99), 1e-14).unwrap();
            assert!(below.deficit_term > 0.0);
            assert!(above.deficit_term < 0.0);
        }
    }

    #[test]
    fn concavity_examples() {
        let grid = uniform_a_grid(101);
        for p in [ExtremalProblem::Cesaro { beta: 1.0 }, ExtremalProblem::Bernardi { gamma: 1.0, m: 0 }, ExtremalProblem::ClassicalBohr] {
            assert!(concavity_check(&p, 0.5, &grid).unwrap() <= 1e-10);
            assert!(concavity_check(&p, 1e-6, &grid).unwrap().abs() < 1e-9);
        }
    }
}
