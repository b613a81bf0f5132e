//! Integral operators acting on Taylor coefficients, their Bohr majorant series and
//! a quadrature evaluation of the defining integrals.
//!
//! Every operator here is a positive multiplier or convolution on coefficients, so
//! the majorant of `f` is the operator applied to `|a_k|`, summed against `r^n`.
//! Truncation is certified by assuming only `|a_k| <= 1`, which holds on the Schur
//! class.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::corpus::{taylor_coeffs, BoundedFunction};
use crate::error::{BohrError, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::radii::cesaro_bound;
use crate::series::{binomial_coeffs, check_beta, CoefficientSequence};
use crate::summation::CompensatedSum;

/// Term budget for adaptive truncation.
pub const MAX_TERMS: usize = 1_000_000;

/// Default absolute tolerance for [`quadrature_value`] in the sampled checks.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Coefficients below the required zero order must be this small.
const ZERO_COEFF_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which integral operator to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `T_β[f](z) = ∫_0^1 f(tz) (1 - tz)^(-β) dt`
    CesaroBeta(f64),
    /// `C_β[g](z) = ∫_0^1 g(tz) / (t (1 - tz)^β) dt` for `g(0) = 0`
    CBeta(f64),
    /// `L_γ[f](z) = ∫_0^1 f(zt) t^(γ-1) dt` for `f` with an `m`-fold zero at 0
    Bernardi { gamma: f64, m: usize },
    /// `L_1` with `m = 0`
    Libera,
    /// `L_0` with `m = 1`
    Alexander,
    /// `I[f](z) = ∫_0^z f(w) dw`
    PrimitiveI,
}

impl OperatorKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::CesaroBeta(beta) | Self::CBeta(beta) => check_beta(beta),
            Self::Bernardi { gamma, m } => {
                if !(gamma.is_finite() && gamma > -(m as f64)) {
                    return Err(BohrError::domain(format!("Bernardi operator needs gamma > -m, got gamma={gamma}, m={m}")));
                }
                Ok(())
            }
            Self::Libera | Self::Alexander | Self::PrimitiveI => Ok(()),
        }
    }

    /// Libera and Alexander rewritten as their Bernardi parameters.
    pub fn normalized(&self) -> Self {
        match *self {
            Self::Libera => Self::Bernardi { gamma: 1.0, m: 0 },
            Self::Alexander => Self::Bernardi { gamma: 0.0, m: 1 },
            other => other,
        }
    }

    /// Order of the zero at the origin the input function must have.
    pub fn required_zero_order(&self) -> usize {
        match self.normalized() {
            Self::CBeta(_) => 1,
            Self::Bernardi { m, .. } => m,
            _ => 0,
        }
    }

    /// Sharp bound on `|operator image|` over `|z| = r` for inputs in the Schur class.
    pub fn sup_bound(&self, r: f64) -> Result<f64> {
        self.validate()?;
        check_radius(r)?;
        match self.normalized() {
            Self::CesaroBeta(beta) => cesaro_bound(beta, r),
            Self::CBeta(beta) => Ok(r * cesaro_bound(beta, r)?),
            Self::Bernardi { gamma, m } => Ok(r.powi(m as i32) / (m as f64 + gamma)),
            Self::PrimitiveI => Ok(r),
            Self::Libera | Self::Alexander => unreachable!("normalized"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CesaroBeta(_) => "cesaro",
            Self::CBeta(_) => "cbeta",
            Self::Bernardi { .. } => "bernardi",
            Self::Libera => "libera",
            Self::Alexander => "alexander",
            Self::PrimitiveI => "primitive",
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(BohrError::domain(format!("radius must lie in (0, 1), got {r}")));
    }
    Ok(())
}

fn check_leading_zeros(f: &CoefficientSequence, m: usize) -> Result<()> {
    for (k, c) in f.entries().iter().take(m).enumerate() {
        if c.norm() > ZERO_COEFF_TOL {
            return Err(BohrError::Precondition(format!(
                "coefficient {k} = {c} must vanish for an operator requiring a zero of order {m}"
            )));
        }
    }
    Ok(())
}

/// `(1/(n+1)) Σ_{k<=n} c_{n-k}(β) a_k` for `n <= n_max`.
fn cesaro_coeffs(beta: f64, a: &[Complex64], n_max: usize) -> Result<Vec<Complex64>> {
    let w = binomial_coeffs(beta, n_max)?;
    let w = w.weights();
    Ok((0..=n_max)
        .map(|n| {
            let s: Complex64 = (0..=n).map(|k| a[k] * w[n - k]).sum();
            s / (n as f64 + 1.0)
        })
        .collect())
}

/// Taylor coefficients `0..=n_max` of the operator image of `f`.
pub fn operator_coeffs(kind: OperatorKind, f: &CoefficientSequence, n_max: usize) -> Result<CoefficientSequence> {
    kind.validate()?;
    f.require_order(n_max)?;
    let a = f.entries();
    let out = match kind.normalized() {
        OperatorKind::CesaroBeta(beta) => cesaro_coeffs(beta, a, n_max)?,
        OperatorKind::CBeta(beta) => {
            check_leading_zeros(f, 1)?;
            let mut out = vec![ZERO; n_max + 1];
            if n_max >= 1 {
                let inner = cesaro_coeffs(beta, &a[1..], n_max - 1)?;
                out[1..].copy_from_slice(&inner);
            }
            out
        }
        OperatorKind::Bernardi { gamma, m } => {
            check_leading_zeros(f, m.min(n_max + 1))?;
            (0..=n_max)
                .map(|n| if n < m { ZERO } else { a[n] / (n as f64 + gamma) })
                .collect()
        }
        OperatorKind::PrimitiveI => {
            let mut out = vec![ZERO; n_max + 1];
            for n in 0..n_max {
                out[n + 1] = a[n] / (n as f64 + 1.0);
            }
            out
        }
        OperatorKind::Libera | OperatorKind::Alexander => unreachable!("normalized"),
    };
    Ok(CoefficientSequence::from_vec_unchecked(out))
}

/// Bound on `Σ_{n>=start} c_n(β+1)/(n+1) r^n`.
///
/// Consecutive terms have ratio `r (n+1+β)/(n+2)`, which is at most
/// `q = r max(1, (start+1+β)/(start+2))` from `start` on.
fn cesaro_tail_from(beta: f64, start: usize, r: f64) -> f64 {
    let q = r * f64::max(1.0, (start as f64 + 1.0 + beta) / (start as f64 + 2.0));
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let mut c = 1.0;
    for n in 1..=start {
        let n = n as f64;
        c *= (n + beta) / n;
    }
    let first = c / (start as f64 + 1.0) * r.powi(start as i32);
    first / (1.0 - q)
}

/// Bound on `Σ_{n>=start} r^n / (n + γ)`; requires `start + γ > 0`.
pub(crate) fn bernardi_tail_from(gamma: f64, start: usize, r: f64) -> f64 {
    let denom = start as f64 + gamma;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    r.powi(start as i32) / (denom * (1.0 - r))
}

/// Certified bound on the majorant terms of index `> n_order`, assuming `|a_k| <= 1`.
pub fn tail_bound(kind: OperatorKind, n_order: usize, r: f64) -> Result<f64> {
    kind.validate()?;
    Ok(match kind.normalized() {
        OperatorKind::CesaroBeta(beta) => cesaro_tail_from(beta, n_order + 1, r),
        OperatorKind::CBeta(beta) => r * cesaro_tail_from(beta, n_order, r),
        OperatorKind::Bernardi { gamma, .. } => bernardi_tail_from(gamma, n_order + 1, r),
        OperatorKind::PrimitiveI => r * bernardi_tail_from(1.0, n_order, r),
        OperatorKind::Libera | OperatorKind::Alexander => unreachable!("normalized"),
    })
}

/// Smallest order whose [`tail_bound`] is at most `eps`, capped at [`MAX_TERMS`].
pub fn required_order(kind: OperatorKind, r: f64, eps: f64) -> Result<usize> {
    check_radius(r)?;
    if !(eps > 0.0) {
        return Err(BohrError::domain(format!("eps must be positive, got {eps}")));
    }
    let floor = kind.required_zero_order().max(1);
    let mut hi = floor.max(16);
    loop {
        let tail = tail_bound(kind, hi, r)?;
        if tail <= eps {
            break;
        }
        if hi >= MAX_TERMS {
            return Err(BohrError::TruncationFailure { order: hi, tail, eps });
        }
        hi = (hi * 2).min(MAX_TERMS);
    }
    let mut lo = floor;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(kind, mid, r)? <= eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// Bohr majorant `Σ_n op(|a|)_n r^n` of the operator image.
///
/// Coefficients past `f.order()` are treated as unknown with modulus at most one;
/// fails if their possible contribution exceeds `eps`.
pub fn majorant_value(kind: OperatorKind, f: &CoefficientSequence, r: f64, eps: f64) -> Result<f64> {
    check_radius(r)?;
    if !(eps > 0.0) {
        return Err(BohrError::domain(format!("eps must be positive, got {eps}")));
    }
    let order = f.order();
    let tail = tail_bound(kind, order, r)?;
    if !(tail <= eps) {
        return Err(BohrError::TruncationFailure { order, tail, eps });
    }
    let image = operator_coeffs(kind, &f.abs(), order)?;
    let mut sum = CompensatedSum::new();
    let mut power = 1.0;
    for c in image.entries() {
        sum.add(c.re * power);
        power *= r;
    }
    Ok(sum.value())
}

/// [`majorant_value`] with the truncation order chosen from `eps`.
pub fn majorant_of(kind: OperatorKind, f: &BoundedFunction, r: f64, eps: f64) -> Result<f64> {
    let order = required_order(kind, r, eps)?;
    majorant_value(kind, &taylor_coeffs(f, order)?, r, eps)
}

/// Classical Bohr sum `Σ |a_n| r^n` with the geometric tail `r^(N+1)/(1-r)`.
pub fn bohr_majorant(f: &CoefficientSequence, r: f64, eps: f64) -> Result<f64> {
    check_radius(r)?;
    let order = f.order();
    let tail = r.powi(order as i32 + 1) / (1.0 - r);
    if !(tail <= eps) {
        return Err(BohrError::TruncationFailure { order, tail, eps });
    }
    let mut sum = CompensatedSum::new();
    let mut power = 1.0;
    for c in f.entries() {
        sum.add(c.norm() * power);
        power *= r;
    }
    Ok(sum.value())
}

/// Operator image at `z` from its truncated Taylor series.
///
/// The majorant tail bounds the omitted terms, so the error is at most `eps`.
pub fn series_value(kind: OperatorKind, f: &BoundedFunction, z: Complex64, eps: f64) -> Result<Complex64> {
    let r = z.norm();
    if r >= 1.0 {
        return Err(BohrError::domain(format!("evaluation point |z| = {r} is not inside the disk")));
    }
    let order = if r == 0.0 { kind.required_zero_order().max(1) } else { required_order(kind, r, eps)? };
    let image = operator_coeffs(kind, &taylor_coeffs(f, order)?, order)?;
    Ok(image.horner(z))
}

/// Operator image at `z` by adaptive quadrature of the defining integral.
///
/// For Bernardi with `γ < 1` the weight `t^(γ-1)` is singular at 0; the integral is
/// rewritten with `u = t^(m+γ)` as `(1/(m+γ)) ∫_0^1 f(z t) / t^m du`, whose
/// integrand stays bounded because `f` has an `m`-fold zero.
pub fn quadrature_value(kind: OperatorKind, f: &BoundedFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    kind.validate()?;
    if !(z.norm() < 1.0) {
        return Err(BohrError::domain(format!("evaluation point |z| = {} is not inside the disk", z.norm())));
    }
    let zeros = kind.required_zero_order();
    if zeros > 0 {
        check_leading_zeros(&taylor_coeffs(f, zeros)?, zeros)?;
    }
    let opts = QuadratureOptions::absolute(tol);
    let one = Complex64::new(1.0, 0.0);
    match kind.normalized() {
        OperatorKind::CesaroBeta(beta) => {
            integrate(|t| f.eval_unchecked(z * t) * (one - z * t).powf(-beta), 0.0, 1.0, opts)
        }
        OperatorKind::CBeta(beta) => {
            integrate(|t| f.eval_unchecked(z * t) / t * (one - z * t).powf(-beta), 0.0, 1.0, opts)
        }
        OperatorKind::Bernardi { gamma, m } => {
            if gamma >= 1.0 {
                integrate(|t| f.eval_unchecked(z * t) * t.powf(gamma - 1.0), 0.0, 1.0, opts)
            } else {
                let s = m as f64 + gamma;
                integrate(
                    |u| {
                        let t = u.powf(1.0 / s);
                        if t == 0.0 {
                            return ZERO;
                        }
                        f.eval_unchecked(z * t) / t.powi(m as i32) / s
                    },
                    0.0,
                    1.0,
                    opts,
                )
            }
        }
        OperatorKind::PrimitiveI => integrate(|t| f.eval_unchecked(z * t), 0.0, 1.0, opts).map(|v| v * z),
        OperatorKind::Libera | OperatorKind::Alexander => unreachable!("normalized"),
    }
}

/// Max over `samples` points of `|z| = r` of `|operator image| - sup bound`.
///
/// A value `<= 1e-9` certifies the sampled bound.
pub fn sup_bound_check(kind: OperatorKind, f: &BoundedFunction, r: f64, samples: usize) -> Result<f64> {
    if samples < 8 {
        return Err(BohrError::domain(format!("samples must be >= 8, got {samples}")));
    }
    let bound = kind.sup_bound(r)?;
    let mut worst = f64::NEG_INFINITY;
    for j in 0..samples {
        let z = Complex64::from_polar(r, TAU * j as f64 / samples as f64);
        let v = quadrature_value(kind, f, z, QUADRATURE_TOL)?;
        worst = worst.max(v.norm() - bound);
    }
    Ok(worst)
}

/// `|majorant(C_β, z h) - r majorant(T_β, h)|`, which vanishes since `C_β[z h] = z T_β[h]`.
pub fn cbeta_relation_residual(h: &BoundedFunction, beta: f64, r: f64, eps: f64) -> Result<f64> {
    let g = h.times_z_power(1);
    let lhs = majorant_of(OperatorKind::CBeta(beta), &g, r, eps)?;
    let rhs = r * majorant_of(OperatorKind::CesaroBeta(beta), h, r, eps)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summation::compensated_sum;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cesaro_of_unit_impulse() {
        let f = CoefficientSequence::unit(6);
        let img = operator_coeffs(OperatorKind::CesaroBeta(1.0), &f, 6).unwrap();
        for (n, v) in img.entries().iter().enumerate() {
            assert!((v.re - 1.0 / (n as f64 + 1.0)).abs() < 1e-16);
        }
        let img = operator_coeffs(OperatorKind::CesaroBeta(2.0), &f, 6).unwrap();
        assert!(img.entries().iter().all(|v| (v.re - 1.0).abs() < 1e-15));
    }

    #[test]
    fn libera_of_ones() {
        let f = CoefficientSequence::from_real(&[1.0; 5]).unwrap();
        let img = operator_coeffs(OperatorKind::Bernardi { gamma: 1.0, m: 0 }, &f, 4).unwrap();
        let expect: Vec<_> = (0..5).map(|n| c(1.0 / (n as f64 + 1.0))).collect();
        assert_eq!(img.entries(), expect.as_slice());
        assert_eq!(operator_coeffs(OperatorKind::Libera, &f, 4).unwrap(), img);
    }

    #[test]
    fn primitive_is_shifted_libera() {
        let f = CoefficientSequence::from_real(&[0.5, -0.25, 0.125, 0.3]).unwrap();
        let lib = operator_coeffs(OperatorKind::Libera, &f, 3).unwrap();
        let prim = operator_coeffs(OperatorKind::PrimitiveI, &f, 3).unwrap();
        assert_eq!(prim, lib.shift_up(1));
    }

    #[test]
    fn parameter_and_precondition_errors() {
        let f = CoefficientSequence::from_real(&[0.5, 0.5, 0.0]).unwrap();
        assert!(matches!(operator_coeffs(OperatorKind::CesaroBeta(0.0), &f, 2), Err(BohrError::ParameterDomain(_))));
        assert!(matches!(
            operator_coeffs(OperatorKind::Bernardi { gamma: -1.0, m: 1 }, &f, 2),
            Err(BohrError::ParameterDomain(_))
        ));
        assert!(matches!(
            operator_coeffs(OperatorKind::Bernardi { gamma: 1.0, m: 1 }, &f, 2),
            Err(BohrError::Precondition(_))
        ));
        assert!(matches!(operator_coeffs(OperatorKind::CBeta(1.0), &f, 2), Err(BohrError::Precondition(_))));
        assert!(matches!(operator_coeffs(OperatorKind::Libera, &f, 5), Err(BohrError::Truncation { .. })));
    }

    #[test]
    fn majorant_closed_forms() {
        let one = BoundedFunction::Constant(c(1.0));
        let v = majorant_of(OperatorKind::CesaroBeta(1.0), &one, 0.5, 1e-13).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-12);
        for &r in &[0.1, 0.5, 0.9] {
            let v = majorant_of(OperatorKind::Bernardi { gamma: 1.0, m: 0 }, &one, r, 1e-12).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn majorant_of_extremal_against_brute_force() {
        // Brute force: 10^5 terms of (1/(n+1)) Σ_k |a_k| r^n with |a_0| = 0.5, |a_k| = 0.75 * 0.5^(k-1).
        let (a, r) = (0.5f64, 0.5f64);
        let n_terms = 100_000usize;
        let mut inner = a;
        let mut ak = 1.0 - a * a;
        let mut rn = 1.0;
        let brute = compensated_sum((0..n_terms).map(|n| {
            if n > 0 {
                inner += ak;
                ak *= a;
            }
            let term = inner / (n as f64 + 1.0) * rn;
            rn *= r;
            term
        }));
        let v = majorant_of(OperatorKind::CesaroBeta(1.0), &BoundedFunction::ExtremalPhi(a), r, 1e-13).unwrap();
        assert!((v - brute).abs() < 1e-10, "{v} vs {brute}");
    }

    #[test]
    fn majorant_reports_insufficient_order() {
        let f = CoefficientSequence::unit(3);
        let err = majorant_value(OperatorKind::CesaroBeta(1.0), &f, 0.5, 1e-12);
        assert!(matches!(err, Err(BohrError::TruncationFailure { .. })));
        assert!(majorant_value(OperatorKind::CesaroBeta(1.0), &f, 1.0, 1e-12).is_err());
    }

    #[test]
    fn tail_bound_dominates_actual_tail() {
        let r = 0.7;
        for &beta in &[0.3, 1.0, 2.5] {
            let kind = OperatorKind::CesaroBeta(beta);
            let full = majorant_of(kind, &BoundedFunction::Constant(c(1.0)), r, 1e-15).unwrap();
            for n in [5usize, 20, 60] {
                let partial = majorant_value(kind, &CoefficientSequence::from_real(&vec![1.0; n + 1]).unwrap(), r, 1e3);
                let gap = full - partial.unwrap();
                assert!(gap <= tail_bound(kind, n, r).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn required_order_is_minimal() {
        let kind = OperatorKind::CesaroBeta(2.0);
        let n = required_order(kind, 0.5, 1e-12).unwrap();
        assert!(tail_bound(kind, n, 0.5).unwrap() <= 1e-12);
        assert!(tail_bound(kind, n - 1, 0.5).unwrap() > 1e-12);
    }

    #[test]
    fn quadrature_examples() {
        let one = BoundedFunction::Constant(c(1.0));
        let v = quadrature_value(OperatorKind::CesaroBeta(1.0), &one, c(0.5), 1e-12).unwrap();
        assert!((v - c(2.0 * 2f64.ln())).norm() < 1e-12);
        let v = quadrature_value(OperatorKind::Bernardi { gamma: 1.0, m: 0 }, &one, Complex64::new(0.1, 0.4), 1e-12).unwrap();
        assert!((v - c(1.0)).norm() < 1e-12);
        let v = quadrature_value(OperatorKind::CesaroBeta(2.0), &one, c(0.5), 1e-12).unwrap();
        assert!((v - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn quadrature_singular_bernardi() {
        // L_γ[1] = 1/γ for 0 < γ < 1.
        let one = BoundedFunction::Constant(c(1.0));
        let v = quadrature_value(OperatorKind::Bernardi { gamma: 0.3, m: 0 }, &one, Complex64::new(0.2, -0.3), 1e-12).unwrap();
        assert!((v - c(1.0 / 0.3)).norm() < 1e-10);
        // Alexander of z: ∫ zt / t dt = z.
        let z = Complex64::new(0.3, 0.2);
        let id = BoundedFunction::Polynomial(vec![c(0.0), c(1.0)]);
        let v = quadrature_value(OperatorKind::Alexander, &id, z, 1e-12).unwrap();
        assert!((v - z).norm() < 1e-12);
        assert!(quadrature_value(OperatorKind::Alexander, &one, z, 1e-12).is_err());
    }

    #[test]
    fn sup_bound_equality_case() {
        let one = BoundedFunction::Constant(c(1.0));
        let gap = sup_bound_check(OperatorKind::CesaroBeta(1.0), &one, 0.5, 16).unwrap();
        assert!(gap.abs() < 1e-10, "{gap}");
        let psi = BoundedFunction::ExtremalPsi { a: 0.9, m: 1 };
        assert!(sup_bound_check(OperatorKind::CBeta(1.0), &psi, 0.5, 32).unwrap() <= 1e-9);
        assert!(sup_bound_check(OperatorKind::CBeta(1.0), &psi, 0.5, 4).is_err());
    }

    #[test]
    fn cbeta_relation_examples() {
        let one = BoundedFunction::Constant(c(1.0));
        assert!(cbeta_relation_residual(&one, 1.0, 0.5, 1e-12).unwrap() <= 2e-12);
        let v = majorant_of(OperatorKind::CBeta(1.0), &one.times_z_power(1), 0.5, 1e-13).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
        let phi = BoundedFunction::ExtremalPhi(0.5);
        assert!(cbeta_relation_residual(&phi, 0.5, 0.3, 1e-12).unwrap() <= 2e-12);
        let zero = BoundedFunction::Constant(c(0.0));
        assert_eq!(cbeta_relation_residual(&zero, 0.7, 0.4, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn sup_bounds() {
        assert_eq!(OperatorKind::Libera.sup_bound(0.3).unwrap(), 1.0);
        assert_eq!(OperatorKind::Alexander.sup_bound(0.3).unwrap(), 0.3);
        assert_eq!(OperatorKind::PrimitiveI.sup_bound(0.3).unwrap(), 0.3);
        assert!((OperatorKind::CBeta(1.0).sup_bound(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
    }
}
