//! Truncated power series and the binomial weights of `(1 - x)^(-beta)`.

use num_complex::Complex64;

use crate::error::{BohrError, Result};
use crate::summation::CompensatedSum;

/// Taylor coefficients `a_0..=a_N` of a function analytic on the unit disk.
///
/// Coefficients past the order are unknown, not zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    entries: Vec<Complex64>,
}

impl CoefficientSequence {
    /// Builds a sequence from `entries`. Fails on empty input or non-finite entries.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(BohrError::domain("coefficient sequence needs at least one entry"));
        }
        if let Some(i) = entries.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(BohrError::domain(format!("coefficient {i} is not finite")));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// All-zero sequence of the given order.
    pub fn zeros(order: usize) -> Self {
        Self { entries: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    /// `[1, 0, 0, ...]`, the multiplicative identity.
    pub fn unit(order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.entries[0] = Complex64::new(1.0, 0.0);
        s
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn get(&self, n: usize) -> Option<Complex64> {
        self.entries.get(n).copied()
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        self.require_order(order)?;
        Ok(Self { entries: self.entries[..=order].to_vec() })
    }

    /// Coefficients of `z^shift * f(z)`, keeping the order fixed.
    pub fn shift_up(&self, shift: usize) -> Self {
        let n = self.entries.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, c) in self.entries.iter().enumerate().take(n.saturating_sub(shift)) {
            out[i + shift] = *c;
        }
        Self { entries: out }
    }

    /// Entry-wise modulus as a real-valued sequence.
    pub fn abs(&self) -> Self {
        Self { entries: self.entries.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect() }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn horner(&self, z: Complex64) -> Complex64 {
        self.entries.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub(crate) fn require_order(&self, needed: usize) -> Result<()> {
        if self.order() < needed {
            return Err(BohrError::Truncation { needed, available: self.order() });
        }
        Ok(())
    }
}

/// Taylor coefficients `c_n(beta) = Γ(n+β) / (Γ(n+1) Γ(β))` of `(1 - x)^(-beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialWeights {
    beta: f64,
    weights: Vec<f64>,
}

impl BinomialWeights {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.weights[n]
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(BohrError::domain(format!("beta must be positive and finite, got {beta}")));
    }
    Ok(())
}

/// Computes `c_0..=c_{n_max}` by the recurrence `c_n = c_{n-1} (n - 1 + β) / n`.
///
/// No Gamma function is evaluated, so large orders do not overflow.
pub fn binomial_coeffs(beta: f64, n_max: usize) -> Result<BinomialWeights> {
    check_beta(beta)?;
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut c = 1.0;
    weights.push(c);
    for n in 1..=n_max {
        let n = n as f64;
        c *= (n - 1.0 + beta) / n;
        weights.push(c);
    }
    Ok(BinomialWeights { beta, weights })
}

/// `result[n] = Σ_{k<=n} u[k] v[n-k]` for `n <= n_max`.
pub fn cauchy_product(
    u: &CoefficientSequence,
    v: &CoefficientSequence,
    n_max: usize,
) -> Result<CoefficientSequence> {
    u.require_order(n_max)?;
    v.require_order(n_max)?;
    let (u, v) = (u.entries(), v.entries());
    let out = (0..=n_max)
        .map(|n| (0..=n).map(|k| u[k] * v[n - k]).sum())
        .collect();
    Ok(CoefficientSequence::from_vec_unchecked(out))
}

/// Coefficients `alpha^n` of `1 / (1 - alpha z)`.
pub fn geometric_coeffs(alpha: Complex64, n_max: usize) -> Result<CoefficientSequence> {
    if !(alpha.norm() < 1.0) {
        return Err(BohrError::domain(format!("|alpha| must be < 1, got {}", alpha.norm())));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n_max {
        out.push(p);
        p *= alpha;
    }
    Ok(CoefficientSequence::from_vec_unchecked(out))
}

/// Largest relative gap between the running sums of `c_k(beta)` and `c_n(beta + 1)`.
pub fn cumulative_identity_residual(beta: f64, n_max: usize) -> Result<f64> {
    let lower = binomial_coeffs(beta, n_max)?;
    let upper = binomial_coeffs(beta + 1.0, n_max)?;
    Ok(identity_residual_of(lower.weights(), upper.weights()))
}

/// Same check as [`cumulative_identity_residual`] on caller-supplied weight tables
/// for `beta` (`lower`) and `beta + 1` (`upper`).
pub fn identity_residual_of(lower: &[f64], upper: &[f64]) -> f64 {
    let mut running = CompensatedSum::new();
    let mut worst: f64 = 0.0;
    for (c, target) in lower.iter().zip(upper) {
        running.add(*c);
        let rel = (running.value() - target).abs() / target.abs();
        worst = worst.max(rel);
    }
    worst
}
