//! Concrete members of the Schur class: constants, polynomials, finite Blaschke
//! products and the extremal disk automorphisms `φ_a(z) = (z - a) / (1 - a z)`,
//! `ψ_a(z) = z^m φ_a(z)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BohrError, Result};
use crate::series::{cauchy_product, CoefficientSequence};

/// Blaschke zeros must stay strictly inside this radius so coefficients decay fast.
pub const BLASCHKE_RADIUS_CAP: f64 = 0.95;

/// Radius of the circle sampled by [`validate_membership`].
pub const MEMBERSHIP_RADIUS: f64 = 1.0 - 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A function analytic on the unit disk with `|f| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundedFunction {
    Constant(Complex64),
    Polynomial(Vec<Complex64>),
    /// `factor * Π (z - α_j) / (1 - conj(α_j) z)`; `|factor| <= 1`.
    Blaschke { zeros: Vec<Complex64>, factor: Complex64 },
    /// `φ_a` for `0 <= a < 1`.
    ExtremalPhi(f64),
    /// `z^m φ_a` for `0 <= a < 1`.
    ExtremalPsi { a: f64, m: usize },
}

fn check_extremal_parameter(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(BohrError::domain(format!("extremal parameter a must lie in [0, 1], got {a}")));
    }
    Ok(())
}

impl BoundedFunction {
    pub fn constant(c: Complex64) -> Result<Self> {
        if !(c.norm() <= 1.0) {
            return Err(BohrError::domain(format!("constant modulus {} exceeds 1", c.norm())));
        }
        Ok(Self::Constant(c))
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        CoefficientSequence::new(coeffs.clone())?;
        Ok(Self::Polynomial(coeffs))
    }

    pub fn blaschke(zeros: Vec<Complex64>, factor: Complex64) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(BohrError::domain(format!("Blaschke zero {z} is not inside the disk")));
        }
        if !(factor.norm() <= 1.0 + 1e-12) {
            return Err(BohrError::domain(format!("Blaschke factor modulus {} exceeds 1", factor.norm())));
        }
        Ok(Self::Blaschke { zeros, factor })
    }

    /// `φ_a`. At `a = 1` the automorphism degenerates to the constant `-1`.
    pub fn extremal_phi(a: f64) -> Result<Self> {
        check_extremal_parameter(a)?;
        if a == 1.0 {
            return Ok(Self::Constant(-ONE));
        }
        Ok(Self::ExtremalPhi(a))
    }

    /// `ψ_a = z^m φ_a`; at `a = 1` this is `-z^m`.
    pub fn extremal_psi(a: f64, m: usize) -> Result<Self> {
        check_extremal_parameter(a)?;
        if a == 1.0 {
            let mut c = vec![ZERO; m + 1];
            c[m] = -ONE;
            return Ok(Self::Polynomial(c));
        }
        Ok(Self::ExtremalPsi { a, m })
    }

    /// `z^m f(z)`, staying inside the same structural family where possible.
    pub fn times_z_power(&self, m: usize) -> Self {
        if m == 0 {
            return self.clone();
        }
        match self {
            Self::Constant(c) => {
                let mut v = vec![ZERO; m + 1];
                v[m] = *c;
                Self::Polynomial(v)
            }
            Self::Polynomial(p) => {
                let mut v = vec![ZERO; m];
                v.extend_from_slice(p);
                Self::Polynomial(v)
            }
            Self::Blaschke { zeros, factor } => {
                let mut z = vec![ZERO; m];
                z.extend_from_slice(zeros);
                Self::Blaschke { zeros: z, factor: *factor }
            }
            Self::ExtremalPhi(a) => Self::ExtremalPsi { a: *a, m },
            Self::ExtremalPsi { a, m: k } => Self::ExtremalPsi { a: *a, m: k + m },
        }
    }

    /// Short name of the structural kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::Polynomial(_) => "polynomial",
            Self::Blaschke { .. } => "blaschke",
            Self::ExtremalPhi(_) => "extremal_phi",
            Self::ExtremalPsi { .. } => "extremal_psi",
        }
    }

    /// Point evaluation at `|z| < 1`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(BohrError::domain(format!("evaluation point |z| = {} is not inside the disk", z.norm())));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Evaluation without the disk check; used on the sampling circle and by quadrature.
    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Constant(c) => *c,
            Self::Polynomial(p) => p.iter().rev().fold(ZERO, |acc, c| acc * z + c),
            Self::Blaschke { zeros, factor } => zeros
                .iter()
                .fold(*factor, |acc, alpha| acc * (z - alpha) / (ONE - alpha.conj() * z)),
            Self::ExtremalPhi(a) => (z - a) / (ONE - a * z),
            Self::ExtremalPsi { a, m } => z.powu(*m as u32) * (z - a) / (ONE - a * z),
        }
    }

    /// Number of guaranteed leading zero Taylor coefficients.
    pub fn structural_zero_order(&self) -> usize {
        match self {
            Self::Constant(c) => {
                if *c == ZERO {
                    usize::MAX
                } else {
                    0
                }
            }
            Self::Polynomial(p) => p.iter().position(|c| *c != ZERO).unwrap_or(usize::MAX),
            Self::Blaschke { zeros, factor } => {
                if *factor == ZERO {
                    usize::MAX
                } else {
                    zeros.iter().filter(|z| **z == ZERO).count()
                }
            }
            Self::ExtremalPhi(a) => usize::from(*a == 0.0),
            Self::ExtremalPsi { a, m } => m + usize::from(*a == 0.0),
        }
    }
}

/// Taylor coefficients of `φ_a`: `-a`, then `(1 - a²) a^(n-1)`.
fn phi_coeffs(a: f64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(Complex64::new(-a, 0.0));
    let scale = 1.0 - a * a;
    out.extend((1..=n_max).map(|n| Complex64::new(scale * a.powi(n as i32 - 1), 0.0)));
    out
}

/// Coefficients of one Blaschke factor `(z - α) / (1 - conj(α) z)`:
/// `-α`, then `conj(α)^(n-1) (1 - |α|²)`.
fn blaschke_factor_coeffs(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(-alpha);
    let mut p = Complex64::new(1.0 - alpha.norm_sqr(), 0.0);
    let ac = alpha.conj();
    for _ in 1..=n_max {
        out.push(p);
        p *= ac;
    }
    out
}

/// First `n_max + 1` Taylor coefficients of `f` at the origin.
pub fn taylor_coeffs(f: &BoundedFunction, n_max: usize) -> Result<CoefficientSequence> {
    let entries = match f {
        BoundedFunction::Constant(c) => {
            let mut v = vec![ZERO; n_max + 1];
            v[0] = *c;
            v
        }
        BoundedFunction::Polynomial(p) => {
            let mut v = vec![ZERO; n_max + 1];
            for (dst, src) in v.iter_mut().zip(p) {
                *dst = *src;
            }
            v
        }
        BoundedFunction::Blaschke { zeros, factor } => {
            if let Some(z) = zeros.iter().find(|z| z.norm() >= BLASCHKE_RADIUS_CAP) {
                return Err(BohrError::domain(format!(
                    "Blaschke zero modulus {} exceeds the cap {BLASCHKE_RADIUS_CAP}",
                    z.norm()
                )));
            }
            let mut acc = CoefficientSequence::unit(n_max);
            for alpha in zeros {
                let factor_seq = CoefficientSequence::from_vec_unchecked(blaschke_factor_coeffs(*alpha, n_max));
                acc = cauchy_product(&acc, &factor_seq, n_max)?;
            }
            acc.into_entries().into_iter().map(|c| c * factor).collect()
        }
        BoundedFunction::ExtremalPhi(a) => phi_coeffs(*a, n_max),
        BoundedFunction::ExtremalPsi { a, m } => {
            let mut v = vec![ZERO; n_max + 1];
            if *m <= n_max {
                for (dst, src) in v[*m..].iter_mut().zip(phi_coeffs(*a, n_max - m)) {
                    *dst = src;
                }
            }
            v
        }
    };
    Ok(CoefficientSequence::from_vec_unchecked(entries))
}

/// Order `N` with `r^(N+1) / (1 - r) <= eps`.
///
/// Every coefficient of a Schur function has modulus at most one, so the tail of
/// its Taylor series on `|z| = r` is dominated by the geometric series.
pub fn geometric_tail_order(r: f64, eps: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&r) || !(eps > 0.0) {
        return Err(BohrError::domain(format!("need 0 <= r < 1 and eps > 0, got r={r}, eps={eps}")));
    }
    if r == 0.0 {
        return Ok(0);
    }
    let n = ((eps * (1.0 - r)).ln() / r.ln()).ceil() - 1.0;
    Ok(n.max(0.0) as usize)
}

/// Max of `|f|` over `grid_size` equispaced points on `|z| = 1 - 1e-6`.
pub fn validate_membership(f: &BoundedFunction, grid_size: usize) -> Result<f64> {
    if grid_size < 16 {
        return Err(BohrError::domain(format!("grid_size must be >= 16, got {grid_size}")));
    }
    Ok((0..grid_size)
        .map(|j| {
            let z = Complex64::from_polar(MEMBERSHIP_RADIUS, TAU * j as f64 / grid_size as f64);
            f.eval_unchecked(z).norm()
        })
        .fold(0.0, f64::max))
}

fn uniform_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, TAU * rng.random::<f64>())
}

/// Deterministic random member of the Schur class.
///
/// Kind weights: 1/4 constant (uniform in the closed disk), 3/8 Blaschke product
/// with `0..=max_factors` zeros uniform in `|z| < radius_cap` times a uniform
/// rotation, 3/8 the same product times a constant uniform in the disk.
pub fn random_schur(seed: u64, max_factors: usize, radius_cap: f64) -> Result<BoundedFunction> {
    if !(radius_cap > 0.0 && radius_cap <= BLASCHKE_RADIUS_CAP) {
        return Err(BohrError::domain(format!(
            "radius_cap must lie in (0, {BLASCHKE_RADIUS_CAP}], got {radius_cap}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick: f64 = rng.random();
    if pick < 0.25 {
        return Ok(BoundedFunction::Constant(uniform_disk(&mut rng, 1.0)));
    }
    let count = rng.random_range(0..=max_factors);
    let zeros: Vec<Complex64> = (0..count).map(|_| uniform_disk(&mut rng, radius_cap)).collect();
    let mut factor = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
    if pick >= 0.625 {
        factor *= uniform_disk(&mut rng, 1.0);
    }
    Ok(BoundedFunction::Blaschke { zeros, factor })
}

/// Coefficients of `h` where `g(z) = z^m h(z)`.
pub fn schwarz_factor(g: &BoundedFunction, m: usize, n_max: usize) -> Result<CoefficientSequence> {
    let coeffs = taylor_coeffs(g, n_max + m)?;
    if let Some((k, c)) = coeffs.entries()[..m].iter().enumerate().find(|(_, c)| c.norm() > 1e-12) {
        return Err(BohrError::Precondition(format!(
            "coefficient {k} = {c} is nonzero; function has no zero of order {m} at the origin"
        )));
    }
    Ok(CoefficientSequence::from_vec_unchecked(coeffs.entries()[m..].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_entries(s: &CoefficientSequence) -> Vec<f64> {
        s.entries().iter().map(|c| c.re).collect()
    }

    #[test]
    fn extremal_phi_coefficients() {
        let s = taylor_coeffs(&BoundedFunction::extremal_phi(0.0).unwrap(), 2).unwrap();
        assert_eq!(real_entries(&s), vec![0.0, 1.0, 0.0]);
        let s = taylor_coeffs(&BoundedFunction::extremal_phi(0.5).unwrap(), 3).unwrap();
        assert_eq!(real_entries(&s), vec![-0.5, 0.75, 0.375, 0.1875]);
    }

    #[test]
    fn extremal_phi_coefficient_law_is_exact() {
        for &a in &[0.1, 0.37, 0.9, 0.999] {
            let s = taylor_coeffs(&BoundedFunction::ExtremalPhi(a), 60).unwrap();
            assert_eq!(s.get(0).unwrap().re, -a);
            for n in 1..=60 {
                let expected = (1.0 - a * a) * a.powi(n as i32 - 1);
                assert_eq!(s.get(n).unwrap().re, expected);
            }
        }
    }

    #[test]
    fn extremal_psi_coefficients() {
        let s = taylor_coeffs(&BoundedFunction::extremal_psi(0.5, 2).unwrap(), 3).unwrap();
        assert_eq!(real_entries(&s), vec![0.0, 0.0, -0.5, 0.75]);
        let s = taylor_coeffs(&BoundedFunction::extremal_psi(0.5, 5).unwrap(), 3).unwrap();
        assert_eq!(real_entries(&s), vec![0.0; 4]);
    }

    #[test]
    fn degenerate_extremals() {
        assert_eq!(BoundedFunction::extremal_phi(1.0).unwrap(), BoundedFunction::Constant(c(-1.0, 0.0)));
        let psi = BoundedFunction::extremal_psi(1.0, 2).unwrap();
        assert_eq!(real_entries(&taylor_coeffs(&psi, 3).unwrap()), vec![0.0, 0.0, -1.0, 0.0]);
        assert!(BoundedFunction::extremal_phi(1.5).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let phi = BoundedFunction::ExtremalPhi(0.5);
        assert_eq!(phi.evaluate(c(0.0, 0.0)).unwrap(), c(-0.5, 0.0));
        assert_eq!(phi.evaluate(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        let one = BoundedFunction::Constant(c(1.0, 0.0));
        assert_eq!(one.evaluate(c(0.3, -0.4)).unwrap(), c(1.0, 0.0));
        assert!(one.evaluate(c(1.0, 0.0)).is_err());
        assert!(one.evaluate(c(0.6, 0.8)).is_err());
    }

    #[test]
    fn blaschke_cap_enforced() {
        let f = BoundedFunction::blaschke(vec![c(0.96, 0.0)], c(1.0, 0.0)).unwrap();
        assert!(matches!(taylor_coeffs(&f, 4), Err(BohrError::ParameterDomain(_))));
        assert!(BoundedFunction::blaschke(vec![c(1.0, 0.0)], c(1.0, 0.0)).is_err());
    }

    #[test]
    fn blaschke_single_zero_matches_phi() {
        let f = BoundedFunction::blaschke(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let s = taylor_coeffs(&f, 5).unwrap();
        let t = taylor_coeffs(&BoundedFunction::ExtremalPhi(0.5), 5).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn membership_examples() {
        let b = BoundedFunction::blaschke(vec![c(0.3, 0.2)], c(0.0, 1.0)).unwrap();
        let sup = validate_membership(&b, 512).unwrap();
        assert!((sup - 1.0).abs() <= 1e-6);
        // Each factor loses about 1e-6 (1+|α|)/(1-|α|) in modulus near the circle.
        let b = BoundedFunction::blaschke(vec![c(0.3, 0.2), c(-0.5, 0.1)], c(0.0, 1.0)).unwrap();
        let sup = validate_membership(&b, 512).unwrap();
        assert!((1.0 - 1e-5..=1.0).contains(&sup));
        let k = BoundedFunction::Constant(c(0.3, 0.0));
        assert!((validate_membership(&k, 64).unwrap() - 0.3).abs() < 1e-15);
        let p = BoundedFunction::polynomial(vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        // Direct grid sup: |0.5 + 0.5 z| on |z| = 1 - 1e-6 peaks at z = 1 - 1e-6.
        let direct = (0..64)
            .map(|j| (c(0.5, 0.0) + 0.5 * Complex64::from_polar(1.0 - 1e-6, TAU * j as f64 / 64.0)).norm())
            .fold(0.0, f64::max);
        assert_eq!(validate_membership(&p, 64).unwrap(), direct);
        assert!(direct <= 1.0);
        assert!(validate_membership(&p, 8).is_err());
    }

    #[test]
    fn random_schur_is_deterministic_and_bounded() {
        for seed in 0..200u64 {
            let f = random_schur(seed, 6, 0.9).unwrap();
            assert_eq!(f, random_schur(seed, 6, 0.9).unwrap());
            assert!(validate_membership(&f, 4096).unwrap() <= 1.0 + 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn random_schur_without_factors() {
        for seed in 0..50u64 {
            match random_schur(seed, 0, 0.9).unwrap() {
                BoundedFunction::Constant(_) => {}
                BoundedFunction::Blaschke { zeros, .. } => assert!(zeros.is_empty()),
                other => panic!("unexpected kind {other:?}"),
            }
        }
        assert!(random_schur(1, 3, 0.0).is_err());
        assert!(random_schur(1, 3, 0.99).is_err());
    }

    #[test]
    fn random_schur_mixes_kinds() {
        let constants = (0..4000u64)
            .filter(|s| matches!(random_schur(*s, 4, 0.9).unwrap(), BoundedFunction::Constant(_)))
            .count();
        assert!((800..1200).contains(&constants), "constant share {constants}/4000");
    }

    #[test]
    fn schwarz_factor_examples() {
        let h = schwarz_factor(&BoundedFunction::ExtremalPsi { a: 0.3, m: 1 }, 1, 6).unwrap();
        assert_eq!(h, taylor_coeffs(&BoundedFunction::ExtremalPhi(0.3), 6).unwrap());

        let z2 = BoundedFunction::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(real_entries(&schwarz_factor(&z2, 2, 2).unwrap()), vec![1.0, 0.0, 0.0]);

        let zphi = BoundedFunction::ExtremalPhi(0.5).times_z_power(1);
        assert_eq!(real_entries(&schwarz_factor(&zphi, 1, 2).unwrap()), vec![-0.5, 0.75, 0.375]);

        let err = schwarz_factor(&BoundedFunction::ExtremalPhi(0.5), 1, 2);
        assert!(matches!(err, Err(BohrError::Precondition(_))));
    }

    #[test]
    fn coefficients_match_evaluation() {
        let r = 0.5;
        let n = geometric_tail_order(r, 1e-13).unwrap();
        for seed in 0..100u64 {
            let f = random_schur(seed, 5, 0.9).unwrap();
            let s = taylor_coeffs(&f, n).unwrap();
            for j in 0..8 {
                let z = Complex64::from_polar(r, TAU * j as f64 / 8.0);
                assert!((s.horner(z) - f.evaluate(z).unwrap()).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn tail_order_rule() {
        let n = geometric_tail_order(0.5, 1e-12).unwrap();
        assert!(0.5f64.powi(n as i32 + 1) / 0.5 <= 1e-12);
        assert!(0.5f64.powi(n as i32) / 0.5 > 1e-12);
        assert_eq!(geometric_tail_order(0.0, 1e-12).unwrap(), 0);
    }

    #[test]
    fn times_z_power_families() {
        let z = c(0.3, 0.1);
        let fs = [
            BoundedFunction::Constant(c(0.2, 0.4)),
            BoundedFunction::Polynomial(vec![c(0.5, 0.0), c(0.0, 0.5)]),
            BoundedFunction::Blaschke { zeros: vec![c(0.1, 0.2)], factor: c(0.0, 1.0) },
            BoundedFunction::ExtremalPhi(0.4),
            BoundedFunction::ExtremalPsi { a: 0.4, m: 1 },
        ];
        for f in &fs {
            let g = f.times_z_power(2);
            assert!((g.evaluate(z).unwrap() - z * z * f.evaluate(z).unwrap()).norm() < 1e-15);
            assert!(g.structural_zero_order() >= 2);
        }
    }
}
