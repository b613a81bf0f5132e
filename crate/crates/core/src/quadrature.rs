//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands on
//! a finite interval.

use num_complex::Complex64;

use crate::error::{BohrError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Accuracy targets for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl QuadratureOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, max_panels: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Integral of `f` over `[a, b]`, bisecting the panel with the largest error until
/// the summed error estimate meets the tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(BohrError::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut panels = vec![kronrod_panel(&f, a, b)];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(BohrError::QuadratureNonConvergence { estimate: f64::INFINITY, panels: panels.len() });
        }
        if error <= target {
            return Ok(value);
        }
        if panels.len() >= opts.max_panels {
            return Err(BohrError::QuadratureNonConvergence { estimate: error, panels: panels.len() });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            return Err(BohrError::QuadratureNonConvergence { estimate: error, panels: panels.len() + 1 });
        }
        panels.push(kronrod_panel(&f, a, mid));
        panels.push(kronrod_panel(&f, mid, b));
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|t| Complex64::new(f(t), 0.0), a, b, opts).map(|v| v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate_real(|x| x.powi(10) - 3.0 * x, 0.0, 2.0, QuadratureOptions::absolute(1e-14)).unwrap();
        assert!((v - (2f64.powi(11) / 11.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn log_antiderivative() {
        // ∫_0^1 dt / (1 - t/2) = 2 ln 2
        let v = integrate_real(|t| 1.0 / (1.0 - 0.5 * t), 0.0, 1.0, QuadratureOptions::absolute(1e-14)).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 t^(-1/2) dt = 2
        let v = integrate_real(|t| t.powf(-0.5), 0.0, 1.0, QuadratureOptions::absolute(1e-9)).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^1 e^{i π t} dt = 2i / π
        let v = integrate(
            |t| Complex64::from_polar(1.0, std::f64::consts::PI * t),
            0.0,
            1.0,
            QuadratureOptions::absolute(1e-14),
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0 / std::f64::consts::PI)).norm() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 0.0, max_panels: 3 };
        let err = integrate_real(|t| t.powf(-0.9), 0.0, 1.0, opts);
        assert!(matches!(err, Err(BohrError::QuadratureNonConvergence { .. })));
    }
}
