//! Pointwise evaluation of the hyperbolic fractional kernel `𝒦ₛ(ρ)`.

use super::terms::BesselTermSum;
use crate::error::{domain, Error, Result};
use crate::specfun::{integrate_semi_infinite_with, ln_gamma, ln_sinh, QuadOptions, Substitution};
use std::f64::consts::{LN_2, PI};

/// Values below this are reported as zero with the underflow flag set.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// A kernel value together with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub ln_value: f64,
    pub underflow: bool,
}

impl KernelValue {
    fn from_ln(ln_value: f64) -> Self {
        let underflow = ln_value < UNDERFLOW_THRESHOLD.ln();
        Self {
            value: if underflow { 0.0 } else { ln_value.exp() },
            ln_value,
            underflow,
        }
    }
}

fn check_params(dim: usize, s: f64) -> Result<()> {
    if dim < 2 {
        return Err(domain(format!("dimension must be at least 2, got {dim}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(format!(
            "fractional order must lie in (0, 1), got {s}"
        )));
    }
    Ok(())
}

/// Bessel order `ν = (1+2s)/2` and argument scale `a = (N−1)/2`.
pub fn bessel_parameters(dim: usize, s: f64) -> (f64, f64) {
    ((1.0 + 2.0 * s) / 2.0, (dim as f64 - 1.0) / 2.0)
}

/// `ln C(N, s)`, evaluated factor by factor as displayed (the two
/// `Γ((N+2s)/2)` factors are kept even though they cancel).
pub fn ln_normalizing_constant(dim: usize, s: f64) -> Result<f64> {
    check_params(dim, s)?;
    let n = dim as f64;
    let g = ln_gamma((n + 2.0 * s) / 2.0);
    // |Γ(−s)| = Γ(1−s)/s on (0, 1)
    let ln_abs_gamma_neg_s = ln_gamma(1.0 - s) - s.ln();
    let first = 0.5 * PI.ln() + 2.0 * s * LN_2 + g
        - (LN_2 + ln_gamma(1.5) + 0.5 * n * PI.ln() + ln_abs_gamma_neg_s);
    let second = -(0.5 * (n - 2.0 + 2.0 * s) * LN_2 + g);
    let third = 0.5 * (1.0 + 2.0 * s) * ((n - 1.0) / 2.0).ln();
    Ok(first + second + third)
}

/// The normalizing constant `C(N, s)`.
pub fn normalizing_constant(dim: usize, s: f64) -> Result<f64> {
    Ok(ln_normalizing_constant(dim, s)?.exp())
}

/// Coefficient `κ` of the near-field law `𝒦ₛ(ρ) ~ κ ρ^{−N−2s}` as `ρ → 0`.
pub fn near_field_coefficient(dim: usize, s: f64) -> Result<f64> {
    let (nu, a) = bessel_parameters(dim, s);
    let n = dim as f64;
    let ln = ln_normalizing_constant(dim, s)?
        + 0.5 * (n - 3.0) * LN_2
        + nu * (2.0 / a).ln()
        + ln_gamma((n + 2.0 * s) / 2.0);
    Ok(ln.exp())
}

/// Reusable evaluator for one `(N, s)` pair.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    dim: usize,
    s: f64,
    ln_c: f64,
    terms: BesselTermSum,
    rel_tol: f64,
}

impl KernelEvaluator {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        check_params(dim, s)?;
        let (nu, a) = bessel_parameters(dim, s);
        let applications = if dim % 2 == 1 { (dim - 1) / 2 } else { dim / 2 };
        let terms = BesselTermSum::base(nu, a)?.apply_operator_n(applications);
        Ok(Self {
            dim,
            s,
            ln_c: ln_normalizing_constant(dim, s)?,
            terms,
            rel_tol: 1e-12,
        })
    }

    /// Relative tolerance of the even-dimension quadrature.
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// The term sum applied to the Bessel base expression.
    pub fn terms(&self) -> &BesselTermSum {
        &self.terms
    }

    /// `ln 𝒦ₛ(ρ)`.
    pub fn ln_value(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(domain(format!("kernel requires ρ > 0, got {rho}")));
        }
        if self.dim % 2 == 1 {
            Ok(self.ln_c + self.terms.ln_value(rho)?)
        } else {
            self.ln_even(rho)
        }
    }

    pub fn eval(&self, rho: f64) -> Result<KernelValue> {
        Ok(KernelValue::from_ln(self.ln_value(rho)?))
    }

    /// Even dimensions: with `sinh(r/2) = sinh(ρ/2)·√(1+v²)` the Abel-type
    /// integral becomes `(2C/√π)·√2·sinh(ρ/2)·∫₀^∞ F(r(v)) dv`, a smooth
    /// integrand (this is `u² = cosh r − cosh ρ` rescaled by `√2 sinh(ρ/2)`).
    fn ln_even(&self, rho: f64) -> Result<f64> {
        let ln_half = ln_sinh(0.5 * rho);
        let ln_f0 = self.terms.ln_value(rho)?;
        let r_of = |v: f64| -> f64 {
            let ln_v2 = if v > 1e100 {
                2.0 * v.ln()
            } else {
                (v * v).ln_1p()
            };
            let ln_x = ln_half + 0.5 * ln_v2;
            if ln_x < 300.0 {
                2.0 * ln_x.exp().asinh()
            } else {
                2.0 * (LN_2 + ln_x)
            }
        };
        let mut failure = None;
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: self.rel_tol,
            ..QuadOptions::default()
        };
        let q = integrate_semi_infinite_with(
            |v, _| {
                let r = r_of(v);
                if !r.is_finite() {
                    return 0.0;
                }
                match self.terms.ln_value(r) {
                    Ok(l) => (l - ln_f0).exp(),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            &opts,
            Substitution::None,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        if !(q.value > 0.0) {
            return Err(Error::Quadrature {
                estimate: q.value,
                error: q.error,
                tol: self.rel_tol,
            });
        }
        Ok(self.ln_c + (2.0 * 2f64.sqrt() / PI.sqrt()).ln() + ln_half + ln_f0 + q.value.ln())
    }
}

/// `𝒦ₛ(ρ)` for odd `N ≥ 3` via the closed term algebra.
pub fn kernel_odd(dim: usize, s: f64, rho: f64) -> Result<f64> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(domain(format!("kernel_odd requires odd N ≥ 3, got {dim}")));
    }
    Ok(KernelEvaluator::new(dim, s)?.eval(rho)?.value)
}

/// `𝒦ₛ(ρ)` for even `N ≥ 2` via the regularized Abel-type integral.
pub fn kernel_even(dim: usize, s: f64, rho: f64) -> Result<f64> {
    if dim < 2 || dim % 2 == 1 {
        return Err(domain(format!(
            "kernel_even requires even N ≥ 2, got {dim}"
        )));
    }
    Ok(KernelEvaluator::new(dim, s)?.eval(rho)?.value)
}

/// `𝒦ₛ(ρ)` for any `N ≥ 2`, dispatching on parity.
pub fn kernel(dim: usize, s: f64, rho: f64) -> Result<f64> {
    Ok(KernelEvaluator::new(dim, s)?.eval(rho)?.value)
}

/// `𝒦ₛ(ρ)` with its logarithm and underflow flag.
pub fn kernel_value(dim: usize, s: f64, rho: f64) -> Result<KernelValue> {
    KernelEvaluator::new(dim, s)?.eval(rho)
}
