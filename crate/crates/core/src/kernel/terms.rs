//! Closed term algebra for repeated application of `(−∂ρ / sinh ρ)` to
//! `ρ^{−ν} K_ν(aρ)`.

use crate::error::{domain, Result};
use crate::specfun::{bessel_k_sequence, ln_cosh, ln_sinh, signed_log_sum};

/// One term `c · ρ^p · sinh^{−k}(ρ) · cosh^j(ρ) · K_{ν₀+m}(aρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselTerm {
    pub coefficient: f64,
    pub bessel_order_shift: usize,
    pub sinh_power: u32,
    pub cosh_power: u32,
    pub rho_power: f64,
}

/// Finite sum of [`BesselTerm`]s sharing the base order `ν₀` and scale `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTermSum {
    pub nu0: f64,
    pub a: f64,
    pub terms: Vec<BesselTerm>,
}

impl BesselTermSum {
    /// The single term `ρ^{−ν} K_ν(aρ)`.
    pub fn base(nu: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !nu.is_finite() {
            return Err(domain(format!(
                "invalid Bessel order/scale (ν = {nu}, a = {a})"
            )));
        }
        Ok(Self {
            nu0: nu,
            a,
            terms: vec![BesselTerm {
                coefficient: 1.0,
                bessel_order_shift: 0,
                sinh_power: 0,
                cosh_power: 0,
                rho_power: -nu,
            }],
        })
    }

    /// Largest order shift present.
    pub fn max_shift(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.bessel_order_shift)
            .max()
            .unwrap_or(0)
    }

    /// Exact result of one application of `(−∂ρ / sinh ρ)`.
    pub fn apply_operator(&self) -> Self {
        let mut out: Vec<BesselTerm> = Vec::with_capacity(4 * self.terms.len());
        let mut push = |t: BesselTerm| {
            if t.coefficient == 0.0 {
                return;
            }
            if let Some(e) = out.iter_mut().find(|e| {
                e.bessel_order_shift == t.bessel_order_shift
                    && e.sinh_power == t.sinh_power
                    && e.cosh_power == t.cosh_power
                    && e.rho_power == t.rho_power
            }) {
                e.coefficient += t.coefficient;
            } else {
                out.push(t);
            }
        };
        for t in &self.terms {
            let mu = self.nu0 + t.bessel_order_shift as f64;
            let c = t.coefficient;
            // d/dρ [ρ^p K_μ(aρ)] = (p + μ) ρ^{p−1} K_μ − a ρ^p K_{μ+1}
            push(BesselTerm {
                coefficient: -c * (t.rho_power + mu),
                rho_power: t.rho_power - 1.0,
                sinh_power: t.sinh_power + 1,
                ..*t
            });
            push(BesselTerm {
                coefficient: c * self.a,
                bessel_order_shift: t.bessel_order_shift + 1,
                sinh_power: t.sinh_power + 1,
                ..*t
            });
            // d/dρ sinh^{−k} = −k sinh^{−k−1} cosh
            if t.sinh_power > 0 {
                push(BesselTerm {
                    coefficient: c * t.sinh_power as f64,
                    sinh_power: t.sinh_power + 2,
                    cosh_power: t.cosh_power + 1,
                    ..*t
                });
            }
            // d/dρ cosh^j = j cosh^{j−1} sinh
            if t.cosh_power > 0 {
                push(BesselTerm {
                    coefficient: -c * t.cosh_power as f64,
                    cosh_power: t.cosh_power - 1,
                    ..*t
                });
            }
        }
        out.retain(|t| t.coefficient != 0.0);
        Self {
            nu0: self.nu0,
            a: self.a,
            terms: out,
        }
    }

    /// `count` successive applications of the operator.
    pub fn apply_operator_n(&self, count: usize) -> Self {
        (0..count).fold(self.clone(), |acc, _| acc.apply_operator())
    }

    /// Value at `ρ` as `(mantissa, log_scale)`, i.e. `mantissa · e^{log_scale}`.
    pub fn evaluate_scaled(&self, rho: f64) -> Result<(f64, f64)> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(domain(format!("term sum requires ρ > 0, got {rho}")));
        }
        let lk = bessel_k_sequence(self.nu0.abs(), self.a * rho, self.max_shift() + 1)?;
        let lr = rho.ln();
        let ls = ln_sinh(rho);
        let lc = ln_cosh(rho);
        Ok(signed_log_sum(self.terms.iter().map(|t| {
            let l = t.coefficient.abs().ln() + t.rho_power * lr - t.sinh_power as f64 * ls
                + t.cosh_power as f64 * lc
                + lk[t.bessel_order_shift];
            (t.coefficient.signum(), l)
        })))
    }

    /// Natural logarithm of the value; errors if the sum is not positive.
    pub fn ln_value(&self, rho: f64) -> Result<f64> {
        let (m, l) = self.evaluate_scaled(rho)?;
        if !(m > 0.0) {
            return Err(domain(format!(
                "term sum not positive at ρ = {rho} (mantissa {m})"
            )));
        }
        Ok(m.ln() + l)
    }

    /// Plain value; may underflow to zero or overflow to infinity.
    pub fn value(&self, rho: f64) -> Result<f64> {
        let (m, l) = self.evaluate_scaled(rho)?;
        Ok(m * l.exp())
    }
}
