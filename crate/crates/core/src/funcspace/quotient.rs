//! `L^q` norms and Sobolev-type quotients.

use super::forms::{norm_lambda_sq, seminorm_s_sq, QuadraticForms};
use super::function::RadialFunction;
use crate::error::{domain, Result};
use nalgebra::{DMatrix, DVector};

/// `(Σ |uᵢ|^q wᵢ)^{1/q}` with the grid's volume weights.
pub fn lp_norm(u: &RadialFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(domain(format!("L^q norm needs finite q ≥ 1, got {q}")));
    }
    let v = u.values();
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = u
        .grid()
        .power_quadrature()
        .iter()
        .map(|p| (((1.0 - p.t) * v[p.cell] + p.t * v[p.cell + 1]).abs() / scale).powf(q) * p.weight)
        .sum();
    Ok(scale * sum.powf(1.0 / q))
}

/// `∫|u|^q`.
pub fn lp_integral(u: &RadialFunction, q: f64) -> Result<f64> {
    Ok(lp_norm(u, q)?.powf(q))
}

/// `2* = 2N/(N−2)` for `N ≥ 3`.
pub fn critical_exponent(dim: usize) -> Result<f64> {
    if dim < 3 {
        return Err(domain(format!(
            "the critical exponent needs N ≥ 3, got {dim}"
        )));
    }
    let n = dim as f64;
    Ok(2.0 * n / (n - 2.0))
}

fn nonzero(u: &RadialFunction) -> Result<()> {
    if u.is_zero() {
        return Err(domain("quotients are undefined for the zero function"));
    }
    Ok(())
}

/// `‖u‖²_λ / ‖u‖²_{p+1}`.
pub fn sobolev_quotient(
    u: &RadialFunction,
    lambda: f64,
    p: f64,
    forms: &QuadraticForms,
) -> Result<f64> {
    nonzero(u)?;
    let den = lp_norm(u, p + 1.0)?;
    Ok(norm_lambda_sq(u, lambda, forms)? / (den * den))
}

/// `(‖u‖²_λ + [u]²_s) / ‖u‖²_{2*}`.
pub fn mixed_quotient(u: &RadialFunction, lambda: f64, forms: &QuadraticForms) -> Result<f64> {
    nonzero(u)?;
    let den = lp_norm(u, critical_exponent(forms.dim())?)?;
    Ok((norm_lambda_sq(u, lambda, forms)? + seminorm_s_sq(u, forms)?) / (den * den))
}

/// Concentration scales used to estimate the mixed Sobolev constant.
pub const CONCENTRATION_SCALES: [f64; 5] = [0.16, 0.08, 0.04, 0.02, 0.01];
const CUTOFF: (f64, f64) = (0.5, 1.0);

/// `(ε² + r²)^{−(N−2)/2}` times a smooth cutoff equal to 1 on `[0, 0.5]` and
/// 0 beyond `r = 1`.
pub fn concentrating_profile(dim: usize, eps: f64, r: f64) -> f64 {
    let (a, b) = CUTOFF;
    let chi = if r <= a {
        1.0
    } else if r >= b {
        0.0
    } else {
        let t = (r - a) / (b - a);
        0.5 * (1.0 + (std::f64::consts::PI * t).cos())
    };
    chi * (eps * eps + r * r).powf(-0.5 * (dim as f64 - 2.0))
}

/// Estimate of the best constant in `S‖u‖²_{2*} ≤ ‖u‖²_λ + [u]²_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedConstantEstimate {
    /// `(ε, quotient)` along the concentrating family.
    pub samples: Vec<(f64, f64)>,
    /// Limit `ε → 0` of a least-squares fit in the leading correction orders.
    pub extrapolated: f64,
    /// `min(extrapolated, smallest sampled quotient)`.
    pub estimate: f64,
}

/// Extrapolates the mixed quotient of [`concentrating_profile`] to `ε → 0`.
pub fn estimate_mixed_constant(
    lambda: f64,
    forms: &QuadraticForms,
) -> Result<MixedConstantEstimate> {
    concentration_estimate(lambda, forms, true)
}

/// As [`estimate_mixed_constant`] for `‖u‖²_λ / ‖u‖²_{2*}`, the critical
/// Poincaré–Sobolev constant without the nonlocal term.
pub fn estimate_local_critical_constant(
    lambda: f64,
    forms: &QuadraticForms,
) -> Result<MixedConstantEstimate> {
    concentration_estimate(lambda, forms, false)
}

fn concentration_estimate(
    lambda: f64,
    forms: &QuadraticForms,
    mixed: bool,
) -> Result<MixedConstantEstimate> {
    let dim = forms.dim();
    let crit = critical_exponent(dim)?;
    let grid = forms.grid.clone();
    let samples = CONCENTRATION_SCALES
        .iter()
        .map(|&eps| {
            let u = RadialFunction::from_fn(grid.clone(), |r| concentrating_profile(dim, eps, r))?;
            let q = if mixed {
                mixed_quotient(&u, lambda, forms)?
            } else {
                sobolev_quotient(&u, lambda, crit - 1.0, forms)?
            };
            Ok((eps, q))
        })
        .collect::<Result<Vec<_>>>()?;
    // Leading corrections: the cutoff (order ε^{N−2}) and either the nonlocal
    // term (order ε^{2−2s}) or the λ term (order ε²); equal orders produce a
    // logarithm.
    let a = dim as f64 - 2.0;
    let b = if mixed { 2.0 - 2.0 * forms.order } else { 2.0 };
    let (lo, hi) = (a.min(b), a.max(b));
    let powers: Vec<f64> = if hi - lo < 0.05 {
        vec![lo, f64::NAN, 2.0 * lo]
    } else {
        let mut p = vec![lo];
        for cand in [hi, 2.0 * lo, lo + hi, 3.0 * lo] {
            if p.len() < 3 && p.iter().all(|q: &f64| (q - cand).abs() > 0.05) {
                p.push(cand);
            }
        }
        p
    };
    // NaN marks the logarithmic term ε^{lo} ln(1/ε).
    let basis = |e: f64| -> Vec<f64> {
        let mut row = vec![1.0];
        row.extend(powers.iter().map(|&q| {
            if q.is_nan() {
                e.powf(lo) * (1.0 / e).ln()
            } else {
                e.powf(q)
            }
        }));
        row
    };
    let design = DMatrix::from_fn(samples.len(), 1 + powers.len(), |i, j| {
        basis(samples[i].0)[j]
    });
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let fit = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| crate::error::Error::Singular(format!("concentration fit: {e}")))?;
    let extrapolated = fit[0];
    let smallest = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(MixedConstantEstimate {
        samples,
        extrapolated,
        estimate: extrapolated.min(smallest),
    })
}
