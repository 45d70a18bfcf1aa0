//! Special functions and quadrature primitives.

mod bessel;
mod quadrature;

pub use bessel::{bessel_k, bessel_k_log, bessel_k_sequence};
pub use quadrature::{
    gauss_legendre, integrate, integrate_endpoints, integrate_semi_infinite,
    integrate_semi_infinite_with, QuadOptions, Quadrature, Substitution,
};

/// `Γ(x)` for real `x` away from the poles.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `ln |Γ(x)|` for positive `x`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln sinh x` for `x > 0`, accurate for both tiny and huge arguments.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh x` for real `x`.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
    } else {
        x.cosh().ln()
    }
}

/// Sum of signed exponentials `Σ sign_i · exp(log_i)` returned as
/// `(mantissa, log_scale)` with `value = mantissa · exp(log_scale)`.
pub fn signed_log_sum(items: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let items: Vec<(f64, f64)> = items.into_iter().collect();
    let max = items
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return (0.0, 0.0);
    }
    let sum = items.iter().map(|&(s, l)| s * (l - max).exp()).sum();
    (sum, max)
}
