//! Independent finite-difference evaluation of the odd-dimensional kernel.

use hypfrac::kernel::{bessel_parameters, normalizing_constant};
use hypfrac::specfun::bessel_k;

const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 5] = [
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// Relative step of the stencils.
const STEP: f64 = 5e-3;

/// `C(N,s)·(−∂ρ/sinh ρ)^{(N−1)/2}[ρ^{−ν}K_ν(aρ)]` for `N ∈ {3, 5}`, with the
/// derivatives of the base expression taken by eighth-order central differences.
pub fn odd_kernel_by_differences(dim: usize, s: f64, rho: f64) -> hypfrac::Result<f64> {
    let (nu, a) = bessel_parameters(dim, s);
    let f = |r: f64| -> hypfrac::Result<f64> { Ok(r.powf(-nu) * bessel_k(nu, a * r)?) };
    let h = STEP * rho;
    let mut d1 = 0.0;
    let mut d2 = D2[0] * f(rho)?;
    for k in 1..=4 {
        let (plus, minus) = (f(rho + k as f64 * h)?, f(rho - k as f64 * h)?);
        d1 += D1[k - 1] * (plus - minus);
        d2 += D2[k] * (plus + minus);
    }
    d1 /= h;
    d2 /= h * h;
    let (sh, ch) = (rho.sinh(), rho.cosh());
    let value = match dim {
        3 => -d1 / sh,
        5 => (d2 * sh - d1 * ch) / sh.powi(3),
        _ => {
            return Err(hypfrac::Error::Domain(format!(
                "the difference oracle covers N = 3, 5, got {dim}"
            )))
        }
    };
    Ok(normalizing_constant(dim, s)? * value)
}
