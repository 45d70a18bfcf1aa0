//! Tabulated kernel values with fitted asymptotic exponents.

use super::pointwise::KernelEvaluator;
use crate::error::{domain, Error, Result};
use nalgebra::{Matrix3, Vector3};

/// Log-spaced tabulation of `𝒦ₛ` with its fitted asymptotics.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub dim: usize,
    pub order: f64,
    pub rho_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub ln_values: Vec<f64>,
    /// Least-squares slope of `ln 𝒦ₛ` against `ln ρ` on `[1e−4, 1e−2]`.
    pub near_exponent: f64,
    /// Exponential rate from fitting `c − rate·ρ − β ln ρ` on `[10, 30]`.
    pub far_rate: f64,
}

/// Near-field fit window.
pub const NEAR_WINDOW: (f64, f64) = (1e-4, 1e-2);
/// Far-field fit window.
pub const FAR_WINDOW: (f64, f64) = (10.0, 30.0);
const FIT_POINTS: usize = 21;

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Fits `y ≈ c − rate·x − β·ln x` and returns `(rate, β)`.
pub fn fit_exponential_rate(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sol = least_squares3(x.iter().zip(y).map(|(&x, &y)| ([1.0, -x, -x.ln()], y)));
    (sol[1], sol[2])
}

/// Least-squares coefficients of a three-column model from `(row, value)` pairs.
/// NaN if the normal equations are singular.
pub(crate) fn least_squares3(rows: impl IntoIterator<Item = ([f64; 3], f64)>) -> [f64; 3] {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (c, y) in rows {
        let c = Vector3::from(c);
        ata += c * c.transpose();
        aty += c * y;
    }
    ata.lu()
        .solve(&aty)
        .map_or([f64::NAN; 3], |v| [v[0], v[1], v[2]])
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Fitted `(near_exponent, far_rate)` for an evaluator.
pub fn fit_asymptotics(ev: &KernelEvaluator) -> Result<(f64, f64)> {
    let near_x = log_spaced(NEAR_WINDOW.0, NEAR_WINDOW.1, FIT_POINTS);
    let near_y = near_x
        .iter()
        .map(|&r| ev.ln_value(r))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = near_x.iter().map(|r| r.ln()).collect();
    let near_exponent = fit_slope(&lx, &near_y);
    let far_x: Vec<f64> = (0..FIT_POINTS)
        .map(|i| FAR_WINDOW.0 + (FAR_WINDOW.1 - FAR_WINDOW.0) * i as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let far_y = far_x
        .iter()
        .map(|&r| ev.ln_value(r))
        .collect::<Result<Vec<_>>>()?;
    let (far_rate, _) = fit_exponential_rate(&far_x, &far_y);
    Ok((near_exponent, far_rate))
}

impl KernelTable {
    /// Checks positivity, strict monotonicity and the asymptotic bands.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim as f64;
        if self.ln_values.iter().any(|l| !l.is_finite()) {
            return Err(Error::TableRejected("non-finite kernel value".into()));
        }
        if let Some(i) = self.ln_values.windows(2).position(|w| !(w[1] < w[0])) {
            return Err(Error::TableRejected(format!(
                "kernel not strictly decreasing between ρ = {} and ρ = {}",
                self.rho_grid[i],
                self.rho_grid[i + 1]
            )));
        }
        let target = -(n + 2.0 * self.order);
        if (self.near_exponent - target).abs() > 0.05 {
            return Err(Error::TableRejected(format!(
                "near-field exponent {} outside {target} ± 0.05",
                self.near_exponent
            )));
        }
        if ((self.far_rate - (n - 1.0)) / (n - 1.0)).abs() > 0.01 {
            return Err(Error::TableRejected(format!(
                "far-field rate {} outside {} ± 1%",
                self.far_rate,
                n - 1.0
            )));
        }
        Ok(())
    }
}

/// Log-spaced table of `𝒦ₛ` on `[rho_min, rho_max]` with `count` points.
pub fn build_kernel_table(
    dim: usize,
    s: f64,
    rho_min: f64,
    rho_max: f64,
    count: usize,
) -> Result<KernelTable> {
    if !(rho_min > 0.0 && rho_min < rho_max && rho_max.is_finite()) {
        return Err(domain(format!(
            "need 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
        )));
    }
    if count < 16 {
        return Err(domain(format!(
            "table needs at least 16 points, got {count}"
        )));
    }
    let ev = KernelEvaluator::new(dim, s)?.with_tolerance(1e-11);
    let rho_grid = log_spaced(rho_min, rho_max, count);
    let mut values = Vec::with_capacity(count);
    let mut ln_values = Vec::with_capacity(count);
    for &r in &rho_grid {
        let v = ev.eval(r)?;
        values.push(v.value);
        ln_values.push(v.ln_value);
    }
    let (near_exponent, far_rate) = fit_asymptotics(&ev)?;
    let table = KernelTable {
        dim,
        order: s,
        rho_grid,
        values,
        ln_values,
        near_exponent,
        far_rate,
    };
    table.validate()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_fit_recovers_model() {
        let x: Vec<f64> = (0..21).map(|i| 10.0 + i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&r| 0.3 - 2.0 * r - 1.5 * r.ln()).collect();
        let (rate, beta) = fit_exponential_rate(&x, &y);
        assert!((rate - 2.0).abs() < 1e-10 && (beta - 1.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_kernel_table(3, 0.5, 1e-4, 30.0, 15).is_err());
        assert!(build_kernel_table(3, 0.5, 0.0, 30.0, 100).is_err());
        assert!(build_kernel_table(3, 0.5, 3.0, 2.0, 100).is_err());
    }

    #[test]
    fn tampered_table_rejected() {
        let mut t = build_kernel_table(3, 0.5, 1e-3, 20.0, 32).unwrap();
        t.ln_values[5] = t.ln_values[4] + 1.0;
        assert!(matches!(t.validate(), Err(Error::TableRejected(_))));
    }
}
