//! Angular reduction of the kernel for radial functions.
//!
//! For radial `u`, `[u]²_s = ∫₀^∞∫₀^∞ (u(r₁) − u(r₂))² M(r₁, r₂) dr₁ dr₂` with
//! `M = ω_{N−1} ω_{N−2} B ∫_δ^σ 𝒦ₛ(d) sinh d [(cosh d − cosh δ)(cosh σ − cosh d)]^{(N−3)/2} dd`,
//! where `B = sinh r₁ sinh r₂`, `δ = |r₁ − r₂|` and `σ = r₁ + r₂`.

use super::interp::{AntiderivativeTable, LnKernelInterp, RHO_FAR};
use super::pointwise::near_field_coefficient;
use crate::error::{domain, Error, Result};
use crate::geometry::sphere_area;
use crate::specfun::{
    gauss_legendre, integrate_endpoints, integrate_semi_infinite_with, ln_gamma, ln_sinh,
    QuadOptions, Substitution,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::sync::Arc;

// The interpolated kernel carries relative errors near 1e−9.
const REL_TOL: f64 = 1e-8;

/// Leading near-diagonal law `M(r₁, r₂) ≈ c(r) |r₁ − r₂|^{−exponent}`, with
/// `c(r) = coefficient · sinh^{N−1} r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModel {
    pub dim: usize,
    pub coefficient: f64,
    pub exponent: f64,
}

impl DiagonalModel {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        let n = dim as f64;
        let omega = sphere_area(dim) * sphere_area(dim - 1);
        let kappa = near_field_coefficient(dim, s)?;
        // ½ B((N−1)/2, (1+2s)/2)
        let a = 0.5 * (n - 1.0);
        let b = 0.5 * (1.0 + 2.0 * s);
        let half_beta = 0.5 * (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
        Ok(Self {
            dim,
            coefficient: omega * kappa * half_beta,
            exponent: 1.0 + 2.0 * s,
        })
    }

    /// `c(r)`.
    pub fn amplitude(&self, r: f64) -> f64 {
        self.coefficient * r.sinh().powi(self.dim as i32 - 1)
    }

    /// `c(r̄) |r₁ − r₂|^{−exponent}` with `r̄` the midpoint.
    pub fn value(&self, r1: f64, r2: f64) -> f64 {
        self.amplitude(0.5 * (r1 + r2)) * (r1 - r2).abs().powf(-self.exponent)
    }
}

/// Pointwise evaluator of `M(r₁, r₂)`.
#[derive(Debug, Clone)]
pub struct ReducedKernelModel {
    dim: usize,
    s: f64,
    ln_omega: f64,
    interp: LnKernelInterp,
    antiderivative: Option<AntiderivativeTable>,
    diagonal: DiagonalModel,
}

impl ReducedKernelModel {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!("reduced kernel needs N ≥ 2, got {dim}")));
        }
        let interp = LnKernelInterp::new(dim, s)?;
        let antiderivative = if dim == 3 {
            Some(AntiderivativeTable::new(&interp)?)
        } else {
            None
        };
        Ok(Self {
            dim,
            s,
            ln_omega: (sphere_area(dim) * sphere_area(dim - 1)).ln(),
            interp,
            antiderivative,
            diagonal: DiagonalModel::new(dim, s)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn diagonal_model(&self) -> DiagonalModel {
        self.diagonal
    }

    /// Interpolated `ln 𝒦ₛ(ρ)`.
    pub fn ln_kernel(&self, rho: f64) -> f64 {
        self.interp.ln_k(rho)
    }

    /// `M(r₁, r₂)` for `r₁ ≠ r₂`.
    pub fn m(&self, r1: f64, r2: f64) -> Result<f64> {
        Ok(self.ln_m(r1, r2)?.exp())
    }

    /// `ln M(r₁, r₂)`; `−∞` when either radius is zero.
    pub fn ln_m(&self, r1: f64, r2: f64) -> Result<f64> {
        if !(r1 >= 0.0 && r2 >= 0.0) || r1 == r2 || !r1.is_finite() || !r2.is_finite() {
            return Err(domain(format!(
                "reduced kernel needs distinct radii ≥ 0, got ({r1}, {r2})"
            )));
        }
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        if lo == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let delta = hi - lo;
        let fail = |e: Error| Error::ReducedKernel {
            r1,
            r2,
            reason: e.to_string(),
        };
        if delta > RHO_FAR {
            return self.ln_m_far(lo, hi).map_err(fail);
        }
        let sigma = hi + lo;
        let ln_b = ln_sinh(lo) + ln_sinh(hi);
        let ln_i = match &self.antiderivative {
            Some(g) => {
                let width = 2.0 * lo;
                if width <= (0.5 * delta).min(1.0) {
                    self.ln_segment(delta, sigma)
                } else {
                    let a = g.ln_g(delta);
                    let b = g.ln_g(sigma);
                    a + (-(b - a).exp_m1()).ln()
                }
            }
            None => self.ln_angular(delta, sigma).map_err(fail)?,
        };
        Ok(self.ln_omega + ln_b + ln_i)
    }

    /// `ln ∫_a^b 𝒦ₛ(t) sinh t dt` on a short interval (N = 3 only).
    fn ln_segment(&self, a: f64, b: f64) -> f64 {
        let (x, w) = gauss_legendre(10);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        let f = |t: f64| self.interp.ln_k(t) + ln_sinh(t);
        let top = f(a);
        let sum: f64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * (f(m + h * xi) - top).exp())
            .sum();
        top + (h * sum).ln()
    }

    /// General-`N` integral over `d ∈ [δ, σ]`, split geometrically away from `δ`.
    fn ln_angular(&self, delta: f64, sigma: f64) -> Result<f64> {
        let e = 0.5 * (self.dim as f64 - 3.0);
        let lnh = |d: f64, dl: f64, dr: f64| -> f64 {
            let mut l = self.interp.ln_k(d) + ln_sinh(d);
            if e != 0.0 {
                l += e
                    * (2.0 * LN_2
                        + ln_sinh(0.5 * (d + delta))
                        + ln_sinh(0.5 * dl)
                        + ln_sinh(0.5 * (sigma + d))
                        + ln_sinh(0.5 * dr));
            }
            l
        };
        let mid = 0.5 * (delta + sigma);
        let scale = lnh(mid, mid - delta, sigma - mid);
        let opts = QuadOptions::relative(REL_TOL);
        let mut breaks = vec![delta];
        let mut w = 2.0 * delta;
        while delta + w < sigma - 0.5 * w {
            breaks.push(delta + w);
            w *= 2.0;
        }
        breaks.push(sigma);
        let mut total = 0.0;
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let q = integrate_endpoints(
                |d, dl, dr| {
                    let v = (lnh(d, (a - delta) + dl, (sigma - b) + dr) - scale).exp();
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                a,
                b,
                &opts,
            )?;
            total += q.value;
        }
        Ok(scale + total.ln())
    }

    /// Far regime `|r₁ − r₂| > 40`: with `d = hi + y`, the `e^{(N−1)hi}` growth
    /// of the volume factors cancels the kernel decay analytically, leaving
    /// `ω 2^{1−N} sinh(lo) ∫_{−lo}^{lo} e^{E(d)} e^{(2−N)y} [(e^y − e^{−lo})(e^{lo} − e^y)]^{(N−3)/2} dy`
    /// with `E(d) = ln 𝒦ₛ(d) + (N−1)d`; terms of order `e^{−2δ}` are dropped.
    fn ln_m_far(&self, lo: f64, hi: f64) -> Result<f64> {
        let n = self.dim as f64;
        let e = 0.5 * (n - 3.0);
        let lnh = |y: f64, dl: f64, dr: f64| -> f64 {
            let d = hi + y;
            let big_e = self.interp.ln_tail_rescaled(d);
            let mut l = big_e + (2.0 - n) * y;
            if e != 0.0 {
                l += e * (-lo + dl.exp_m1().ln() + y + dr.exp_m1().ln());
            }
            l
        };
        let scale = lnh(0.0, lo, lo);
        let q = integrate_endpoints(
            |y, dl, dr| {
                let v = (lnh(y, dl, dr) - scale).exp();
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            -lo,
            lo,
            &QuadOptions::relative(REL_TOL),
        )?;
        Ok(self.ln_omega + (1.0 - n) * LN_2 + ln_sinh(lo) + scale + q.value.ln())
    }

    /// `T(r) = ∫_R^∞ M(r, r₂) dr₂` for `r < R`: interaction of the shell at
    /// `r` with the exterior of the ball of radius `R`.
    pub fn exterior_tail(&self, r: f64, radius: f64) -> Result<f64> {
        if !(r >= 0.0 && r < radius) {
            return Err(domain(format!(
                "exterior tail needs 0 ≤ r < R, got r = {r}, R = {radius}"
            )));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        // A near piece resolving the |r − r₂|^{−1−2s} peak at scale R − r,
        // then the algebraic far tail at the scale of r₂ itself.
        let split = radius + (4.0 * (radius - r)).max(1.0);
        let mut failure = None;
        let mut eval = |r2: f64| match self.m(r, r2) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let near = integrate_endpoints(
            |r2, _, _| eval(r2),
            radius,
            split,
            &QuadOptions::relative(1e-8),
        )?;
        let far = integrate_semi_infinite_with(
            |v, _| eval(split * (1.0 + v)),
            0.0,
            &QuadOptions::relative(1e-8),
            Substitution::None,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(near.value + split * far.value)
    }
}

/// `M` sampled on a radial point set, with the model used to evaluate it
/// elsewhere.
#[derive(Debug, Clone)]
pub struct ReducedKernel {
    pub dim: usize,
    pub order: f64,
    pub r_grid: Vec<f64>,
    /// `W[i][j] = M(rᵢ, rⱼ)` off the diagonal; the diagonal is zero and is
    /// handled through [`DiagonalModel`].
    pub w: DMatrix<f64>,
    pub diagonal_model: DiagonalModel,
    model: Arc<ReducedKernelModel>,
}

impl ReducedKernel {
    /// Reassembles a kernel from stored samples, e.g. a cache entry.
    pub fn from_samples(
        model: Arc<ReducedKernelModel>,
        r_grid: Vec<f64>,
        w: DMatrix<f64>,
    ) -> Result<Self> {
        check_points(&r_grid)?;
        if w.nrows() != r_grid.len() || w.ncols() != r_grid.len() {
            return Err(Error::Mismatch(format!(
                "{}x{} samples for {} points",
                w.nrows(),
                w.ncols(),
                r_grid.len()
            )));
        }
        Ok(Self {
            dim: model.dim(),
            order: model.order(),
            r_grid,
            w,
            diagonal_model: model.diagonal_model(),
            model,
        })
    }

    pub fn model(&self) -> &ReducedKernelModel {
        &self.model
    }

    pub fn shared_model(&self) -> Arc<ReducedKernelModel> {
        self.model.clone()
    }
}

fn check_points(r_grid: &[f64]) -> Result<()> {
    if r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0))
        || r_grid.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(domain(
            "reduced kernel grid must be strictly increasing and positive",
        ));
    }
    Ok(())
}

/// Samples `M` on every pair of distinct points of `r_grid`.
pub fn build_reduced_kernel(dim: usize, s: f64, r_grid: &[f64]) -> Result<ReducedKernel> {
    let model = Arc::new(ReducedKernelModel::new(dim, s)?);
    build_reduced_kernel_with(model, r_grid)
}

/// As [`build_reduced_kernel`], reusing an existing model.
pub fn build_reduced_kernel_with(
    model: Arc<ReducedKernelModel>,
    r_grid: &[f64],
) -> Result<ReducedKernel> {
    check_points(r_grid)?;
    let n = r_grid.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = model.m(r_grid[i], r_grid[j])?;
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok(ReducedKernel {
        dim: model.dim(),
        order: model.order(),
        r_grid: r_grid.to_vec(),
        w,
        diagonal_model: model.diagonal_model(),
        model,
    })
}
