//! Dense interpolation of `ln 𝒦ₛ` and of the antiderivative
//! `G(x) = ∫ₓ^∞ 𝒦ₛ(t) sinh t dt`.

use super::pointwise::KernelEvaluator;
use super::table::least_squares3;
use crate::error::Result;
use crate::specfun::{
    gauss_legendre, integrate_semi_infinite_with, ln_sinh, QuadOptions, Substitution,
};

const RHO_LOW: f64 = 1e-8;
const LOG_STEP: f64 = 0.02;
const MID_STEP: f64 = 0.02;
pub(crate) const RHO_FAR: f64 = 40.0;
const TAIL_FIT: [f64; 9] = [40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0, 75.0, 80.0];
const G_EXT_STEP: f64 = 0.1;
const G_EXT_END: f64 = 1000.0;

/// Uniformly sampled function with local cubic interpolation.
#[derive(Debug, Clone)]
struct Uniform {
    x0: f64,
    h: f64,
    y: Vec<f64>,
}

impl Uniform {
    fn end(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = (x - self.x0) / self.h;
        let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let u = t - i as f64;
        let (y0, y1, y2, y3) = (self.y[i - 1], self.y[i], self.y[i + 1], self.y[i + 2]);
        // Lagrange cubic through nodes at u = -1, 0, 1, 2.
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3
    }
}

fn uniform(x0: f64, x1: f64, step: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Uniform> {
    let n = ((x1 - x0) / step).ceil() as usize;
    let h = (x1 - x0) / n as f64;
    let y = (0..=n)
        .map(|i| f(x0 + h * i as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Uniform { x0, h, y })
}

/// `ln 𝒦ₛ(ρ)` for every `ρ > 0`: cubic interpolation in `ln ρ` on
/// `[1e−8, 1]`, in `ρ` on `[1, 40]`, the exact near-field power law below and a
/// fitted `c₀ + c₁/ρ + c₂/ρ²` correction to `−(N−1)ρ − (1+s) ln ρ` above.
#[derive(Debug, Clone)]
pub struct LnKernelInterp {
    dim: usize,
    s: f64,
    near: Uniform,
    mid: Uniform,
    tail: [f64; 3],
}

impl LnKernelInterp {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        let ev = KernelEvaluator::new(dim, s)?.with_tolerance(1e-11);
        let near = uniform(RHO_LOW.ln(), 0.0, LOG_STEP, |t| ev.ln_value(t.exp()))?;
        let mid = uniform(1.0, RHO_FAR, MID_STEP, |r| ev.ln_value(r))?;
        let n = dim as f64;
        let rows = TAIL_FIT
            .iter()
            .map(|&r| -> Result<([f64; 3], f64)> {
                let y = ev.ln_value(r)? + (n - 1.0) * r + (1.0 + s) * r.ln();
                Ok(([1.0, 1.0 / r, 1.0 / (r * r)], y))
            })
            .collect::<Result<Vec<_>>>()?;
        let tail = least_squares3(rows);
        Ok(Self {
            dim,
            s,
            near,
            mid,
            tail,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// Exponent of the near-field power law, `−(N+2s)`.
    pub fn near_exponent(&self) -> f64 {
        -(self.dim as f64 + 2.0 * self.s)
    }

    pub fn ln_k(&self, rho: f64) -> f64 {
        if rho < RHO_LOW {
            self.near.y[0] + self.near_exponent() * (rho.ln() - self.near.x0)
        } else if rho <= 1.0 {
            self.near.eval(rho.ln())
        } else if rho <= RHO_FAR {
            self.mid.eval(rho)
        } else {
            self.ln_tail(rho)
        }
    }

    /// `ln 𝒦ₛ(ρ) + (N−1)ρ` from the far-field model, without cancellation.
    pub(crate) fn ln_tail_rescaled(&self, rho: f64) -> f64 {
        let [c0, c1, c2] = self.tail;
        c0 + c1 / rho + c2 / (rho * rho) - (1.0 + self.s) * rho.ln()
    }

    fn ln_tail(&self, rho: f64) -> f64 {
        self.ln_tail_rescaled(rho) - (self.dim as f64 - 1.0) * rho
    }

    pub fn k(&self, rho: f64) -> f64 {
        self.ln_k(rho).exp()
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln G(x)` with `G(x) = ∫ₓ^∞ 𝒦ₛ(t) sinh t dt`, for `N ≥ 3`.
#[derive(Debug, Clone)]
pub struct AntiderivativeTable {
    near: Uniform,
    mid: Uniform,
    near_power: f64,
    ln_integrand_low: f64,
    far: FarIntegrand,
}

/// `f(t) = ln(𝒦ₛ(t) sinh t)` from the far-field model, with two derivatives.
#[derive(Debug, Clone)]
struct FarIntegrand {
    dim: f64,
    s: f64,
    tail: [f64; 3],
}

impl FarIntegrand {
    fn derivatives(&self, t: f64) -> (f64, f64, f64) {
        let [c0, c1, c2] = self.tail;
        let b = 1.0 + self.s;
        let f =
            c0 + c1 / t + c2 / (t * t) - (self.dim - 2.0) * t - b * t.ln() - std::f64::consts::LN_2;
        let d1 = -c1 / (t * t) - 2.0 * c2 / t.powi(3) - (self.dim - 2.0) - b / t;
        let d2 = 2.0 * c1 / t.powi(3) + 6.0 * c2 / t.powi(4) + b / (t * t);
        (f, d1, d2)
    }
}

impl AntiderivativeTable {
    pub fn new(interp: &LnKernelInterp) -> Result<Self> {
        let n = interp.dim() as f64;
        if n < 3.0 {
            return Err(crate::error::domain("antiderivative table needs N ≥ 3"));
        }
        let f = |t: f64| interp.ln_k(t) + ln_sinh(t);
        let (gx, gw) = gauss_legendre(8);
        let seg = |a: f64, b: f64| -> f64 {
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            let vals: Vec<f64> = gx.iter().map(|&x| f(m + h * x)).collect();
            let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = vals.iter().zip(&gw).map(|(v, w)| w * (v - top).exp()).sum();
            top + (h * sum).ln()
        };
        // Tail beyond the extended table, scaled to its lower end.
        let f_end = f(G_EXT_END);
        let tail = integrate_semi_infinite_with(
            |t, _| (f(t) - f_end).exp(),
            G_EXT_END,
            &QuadOptions::relative(1e-12),
            Substitution::None,
        )?;
        let mut acc = f_end + tail.value.ln();
        // Extended and mid region share one uniform grid in x.
        let steps = ((G_EXT_END - 1.0) / G_EXT_STEP).round() as usize;
        let h = (G_EXT_END - 1.0) / steps as f64;
        let mut y = vec![0.0; steps + 1];
        y[steps] = acc;
        for i in (0..steps).rev() {
            let a = 1.0 + h * i as f64;
            // finer sub-segments in the steep near part of the range
            let pieces = if a < 3.0 { 4 } else { 1 };
            for k in (0..pieces).rev() {
                let lo = a + h * k as f64 / pieces as f64;
                acc = ln_add(acc, seg(lo, lo + h / pieces as f64));
            }
            y[i] = acc;
        }
        let mid = Uniform { x0: 1.0, h, y };
        let tn = ((0.0 - RHO_LOW.ln()) / LOG_STEP).ceil() as usize;
        let ht = -RHO_LOW.ln() / tn as f64;
        let mut y = vec![0.0; tn + 1];
        y[tn] = acc;
        for i in (0..tn).rev() {
            let a = (RHO_LOW.ln() + ht * i as f64).exp();
            let b = (RHO_LOW.ln() + ht * (i + 1) as f64).exp();
            acc = ln_add(acc, seg(a, b));
            y[i] = acc;
        }
        let near = Uniform {
            x0: RHO_LOW.ln(),
            h: ht,
            y,
        };
        Ok(Self {
            near,
            mid,
            near_power: interp.near_exponent() + 1.0,
            ln_integrand_low: f(RHO_LOW),
            far: FarIntegrand {
                dim: n,
                s: interp.order(),
                tail: interp.tail,
            },
        })
    }

    pub fn ln_g(&self, x: f64) -> f64 {
        if x < RHO_LOW {
            // 𝒦ₛ(t) sinh t ≈ A (t/x₀)^q below x₀, with q = 1 − N − 2s.
            let q1 = self.near_power + 1.0;
            let x0 = RHO_LOW;
            let extra = self.ln_integrand_low + x0.ln() + (((x / x0).powf(q1) - 1.0) / -q1).ln();
            ln_add(self.near.y[0], extra)
        } else if x <= 1.0 {
            self.near.eval(x.ln())
        } else if x <= self.mid.end() {
            self.mid.eval(x)
        } else {
            // ∫ₓ^∞ e^{f} ≈ e^{f(x)} (1/a − f''/a³), a = −f'(x).
            let (f, d1, d2) = self.far.derivatives(x);
            let a = -d1;
            f + (1.0 / a - d2 / (a * a * a)).ln()
        }
    }
}
