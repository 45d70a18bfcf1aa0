//! Discrete energies on the space of radial profiles vanishing at `R`.

use super::problem::ProblemSpec;
use crate::error::{domain, Error, Result};
use crate::funcspace::{CellPoint, QuadraticForms, RadialFunction};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use std::sync::OnceLock;

/// Which quadratic part enters the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticPart {
    /// `‖u‖²_λ + [u]²_s`.
    Mixed,
    /// `‖u‖²_λ` only.
    Local,
}

/// `E(u) = ½uᵀQu − Σ_q (1/q)∫|u|^q` restricted to the interior nodes; the
/// node at `R` is pinned to zero.
#[derive(Debug, Clone)]
pub struct Functional {
    q: DMatrix<f64>,
    q_chol: OnceLock<Option<Cholesky<f64, Dyn>>>,
    /// `stiffness − λ·mass` as a tridiagonal matrix: diagonal and the first
    /// off-diagonal.
    b_diag: Vec<f64>,
    b_off: Vec<f64>,
    points: Vec<CellPoint>,
    n: usize,
    powers: Vec<f64>,
}

impl Functional {
    pub fn new(spec: &ProblemSpec, forms: &QuadraticForms, part: QuadraticPart) -> Result<Self> {
        Self::with_powers(spec.lambda, spec.powers(), forms, part)
    }

    pub fn with_powers(
        lambda: f64,
        powers: Vec<f64>,
        forms: &QuadraticForms,
        part: QuadraticPart,
    ) -> Result<Self> {
        let n = forms.grid.len() - 1;
        let mut q = DMatrix::from_fn(n, n, |i, j| {
            forms.stiffness[(i, j)] - lambda * forms.mass[(i, j)]
        });
        let b_diag: Vec<f64> = (0..n).map(|i| q[(i, i)]).collect();
        let b_off: Vec<f64> = (0..n - 1).map(|i| q[(i + 1, i)]).collect();
        if part == QuadraticPart::Mixed {
            for j in 0..n {
                for i in 0..n {
                    q[(i, j)] += forms.nonlocal[(i, j)] + forms.exterior[(i, j)];
                }
            }
        }
        let points = forms.grid.power_quadrature().to_vec();
        Ok(Self {
            q,
            q_chol: OnceLock::new(),
            b_diag,
            b_off,
            points,
            n,
            powers,
        })
    }

    /// Interior unknowns.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Interior values of a profile.
    pub fn restrict(&self, u: &RadialFunction) -> Result<DVector<f64>> {
        if u.values().len() != self.len() + 1 {
            return Err(Error::Mismatch(
                "profile and functional live on different grids".into(),
            ));
        }
        Ok(DVector::from_column_slice(&u.values()[..self.len()]))
    }

    /// Profile with the given interior values and zero at `R`.
    pub fn extend(&self, like: &RadialFunction, x: &DVector<f64>) -> Result<RadialFunction> {
        let mut v = x.as_slice().to_vec();
        v.push(0.0);
        like.with_values(v)
    }

    /// `uᵀQu`.
    pub fn quad(&self, u: &DVector<f64>) -> f64 {
        u.dot(&(&self.q * u))
    }

    /// `‖u‖²_λ`.
    pub fn norm_lambda_sq(&self, u: &DVector<f64>) -> f64 {
        self.tri_mul(u).dot(u)
    }

    /// Interpolated value at a quadrature point; the node at `R` is zero.
    fn at(&self, u: &DVector<f64>, p: &CellPoint) -> f64 {
        let right = if p.cell + 1 < self.n {
            u[p.cell + 1]
        } else {
            0.0
        };
        (1.0 - p.t) * u[p.cell] + p.t * right
    }

    /// `∫|u|^q` for the piecewise linear interpolant.
    pub fn power_integral(&self, u: &DVector<f64>, q: f64) -> f64 {
        self.points
            .iter()
            .map(|p| p.weight * self.at(u, p).abs().powf(q))
            .sum()
    }

    pub fn energy(&self, u: &DVector<f64>) -> f64 {
        0.5 * self.quad(u)
            - self
                .powers
                .iter()
                .map(|&q| self.power_integral(u, q) / q)
                .sum::<f64>()
    }

    /// Coefficient vector of `E′(u)`: `E′(u)[v] = gᵀv`.
    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut g = &self.q * u;
        for p in &self.points {
            let v = self.at(u, p);
            let a = v.abs();
            let s = p.weight * v * self.powers.iter().map(|&q| a.powf(q - 2.0)).sum::<f64>();
            g[p.cell] -= (1.0 - p.t) * s;
            if p.cell + 1 < self.n {
                g[p.cell + 1] -= p.t * s;
            }
        }
        g
    }

    /// `E″(u)`.
    pub fn hessian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut h = self.q.clone();
        for p in &self.points {
            let a = self.at(u, p).abs();
            let s = p.weight
                * self
                    .powers
                    .iter()
                    .map(|&q| (q - 1.0) * a.powf(q - 2.0))
                    .sum::<f64>();
            let (i, l, r) = (p.cell, 1.0 - p.t, p.t);
            h[(i, i)] -= l * l * s;
            if i + 1 < self.n {
                h[(i, i + 1)] -= l * r * s;
                h[(i + 1, i)] -= l * r * s;
                h[(i + 1, i + 1)] -= r * r * s;
            }
        }
        h
    }

    /// `E′(u)[u]`.
    pub fn nehari_value(&self, u: &DVector<f64>) -> f64 {
        self.quad(u)
            - self
                .powers
                .iter()
                .map(|&q| self.power_integral(u, q))
                .sum::<f64>()
    }

    /// `Q⁻¹g`.
    pub fn precondition(&self, g: &DVector<f64>) -> Result<DVector<f64>> {
        let chol = self.q_chol.get_or_init(|| Cholesky::new(self.q.clone()));
        chol.as_ref().map(|c| c.solve(g)).ok_or_else(|| {
            Error::Singular("quadratic form is not positive definite on the grid".into())
        })
    }

    /// Riesz representative of `g` in the `⟨·,·⟩_λ` inner product.
    pub fn riesz(&self, g: &DVector<f64>) -> DVector<f64> {
        // Thomas algorithm; the matrix is symmetric positive definite.
        let n = g.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.b_diag[0];
        c[0] = if n > 1 { self.b_off[0] / denom } else { 0.0 };
        d[0] = g[0] / denom;
        for i in 1..n {
            denom = self.b_diag[i] - self.b_off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.b_off[i] / denom;
            }
            d[i] = (g[i] - self.b_off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = DVector::zeros(n);
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }

    /// Dual norm `sup |gᵀv| / ‖v‖_λ`.
    pub fn dual_norm(&self, g: &DVector<f64>) -> f64 {
        g.dot(&self.riesz(g)).max(0.0).sqrt()
    }

    fn tri_mul(&self, u: &DVector<f64>) -> DVector<f64> {
        let n = u.len();
        DVector::from_fn(n, |i, _| {
            let mut v = self.b_diag[i] * u[i];
            if i > 0 {
                v += self.b_off[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                v += self.b_off[i] * u[i + 1];
            }
            v
        })
    }

    /// `t > 0` with `tu` on the Nehari set `{E′(v)[v] = 0}`.
    pub fn nehari_scale(&self, u: &DVector<f64>) -> Result<f64> {
        let a = self.quad(u);
        let terms: Vec<(f64, f64)> = self
            .powers
            .iter()
            .map(|&q| (q, self.power_integral(u, q)))
            .collect();
        if !(a > 0.0) || terms.iter().all(|(_, b)| !(*b > 0.0)) {
            return Err(domain("Nehari scaling needs a nonzero profile"));
        }
        if let [(q, b)] = terms[..] {
            return Ok((a / b).powf(1.0 / (q - 2.0)));
        }
        // a = Σ b_q t^{q−2}; the right side is increasing in t.
        let f = |t: f64| terms.iter().map(|(q, b)| b * t.powf(q - 2.0)).sum::<f64>() - a;
        let (mut lo, mut hi) = (0.0, 1.0);
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Maximization {
                    lo,
                    hi,
                    reason: "Nehari scale bracket diverged".into(),
                });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Nehari projection `t(u)u`.
    pub fn project(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(u * self.nehari_scale(u)?)
    }
}
