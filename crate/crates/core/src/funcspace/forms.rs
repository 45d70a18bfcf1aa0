//! Quadratic forms of piecewise-linear radial functions.

use super::function::RadialFunction;
use super::grid::{shell_volume, RadialGrid, POINTS_PER_CELL};
use crate::error::{domain, Error, Result};
use crate::kernel::ReducedKernel;
use crate::specfun::gauss_legendre;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Cell pairs at most this many cells apart (but not adjacent) use
/// refined Gauss rules with `M` evaluated on the fly.
const BAND: usize = 4;
const BAND_POINTS: usize = 8;

/// Discrete forms on all grid nodes.
///
/// `nonlocal` is the regional part `∫∫_{[0,R]²}` of the seminorm and
/// annihilates constants. `exterior` is the interaction `2∫₀^R u² T` of the
/// zero extension with the complement of the ball; the seminorm of the zero
/// extension is `uᵀ(nonlocal + exterior)u`.
#[derive(Debug, Clone)]
pub struct QuadraticForms {
    pub grid: Arc<RadialGrid>,
    pub order: f64,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub nonlocal: DMatrix<f64>,
    pub exterior: DMatrix<f64>,
}

/// `uᵀ A u`.
pub fn quadratic(a: &DMatrix<f64>, u: &[f64]) -> f64 {
    let n = u.len();
    let mut total = 0.0;
    for j in 0..n {
        if u[j] == 0.0 {
            continue;
        }
        let col = a.column(j);
        let mut s = 0.0;
        for i in 0..n {
            s += col[i] * u[i];
        }
        total += u[j] * s;
    }
    total
}

impl QuadraticForms {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `nonlocal + exterior`.
    pub fn seminorm_matrix(&self) -> DMatrix<f64> {
        &self.nonlocal + &self.exterior
    }

    /// Smallest eigenvalue of a symmetric matrix.
    pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
        a.clone().symmetric_eigen().eigenvalues.min()
    }

    /// Relative asymmetry `max |A − Aᵀ| / max |A|` of each form.
    pub fn asymmetry(&self) -> f64 {
        [&self.stiffness, &self.mass, &self.nonlocal, &self.exterior]
            .iter()
            .map(|a| {
                let scale = a.amax().max(f64::MIN_POSITIVE);
                (*a - a.transpose()).amax() / scale
            })
            .fold(0.0, f64::max)
    }
}

struct Cell {
    a: f64,
    b: f64,
}

impl Cell {
    fn h(&self) -> f64 {
        self.b - self.a
    }
}

/// Adds `w · (eᵀu)²` where `e` has entries `coef` at `idx`.
fn add_outer(m: &mut DMatrix<f64>, idx: &[usize], coef: &[f64], w: f64) {
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate() {
            m[(i, j)] += w * (coef[p] * coef[q]);
        }
    }
}

/// Builds stiffness, mass, regional nonlocal and exterior forms.
pub fn assemble_forms(
    grid: Arc<RadialGrid>,
    s: f64,
    kernel: &ReducedKernel,
) -> Result<QuadraticForms> {
    if kernel.dim != grid.dim() {
        return Err(Error::Mismatch(format!(
            "kernel for N = {}, grid for N = {}",
            kernel.dim,
            grid.dim()
        )));
    }
    if kernel.order != s {
        return Err(Error::Mismatch(format!(
            "kernel for s = {}, forms requested for s = {s}",
            kernel.order
        )));
    }
    let points = grid.nonlocal_points();
    if kernel.r_grid != points {
        return Err(Error::Mismatch(format!(
            "kernel sampled on {} points that are not this grid's {} nonlocal points",
            kernel.r_grid.len(),
            points.len()
        )));
    }
    let n = grid.len();
    let dim = grid.dim();
    let nodes = grid.nodes();
    let cells: Vec<Cell> = nodes
        .windows(2)
        .map(|w| Cell { a: w[0], b: w[1] })
        .collect();

    let mut stiffness = DMatrix::zeros(n, n);
    for (c, cell) in cells.iter().enumerate() {
        let v = shell_volume(dim, cell.a, cell.b) / (cell.h() * cell.h());
        add_outer(&mut stiffness, &[c, c + 1], &[1.0, -1.0], v);
    }
    let mut mass = DMatrix::zeros(n, n);
    for p in grid.power_quadrature() {
        add_outer(
            &mut mass,
            &[p.cell, p.cell + 1],
            &[1.0 - p.t, p.t],
            p.weight,
        );
    }

    let nonlocal = assemble_nonlocal(&cells, n, kernel)?;
    let exterior = assemble_exterior(&cells, n, kernel, grid.r_max())?;
    Ok(QuadraticForms {
        grid,
        order: s,
        stiffness,
        mass,
        nonlocal,
        exterior,
    })
}

fn assemble_nonlocal(cells: &[Cell], n: usize, kernel: &ReducedKernel) -> Result<DMatrix<f64>> {
    let model = kernel.model();
    let s = kernel.order;
    // c(x, y) = M(x, y)|x − y|^{1+2s}, smooth up to the diagonal.
    let amp =
        |x: f64, y: f64| -> Result<f64> { Ok(model.m(x, y)? * (x - y).abs().powf(1.0 + 2.0 * s)) };
    let mut out = DMatrix::zeros(n, n);
    let q = POINTS_PER_CELL;
    let (gx, gw) = gauss_legendre(q);
    // Point p = q·c + a: weight and the two local hat values.
    let pw: Vec<f64> = cells
        .iter()
        .flat_map(|c| gw.iter().map(move |w| 0.5 * c.h() * w))
        .collect();
    let hat: Vec<(f64, f64)> = cells
        .iter()
        .flat_map(|_| gx.iter().map(|&x| (0.5 * (1.0 - x), 0.5 * (1.0 + x))))
        .collect();
    let nc = cells.len();

    // Well-separated cells: tensor Gauss on the sampled W.
    for c1 in 0..nc {
        for c2 in c1 + BAND + 1..nc {
            for a in 0..q {
                let p = q * c1 + a;
                for b in 0..q {
                    let r = q * c2 + b;
                    let w = 2.0 * pw[p] * pw[r] * kernel.w[(p, r)];
                    add_outer(
                        &mut out,
                        &[c1, c1 + 1, c2, c2 + 1],
                        &[hat[p].0, hat[p].1, -hat[r].0, -hat[r].1],
                        w,
                    );
                }
            }
        }
    }

    // Near band: refined Gauss with M evaluated directly.
    let (bx, bw) = gauss_legendre(BAND_POINTS);
    for c1 in 0..nc {
        for c2 in c1 + 2..(c1 + BAND + 1).min(nc) {
            let (k1, k2) = (&cells[c1], &cells[c2]);
            for (xa, wa) in bx.iter().zip(&bw) {
                let x = k1.a + 0.5 * k1.h() * (1.0 + xa);
                let wx = 0.5 * k1.h() * wa;
                let tx = (x - k1.a) / k1.h();
                for (yb, wb) in bx.iter().zip(&bw) {
                    let y = k2.a + 0.5 * k2.h() * (1.0 + yb);
                    let wy = 0.5 * k2.h() * wb;
                    let ty = (y - k2.a) / k2.h();
                    let w = 2.0 * wx * wy * model.m(x, y)?;
                    add_outer(
                        &mut out,
                        &[c1, c1 + 1, c2, c2 + 1],
                        &[1.0 - tx, tx, -(1.0 - ty), -ty],
                        w,
                    );
                }
            }
        }
    }

    // Same and adjacent cells: product integration of the singular factor
    // |r₁ − r₂|^{−1−2s} against the smooth amplitude.
    for (c, cell) in cells.iter().enumerate() {
        let sc = same_cell_integral(&amp, s, cell)?;
        let h = cell.h();
        add_outer(&mut out, &[c, c + 1], &[-1.0 / h, 1.0 / h], sc);
    }
    for c in 0..nc.saturating_sub(1) {
        let (k1, k2) = (&cells[c], &cells[c + 1]);
        let [i11, i12, i22] = adjacent_integrals(&amp, s, k1.h(), k2.h(), k1.b)?;
        let d1 = [-1.0 / k1.h(), 1.0 / k1.h(), 0.0];
        let d2 = [0.0, -1.0 / k2.h(), 1.0 / k2.h()];
        let idx = [c, c + 1, c + 2];
        for i in 0..3 {
            for j in 0..3 {
                out[(idx[i], idx[j])] += 2.0
                    * (i11 * d1[i] * d1[j]
                        + i12 * (d1[i] * d2[j] + d2[i] * d1[j])
                        + i22 * d2[i] * d2[j]);
            }
        }
    }
    symmetrize(&mut out);
    Ok(out)
}

/// `∫∫_{cell²} (x−y)² c(x, y) |x−y|^{−1−2s}`.
fn same_cell_integral(amp: &impl Fn(f64, f64) -> Result<f64>, s: f64, cell: &Cell) -> Result<f64> {
    let h = cell.h();
    let e = 2.0 - 2.0 * s;
    let (wx, ww) = gauss_legendre(8);
    let (mx, mw) = gauss_legendre(4);
    let mut total = 0.0;
    for (xi, wi) in wx.iter().zip(&ww) {
        // t = h·w^{1/(2−2s)} absorbs the t^{1−2s} weight.
        let w01 = 0.5 * (1.0 + xi);
        let t = h * w01.powf(1.0 / e);
        let (lo, hi) = (cell.a + 0.5 * t, cell.b - 0.5 * t);
        let (m, hm) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut inner = 0.0;
        for (x, w) in mx.iter().zip(&mw) {
            let mid = m + hm * x;
            inner += w * amp(mid - 0.5 * t, mid + 0.5 * t)?;
        }
        total += 0.5 * wi * inner * hm;
    }
    Ok(2.0 * total * h.powf(e) / e)
}

/// `∫₀^{h₁}∫₀^{h₂} {ξ², ξη, η²} (ξ+η)^{−1−2s} c(r_c − ξ, r_c + η) dη dξ`.
fn adjacent_integrals(
    amp: &impl Fn(f64, f64) -> Result<f64>,
    s: f64,
    h1: f64,
    h2: f64,
    rc: f64,
) -> Result<[f64; 3]> {
    let (px, pw) = gauss_legendre(12);
    let (rx, rw) = gauss_legendre(6);
    let e = 3.0 - 2.0 * s;
    let split = (h2 / h1).atan();
    let mut out = [0.0; 3];
    for (lo, hi) in [(0.0, split), (split, std::f64::consts::FRAC_PI_2)] {
        let (pm, ph) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in px.iter().zip(&pw) {
            let phi: f64 = pm + ph * x;
            let (c, sn) = (phi.cos(), phi.sin());
            let rmax = if phi < split { h1 / c } else { h2 / sn };
            let ang = (c + sn).powf(-1.0 - 2.0 * s);
            // ρ = ρ_max·w^{1/(3−2s)} absorbs ρ^{2−2s}.
            let mut radial = 0.0;
            for (y, v) in rx.iter().zip(&rw) {
                let rho = rmax * (0.5 * (1.0 + y)).powf(1.0 / e);
                radial += 0.5 * v * amp(rc - rho * c, rc + rho * sn)?;
            }
            radial *= rmax.powf(e) / e;
            let base = ph * w * ang * radial;
            out[0] += base * c * c;
            out[1] += base * c * sn;
            out[2] += base * sn * sn;
        }
    }
    Ok(out)
}

/// `2 ∫₀^R u² T` as a tridiagonal form.
fn assemble_exterior(
    cells: &[Cell],
    n: usize,
    kernel: &ReducedKernel,
    radius: f64,
) -> Result<DMatrix<f64>> {
    let model = kernel.model();
    let mut out = DMatrix::zeros(n, n);
    let (gx, gw) = gauss_legendre(4);
    let (lx, lw) = gauss_legendre(8);
    let nc = cells.len();
    for (c, cell) in cells.iter().enumerate() {
        let h = cell.h();
        let mut add = |x: f64, w: f64| -> Result<()> {
            let t = model.exterior_tail(x, radius)?;
            let tx = (x - cell.a) / h;
            add_outer(&mut out, &[c, c + 1], &[1.0 - tx, tx], 2.0 * w * t);
            Ok(())
        };
        if c + 1 == nc {
            // x = R − h·v² clusters points at the boundary.
            for (v, w) in lx.iter().zip(&lw) {
                let v01 = 0.5 * (1.0 + v);
                add(radius - h * v01 * v01, 0.5 * w * 2.0 * h * v01)?;
            }
        } else {
            for (v, w) in gx.iter().zip(&gw) {
                add(cell.a + 0.5 * h * (1.0 + v), 0.5 * h * w)?;
            }
        }
    }
    symmetrize(&mut out);
    Ok(out)
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn check_grid(u: &RadialFunction, forms: &QuadraticForms) -> Result<()> {
    if u.values().len() != forms.grid.len() || **u.grid() != *forms.grid {
        return Err(Error::Mismatch(
            "function and forms live on different grids".into(),
        ));
    }
    Ok(())
}

/// `‖u‖²_λ = uᵀ(stiffness − λ·mass)u` for `λ < (N−1)²/4`.
pub fn norm_lambda_sq(u: &RadialFunction, lambda: f64, forms: &QuadraticForms) -> Result<f64> {
    check_grid(u, forms)?;
    let bottom = spectral_bottom(forms.dim());
    if !(lambda < bottom) {
        return Err(domain(format!(
            "λ = {lambda} must be below (N−1)²/4 = {bottom}"
        )));
    }
    Ok(quadratic(&forms.stiffness, u.values()) - lambda * quadratic(&forms.mass, u.values()))
}

/// `(N−1)²/4`.
pub fn spectral_bottom(dim: usize) -> f64 {
    let a = dim as f64 - 1.0;
    0.25 * a * a
}

/// `[u]²_s` of the zero extension of `u` beyond `R`.
pub fn seminorm_s_sq(u: &RadialFunction, forms: &QuadraticForms) -> Result<f64> {
    check_grid(u, forms)?;
    Ok(quadratic(&forms.nonlocal, u.values()) + quadratic(&forms.exterior, u.values()))
}

/// Regional part `∫∫_{[0,R]²}` of the seminorm.
pub fn regional_seminorm_sq(u: &RadialFunction, forms: &QuadraticForms) -> Result<f64> {
    check_grid(u, forms)?;
    Ok(quadratic(&forms.nonlocal, u.values()))
}

/// `∫|∇u|²`.
pub fn dirichlet_energy(u: &RadialFunction, forms: &QuadraticForms) -> Result<f64> {
    check_grid(u, forms)?;
    Ok(quadratic(&forms.stiffness, u.values()))
}
