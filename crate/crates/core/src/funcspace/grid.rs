//! Radial grids on `[0, R]` with dual-cell volume weights.

use crate::error::{domain, Result};
use crate::geometry::sphere_area;
use crate::specfun::gauss_legendre;
use serde::{Deserialize, Serialize};

/// Node spacing families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// Geometric growth from a small first step, then uniform.
    GeometricUniform,
}

pub const DEFAULT_R_MAX: f64 = 20.0;
pub const DEFAULT_NODES: usize = 800;
const FIRST_STEP: f64 = 1e-3;
const GROWTH: f64 = 1.08;

/// Nonlocal quadrature points per cell.
pub const POINTS_PER_CELL: usize = 3;

/// Gauss points per cell for integrals of powers of the interpolant.
pub const POWER_POINTS_PER_CELL: usize = 6;

/// Quadrature point inside a cell: the interpolant there is
/// `(1 − t)·u[cell] + t·u[cell + 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPoint {
    pub cell: usize,
    pub t: f64,
    /// Volume weight `ω_{N−1} sinh^{N−1}(r)·dr`.
    pub weight: f64,
}

/// `ω_{N−1} ∫_a^b sinh^{N−1} r dr`.
pub fn shell_volume(dim: usize, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(10);
    let pieces = (((b - a) / 0.25).ceil() as usize).max(1);
    let step = (b - a) / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let lo = a + step * k as f64;
        let (m, h) = (lo + 0.5 * step, 0.5 * step);
        total += h * x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * (m + h * xi).sinh().powi(dim as i32 - 1))
            .sum::<f64>();
    }
    sphere_area(dim) * total
}

/// Hyperbolic volume of the geodesic ball of radius `r`.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    shell_volume(dim, 0.0, r)
}

/// Nodes `0 = r₀ < … < r_n = R` with lumped volume weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    power_points: Vec<CellPoint>,
}

impl RadialGrid {
    /// Grid from explicit nodes; `nodes[0]` must be 0.
    pub fn new(dim: usize, nodes: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!("dimension must be at least 2, got {dim}")));
        }
        if nodes.len() < 3 {
            return Err(domain("a radial grid needs at least 3 nodes"));
        }
        if nodes[0] != 0.0 {
            return Err(domain("the first radial node must be 0"));
        }
        if nodes.iter().any(|r| !r.is_finite()) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain(
                "radial nodes must be finite and strictly increasing",
            ));
        }
        let n = nodes.len();
        let weights = (0..n)
            .map(|k| {
                let lo = if k == 0 {
                    0.0
                } else {
                    0.5 * (nodes[k - 1] + nodes[k])
                };
                let hi = if k + 1 == n {
                    nodes[k]
                } else {
                    0.5 * (nodes[k] + nodes[k + 1])
                };
                shell_volume(dim, lo, hi)
            })
            .collect();
        let power_points = power_points(dim, &nodes);
        Ok(Self {
            dim,
            nodes,
            weights,
            power_points,
        })
    }

    /// `count` equally spaced nodes on `[0, r_max]`.
    pub fn uniform(dim: usize, r_max: f64, count: usize) -> Result<Self> {
        check_extent(r_max, count)?;
        let h = r_max / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| h * i as f64).collect();
        nodes[count - 1] = r_max;
        Self::new(dim, nodes)
    }

    /// Steps `10⁻³·1.08^k` until they reach the uniform step that fills
    /// `[0, r_max]` with exactly `count` nodes.
    pub fn geometric_uniform(dim: usize, r_max: f64, count: usize) -> Result<Self> {
        check_extent(r_max, count)?;
        let steps = count - 1;
        if r_max / steps as f64 <= FIRST_STEP {
            return Self::uniform(dim, r_max, count);
        }
        let mut k = 0;
        loop {
            let geometric_len = FIRST_STEP * (GROWTH.powi(k as i32) - 1.0) / (GROWTH - 1.0);
            let remaining = steps - k;
            let h = (r_max - geometric_len) / remaining as f64;
            if FIRST_STEP * GROWTH.powi(k as i32) >= h || remaining == 1 {
                let mut nodes = Vec::with_capacity(count);
                let mut r = 0.0;
                nodes.push(r);
                for j in 0..k {
                    r += FIRST_STEP * GROWTH.powi(j as i32);
                    nodes.push(r);
                }
                for j in 1..=remaining {
                    nodes.push(geometric_len + h * j as f64);
                }
                nodes[count - 1] = r_max;
                return Self::new(dim, nodes);
            }
            k += 1;
        }
    }

    /// Grid of a given spacing family.
    pub fn with_spacing(dim: usize, r_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        match spacing {
            Spacing::Uniform => Self::uniform(dim, r_max, count),
            Spacing::GeometricUniform => Self::geometric_uniform(dim, r_max, count),
        }
    }

    /// Default grid: 800 geometric-then-uniform nodes on `[0, 20]`.
    pub fn default_for(dim: usize) -> Result<Self> {
        Self::geometric_uniform(dim, DEFAULT_R_MAX, DEFAULT_NODES)
    }

    /// Doubled resolution: every cell split at its midpoint.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.r_max());
        Self::new(self.dim, nodes).expect("refinement keeps a valid grid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lumped weights: exact volume of each node's dual cell.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Cell-wise Gauss rule for `∫ F(u) dV` with `u` the piecewise linear
    /// interpolant of the nodal values.
    pub fn power_quadrature(&self) -> &[CellPoint] {
        &self.power_points
    }

    /// Gauss points used by the nonlocal form, cell by cell.
    pub fn nonlocal_points(&self) -> Vec<f64> {
        let (x, _) = gauss_legendre(POINTS_PER_CELL);
        self.nodes
            .windows(2)
            .flat_map(|w| {
                let (m, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                x.iter().map(move |&xi| m + h * xi).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Index of the cell containing `r` (clamped to the grid).
    pub fn cell_of(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.cells() - 1),
            Err(i) => i.saturating_sub(1).min(self.cells() - 1),
        }
    }
}

fn power_points(dim: usize, nodes: &[f64]) -> Vec<CellPoint> {
    let (x, w) = gauss_legendre(POWER_POINTS_PER_CELL);
    let area = sphere_area(dim);
    let mut out = Vec::with_capacity((nodes.len() - 1) * x.len());
    for (cell, pair) in nodes.windows(2).enumerate() {
        let h = pair[1] - pair[0];
        for (&xi, &wi) in x.iter().zip(&w) {
            let t = 0.5 * (xi + 1.0);
            let r = pair[0] + h * t;
            out.push(CellPoint {
                cell,
                t,
                weight: area * 0.5 * h * wi * r.sinh().powi(dim as i32 - 1),
            });
        }
    }
    out
}

fn check_extent(r_max: f64, count: usize) -> Result<()> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(domain(format!(
            "R_max must be positive and finite, got {r_max}"
        )));
    }
    if count < 3 {
        return Err(domain(format!(
            "a radial grid needs at least 3 nodes, got {count}"
        )));
    }
    Ok(())
}
