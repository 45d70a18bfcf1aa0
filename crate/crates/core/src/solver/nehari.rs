//! Minimization on the Nehari set: preconditioned gradient steps with
//! Armijo backtracking, then Newton polishing.

use super::functional::Functional;
use crate::error::{Error, Result};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Iteration controls shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Residual tolerance relative to `‖u‖_λ`.
    pub tol: f64,
    pub max_iter: usize,
    /// Symmetrize every this many gradient iterations.
    pub rearrange_every: usize,
    /// Gradient iterations stop at this relative residual and Newton takes over.
    pub newton_switch: f64,
    pub max_newton: usize,
    /// Nodes of discretized mountain-pass paths.
    pub path_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 2000,
            rearrange_every: 5,
            newton_switch: 1e-3,
            max_newton: 30,
            path_nodes: 32,
        }
    }
}

/// Result of a Nehari minimization.
#[derive(Debug, Clone)]
pub struct NehariResult {
    pub u: DVector<f64>,
    pub energy: f64,
    /// `E′(u)[u]`.
    pub nehari_value: f64,
    /// Dual norm of `E′(u)`.
    pub residual: f64,
    pub norm_lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every accepted iterate.
    pub history: Vec<f64>,
    /// Largest `G′(u)[u]` seen on the Nehari set, with `G(u) = E′(u)[u]`.
    pub max_nehari_derivative: f64,
}

/// `G′(u)[u] = 2uᵀQu − Σ q∫|u|^q`.
pub fn nehari_derivative(f: &Functional, u: &DVector<f64>) -> f64 {
    2.0 * f.quad(u)
        - f.powers()
            .iter()
            .map(|&q| q * f.power_integral(u, q))
            .sum::<f64>()
}

/// Maps an iterate to its symmetrized representative.
pub type Symmetrizer<'a> = dyn Fn(&DVector<f64>) -> Result<DVector<f64>> + 'a;

/// Minimizes `E` over its Nehari set starting from `init`. `symmetrize`,
/// when given, maps an iterate to its symmetrized representative and is
/// applied every `rearrange_every` iterations if it does not raise the energy.
pub fn minimize_on_nehari(
    f: &Functional,
    init: &DVector<f64>,
    opts: &SolverOptions,
    symmetrize: Option<&Symmetrizer<'_>>,
) -> Result<NehariResult> {
    let mut u = f.project(init)?;
    let mut e = f.energy(&u);
    let mut history = vec![e];
    let mut max_gd = nehari_derivative(f, &u);
    let mut tau: f64 = 1.0;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let g = f.gradient(&u);
        let norm = f.norm_lambda_sq(&u).sqrt();
        if f.dual_norm(&g) <= opts.newton_switch * norm {
            break;
        }
        iterations += 1;
        let d = f.precondition(&g)?;
        let slope = g.dot(&d);
        let mut accepted = false;
        while tau > 1e-12 {
            let cand = f.project(&(&u - &d * tau))?;
            let ec = f.energy(&cand);
            if ec <= e - 1e-4 * tau * slope {
                u = cand;
                e = ec;
                accepted = true;
                tau = (2.0 * tau).min(4.0);
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            break;
        }
        if let Some(sym) = symmetrize {
            if opts.rearrange_every > 0 && iterations % opts.rearrange_every == 0 {
                let cand = f.project(&sym(&u)?)?;
                let ec = f.energy(&cand);
                if ec <= e + 1e-12 * e.abs() {
                    u = cand;
                    e = ec;
                }
            }
        }
        history.push(e);
        max_gd = max_gd.max(nehari_derivative(f, &u));
    }

    let (polished, _, steps) = newton_polish(f, &u, 1e-3 * opts.tol, opts.max_newton);
    iterations += steps;
    u = polished;
    let mut converged = false;
    u = f.project(&u)?;
    let g = f.gradient(&u);
    let residual = f.dual_norm(&g);
    let norm_sq = f.norm_lambda_sq(&u);
    let nehari_value = f.nehari_value(&u);
    if residual <= opts.tol * norm_sq.sqrt() && nehari_value.abs() <= opts.tol * norm_sq {
        converged = true;
    }
    let energy = f.energy(&u);
    if !energy.is_finite() {
        return Err(Error::Singular(
            "Nehari iteration produced a non-finite energy".into(),
        ));
    }
    history.push(energy);
    Ok(NehariResult {
        u,
        energy,
        nehari_value,
        residual,
        norm_lambda: norm_sq.sqrt(),
        iterations,
        converged,
        history,
        max_nehari_derivative: max_gd,
    })
}

/// Newton iteration for `E′(u) = 0` from `start`, with residual-decrease
/// damping. Returns the final point and its dual residual.
pub fn newton_polish(
    f: &Functional,
    start: &DVector<f64>,
    tol: f64,
    max_steps: usize,
) -> (DVector<f64>, f64, usize) {
    let mut u = start.clone();
    let mut res = f.dual_norm(&f.gradient(&u));
    let mut steps = 0;
    while steps < max_steps {
        let norm = f.norm_lambda_sq(&u).sqrt();
        if res <= tol * norm {
            break;
        }
        let g = f.gradient(&u);
        let Some(step) = f.hessian(&u).lu().solve(&g) else {
            break;
        };
        let mut damp = 1.0;
        let mut improved = false;
        for _ in 0..10 {
            let cand = &u - &step * damp;
            let r = f.dual_norm(&f.gradient(&cand));
            if r < res {
                u = cand;
                res = r;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        steps += 1;
        if !improved {
            break;
        }
    }
    (u, res, steps)
}
