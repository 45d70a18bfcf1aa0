//! Mountain-pass levels by path deformation.
//!
//! A discretized path from `0` to a fixed endpoint of negative energy is
//! relaxed by preconditioned steepest descent, re-spaced to equal arc length,
//! while its highest node climbs along the path tangent. The highest node
//! converges to a mountain-pass critical point and is polished by Newton.

use super::functional::Functional;
use super::nehari::newton_polish;
use crate::error::{domain, Result};
use nalgebra::DVector;

const STEP: f64 = 0.2;
/// Largest node displacement per iteration relative to the node's norm.
const MAX_MOVE: f64 = 0.05;

/// Outcome of a path deformation.
#[derive(Debug, Clone)]
pub struct PathResult {
    /// Maximum of the energy along the final path.
    pub level: f64,
    /// Highest node after Newton polishing.
    pub saddle: DVector<f64>,
    pub saddle_energy: f64,
    /// Dual residual at the saddle.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Path maximum before any deformation.
    pub initial_level: f64,
    /// Final path nodes and their energies.
    pub nodes: Vec<DVector<f64>>,
    pub energies: Vec<f64>,
    /// Path maximum after every deformation step.
    pub history: Vec<f64>,
}

fn q_norm(f: &Functional, v: &DVector<f64>) -> f64 {
    f.quad(v).max(0.0).sqrt()
}

/// Re-spaces nodes `lo..=hi` to equal arc length in the `Q` norm, keeping both ends.
fn respace(f: &Functional, path: &mut [DVector<f64>], lo: usize, hi: usize) {
    if hi <= lo + 1 {
        return;
    }
    let seg = &path[lo..=hi];
    let mut cum = vec![0.0];
    for w in seg.windows(2) {
        cum.push(cum.last().unwrap() + q_norm(f, &(&w[1] - &w[0])));
    }
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return;
    }
    let old: Vec<DVector<f64>> = seg.to_vec();
    let count = hi - lo;
    let mut j = 0;
    for k in 1..count {
        let target = total * k as f64 / count as f64;
        while j + 1 < cum.len() - 1 && cum[j + 1] < target {
            j += 1;
        }
        let span = cum[j + 1] - cum[j];
        let t = if span > 0.0 {
            (target - cum[j]) / span
        } else {
            0.0
        };
        path[lo + k] = &old[j] * (1.0 - t) + &old[j + 1] * t;
    }
}

/// Deforms the segment path from 0 to `end` (with `E(end) < 0`) over
/// `nodes` nodes and returns the mountain-pass level.
pub fn mountain_pass(
    f: &Functional,
    end: &DVector<f64>,
    nodes: usize,
    tol: f64,
    max_iter: usize,
    newton_switch: f64,
) -> Result<PathResult> {
    if nodes < 3 {
        return Err(domain("a path needs at least 3 nodes"));
    }
    if !(f.energy(end) < 0.0) {
        return Err(domain("the path endpoint must have negative energy"));
    }
    let k_last = nodes - 1;
    let mut path: Vec<DVector<f64>> = (0..nodes)
        .map(|k| end * (k as f64 / k_last as f64))
        .collect();
    let mut energies: Vec<f64> = path.iter().map(|z| f.energy(z)).collect();
    let initial_level = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let argmax = |e: &[f64]| (1..k_last).max_by(|&a, &b| e[a].total_cmp(&e[b])).unwrap();

    let mut iterations = 0;
    let mut top = argmax(&energies);
    let mut history = vec![initial_level];
    while iterations < max_iter {
        let g_top = f.gradient(&path[top]);
        let norm_top = f.norm_lambda_sq(&path[top]).sqrt();
        if f.dual_norm(&g_top) <= newton_switch * norm_top {
            break;
        }
        iterations += 1;
        // Unit tangent at the top node in the Q inner product.
        let mut tangent = &path[top + 1] - &path[top - 1];
        let tn = q_norm(f, &tangent);
        if tn > 0.0 {
            tangent /= tn;
        }
        for k in 1..k_last {
            // Nodes below the base level cannot carry the maximum; moving
            // them only lets them run off to -infinity.
            if k != top && energies[k] < 0.0 {
                continue;
            }
            let g = if k == top {
                g_top.clone()
            } else {
                f.gradient(&path[k])
            };
            let mut d = f.precondition(&g)?;
            if k == top {
                // Climb along the tangent, descend across it.
                let along = g.dot(&tangent);
                d -= &tangent * (2.0 * along);
            }
            let size = q_norm(f, &d) * STEP;
            let cap = MAX_MOVE * q_norm(f, &path[k]).max(1e-300);
            let h = if size > cap { STEP * cap / size } else { STEP };
            path[k] -= d * h;
        }
        respace(f, &mut path, 0, top);
        respace(f, &mut path, top, k_last);
        energies = path.iter().map(|z| f.energy(z)).collect();
        top = argmax(&energies);
        history.push(energies[top].max(0.0));
    }

    let (saddle, residual, steps) = newton_polish(f, &path[top], tol, 30);
    iterations += steps;
    let saddle_energy = f.energy(&saddle);
    // The polished node replaces the top node if it does not leave the path
    // neighbourhood; the level is the maximum over the resulting path.
    let moved = q_norm(f, &(&saddle - &path[top]));
    let spacing = q_norm(f, &(&path[top + 1] - &path[top - 1]));
    if moved <= spacing {
        path[top] = saddle.clone();
        energies[top] = saddle_energy;
    }
    let level = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let converged = residual <= tol * f.norm_lambda_sq(&saddle).sqrt() && moved <= spacing;
    Ok(PathResult {
        level,
        saddle,
        saddle_energy,
        residual,
        iterations,
        converged,
        initial_level,
        nodes: path,
        energies,
        history,
    })
}

/// `max_{ζ ≥ 0} E(ζu)` by bracketing and golden-section search; the
/// leftmost maximizer wins on plateaus. Returns `(ζ*, value)`.
pub fn maximize_along_ray(f: &Functional, u: &DVector<f64>) -> Result<(f64, f64)> {
    let phi = |z: f64| f.energy(&(u * z));
    if u.iter().all(|v| *v == 0.0) {
        return Err(domain("ray maximization needs a nonzero direction"));
    }
    // Grow the bracket until the energy falls below its best sample.
    let mut hi = 1.0;
    let mut best = (0.0, 0.0);
    loop {
        let v = phi(hi);
        if v > best.1 {
            best = (hi, v);
        }
        if v < 0.0 && hi > 2.0 * best.0 {
            break;
        }
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e150 {
            return Err(crate::error::Error::Maximization {
                lo: 0.0,
                hi,
                reason: "energy stays nonnegative along the ray".into(),
            });
        }
    }
    // Grid then golden section around the best grid point.
    let grid = 64;
    let mut k_best = 0;
    let mut v_best = 0.0;
    for k in 1..=grid {
        let v = phi(hi * k as f64 / grid as f64);
        if v > v_best {
            v_best = v;
            k_best = k;
        }
    }
    if k_best == 0 {
        return Err(crate::error::Error::Maximization {
            lo: 0.0,
            hi,
            reason: "no positive energy on the ray".into(),
        });
    }
    let (mut a, mut b) = (
        hi * (k_best - 1) as f64 / grid as f64,
        hi * (k_best + 1).min(grid) as f64 / grid as f64,
    );
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if b - a <= 1e-14 * b {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    let z = 0.5 * (a + b);
    Ok((z, phi(z)))
}
