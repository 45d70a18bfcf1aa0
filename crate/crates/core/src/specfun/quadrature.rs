//! Deterministic double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh rule with level refinement and, when a
//! level sequence fails to settle, adaptive bisection down to a fixed depth.
//! Half-lines use the exp-sinh rule. Both rules cluster nodes
//! double-exponentially at the endpoints, so integrable endpoint
//! singularities need no special treatment beyond avoiding the endpoint itself.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

const MAX_LEVEL: usize = 8;
const TANH_SINH_TMAX: f64 = 4.0;
const EXP_SINH_TMAX: f64 = 5.0;

/// Tolerances and refinement limits.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth for finite intervals.
    pub max_depth: usize,
    pub max_level: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 30,
            max_level: MAX_LEVEL,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Change of variables applied before a half-line integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    None,
    /// `t = lower + v²`, removing an inverse-square-root singularity at `lower`.
    SqrtEndpoint,
}

/// One abscissa of the reference rule: parameter `t`, distance from the
/// nearest endpoint (as a fraction of the half-width) and weight.
#[derive(Debug, Clone, Copy)]
struct Node {
    complement: f64,
    weight: f64,
}

struct Rule {
    /// levels[0] holds t = 0, 1, 2, ...; later levels hold the odd multiples of h.
    levels: Vec<Vec<Node>>,
}

fn tanh_sinh_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let node = |t: f64| {
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            Node {
                complement: 2.0 * e / (1.0 + e),
                weight: FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e)),
            }
        };
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        levels.push(
            (0..=TANH_SINH_TMAX as usize)
                .map(|k| node(k as f64))
                .collect(),
        );
        for level in 1..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let mut v = Vec::new();
            let mut j = 0usize;
            loop {
                let t = (2 * j + 1) as f64 * h;
                if t > TANH_SINH_TMAX {
                    break;
                }
                v.push(node(t));
                j += 1;
            }
            levels.push(v);
        }
        Rule { levels }
    })
}

/// Nodes `(x, weight)` of the exp-sinh rule on `[0, ∞)`, per level.
fn exp_sinh_rule() -> &'static Vec<Vec<(f64, f64)>> {
    static RULE: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    RULE.get_or_init(|| {
        let node = |t: f64| {
            let x = (FRAC_PI_2 * t.sinh()).exp();
            (x, FRAC_PI_2 * t.cosh() * x)
        };
        let n0 = EXP_SINH_TMAX as i64;
        let mut levels = vec![(-n0..=n0).map(|k| node(k as f64)).collect::<Vec<_>>()];
        for level in 1..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let mut v = Vec::new();
            let kmax = (EXP_SINH_TMAX / h) as i64;
            let mut k = -kmax;
            while k <= kmax {
                if k.rem_euclid(2) == 1 {
                    v.push(node(k as f64 * h));
                }
                k += 1;
            }
            levels.push(v);
        }
        levels
    })
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Level-refined tanh-sinh on `[a, b]`. Returns `(value, error, evals, converged)`.
fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> (f64, f64, usize, bool) {
    let rule = tanh_sinh_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut evals = 0;
    let mut level_sum = |nodes: &[Node], include_center: bool, evals: &mut usize| -> f64 {
        let mut s = 0.0;
        for (i, n) in nodes.iter().enumerate() {
            if n.weight == 0.0 {
                continue;
            }
            let off = half * n.complement;
            if include_center && i == 0 {
                s += n.weight * finite_or_zero(f(mid, half, half));
                *evals += 1;
                continue;
            }
            if off == 0.0 {
                continue;
            }
            let far = 2.0 * half - off;
            s += n.weight * finite_or_zero(f(a + off, off, far));
            s += n.weight * finite_or_zero(f(b - off, far, off));
            *evals += 2;
        }
        s
    };
    let mut sum = level_sum(&rule.levels[0], true, &mut evals);
    let mut estimate = sum * half;
    let mut error = f64::INFINITY;
    let max_level = opts.max_level.min(MAX_LEVEL);
    for level in 1..=max_level {
        let h = 0.5f64.powi(level as i32);
        sum += level_sum(&rule.levels[level], false, &mut evals);
        let next = sum * h * half;
        error = (next - estimate).abs();
        estimate = next;
        if level >= 3 && error <= opts.target(estimate) {
            return (estimate, error, evals, true);
        }
    }
    (estimate, error, evals, false)
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Quadrature> {
    integrate_endpoints(|x, _, _| f(x), a, b, opts)
}

/// Like [`integrate`], but the integrand also receives the exact distances
/// `(x - a, b - x)` to both endpoints, so endpoint singularities can be
/// written without cancellation.
pub fn integrate_endpoints<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error, evaluations, ok) = tanh_sinh(&mut f, a, b, opts);
    if ok {
        return Ok(Quadrature {
            value,
            error,
            evaluations,
        });
    }
    let tol = opts.target(value).max(f64::MIN_POSITIVE);
    let mut stack = vec![(a, b, 0usize, tol)];
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = evaluations;
    while let Some((lo, hi, depth, tol)) = stack.pop() {
        let sub = QuadOptions {
            abs_tol: tol,
            rel_tol: 0.0,
            ..*opts
        };
        let (v, e, n, ok) = tanh_sinh(
            &mut |x, dl, dr| f(x, (lo - a) + dl, (b - hi) + dr),
            lo,
            hi,
            &sub,
        );
        evals += n;
        if ok || e <= tol {
            total += v;
            total_err += e;
        } else if depth + 1 >= opts.max_depth {
            return Err(Error::Quadrature {
                estimate: total + v,
                error: e,
                tol,
            });
        } else {
            let m = 0.5 * (lo + hi);
            stack.push((lo, m, depth + 1, 0.5 * tol));
            stack.push((m, hi, depth + 1, 0.5 * tol));
        }
    }
    Ok(Quadrature {
        value: total,
        error: total_err,
        evaluations: evals,
    })
}

/// Integral over `[lower, ∞)` with the exp-sinh rule and a substitution hook.
/// The integrand receives the point and its exact offset from `lower`.
pub fn integrate_semi_infinite_with<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    lower: f64,
    opts: &QuadOptions,
    substitution: Substitution,
) -> Result<Quadrature> {
    let rule = exp_sinh_rule();
    let mut g = |v: f64| -> f64 {
        match substitution {
            Substitution::None => f(lower + v, v),
            Substitution::SqrtEndpoint => 2.0 * v * f(lower + v * v, v * v),
        }
    };
    let mut evals = 0;
    let mut sum = 0.0;
    let mut estimate = f64::NAN;
    let mut error = f64::INFINITY;
    let max_level = opts.max_level.min(MAX_LEVEL);
    for (level, nodes) in rule.iter().enumerate().take(max_level + 1) {
        for &(x, w) in nodes {
            if w == 0.0 || !w.is_finite() {
                continue;
            }
            let v = g(x);
            evals += 1;
            sum += w * finite_or_zero(v);
        }
        let h = 0.5f64.powi(level as i32);
        let next = sum * h;
        if level > 0 {
            error = (next - estimate).abs();
        }
        estimate = next;
        if level >= 3 && error <= opts.target(estimate) {
            return Ok(Quadrature {
                value: estimate,
                error,
                evaluations: evals,
            });
        }
    }
    Err(Error::Quadrature {
        estimate,
        error,
        tol: opts.target(estimate),
    })
}

/// `∫_lower^∞ f` to absolute tolerance `tol`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(crate::error::domain(
            "quadrature tolerance must be positive",
        ));
    }
    integrate_semi_infinite_with(
        |t, _| f(t),
        lower,
        &QuadOptions::absolute(tol),
        Substitution::None,
    )
    .map(|q| q.value)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
