//! Ground states of the subcritical problem, mountain-pass solutions of the
//! critically perturbed problem, and checks of their qualitative properties.

mod functional;
mod nehari;
mod path;
mod problem;
mod report;

pub use functional::{Functional, QuadraticPart};
pub use nehari::{
    minimize_on_nehari, nehari_derivative, newton_polish, NehariResult, SolverOptions,
};
pub use path::{maximize_along_ray, mountain_pass, PathResult};
pub use problem::{Mode, ProblemSpec};
pub use report::SolveReport;

use crate::error::{domain, Error, Result};
use crate::funcspace::{
    concentrating_profile, estimate_local_critical_constant, estimate_mixed_constant,
    schwarz_rearrange, seminorm_s_sq, QuadraticForms, RadialFunction,
};
use nalgebra::DVector;

fn require_mode(spec: &ProblemSpec, mode: Mode) -> Result<()> {
    spec.validate()?;
    if spec.mode != mode {
        return Err(domain(format!(
            "this functional needs mode {mode:?}, got {:?}",
            spec.mode
        )));
    }
    Ok(())
}

fn mixed(spec: &ProblemSpec, forms: &QuadraticForms) -> Result<Functional> {
    if spec.dim != forms.dim() {
        return Err(Error::Mismatch(format!(
            "problem for N = {}, forms for N = {}",
            spec.dim,
            forms.dim()
        )));
    }
    if spec.s != forms.order {
        return Err(Error::Mismatch(format!(
            "problem for s = {}, forms for s = {}",
            spec.s, forms.order
        )));
    }
    Functional::new(spec, forms, QuadraticPart::Mixed)
}

fn energy(u: &RadialFunction, spec: &ProblemSpec, forms: &QuadraticForms) -> Result<f64> {
    let f = mixed(spec, forms)?;
    Ok(f.energy(&f.restrict(u)?))
}

fn gradient(
    u: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
) -> Result<RadialFunction> {
    let f = mixed(spec, forms)?;
    let g = f.gradient(&f.restrict(u)?);
    f.extend(u, &f.riesz(&g))
}

/// `I(u) = ½‖u‖²_λ + ½[u]²_s − (1/(p+1))∫|u|^{p+1}` over profiles vanishing at `R`.
pub fn energy_i(u: &RadialFunction, spec: &ProblemSpec, forms: &QuadraticForms) -> Result<f64> {
    require_mode(spec, Mode::Subcritical)?;
    energy(u, spec, forms)
}

/// Riesz representative of `I′(u)` in `⟨·,·⟩_λ`, zero at `R`.
pub fn gradient_i(
    u: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
) -> Result<RadialFunction> {
    require_mode(spec, Mode::Subcritical)?;
    gradient(u, spec, forms)
}

/// `J(u) = I(u) − (1/2*)∫|u|^{2*}`.
pub fn energy_j(u: &RadialFunction, spec: &ProblemSpec, forms: &QuadraticForms) -> Result<f64> {
    require_mode(spec, Mode::CriticalPerturbed)?;
    energy(u, spec, forms)
}

/// Riesz representative of `J′(u)` in `⟨·,·⟩_λ`, zero at `R`.
pub fn gradient_j(
    u: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
) -> Result<RadialFunction> {
    require_mode(spec, Mode::CriticalPerturbed)?;
    gradient(u, spec, forms)
}

/// Scale `t(u)` placing `t(u)u` on the Nehari set of the problem's functional.
/// For the subcritical energy this is `((‖u‖²_λ + [u]²_s)/∫|u|^{p+1})^{1/(p−1)}`.
pub fn nehari_scale(u: &RadialFunction, spec: &ProblemSpec, forms: &QuadraticForms) -> Result<f64> {
    spec.validate()?;
    let f = mixed(spec, forms)?;
    f.nehari_scale(&f.restrict(u)?)
}

/// `t(u)u`.
pub fn nehari_project(
    u: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
) -> Result<RadialFunction> {
    Ok(u.scaled(nehari_scale(u, spec, forms)?))
}

/// Default initial guess `exp(−r²)`, zero at `R`.
pub fn default_initial_guess(forms: &QuadraticForms) -> RadialFunction {
    let r_max = forms.grid.r_max();
    RadialFunction::from_fn(forms.grid.clone(), |r| {
        if r < r_max {
            (-r * r).exp()
        } else {
            0.0
        }
    })
    .expect("finite profile")
}

fn check_positive_input(u: &RadialFunction) -> Result<()> {
    if u.is_zero() {
        return Err(domain("the initial profile is identically zero"));
    }
    if !(u.max_value() > 0.0) {
        return Err(domain("the initial profile has no positive part"));
    }
    Ok(())
}

/// `|u|`, rearranged, pinned to zero at `R`.
fn symmetrizer<'a>(
    f: &'a Functional,
    like: &'a RadialFunction,
) -> impl Fn(&DVector<f64>) -> Result<DVector<f64>> + 'a {
    move |x| {
        let v = f.extend(like, x)?.abs();
        f.restrict(&schwarz_rearrange(&v)?)
    }
}

fn nan_report(solution: RadialFunction, r: &NehariResult) -> SolveReport {
    SolveReport {
        solution,
        energy: r.energy,
        nehari_value: r.nehari_value,
        residual: r.residual,
        c_star: r.energy,
        mp_level_m: f64::NAN,
        beta: f64::NAN,
        mp_radius: f64::NAN,
        threshold: f64::NAN,
        iterations: r.iterations,
        converged: r.converged,
    }
}

/// Subcritical ground state and the minimization trace.
#[derive(Debug, Clone)]
pub struct SubcriticalSolution {
    pub report: SolveReport,
    pub trace: NehariResult,
}

/// Minimizes `I` on its Nehari set. Iterates are replaced every
/// `rearrange_every` steps by the projection of their rearranged absolute
/// value. The report carries `c_star = I(u)`; the mountain-pass fields are
/// NaN until filled by [`mountain_pass_level_subcritical`] and friends.
pub fn solve_subcritical(
    spec: &ProblemSpec,
    init: &RadialFunction,
    forms: &QuadraticForms,
    opts: &SolverOptions,
) -> Result<SubcriticalSolution> {
    require_mode(spec, Mode::Subcritical)?;
    check_positive_input(init)?;
    let f = mixed(spec, forms)?;
    let sym = symmetrizer(&f, init);
    let trace = minimize_on_nehari(&f, &f.restrict(&init.abs())?, opts, Some(&sym))?;
    let solution = f.extend(init, &trace.u)?;
    Ok(SubcriticalSolution {
        report: nan_report(solution, &trace),
        trace,
    })
}

/// Mountain-pass level of `I` by path deformation.
#[derive(Debug, Clone)]
pub struct MountainPassLevel {
    pub level: f64,
    /// Maximum over the undeformed segment `t ↦ tTu`.
    pub segment_level: f64,
    /// Endpoint scale `T` with `I(Tu) < 0`.
    pub endpoint_scale: f64,
    pub path: PathResult,
}

/// `c = inf_γ max_t I(γ(t))`, starting from the segment `t ↦ tT·direction`.
/// `T` is doubled until `I(T·direction) < 0`.
pub fn mountain_pass_level_subcritical(
    spec: &ProblemSpec,
    direction: &RadialFunction,
    forms: &QuadraticForms,
    opts: &SolverOptions,
) -> Result<MountainPassLevel> {
    require_mode(spec, Mode::Subcritical)?;
    check_positive_input(direction)?;
    let f = mixed(spec, forms)?;
    let u = f.restrict(direction)?;
    let mut scale = f.nehari_scale(&u)?;
    for _ in 0..60 {
        if f.energy(&(&u * scale)) < 0.0 {
            break;
        }
        scale *= 2.0;
    }
    if !(f.energy(&(&u * scale)) < 0.0) {
        return Err(domain("no endpoint of negative energy found along the ray"));
    }
    let path = mountain_pass(
        &f,
        &(&u * scale),
        opts.path_nodes,
        opts.tol,
        opts.max_iter,
        opts.newton_switch,
    )?;
    Ok(MountainPassLevel {
        level: path.level,
        segment_level: path.initial_level,
        endpoint_scale: scale,
        path,
    })
}

/// `S_{λ,p} = inf ‖u‖²_λ / ‖u‖²_{p+1}` on the grid, from the minimizer of the
/// local energy on its Nehari set.
pub fn local_sobolev_constant(
    spec: &ProblemSpec,
    forms: &QuadraticForms,
    opts: &SolverOptions,
) -> Result<f64> {
    spec.validate()?;
    let f = Functional::with_powers(spec.lambda, vec![spec.p + 1.0], forms, QuadraticPart::Local)?;
    let init = default_initial_guess(forms);
    let sym = symmetrizer(&f, &init);
    let r = minimize_on_nehari(&f, &f.restrict(&init)?, opts, Some(&sym))?;
    let q = spec.p + 1.0;
    let den = f.power_integral(&r.u, q).powf(2.0 / q);
    Ok(f.norm_lambda_sq(&r.u) / den)
}

/// Lower bound `β` for `c` and the sphere radius `r` where it holds:
/// `r = ((p+1)/4 · S^{(p+1)/2})^{1/(p−1)}`, `β = ¼((p+1)S^{(p+1)/2}/4)^{2/(p−1)}`.
pub fn subcritical_lower_bound(s_lp: f64, p: f64) -> (f64, f64) {
    let base = (p + 1.0) * s_lp.powf(0.5 * (p + 1.0)) / 4.0;
    (
        0.25 * base.powf(2.0 / (p - 1.0)),
        base.powf(1.0 / (p - 1.0)),
    )
}

/// `(β, ρ)` with `J ≥ β` on the sphere `‖u‖_λ = ρ`, from
/// `J(u) ≥ ½ρ² − (1/2*)(ρ²/S_c)^{2*/2} − (1/(p+1))(ρ²/S_p)^{(p+1)/2}`
/// maximized over `ρ`.
pub fn critical_geometry(spec: &ProblemSpec, s_lp: f64, s_crit: f64) -> (f64, f64) {
    let crit = spec.critical_exponent();
    let q = spec.p + 1.0;
    let lower = |rho: f64| {
        let t = rho * rho;
        0.5 * t - (t / s_crit).powf(0.5 * crit) / crit - (t / s_lp).powf(0.5 * q) / q
    };
    // Unimodal in ρ: golden section on a bracket that ends below zero.
    let mut hi = 1.0;
    while lower(hi) > 0.0 {
        hi *= 2.0;
    }
    let (mut a, mut b) = (0.0, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if lower(c) >= lower(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let rho = 0.5 * (a + b);
    (lower(rho), rho)
}

/// Threshold `(1/N)·Ŝ^{N/2}` of the compactness condition.
pub fn threshold_level(dim: usize, s_hat: f64) -> f64 {
    s_hat.powf(0.5 * dim as f64) / dim as f64
}

/// Constants entering the critical problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalConstants {
    /// Estimate of `S_{λ,s}`.
    pub s_hat: f64,
    /// Local `S_{λ,p}`.
    pub s_lp: f64,
    /// Local critical constant `S_{λ,2*−1}`.
    pub s_crit: f64,
    pub threshold: f64,
    pub beta: f64,
    pub rho: f64,
}

/// Estimates every constant needed by [`check_threshold`] and [`solve_critical`].
pub fn critical_constants(
    spec: &ProblemSpec,
    forms: &QuadraticForms,
    opts: &SolverOptions,
) -> Result<CriticalConstants> {
    spec.validate()?;
    let s_hat = estimate_mixed_constant(spec.lambda, forms)?.estimate;
    let s_crit = estimate_local_critical_constant(spec.lambda, forms)?.estimate;
    let s_lp = local_sobolev_constant(spec, forms, opts)?;
    let (beta, rho) = critical_geometry(spec, s_lp, s_crit);
    Ok(CriticalConstants {
        s_hat,
        s_lp,
        s_crit,
        threshold: threshold_level(spec.dim, s_hat),
        beta,
        rho,
    })
}

/// Result of the compactness-condition check along one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCheck {
    pub sup_value: f64,
    /// Maximizing `ζ`.
    pub zeta: f64,
    pub threshold: f64,
    pub passes: bool,
}

/// `sup_{ζ ≥ 0} J(ζu₀)` against `(1/N)·Ŝ^{N/2}`.
pub fn check_threshold(
    u0: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
    s_hat: f64,
) -> Result<ThresholdCheck> {
    require_mode(spec, Mode::CriticalPerturbed)?;
    check_positive_input(u0)?;
    if u0.min_value() < 0.0 {
        return Err(domain("the threshold profile must be nonnegative"));
    }
    let f = mixed(spec, forms)?;
    let (zeta, sup_value) = maximize_along_ray(&f, &f.restrict(u0)?)?;
    let threshold = threshold_level(spec.dim, s_hat);
    Ok(ThresholdCheck {
        sup_value,
        zeta,
        threshold,
        passes: sup_value < threshold,
    })
}

/// One member of the threshold search.
#[derive(Debug, Clone)]
pub struct ThresholdCandidate {
    pub label: String,
    pub profile: RadialFunction,
    pub check: ThresholdCheck,
}

/// Profiles tried by [`search_threshold_profile`], best first.
#[derive(Debug, Clone)]
pub struct ThresholdSearch {
    pub candidates: Vec<ThresholdCandidate>,
    pub satisfiable: bool,
}

impl ThresholdSearch {
    pub fn best(&self) -> &ThresholdCandidate {
        &self.candidates[0]
    }
}

/// Searches Gaussian bumps `exp(−(r/w)²)`, concentrating profiles and the
/// optional `extra` profiles for the smallest `sup_ζ J(ζu₀)`.
pub fn search_threshold_profile(
    spec: &ProblemSpec,
    forms: &QuadraticForms,
    s_hat: f64,
    extra: &[(String, RadialFunction)],
) -> Result<ThresholdSearch> {
    require_mode(spec, Mode::CriticalPerturbed)?;
    let grid = forms.grid.clone();
    let r_max = grid.r_max();
    let mut profiles: Vec<(String, RadialFunction)> = Vec::new();
    for k in 0..25 {
        let w = 0.05 * 100f64.powf(k as f64 / 24.0);
        let u = RadialFunction::from_fn(grid.clone(), |r| {
            if r < r_max {
                (-(r / w).powi(2)).exp()
            } else {
                0.0
            }
        })?;
        profiles.push((format!("gaussian w={w:.4}"), u));
    }
    for k in 0..13 {
        let eps = 0.01 * 2f64.powf(k as f64 / 2.0);
        let u = RadialFunction::from_fn(grid.clone(), |r| concentrating_profile(spec.dim, eps, r))?;
        profiles.push((format!("concentrating eps={eps:.4}"), u));
    }
    profiles.extend(extra.iter().cloned());
    let mut candidates = profiles
        .into_iter()
        .filter(|(_, u)| !u.is_zero())
        .map(|(label, profile)| {
            let check = check_threshold(&profile, spec, forms, s_hat)?;
            Ok(ThresholdCandidate {
                label,
                profile,
                check,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| a.check.sup_value.total_cmp(&b.check.sup_value));
    let satisfiable = candidates.first().is_some_and(|c| c.check.passes);
    Ok(ThresholdSearch {
        candidates,
        satisfiable,
    })
}

/// Critical mountain-pass solution with its cross-checks.
#[derive(Debug, Clone)]
pub struct CriticalSolution {
    pub report: SolveReport,
    pub path: PathResult,
    pub constants: CriticalConstants,
    /// Minimum of `J` over its Nehari set.
    pub nehari_level: f64,
    /// `ζ₀` with `e = ζ₀u₀`.
    pub endpoint_scale: f64,
    /// `J(u) − J′(u)[u]/(p+1) ≥ (p−1)/(2(p+1))·‖u‖²_λ` on every path node.
    pub coercivity_holds: bool,
    pub nontrivial: bool,
    pub warnings: Vec<String>,
}

/// Mountain-pass solution of the critically perturbed problem on paths from
/// `0` to `e = ζ₀u₀`. Fails with [`Error::Threshold`] when `u₀` does not
/// satisfy the compactness condition.
pub fn solve_critical(
    spec: &ProblemSpec,
    u0: &RadialFunction,
    forms: &QuadraticForms,
    constants: &CriticalConstants,
    opts: &SolverOptions,
) -> Result<CriticalSolution> {
    let check = check_threshold(u0, spec, forms, constants.s_hat)?;
    if !check.passes {
        return Err(Error::Threshold {
            sup_value: check.sup_value,
            threshold: check.threshold,
        });
    }
    let f = mixed(spec, forms)?;
    let u = f.restrict(u0)?;
    let u0_norm = f.norm_lambda_sq(&u).sqrt();
    // e = ζ₀u₀ with J(e) < 0 < β and ‖e‖_λ > ρ.
    let mut zeta = 2.0 * check.zeta;
    while !(f.energy(&(&u * zeta)) < 0.0 && zeta * u0_norm > constants.rho) {
        zeta *= 2.0;
        if !zeta.is_finite() {
            return Err(domain("no admissible mountain-pass endpoint along the ray"));
        }
    }
    let nodes = opts.path_nodes.clamp(32, 128);
    let path = mountain_pass(
        &f,
        &(&u * zeta),
        nodes,
        opts.tol,
        opts.max_iter,
        opts.newton_switch,
    )?;
    let saddle = &path.saddle;
    let m = path.level;

    let sym = symmetrizer(&f, u0);
    let cross = minimize_on_nehari(&f, &u, opts, Some(&sym))?;

    let q = spec.p + 1.0;
    let gap = |z: &DVector<f64>| {
        f.energy(z) - f.nehari_value(z) / q - (q - 2.0) / (2.0 * q) * f.norm_lambda_sq(z)
    };
    let coercivity_holds = path
        .nodes
        .iter()
        .chain(std::iter::once(saddle))
        .all(|z| gap(z) >= -1e-10 * f.norm_lambda_sq(z).max(1.0));
    let norm_inf = f.norm_lambda_sq(saddle).sqrt();
    let nontrivial = norm_inf > 0.01 * f.norm_lambda_sq(&(&u * check.zeta)).sqrt();
    let mut warnings = Vec::new();
    if constants.threshold - m < 1e-3 {
        warnings.push(format!(
            "mountain-pass level {m} is within 1e-3 of the threshold {}",
            constants.threshold
        ));
    }
    let solution = f.extend(u0, saddle)?;
    let residual = path.residual;
    let converged = path.converged && constants.beta <= m && m < constants.threshold && nontrivial;
    let report = SolveReport {
        solution,
        energy: f.energy(saddle),
        nehari_value: f.nehari_value(saddle),
        residual,
        c_star: cross.energy,
        mp_level_m: m,
        beta: constants.beta,
        mp_radius: constants.rho,
        threshold: constants.threshold,
        iterations: path.iterations,
        converged,
    };
    Ok(CriticalSolution {
        report,
        path,
        constants: *constants,
        nehari_level: cross.energy,
        endpoint_scale: zeta,
        coercivity_holds,
        nontrivial,
        warnings,
    })
}

/// Outcome of the weak maximum principle check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakMaxCheck {
    /// `min u / max u`.
    pub min_ratio: f64,
    /// `‖u⁻‖_λ / ‖u‖_λ`.
    pub negative_norm: f64,
    /// `[u⁻]_s / ‖u‖_λ`.
    pub negative_seminorm: f64,
    pub passes: bool,
}

/// `min u ≥ −1e−8·max u`, and the negative part is negligible in both
/// `‖·‖_λ` and `[·]_s` relative to `‖u‖_λ` (tolerance `tol`).
pub fn weak_max_check(
    u: &RadialFunction,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
    tol: f64,
) -> Result<WeakMaxCheck> {
    spec.validate()?;
    let f = mixed(spec, forms)?;
    let x = f.restrict(u)?;
    let norm = f.norm_lambda_sq(&x).sqrt();
    if !(norm > 0.0) {
        return Err(domain(
            "the maximum principle check needs a nonzero profile",
        ));
    }
    let neg = u.negative_part();
    let xn = f.restrict(&neg)?;
    let negative_norm = f.norm_lambda_sq(&xn).max(0.0).sqrt() / norm;
    let negative_seminorm = seminorm_s_sq(&neg, forms)?.max(0.0).sqrt() / norm;
    let max = u.max_value();
    let min_ratio = if max > 0.0 {
        u.min_value() / max
    } else {
        f64::NEG_INFINITY
    };
    let passes = min_ratio >= -1e-8 && negative_norm < tol && negative_seminorm < tol;
    Ok(WeakMaxCheck {
        min_ratio,
        negative_norm,
        negative_seminorm,
        passes,
    })
}
