//! `verify`: property suites over the kernel, the forms and the solvers.

use crate::check::{render_table, Check};
use crate::config::RunConfig;
use crate::exit;
use crate::oracle::odd_kernel_by_differences;
use crate::solve::{compute, SolveError, SolveOutcome};
use hypfrac::funcspace::{
    dirichlet_energy, lp_norm, quadratic, schwarz_rearrange, seminorm_s_sq, spectral_bottom,
    QuadraticForms, RadialFunction, RadialGrid, Spacing, DEFAULT_NODES, DEFAULT_R_MAX,
};
use hypfrac::io::Cache;
use hypfrac::kernel::{fit_asymptotics, KernelEvaluator};
use hypfrac::solver::{nehari_project, nehari_scale, weak_max_check, Mode, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Selectable suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernel,
    Embedding,
    Nehari,
    MaxPrinciple,
    Critical,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kernel" => Ok(Self::Kernel),
            "embedding" => Ok(Self::Embedding),
            "nehari" => Ok(Self::Nehari),
            "maxprinciple" => Ok(Self::MaxPrinciple),
            "critical" => Ok(Self::Critical),
            "all" => Ok(Self::All),
            other => Err(format!("unknown suite {other:?}; expected kernel|embedding|nehari|maxprinciple|critical|all")),
        }
    }
}

pub const KERNEL_DIMS: [usize; 4] = [2, 3, 4, 5];
pub const KERNEL_ORDERS: [f64; 3] = [0.25, 0.5, 0.75];
/// Seed of every random family.
pub const SEED: u64 = 20_240_601;
pub const RANDOM_PROFILES: usize = 100;

fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn gaussian(c: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |r| (-((r - c) / w).powi(2)).exp()
}

fn profile(forms: &QuadraticForms, g: impl Fn(f64) -> f64) -> hypfrac::Result<RadialFunction> {
    RadialFunction::from_fn(forms.grid.clone(), g)
}

fn fail(suite: &str, name: &str, e: impl std::fmt::Display) -> Check {
    Check::new(suite, name, false, format!("error: {e}"))
}

/// Positivity and strict decrease of `𝒦ₛ` on 200 log-spaced points of `[1e−3, 20]`.
pub fn kernel_law_checks(pairs: &[(usize, f64)]) -> Vec<Check> {
    let rho = log_spaced(1e-3, 20.0, 200);
    pairs
        .iter()
        .map(|&(dim, s)| {
            let name = format!("N={dim} s={s}: positive, strictly decreasing");
            let ln: hypfrac::Result<Vec<f64>> = KernelEvaluator::new(dim, s)
                .and_then(|ev| rho.iter().map(|&r| ev.ln_value(r)).collect());
            match ln {
                Ok(ln) => {
                    let finite = ln.iter().all(|l| l.is_finite());
                    let bad = ln.windows(2).position(|w| w[1] >= w[0]);
                    let detail = match bad {
                        Some(i) => format!("not decreasing at ρ = {:.4e}", rho[i + 1]),
                        None => format!("ln 𝒦 from {:.3} to {:.3}", ln[0], ln[ln.len() - 1]),
                    };
                    Check::new("kernel", &name, finite && bad.is_none(), detail)
                }
                Err(e) => fail("kernel", &name, e),
            }
        })
        .collect()
}

/// Fitted near-field slope `−(N+2s) ± 0.05` and far-field rate `(N−1) ± 1%`.
pub fn kernel_asymptotic_checks(pairs: &[(usize, f64)]) -> Vec<Check> {
    let mut out = Vec::new();
    for &(dim, s) in pairs {
        let prefix = format!("N={dim} s={s}");
        match KernelEvaluator::new(dim, s).and_then(|ev| fit_asymptotics(&ev)) {
            Ok((near, far)) => {
                let n = dim as f64;
                let near_target = -(n + 2.0 * s);
                let far_target = n - 1.0;
                out.push(Check::new(
                    "kernel",
                    &format!("{prefix}: near slope"),
                    (near - near_target).abs() <= 0.05,
                    format!("{near:.5} vs {near_target}"),
                ));
                out.push(Check::new(
                    "kernel",
                    &format!("{prefix}: far rate"),
                    ((far - far_target) / far_target).abs() <= 0.01,
                    format!("{far:.5} vs {far_target}"),
                ));
            }
            Err(e) => out.push(fail("kernel", &format!("{prefix}: asymptotics"), e)),
        }
    }
    out
}

/// Odd dimensions against the finite-difference oracle, relative 1e−6 on `[0.1, 10]`.
pub fn odd_exactness_checks() -> Vec<Check> {
    let rho = log_spaced(0.1, 10.0, 60);
    let mut out = Vec::new();
    for dim in [3, 5] {
        for s in KERNEL_ORDERS {
            let name = format!("N={dim} s={s}: matches difference oracle");
            let worst = rho
                .iter()
                .try_fold(0.0f64, |acc, &r| -> hypfrac::Result<f64> {
                    let exact = hypfrac::kernel::kernel(dim, s, r)?;
                    let oracle = odd_kernel_by_differences(dim, s, r)?;
                    Ok(acc.max(((exact - oracle) / oracle).abs()))
                });
            out.push(match worst {
                Ok(w) => Check::new("kernel", &name, w < 1e-6, format!("max rel. diff {w:.2e}")),
                Err(e) => fail("kernel", &name, e),
            });
        }
    }
    out
}

/// A labelled radial profile.
pub type Profile = (String, Box<dyn Fn(f64) -> f64 + Send + Sync>);

/// 25 centred Gaussians with widths in `[0.1, 5]` and 25 rings.
pub fn test_family() -> Vec<Profile> {
    let mut family: Vec<Profile> = Vec::new();
    for w in log_spaced(0.1, 5.0, 25) {
        family.push((format!("bump w={w:.3}"), Box::new(gaussian(0.0, w))));
    }
    for c in [1.0, 2.0, 4.0, 6.0, 8.0] {
        for w in [0.3, 0.6, 1.0, 1.5, 2.5] {
            family.push((format!("ring c={c} w={w}"), Box::new(gaussian(c, w))));
        }
    }
    family
}

/// Largest `[u]²_s / ∫|∇u|²` over [`test_family`].
pub fn embedding_constant(forms: &QuadraticForms) -> hypfrac::Result<(f64, String)> {
    let mut best = (0.0, String::new());
    for (label, g) in test_family() {
        let u = profile(forms, g)?;
        let ratio = seminorm_s_sq(&u, forms)? / dirichlet_energy(&u, forms)?;
        if !ratio.is_finite() {
            return Ok((f64::INFINITY, label));
        }
        if ratio > best.0 {
            best = (ratio, label);
        }
    }
    Ok(best)
}

/// Finite embedding constant, stable within 2% under grid doubling.
pub fn embedding_stability_checks(coarse: &QuadraticForms, fine: &QuadraticForms) -> Vec<Check> {
    let name = format!(
        "N={} s={}: C finite, < 2% drift on refinement",
        coarse.dim(),
        coarse.order
    );
    let check = match (embedding_constant(coarse), embedding_constant(fine)) {
        (Ok((a, la)), Ok((b, _))) => {
            let drift = ((b - a) / a).abs();
            Check::new(
                "embedding",
                &name,
                a.is_finite() && b.is_finite() && drift < 0.02,
                format!("C = {a:.5} ({la}) → {b:.5}, drift {:.3}%", 100.0 * drift),
            )
        }
        (Err(e), _) | (_, Err(e)) => fail("embedding", &name, e),
    };
    vec![check]
}

/// Rayleigh quotients `∫|∇u|² / ∫u²` against `(N−1)²/4`.
pub fn spectral_checks(forms: &QuadraticForms) -> Vec<Check> {
    let dim = forms.dim();
    let bottom = spectral_bottom(dim);
    let r_max = forms.grid.r_max();
    let mut family = test_family();
    let broad: Vec<Profile> = vec![
        (
            "sin(πr/R)/sinh r".into(),
            Box::new(move |r: f64| {
                if r == 0.0 {
                    PI / r_max
                } else {
                    (PI * r / r_max).sin() / r.sinh()
                }
            }),
        ),
        (
            "(1 − r/R)e^{−r}".into(),
            Box::new(move |r: f64| (1.0 - r / r_max) * (-r).exp()),
        ),
        ("ring c=8 w=3".into(), Box::new(gaussian(8.0, 3.0))),
    ];
    let broad_count = broad.len();
    family.extend(broad);
    let quotients: hypfrac::Result<Vec<(String, f64)>> = family
        .into_iter()
        .map(|(label, g)| {
            let u = profile(forms, g)?;
            Ok((
                label,
                dirichlet_energy(&u, forms)? / quadratic(&forms.mass, u.values()),
            ))
        })
        .collect();
    let quotients = match quotients {
        Ok(q) => q,
        Err(e) => return vec![fail("embedding", "spectral bottom", e)],
    };
    let (low_label, low) = quotients
        .iter()
        .fold((String::new(), f64::INFINITY), |acc, (l, q)| {
            if *q < acc.1 {
                (l.clone(), *q)
            } else {
                acc
            }
        });
    let broad_best = quotients[quotients.len() - broad_count..]
        .iter()
        .map(|(_, q)| *q)
        .fold(f64::INFINITY, f64::min);
    vec![
        Check::new(
            "embedding",
            &format!("N={dim}: quotients ≥ 0.98·(N−1)²/4"),
            low >= 0.98 * bottom,
            format!("min {low:.5} ({low_label}), bound {bottom}"),
        ),
        Check::new(
            "embedding",
            &format!("N={dim}: broad profiles within 5% of (N−1)²/4"),
            broad_best <= 1.05 * bottom,
            format!("best {broad_best:.5}"),
        ),
    ]
}

/// Nonnegative sums of one to three Gaussian bumps and rings.
pub fn random_profiles(
    forms: &QuadraticForms,
    count: usize,
    seed: u64,
) -> hypfrac::Result<Vec<RadialFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let bumps: Vec<(f64, f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.gen_range(0.1..3.0),
                        rng.gen_range(0.0..8.0),
                        rng.gen_range(0.3..3.0),
                    )
                })
                .collect();
            profile(forms, move |r| {
                bumps.iter().map(|&(a, c, w)| a * gaussian(c, w)(r)).sum()
            })
        })
        .collect()
}

/// Rearrangement keeps `L^q` norms (q = 2, 4, 6) and does not raise either energy term.
pub fn symmetrization_checks(forms: &QuadraticForms, count: usize, seed: u64) -> Vec<Check> {
    let name_lq = format!("{count} random profiles: L^q preserved (1e−3)");
    let name_energy = format!("{count} random profiles: energies non-increasing (1e−3)");
    let run = || -> hypfrac::Result<(f64, f64, f64)> {
        let (mut lq, mut dir, mut sem) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for u in random_profiles(forms, count, seed)? {
            let v = schwarz_rearrange(&u)?;
            for q in [2.0, 4.0, 6.0] {
                let (a, b) = (lp_norm(&u, q)?, lp_norm(&v, q)?);
                lq = lq.max(((b - a) / a).abs());
            }
            let (du, dv) = (dirichlet_energy(&u, forms)?, dirichlet_energy(&v, forms)?);
            dir = dir.max((dv - du) / du);
            let (su, sv) = (seminorm_s_sq(&u, forms)?, seminorm_s_sq(&v, forms)?);
            sem = sem.max((sv - su) / su);
        }
        Ok((lq, dir, sem))
    };
    match run() {
        Ok((lq, dir, sem)) => vec![
            Check::new(
                "embedding",
                &name_lq,
                lq < 1e-3,
                format!("max rel. change {lq:.2e}"),
            ),
            Check::new(
                "embedding",
                &name_energy,
                dir <= 1e-3 && sem <= 1e-3,
                format!("max rel. increase: Dirichlet {dir:.2e}, seminorm {sem:.2e}"),
            ),
        ],
        Err(e) => vec![fail("embedding", &name_lq, e)],
    }
}

/// `t(project(u)) = 1 ± 1e−10` and `project(αu) = project(u)` on random profiles.
pub fn nehari_projection_checks(
    forms: &QuadraticForms,
    spec: &ProblemSpec,
    count: usize,
    seed: u64,
) -> Vec<Check> {
    let mode = match spec.mode {
        Mode::Subcritical => "subcritical",
        Mode::CriticalPerturbed => "critical",
    };
    let name_idem = format!("{mode}: t(project(u)) = 1 on {count} profiles");
    let name_scale = format!("{mode}: project(αu) = project(u) on {count} profiles");
    let run = || -> hypfrac::Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (mut idem, mut scale) = (0.0f64, 0.0f64);
        for u in random_profiles(forms, count, seed)? {
            let v = nehari_project(&u, spec, forms)?;
            idem = idem.max((nehari_scale(&v, spec, forms)? - 1.0).abs());
            let alpha = 10f64.powf(rng.gen_range(-2.0..2.0));
            let w = nehari_project(&u.scaled(alpha), spec, forms)?;
            let top = v.max_value();
            let diff = v
                .values()
                .iter()
                .zip(w.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            scale = scale.max(diff / top);
        }
        Ok((idem, scale))
    };
    match run() {
        Ok((idem, scale)) => vec![
            Check::new(
                "nehari",
                &name_idem,
                idem <= 1e-10,
                format!("max |t − 1| = {idem:.2e}"),
            ),
            Check::new(
                "nehari",
                &name_scale,
                scale <= 1e-12,
                format!("max rel. difference {scale:.2e}"),
            ),
        ],
        Err(e) => vec![fail("nehari", &name_idem, e)],
    }
}

/// A profile with a sizeable negative part must fail the weak maximum check.
pub fn synthetic_negative_check(forms: &QuadraticForms, spec: &ProblemSpec) -> Check {
    let name = "synthetic negative profile is rejected";
    let run = || -> hypfrac::Result<bool> {
        let u = profile(forms, |r| {
            gaussian(0.0, 1.0)(r) - 0.5 * gaussian(4.0, 1.0)(r)
        })?;
        Ok(weak_max_check(&u, spec, forms, 1e-8)?.passes)
    };
    match run() {
        Ok(passes) => Check::new(
            "maxprinciple",
            name,
            !passes,
            if passes { "accepted" } else { "rejected" },
        ),
        Err(e) => fail("maxprinciple", name, e),
    }
}

/// Weak maximum check on a converged solution.
pub fn solution_max_check(
    label: &str,
    outcome: &SolveOutcome,
    spec: &ProblemSpec,
    forms: &QuadraticForms,
) -> Check {
    let name = format!("{label}: solution passes the weak maximum check");
    match weak_max_check(&outcome.report.solution, spec, forms, 1e-8) {
        Ok(wm) => Check::new(
            "maxprinciple",
            &name,
            outcome.report.converged && wm.passes,
            format!(
                "min/max = {:.2e}, ‖u⁻‖/‖u‖ = {:.2e}",
                wm.min_ratio, wm.negative_norm
            ),
        ),
        Err(e) => fail("maxprinciple", &name, e),
    }
}

/// Runs the configuration twice; the outcome (report or threshold failure)
/// must be identical. A solve must pass its checks; a threshold failure is
/// a documented outcome.
pub fn critical_reproducibility(
    cfg: &RunConfig,
    forms: &QuadraticForms,
) -> (Vec<Check>, Result<SolveOutcome, SolveError>) {
    let p = &cfg.problem;
    let label = format!("({}, {}, {}, {})", p.dim, p.s, p.lambda, p.p);
    let first = compute(cfg, forms);
    let second = compute(cfg, forms);
    let same = match (&first, &second) {
        (Ok(a), Ok(b)) => {
            serde_json::to_string(&a.report).ok() == serde_json::to_string(&b.report).ok()
                && a.checks == b.checks
        }
        (Err(a), Err(b)) => a == b,
        _ => false,
    };
    let mut checks = Vec::new();
    let detail = match &first {
        Ok(o) => format!("solved, m = {:.6}", o.report.mp_level_m),
        Err(SolveError::Threshold(t)) => {
            format!(
                "threshold not met (exit 4): sup J = {:.6} ≥ {:.6}",
                t.sup_value, t.threshold
            )
        }
        Err(e) => format!("error: {e}"),
    };
    checks.push(Check::new(
        "critical",
        &format!("{label}: identical outcome on two runs"),
        same,
        detail,
    ));
    match &first {
        Ok(o) => checks.extend(o.checks.iter().map(|c| Check {
            suite: "critical".into(),
            ..c.clone()
        })),
        Err(SolveError::Threshold(_)) => {}
        Err(e) => checks.push(fail("critical", &format!("{label}: solve"), e)),
    }
    (checks, first)
}

/// Subcritical problem at `(3, 1/2, 0, 3)` with default grid and solver settings.
pub fn subcritical_config() -> RunConfig {
    let problem = ProblemSpec {
        dim: 3,
        s: 0.5,
        lambda: 0.0,
        p: 3.0,
        mode: Mode::Subcritical,
    };
    RunConfig {
        problem,
        grid: Default::default(),
        solver: Default::default(),
        io: Default::default(),
    }
}

/// Critically perturbed problem at `(3, 1/2, 1/2, 3)`.
pub fn critical_config() -> RunConfig {
    let problem = ProblemSpec {
        dim: 3,
        s: 0.5,
        lambda: 0.5,
        p: 3.0,
        mode: Mode::CriticalPerturbed,
    };
    RunConfig {
        problem,
        ..subcritical_config()
    }
}

/// A critically perturbed problem whose threshold is met: `(3, 1/4, 1/2, 4.5)`.
pub fn critical_demo_config() -> RunConfig {
    let problem = ProblemSpec {
        dim: 3,
        s: 0.25,
        lambda: 0.5,
        p: 4.5,
        mode: Mode::CriticalPerturbed,
    };
    RunConfig {
        problem,
        ..subcritical_config()
    }
}

/// Forms shared between suites, built through the cache.
pub struct Context {
    cache: Cache,
    forms: HashMap<(usize, u64, usize, bool), Arc<QuadraticForms>>,
    outcomes: HashMap<&'static str, Result<SolveOutcome, SolveError>>,
}

impl Context {
    pub fn new(cache: Cache) -> Self {
        Self {
            cache,
            forms: HashMap::new(),
            outcomes: HashMap::new(),
        }
    }

    /// Forms on the geometric grid with `nodes` nodes, optionally refined.
    pub fn forms(
        &mut self,
        dim: usize,
        s: f64,
        nodes: usize,
        refined: bool,
    ) -> hypfrac::Result<Arc<QuadraticForms>> {
        let key = (dim, s.to_bits(), nodes, refined);
        if let Some(f) = self.forms.get(&key) {
            return Ok(f.clone());
        }
        let mut grid =
            RadialGrid::with_spacing(dim, DEFAULT_R_MAX, nodes, Spacing::GeometricUniform)?;
        if refined {
            grid = grid.refined();
        }
        let f = Arc::new(self.cache.forms(Arc::new(grid), s)?);
        self.forms.insert(key, f.clone());
        Ok(f)
    }

    fn config_forms(&mut self, cfg: &RunConfig) -> hypfrac::Result<Arc<QuadraticForms>> {
        self.forms(cfg.problem.dim, cfg.problem.s, cfg.grid.node_count, false)
    }

    /// Memoized solve of one of the fixed configurations.
    fn outcome(&mut self, key: &'static str, cfg: &RunConfig) -> Result<SolveOutcome, SolveError> {
        if let Some(o) = self.outcomes.get(key) {
            return o.clone();
        }
        let result = self
            .config_forms(cfg)
            .map_err(|e| SolveError::Numerical(e.to_string()))
            .and_then(|forms| compute(cfg, &forms));
        self.outcomes.insert(key, result.clone());
        result
    }
}

fn kernel_suite() -> Vec<Check> {
    let pairs: Vec<(usize, f64)> = KERNEL_DIMS
        .iter()
        .flat_map(|&d| KERNEL_ORDERS.map(|s| (d, s)))
        .collect();
    let mut out = kernel_law_checks(&pairs);
    out.extend(kernel_asymptotic_checks(&pairs));
    out.extend(odd_exactness_checks());
    out
}

/// Grid of the embedding constants.
const EMBEDDING_NODES: usize = 400;

fn embedding_suite(ctx: &mut Context) -> Vec<Check> {
    let mut out = Vec::new();
    match (
        ctx.forms(3, 0.5, EMBEDDING_NODES, false),
        ctx.forms(3, 0.5, EMBEDDING_NODES, true),
    ) {
        (Ok(coarse), Ok(fine)) => out.extend(embedding_stability_checks(&coarse, &fine)),
        (Err(e), _) | (_, Err(e)) => out.push(fail("embedding", "N=3 s=0.5: forms", e)),
    }
    for (dim, s) in [(2, 0.5), (3, 0.25), (3, 0.75)] {
        let name = format!("N={dim} s={s}: C finite");
        out.push(
            match ctx
                .forms(dim, s, EMBEDDING_NODES, false)
                .and_then(|f| embedding_constant(&f))
            {
                Ok((c, label)) => Check::new(
                    "embedding",
                    &name,
                    c.is_finite() && c > 0.0,
                    format!("C = {c:.5} ({label})"),
                ),
                Err(e) => fail("embedding", &name, e),
            },
        );
    }
    match ctx.forms(3, 0.5, DEFAULT_NODES, false) {
        Ok(f) => {
            out.extend(spectral_checks(&f));
            out.extend(symmetrization_checks(&f, RANDOM_PROFILES, SEED));
        }
        Err(e) => out.push(fail("embedding", "default forms", e)),
    }
    out
}

fn nehari_suite(ctx: &mut Context) -> Vec<Check> {
    let mut out = Vec::new();
    let sub = subcritical_config();
    let crit = critical_config();
    match ctx.config_forms(&sub) {
        Ok(f) => {
            out.extend(nehari_projection_checks(
                &f,
                &sub.problem,
                RANDOM_PROFILES,
                SEED,
            ));
            out.extend(nehari_projection_checks(
                &f,
                &crit.problem,
                RANDOM_PROFILES,
                SEED + 1,
            ));
        }
        Err(e) => out.push(fail("nehari", "forms", e)),
    }
    match ctx.outcome("subcritical", &sub) {
        Ok(o) => out.extend(o.checks.iter().map(|c| Check {
            suite: "nehari".into(),
            ..c.clone()
        })),
        Err(e) => out.push(fail("nehari", "subcritical solve", e)),
    }
    out
}

fn maxprinciple_suite(ctx: &mut Context) -> Vec<Check> {
    let mut out = Vec::new();
    for (key, cfg) in [
        ("subcritical", subcritical_config()),
        ("critical demo", critical_demo_config()),
    ] {
        let forms = match ctx.config_forms(&cfg) {
            Ok(f) => f,
            Err(e) => {
                out.push(fail("maxprinciple", key, e));
                continue;
            }
        };
        match ctx.outcome(key, &cfg) {
            Ok(o) => out.push(solution_max_check(key, &o, &cfg.problem, &forms)),
            Err(e) => out.push(fail("maxprinciple", key, e)),
        }
        if key == "subcritical" {
            out.push(synthetic_negative_check(&forms, &cfg.problem));
        }
    }
    out
}

fn critical_suite(ctx: &mut Context) -> Vec<Check> {
    let mut out = Vec::new();
    let cfg = critical_config();
    match ctx.config_forms(&cfg) {
        Ok(f) => out.extend(critical_reproducibility(&cfg, &f).0),
        Err(e) => out.push(fail("critical", "forms", e)),
    }
    let demo = critical_demo_config();
    match ctx.outcome("critical demo", &demo) {
        Ok(o) => out.extend(o.checks.iter().map(|c| Check {
            suite: "critical".into(),
            name: format!("(3, 0.25, 0.5, 4.5): {}", c.name),
            ..c.clone()
        })),
        Err(e) => out.push(fail("critical", "(3, 0.25, 0.5, 4.5): solve", e)),
    }
    out
}

/// Runs one suite, or all of them.
pub fn run_suite(suite: Suite, ctx: &mut Context) -> Vec<Check> {
    match suite {
        Suite::Kernel => kernel_suite(),
        Suite::Embedding => embedding_suite(ctx),
        Suite::Nehari => nehari_suite(ctx),
        Suite::MaxPrinciple => maxprinciple_suite(ctx),
        Suite::Critical => critical_suite(ctx),
        Suite::All => [
            Suite::Kernel,
            Suite::Embedding,
            Suite::Nehari,
            Suite::MaxPrinciple,
            Suite::Critical,
        ]
        .into_iter()
        .flat_map(|s| run_suite(s, ctx))
        .collect(),
    }
}

/// Prints the table and returns the exit code.
pub fn run(suite: Suite) -> i32 {
    let mut ctx = Context::new(Cache::from_env(
        &crate::config::IoConfig::default().cache_dir,
    ));
    let checks = run_suite(suite, &mut ctx);
    print!("{}", render_table(&checks));
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        exit::OK
    } else {
        eprintln!("{} of {} checks failed:", failed.len(), checks.len());
        for c in failed {
            eprintln!("  [{}] {}: {}", c.suite, c.name, c.detail);
        }
        exit::FAILED
    }
}
