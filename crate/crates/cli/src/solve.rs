//! `solve`: runs one configuration and writes the report, profile and plot data.

use crate::check::{render_table, Check};
use crate::config::{Format, RunConfig};
use crate::exit;
use hypfrac::funcspace::{norm_lambda_sq, seminorm_s_sq, QuadraticForms};
use hypfrac::io::{atomic_write, format_f64, write_json, write_profile_csv, Cache};
use hypfrac::solver::{
    critical_constants, default_initial_guess, local_sobolev_constant,
    mountain_pass_level_subcritical, search_threshold_profile, solve_critical, solve_subcritical,
    subcritical_lower_bound, weak_max_check, Mode, SolveReport,
};
use serde::Serialize;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

/// One trial profile of the threshold search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCandidateRow {
    pub label: String,
    pub sup_value: f64,
    pub zeta: f64,
    pub passes: bool,
}

/// Why no mountain-pass run was started: every trial profile has
/// `sup J(ζu₀) ≥ (1/N)·Ŝ^(N/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdFailure {
    /// Smallest `sup J(ζu₀)` found.
    pub sup_value: f64,
    pub threshold: f64,
    pub beta: f64,
    pub s_hat: f64,
    pub candidates: Vec<ThresholdCandidateRow>,
}

/// Why a run stopped before producing a report.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Usage(String),
    Numerical(String),
    Io(String),
    Threshold(Box<ThresholdFailure>),
}

impl SolveError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Numerical(_) => exit::NUMERICAL,
            Self::Io(_) => exit::FAILED,
            Self::Threshold(_) => exit::THRESHOLD,
        }
    }
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Numerical(m) | Self::Io(m) => f.write_str(m),
            Self::Threshold(t) => {
                write!(
                    f,
                    "threshold not met: sup_value = {} ≥ threshold = {}",
                    t.sup_value, t.threshold
                )
            }
        }
    }
}

fn numerical(e: hypfrac::Error) -> SolveError {
    SolveError::Numerical(e.to_string())
}

fn io(e: hypfrac::Error) -> SolveError {
    SolveError::Io(e.to_string())
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub report: SolveReport,
    /// Energy after every iteration of the solver that produced the solution.
    pub history: Vec<f64>,
    pub checks: Vec<Check>,
}

impl SolveOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize)]
struct Metadata {
    version: &'static str,
    unix_time: u64,
    elapsed_seconds: f64,
    cache_dir: String,
}

/// Quadratic forms for the configuration, through the cache.
pub fn forms_for(cfg: &RunConfig) -> Result<QuadraticForms, SolveError> {
    let grid = Arc::new(
        cfg.grid
            .build(cfg.problem.dim)
            .map_err(|e| SolveError::Usage(e.to_string()))?,
    );
    Cache::from_env(&cfg.io.cache_dir)
        .forms(grid, cfg.problem.s)
        .map_err(numerical)
}

/// Solves without writing anything.
pub fn compute(cfg: &RunConfig, forms: &QuadraticForms) -> Result<SolveOutcome, SolveError> {
    cfg.validate().map_err(SolveError::Usage)?;
    let spec = cfg.problem;
    let opts = cfg.solver.options();
    let suite = "solve";
    let mut checks = Vec::new();
    let (report, history) = match spec.mode {
        Mode::Subcritical => {
            let init = default_initial_guess(forms);
            let sol = solve_subcritical(&spec, &init, forms, &opts).map_err(numerical)?;
            let mp =
                mountain_pass_level_subcritical(&spec, &init, forms, &opts).map_err(numerical)?;
            let s_lp = local_sobolev_constant(&spec, forms, &opts).map_err(numerical)?;
            let (beta, radius) = subcritical_lower_bound(s_lp, spec.p);
            let mut report = sol.report;
            report.mp_level_m = mp.level;
            report.beta = beta;
            report.mp_radius = radius;
            let c = report.c_star;
            let gap = (mp.level - c).abs() / c;
            checks.push(Check::new(
                suite,
                "c_star > 0",
                c > 0.0,
                format!("c* = {c:.10}"),
            ));
            checks.push(Check::new(
                suite,
                "c = c* within 1%",
                gap < 0.01,
                format!("c = {:.10}, gap {gap:.2e}", mp.level),
            ));
            checks.push(Check::new(
                suite,
                "β ≤ c*",
                beta <= c,
                format!("β = {beta:.6}"),
            ));
            let u = &report.solution;
            let quad = norm_lambda_sq(u, spec.lambda, forms).map_err(numerical)?
                + seminorm_s_sq(u, forms).map_err(numerical)?;
            let identity =
                (report.energy - (0.5 - 1.0 / (spec.p + 1.0)) * quad).abs() / report.energy.abs();
            checks.push(Check::new(
                suite,
                "energy identity on Λ",
                identity < 1e-8,
                format!("rel. defect {identity:.2e}"),
            ));
            (report, sol.trace.history)
        }
        Mode::CriticalPerturbed => {
            let constants = critical_constants(&spec, forms, &opts).map_err(numerical)?;
            let search =
                search_threshold_profile(&spec, forms, constants.s_hat, &[]).map_err(numerical)?;
            let failure = |sup_value: f64| {
                SolveError::Threshold(Box::new(ThresholdFailure {
                    sup_value,
                    threshold: constants.threshold,
                    beta: constants.beta,
                    s_hat: constants.s_hat,
                    candidates: search
                        .candidates
                        .iter()
                        .map(|c| ThresholdCandidateRow {
                            label: c.label.clone(),
                            sup_value: c.check.sup_value,
                            zeta: c.check.zeta,
                            passes: c.check.passes,
                        })
                        .collect(),
                }))
            };
            if !search.satisfiable {
                return Err(failure(search.best().check.sup_value));
            }
            let sol = solve_critical(&spec, &search.best().profile, forms, &constants, &opts)
                .map_err(|e| match e {
                    hypfrac::Error::Threshold { sup_value, .. } => failure(sup_value),
                    e => numerical(e),
                })?;
            let r = &sol.report;
            checks.push(Check::new(
                suite,
                "β ≤ m < (1/N)·Ŝ^(N/2)",
                r.beta <= r.mp_level_m && r.mp_level_m < r.threshold,
                format!("{:.6} ≤ {:.6} < {:.6}", r.beta, r.mp_level_m, r.threshold),
            ));
            checks.push(Check::new(
                suite,
                "nontrivial limit",
                sol.nontrivial,
                format!("energy {:.6}", r.energy),
            ));
            checks.push(Check::new(
                suite,
                "coercivity along the path",
                sol.coercivity_holds,
                String::new(),
            ));
            for w in &sol.warnings {
                eprintln!("warning: {w}");
            }
            (sol.report, sol.path.history)
        }
    };
    let u = &report.solution;
    let norm = norm_lambda_sq(u, spec.lambda, forms)
        .map_err(numerical)?
        .sqrt();
    checks.insert(
        0,
        Check::new(
            suite,
            "converged",
            report.converged,
            format!("{} iterations", report.iterations),
        ),
    );
    checks.insert(
        1,
        Check::new(
            suite,
            "residual < tol·‖u‖_λ",
            report.residual < opts.tol * norm,
            format!("{:.3e} vs {:.3e}", report.residual, opts.tol * norm),
        ),
    );
    let wm = weak_max_check(u, &spec, forms, 1e-8).map_err(numerical)?;
    checks.push(Check::new(
        suite,
        "u ≥ −1e−8·max u",
        wm.min_ratio >= -1e-8,
        format!("min/max = {:.2e}", wm.min_ratio),
    ));
    let monotone = u.values().windows(2).all(|w| w[1] <= w[0]);
    checks.push(Check::new(
        suite,
        "nonincreasing profile",
        monotone,
        String::new(),
    ));
    checks.push(Check::new(
        suite,
        "weak maximum principle",
        wm.passes,
        format!(
            "‖u⁻‖/‖u‖ = {:.2e}, [u⁻]/‖u‖ = {:.2e}",
            wm.negative_norm, wm.negative_seminorm
        ),
    ));
    Ok(SolveOutcome {
        report,
        history,
        checks,
    })
}

/// Gnuplot data: block 0 is `r u`, block 1 is `iteration energy`.
pub fn plot_data(outcome: &SolveOutcome) -> String {
    let u = &outcome.report.solution;
    let mut out = String::from("# r u\n");
    for (r, v) in u.grid().nodes().iter().zip(u.values()) {
        out.push_str(&format!("{} {}\n", format_f64(*r), format_f64(*v)));
    }
    out.push_str("\n\n# iteration energy\n");
    for (k, e) in outcome.history.iter().enumerate() {
        out.push_str(&format!("{k} {}\n", format_f64(*e)));
    }
    out
}

/// Writes the requested outputs. `report.json` and `checks.json` depend only
/// on the configuration; timing goes to `metadata.json`.
pub fn write_outputs(
    cfg: &RunConfig,
    outcome: &SolveOutcome,
    elapsed: f64,
) -> Result<(), SolveError> {
    let dir = &cfg.io.out_dir;
    if cfg.wants(Format::Json) {
        write_json(&dir.join("report.json"), &outcome.report).map_err(io)?;
    }
    if cfg.wants(Format::Csv) {
        write_profile_csv(&dir.join("profile.csv"), &outcome.report.solution).map_err(io)?;
    }
    if cfg.wants(Format::Plot) {
        atomic_write(&dir.join("plot.dat"), plot_data(outcome).as_bytes()).map_err(io)?;
    }
    write_json(&dir.join("checks.json"), &outcome.checks).map_err(io)?;
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        unix_time,
        elapsed_seconds: elapsed,
        cache_dir: Cache::from_env(&cfg.io.cache_dir)
            .dir()
            .display()
            .to_string(),
    };
    write_json(&dir.join("metadata.json"), &meta).map_err(io)
}

/// Loads, solves, writes and returns the exit code.
pub fn run(config: &Path, mode: Option<Mode>) -> i32 {
    let start = Instant::now();
    let cfg = match RunConfig::load(config) {
        Ok(c) => match mode {
            Some(m) => c.with_mode(m),
            None => c,
        },
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    let result = forms_for(&cfg).and_then(|forms| compute(&cfg, &forms));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            if let SolveError::Threshold(t) = &e {
                println!("sup_value = {}", t.sup_value);
                println!("threshold = {}", t.threshold);
                if let Err(w) = write_json(&cfg.io.out_dir.join("threshold.json"), t) {
                    eprintln!("error: {w}");
                }
            }
            return e.code();
        }
    };
    if let Err(e) = write_outputs(&cfg, &outcome, start.elapsed().as_secs_f64()) {
        eprintln!("error: {e}");
        return e.code();
    }
    print!("{}", render_table(&outcome.checks));
    let r = &outcome.report;
    println!(
        "energy = {}  c_star = {}  mp_level_m = {}",
        r.energy, r.c_star, r.mp_level_m
    );
    if outcome.passed() {
        exit::OK
    } else {
        exit::NUMERICAL
    }
}
