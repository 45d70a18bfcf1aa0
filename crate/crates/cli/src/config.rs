//! Run configuration read from JSON.

use hypfrac::funcspace::{RadialGrid, Spacing, DEFAULT_NODES, DEFAULT_R_MAX};
use hypfrac::solver::{Mode, ProblemSpec, SolverOptions};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Output files a solve may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// `report.json`.
    Json,
    /// `profile.csv`.
    Csv,
    /// `plot.dat`.
    Plot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "R_max", default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_nodes")]
    pub node_count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_r_max() -> f64 {
    DEFAULT_R_MAX
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn default_spacing() -> Spacing {
    Spacing::GeometricUniform
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_max: DEFAULT_R_MAX,
            node_count: DEFAULT_NODES,
            spacing: Spacing::GeometricUniform,
        }
    }
}

impl GridConfig {
    pub fn build(&self, dim: usize) -> hypfrac::Result<RadialGrid> {
        RadialGrid::with_spacing(dim, self.r_max, self.node_count, self.spacing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_path_nodes")]
    pub path_nodes: usize,
}

fn default_tol() -> f64 {
    SolverOptions::default().tol
}

fn default_max_iter() -> usize {
    SolverOptions::default().max_iter
}

fn default_path_nodes() -> usize {
    SolverOptions::default().path_nodes
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
            path_nodes: default_path_nodes(),
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            path_nodes: self.path_nodes,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from(".hypfrac-cache")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Plot]
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            out_dir: default_out_dir(),
            cache_dir: default_cache_dir(),
            formats: default_formats(),
        }
    }
}

/// Everything a `solve` run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub io: IoConfig,
}

impl RunConfig {
    /// Parses and validates a configuration.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| format!("malformed configuration: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    /// Parameter ranges checked before any computation.
    pub fn validate(&self) -> Result<(), String> {
        self.problem.validate().map_err(|e| e.to_string())?;
        let g = &self.grid;
        if !(g.r_max.is_finite() && g.r_max > 0.0) {
            return Err(format!(
                "grid.R_max must be positive and finite, got {}",
                g.r_max
            ));
        }
        if g.node_count < 16 {
            return Err(format!(
                "grid.node_count must be at least 16, got {}",
                g.node_count
            ));
        }
        g.build(self.problem.dim).map_err(|e| e.to_string())?;
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol < 1.0) {
            return Err(format!("solver.tol must lie in (0, 1), got {}", s.tol));
        }
        if s.max_iter == 0 {
            return Err("solver.max_iter must be positive".into());
        }
        if s.path_nodes < 3 {
            return Err(format!(
                "solver.path_nodes must be at least 3, got {}",
                s.path_nodes
            ));
        }
        Ok(())
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.problem.mode = mode;
        self
    }

    pub fn wants(&self, format: Format) -> bool {
        self.io.formats.contains(&format)
    }
}
