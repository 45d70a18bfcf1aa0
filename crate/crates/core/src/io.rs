//! File formats and the on-disk cache.
//!
//! * Kernel tables: CSV `rho,kernel_value`, 17 significant digits.
//! * Radial profiles: CSV `r,u`.
//! * Matrices: little-endian binary (`HYPFMAT1`, rows, cols, column-major
//!   `f64` data) with a JSON sidecar.
//! * Reports: pretty-printed JSON.
//!
//! Every write goes to a temporary file in the target directory and is then
//! renamed into place.

use crate::error::{Error, Result};
use crate::funcspace::{
    assemble_forms, QuadraticForms, RadialFunction, RadialGrid, POINTS_PER_CELL,
    POWER_POINTS_PER_CELL,
};
use crate::kernel::{
    build_reduced_kernel, DiagonalModel, KernelTable, ReducedKernel, ReducedKernelModel,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Bumped whenever a cached artifact changes meaning.
pub const FORMAT_VERSION: u32 = 1;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "HYPFRAC_CACHE";

pub const KERNEL_CSV_HEADER: [&str; 2] = ["rho", "kernel_value"];
pub const PROFILE_CSV_HEADER: [&str; 2] = ["r", "u"];

const MATRIX_MAGIC: &[u8; 8] = b"HYPFMAT1";

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

fn format_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Format {
        what: what.into(),
        reason: e.to_string(),
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| io_err(path, "not a file path"))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| format_err("JSON", e))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, to_json_string(value)?.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| format_err(&path.display().to_string(), e))
}

/// `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn two_column_csv(header: [&str; 2], a: &[f64], b: &[f64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| format_err("CSV", e))?;
    for (x, y) in a.iter().zip(b) {
        w.write_record([format_f64(*x), format_f64(*y)])
            .map_err(|e| format_err("CSV", e))?;
    }
    w.into_inner().map_err(|e| format_err("CSV", e))
}

fn read_two_columns(path: &Path, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let what = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let head = rdr.headers().map_err(|e| format_err(&what, e))?;
    if head.iter().collect::<Vec<_>>() != header {
        return Err(format_err(
            &what,
            format!("expected header {}", header.join(",")),
        ));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| format_err(&what, e))?;
        if rec.len() != 2 {
            return Err(format_err(&what, format!("row with {} fields", rec.len())));
        }
        let parse = |k: usize| {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| format_err(&what, e))
        };
        a.push(parse(0)?);
        b.push(parse(1)?);
    }
    Ok((a, b))
}

/// Kernel table as CSV bytes.
pub fn kernel_csv(table: &KernelTable) -> Result<Vec<u8>> {
    two_column_csv(KERNEL_CSV_HEADER, &table.rho_grid, &table.values)
}

pub fn write_kernel_csv(path: &Path, table: &KernelTable) -> Result<()> {
    atomic_write(path, &kernel_csv(table)?)
}

/// `(rho, kernel_value)` columns.
pub fn read_kernel_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    read_two_columns(path, KERNEL_CSV_HEADER)
}

/// Profile as CSV bytes, one row per grid node.
pub fn profile_csv(u: &RadialFunction) -> Result<Vec<u8>> {
    two_column_csv(PROFILE_CSV_HEADER, u.grid().nodes(), u.values())
}

pub fn write_profile_csv(path: &Path, u: &RadialFunction) -> Result<()> {
    atomic_write(path, &profile_csv(u)?)
}

/// Reads a profile written on `grid`; the radii must match the nodes.
pub fn read_profile_csv(path: &Path, grid: Arc<RadialGrid>) -> Result<RadialFunction> {
    let (r, u) = read_two_columns(path, PROFILE_CSV_HEADER)?;
    let nodes = grid.nodes();
    let matches = r.len() == nodes.len()
        && r.iter()
            .zip(nodes)
            .all(|(a, b)| (a - b).abs() <= 1e-14 * b.abs().max(1.0));
    if !matches {
        return Err(Error::Mismatch(format!(
            "{} does not sample this grid's nodes",
            path.display()
        )));
    }
    RadialFunction::new(grid, u)
}

/// Binary encoding of a matrix.
pub fn matrix_bytes(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 8 * m.len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for v in m.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn matrix_from_bytes(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let bad = |reason: &str| format_err("matrix file", reason);
    if bytes.len() < 24 || &bytes[..8] != MATRIX_MAGIC {
        return Err(bad("missing header"));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap()) as usize;
    let (rows, cols) = (word(8), word(16));
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| bad("dimensions overflow"))?;
    if bytes.len() != 24 + 8 * count {
        return Err(bad("length does not match the dimensions"));
    }
    let data = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    Ok(DMatrix::from_iterator(rows, cols, data))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    atomic_write(path, &matrix_bytes(m))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    matrix_from_bytes(&fs::read(path).map_err(|e| io_err(path, e))?)
}

/// Content hash of `(N, s, grid)` plus everything that shapes the discrete forms.
pub fn grid_hash(dim: usize, s: f64, grid: &RadialGrid) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT_VERSION.to_le_bytes());
    h.update((dim as u64).to_le_bytes());
    h.update(s.to_bits().to_le_bytes());
    h.update((POINTS_PER_CELL as u64).to_le_bytes());
    h.update((POWER_POINTS_PER_CELL as u64).to_le_bytes());
    h.update((grid.len() as u64).to_le_bytes());
    for r in grid.nodes() {
        h.update(r.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Sidecar of a cached reduced kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedKernelSidecar {
    pub version: u32,
    pub hash: String,
    pub dim: usize,
    pub s: f64,
    /// Points at which the kernel is sampled.
    pub grid: Vec<f64>,
    pub diagonal_model: DiagonalModel,
}

/// Sidecar of cached quadratic forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormsSidecar {
    pub version: u32,
    pub hash: String,
    pub dim: usize,
    pub s: f64,
    pub nodes: Vec<f64>,
}

const FORM_NAMES: [&str; 4] = ["stiffness", "mass", "nonlocal", "exterior"];

/// Directory of cached reduced kernels and quadratic forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$HYPFRAC_CACHE` if set and nonempty, otherwise `fallback`.
    pub fn from_env(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Self::new(dir),
            _ => Self::new(fallback),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn stem(&self, kind: &str, dim: usize, s: f64, hash: &str) -> PathBuf {
        self.dir.join(format!("{kind}-N{dim}-s{s}-{}", &hash[..16]))
    }

    /// Reduced kernel on the grid's nonlocal points, loaded when a matching
    /// entry exists and built and stored otherwise.
    pub fn reduced_kernel(&self, grid: &RadialGrid, s: f64) -> Result<ReducedKernel> {
        let dim = grid.dim();
        let hash = grid_hash(dim, s, grid);
        let stem = self.stem("reduced", dim, s, &hash);
        let (bin, side) = (stem.with_extension("bin"), stem.with_extension("json"));
        let points = grid.nonlocal_points();
        if let Ok(meta) = read_json::<ReducedKernelSidecar>(&side) {
            if meta.version == FORMAT_VERSION && meta.hash == hash && meta.grid == points {
                if let Ok(w) = read_matrix(&bin) {
                    let model = Arc::new(ReducedKernelModel::new(dim, s)?);
                    if let Ok(k) = ReducedKernel::from_samples(model, points.clone(), w) {
                        return Ok(k);
                    }
                }
            }
        }
        let kernel = build_reduced_kernel(dim, s, &points)?;
        write_matrix(&bin, &kernel.w)?;
        let meta = ReducedKernelSidecar {
            version: FORMAT_VERSION,
            hash,
            dim,
            s,
            grid: points,
            diagonal_model: kernel.diagonal_model,
        };
        write_json(&side, &meta)?;
        Ok(kernel)
    }

    /// Quadratic forms for `(grid, s)`, from the cache when a matching entry exists.
    pub fn forms(&self, grid: Arc<RadialGrid>, s: f64) -> Result<QuadraticForms> {
        let dim = grid.dim();
        let hash = grid_hash(dim, s, &grid);
        let stem = self.stem("forms", dim, s, &hash);
        let side = stem.with_extension("json");
        let file = |name: &str| stem.with_extension(format!("{name}.bin"));
        if let Ok(meta) = read_json::<FormsSidecar>(&side) {
            if meta.version == FORMAT_VERSION && meta.hash == hash && meta.nodes == grid.nodes() {
                let loaded: Result<Vec<DMatrix<f64>>> =
                    FORM_NAMES.iter().map(|n| read_matrix(&file(n))).collect();
                if let Ok(mut m) = loaded {
                    let n = grid.len();
                    if m.iter().all(|a| a.nrows() == n && a.ncols() == n) {
                        let exterior = m.pop().unwrap();
                        let nonlocal = m.pop().unwrap();
                        let mass = m.pop().unwrap();
                        let stiffness = m.pop().unwrap();
                        return Ok(QuadraticForms {
                            grid,
                            order: s,
                            stiffness,
                            mass,
                            nonlocal,
                            exterior,
                        });
                    }
                }
            }
        }
        let kernel = self.reduced_kernel(&grid, s)?;
        let forms = assemble_forms(grid.clone(), s, &kernel)?;
        for (name, m) in FORM_NAMES.iter().zip([
            &forms.stiffness,
            &forms.mass,
            &forms.nonlocal,
            &forms.exterior,
        ]) {
            write_matrix(&file(name), m)?;
        }
        write_json(
            &side,
            &FormsSidecar {
                version: FORMAT_VERSION,
                hash,
                dim,
                s,
                nodes: grid.nodes().to_vec(),
            },
        )?;
        Ok(forms)
    }
}
