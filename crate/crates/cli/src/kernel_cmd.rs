//! `kernel`: tabulates the fractional kernel to CSV.

use crate::exit;
use hypfrac::io::write_kernel_csv;
use hypfrac::kernel::build_kernel_table;
use std::path::PathBuf;

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelArgs {
    pub dim: usize,
    pub s: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub points: usize,
    pub out: PathBuf,
}

impl KernelArgs {
    pub fn validate(&self) -> Result<(), String> {
        if self.dim < 2 {
            return Err(format!("--dim must be at least 2, got {}", self.dim));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(format!("--s must lie in (0, 1), got {}", self.s));
        }
        if !(self.rho_min > 0.0 && self.rho_min < self.rho_max && self.rho_max.is_finite()) {
            return Err(format!(
                "need 0 < --rho-min < --rho-max < ∞, got [{}, {}]",
                self.rho_min, self.rho_max
            ));
        }
        if self.points < MIN_POINTS {
            return Err(format!(
                "--points must be at least {MIN_POINTS}, got {}",
                self.points
            ));
        }
        Ok(())
    }
}

/// Writes the table and returns the exit code.
pub fn run(args: &KernelArgs) -> i32 {
    if let Err(e) = args.validate() {
        eprintln!("error: {e}");
        return exit::USAGE;
    }
    let table = match build_kernel_table(args.dim, args.s, args.rho_min, args.rho_max, args.points)
    {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::NUMERICAL;
        }
    };
    if let Err(e) = write_kernel_csv(&args.out, &table) {
        eprintln!("error: {e}");
        return exit::FAILED;
    }
    println!(
        "wrote {} points to {} (near exponent {:.4}, far rate {:.4})",
        table.rho_grid.len(),
        args.out.display(),
        table.near_exponent,
        table.far_rate
    );
    exit::OK
}
