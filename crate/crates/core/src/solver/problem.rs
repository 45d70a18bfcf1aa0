//! Problem parameters.

use crate::error::{domain, Result};
use crate::funcspace::{critical_exponent, spectral_bottom};
use serde::{Deserialize, Serialize};

/// Which equation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `−Δu + (−Δ)ˢu − λu = |u|^{p−1}u`.
    Subcritical,
    /// Adds the critical power `|u|^{2*−2}u` to the right-hand side.
    #[serde(alias = "critical")]
    CriticalPerturbed,
}

/// `(N, s, λ, p)` and the mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(rename = "N", alias = "dim")]
    pub dim: usize,
    pub s: f64,
    #[serde(rename = "lambda")]
    pub lambda: f64,
    pub p: f64,
    pub mode: Mode,
}

impl ProblemSpec {
    /// Validated parameters: `N ≥ 3`, `0 < s < 1`, `λ < (N−1)²/4`, `1 < p < 2*−1`.
    pub fn new(dim: usize, s: f64, lambda: f64, p: f64, mode: Mode) -> Result<Self> {
        let spec = Self {
            dim,
            s,
            lambda,
            p,
            mode,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 3 {
            return Err(domain(format!("N must be at least 3, got {}", self.dim)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(domain(format!("s must lie in (0, 1), got {}", self.s)));
        }
        let bottom = spectral_bottom(self.dim);
        if !(self.lambda < bottom) || !self.lambda.is_finite() {
            return Err(domain(format!(
                "λ must be finite and below (N−1)²/4 = {bottom}, got {}",
                self.lambda
            )));
        }
        let top = self.critical_exponent() - 1.0;
        if !(self.p > 1.0 && self.p < top) {
            return Err(domain(format!(
                "p must lie in (1, 2*−1) = (1, {top}), got {}",
                self.p
            )));
        }
        Ok(())
    }

    /// `2* = 2N/(N−2)`.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.dim).unwrap_or(f64::INFINITY)
    }

    /// Powers `q` of the terms `(1/q)∫|u|^q` in the energy.
    pub fn powers(&self) -> Vec<f64> {
        match self.mode {
            Mode::Subcritical => vec![self.p + 1.0],
            Mode::CriticalPerturbed => vec![self.critical_exponent(), self.p + 1.0],
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..*self }
    }
}
