//! Solver reports.

use crate::funcspace::RadialFunction;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

/// Outcome of a solve. Levels that a run does not compute are NaN and
/// serialize as `null`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: RadialFunction,
    pub energy: f64,
    /// `E′(u)[u]`.
    pub nehari_value: f64,
    /// Dual norm of `E′(u)` in the `‖·‖_λ` metric.
    pub residual: f64,
    pub c_star: f64,
    pub mp_level_m: f64,
    pub beta: f64,
    pub mp_radius: f64,
    pub threshold: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Serialize)]
struct Profile<'a> {
    r: &'a [f64],
    u: &'a [f64],
}

impl Serialize for SolveReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SolveReport", 11)?;
        st.serialize_field(
            "solution",
            &Profile {
                r: self.solution.grid().nodes(),
                u: self.solution.values(),
            },
        )?;
        st.serialize_field("energy", &self.energy)?;
        st.serialize_field("nehari_value", &self.nehari_value)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("c_star", &self.c_star)?;
        st.serialize_field("mp_level_m", &self.mp_level_m)?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("mp_radius", &self.mp_radius)?;
        st.serialize_field("threshold", &self.threshold)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("converged", &self.converged)?;
        st.end()
    }
}
