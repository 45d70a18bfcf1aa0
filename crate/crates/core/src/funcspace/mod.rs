//! Radial function spaces: grids, quadratic forms, norms, rearrangement and
//! Sobolev-type quotients.

mod forms;
mod function;
mod grid;
mod quotient;
mod rearrange;

pub use forms::{
    assemble_forms, dirichlet_energy, norm_lambda_sq, quadratic, regional_seminorm_sq,
    seminorm_s_sq, spectral_bottom, QuadraticForms,
};
pub use function::RadialFunction;
pub use grid::{
    ball_volume, shell_volume, CellPoint, RadialGrid, Spacing, DEFAULT_NODES, DEFAULT_R_MAX,
    POINTS_PER_CELL, POWER_POINTS_PER_CELL,
};
pub use quotient::{
    concentrating_profile, critical_exponent, estimate_local_critical_constant,
    estimate_mixed_constant, lp_integral, lp_norm, mixed_quotient, sobolev_quotient,
    MixedConstantEstimate, CONCENTRATION_SCALES,
};
pub use rearrange::schwarz_rearrange;
