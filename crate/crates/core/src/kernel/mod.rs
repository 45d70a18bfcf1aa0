//! The hyperbolic fractional kernel `𝒦ₛ`, its tabulation and the angularly
//! reduced two-point kernel used for radial functions.

mod interp;
mod pointwise;
mod reduced;
mod table;
mod terms;

pub use interp::{AntiderivativeTable, LnKernelInterp};
pub use pointwise::{
    bessel_parameters, kernel, kernel_even, kernel_odd, kernel_value, ln_normalizing_constant,
    near_field_coefficient, normalizing_constant, KernelEvaluator, KernelValue,
    UNDERFLOW_THRESHOLD,
};
pub use reduced::{
    build_reduced_kernel, build_reduced_kernel_with, DiagonalModel, ReducedKernel,
    ReducedKernelModel,
};
pub use table::{
    build_kernel_table, fit_asymptotics, fit_exponential_rate, fit_slope, KernelTable, FAR_WINDOW,
    NEAR_WINDOW,
};
pub use terms::{BesselTerm, BesselTermSum};
