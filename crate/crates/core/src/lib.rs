//! Numerical toolkit for mixed local/nonlocal elliptic problems on the
//! Poincaré ball.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: ball-model distances, Möbius translations and radial volume.
//! * [`specfun`]: modified Bessel functions `K_ν` and double-exponential quadrature.
//! * [`kernel`]: the fractional kernel `𝒦ₛ(ρ)`, its tabulation and the
//!   angularly reduced two-point kernel used for radial functions.
//! * [`funcspace`]: radial grids, quadratic forms, norms, Schwarz
//!   rearrangement and Sobolev-type quotients.
//! * [`solver`]: Nehari ground states, mountain-pass solutions and the
//!   verifiers attached to them.
//! * [`io`]: CSV/JSON/binary formats shared with the command line front-end.

// `!(x > 0.0)` also rejects NaN, which is the point of those guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
