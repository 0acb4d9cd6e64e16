//! Group-invariant similarity solutions for three transport problems:
//! temperature stratification of a stagnant lake, the unsteady free-convection
//! boundary layer on a non-isothermal vertical plate, and pollutant dispersion
//! beneath an inversion lid. Alongside the evaluators live independent oracles
//! (PDE residuals, a collocation checker, a finite-difference elliptic solver
//! and numeric group-action checks) used to verify them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blayer;
pub mod catalog;
pub mod csv;
pub mod error;
pub mod field;
pub mod grid;
pub mod lake;
pub mod ode;
pub mod plume;
pub mod scenario;
pub mod solve;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use field::{central_derivative, Axis, ScalarField};
pub use grid::{linspace, Grid1D};
