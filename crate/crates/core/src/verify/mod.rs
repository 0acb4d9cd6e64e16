//! Independent oracles: PDE residual engines, a collocation checker for the
//! boundary-layer ODEs, a finite-difference solver for the plume and numeric
//! group-action checks.

pub mod blayer;
pub mod checks;
pub mod lake;
pub mod plume;
pub mod plume_fd;
pub mod symmetry;

pub use blayer::{collocation_check, pde_residual_blayer, BlayerResiduals, SampleBox};
pub use checks::{run_checks, Check};
pub use lake::{lake_pde_residual, reduced_ode_residual};
pub use plume_fd::{plume_fd_solve, FdSolution};
pub use symmetry::{apply_group_action, symmetry_check, GroupElement};

/// Norms of a residual sampled over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub equation: String,
    pub max_norm: f64,
    /// root-mean-square of the samples
    pub l2_norm: f64,
    pub grid_spacing: Vec<f64>,
    pub samples: usize,
    /// magnitude the norms are compared against (0 when absolute)
    pub scale: f64,
    /// set when the checked solution violates its boundary conditions
    pub boundary_violation: bool,
}

impl ResidualReport {
    pub fn from_samples(
        equation: impl Into<String>,
        residuals: &[f64],
        scale: f64,
        grid_spacing: Vec<f64>,
    ) -> Self {
        let max_norm = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let sq: f64 = residuals.iter().map(|r| r * r).sum();
        let l2_norm = if residuals.is_empty() {
            0.0
        } else {
            (sq / residuals.len() as f64).sqrt()
        };
        ResidualReport {
            equation: equation.into(),
            max_norm,
            l2_norm,
            grid_spacing,
            samples: residuals.len().max(1),
            scale,
            boundary_violation: false,
        }
    }

    /// `max_norm / scale`, or `max_norm` when the scale is zero.
    pub fn relative_max(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_norm / self.scale
        } else {
            self.max_norm
        }
    }

    pub fn relative_l2(&self) -> f64 {
        if self.scale > 0.0 {
            self.l2_norm / self.scale
        } else {
            self.l2_norm
        }
    }
}
