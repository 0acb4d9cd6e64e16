//! The oracle suite run after solving a scenario.

use super::blayer::{collocation_check, pde_residual_blayer, SampleBox};
use super::lake::{lake_pde_residual, lake_residual, reduced_ode_residual, SeparableField};
use super::plume::{compare_with_series, termwise_residual};
use super::plume_fd::plume_fd_solve;
use super::symmetry::{symmetry_check, GroupElement};
use super::ResidualReport;
use crate::error::Result;
use crate::grid::{linspace, Grid1D};
use crate::plume::{decay_rate, PlumeCase};
use crate::scenario::Scenario;
use crate::solve::{LakeSolution, Solved};

/// Relative residual gate of analytic lake checks.
pub const LAKE_ANALYTIC_GATE: f64 = 1e-8;
/// Gate of the finite-difference residual of the reduced lake ODE.
pub const LAKE_ODE_GATE: f64 = 1e-6;
pub const COLLOCATION_GATE: f64 = 1e-6;
pub const FAR_FIELD_GATE: f64 = 1e-8;
pub const CONTINUITY_GATE: f64 = 1e-6;
pub const MOMENTUM_ENERGY_GATE: f64 = 1e-4;
pub const PLUME_MODE_GATE: f64 = 1e-8;
pub const PLUME_FD_GATE: f64 = 1e-2;

/// A report with the value it is judged by and its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub report: ResidualReport,
    /// the norm compared against `threshold` (relative when the report has a scale)
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn relative(report: ResidualReport, threshold: f64) -> Self {
        let value = report.relative_max();
        Self::judge(report, value, threshold)
    }

    fn judge(report: ResidualReport, value: f64, threshold: f64) -> Self {
        let pass = value < threshold && value.is_finite() && !report.boundary_violation;
        Check {
            report,
            value,
            threshold,
            pass,
        }
    }
}

fn interior_or(g: Option<&Grid1D>, lo: f64, hi: f64, fallback: Grid1D) -> Grid1D {
    g.and_then(|g| {
        let pts: Vec<f64> = g
            .points()
            .iter()
            .copied()
            .filter(|v| *v > lo && *v < hi)
            .collect();
        Grid1D::new(pts).ok()
    })
    .unwrap_or(fallback)
}

/// Runs the oracles that apply to the scenario's application.
pub fn run_checks(scenario: &Scenario, solved: &Solved) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    match solved {
        Solved::Lake(sol) => {
            let p = scenario.lake_params().expect("lake parameters");
            let case = scenario.application.lake_case().expect("lake application");
            let z = interior_or(
                scenario.grids.get("z"),
                0.0,
                p.h,
                linspace(0.025 * p.h, 0.975 * p.h, 101)?,
            );
            let t = interior_or(
                scenario.grids.get("t"),
                0.0,
                f64::INFINITY,
                linspace(1.0, 150.0, 51)?,
            );
            let elem = GroupElement::lake(2.0, 0.5);
            match sol {
                LakeSolution::Closed(_) => {
                    checks.push(Check::relative(
                        lake_pde_residual(p, case, &z, &t)?,
                        LAKE_ANALYTIC_GATE,
                    ));
                    let mut s = scenario.clone();
                    s.grids.insert("z".into(), z.clone());
                    s.grids.insert("t".into(), t.clone());
                    let mut r = symmetry_check(&elem, &s, solved)?.remove(0);
                    r.equation = format!("{}-symmetry", r.equation);
                    checks.push(Check::relative(r, LAKE_ANALYTIC_GATE));
                }
                LakeSolution::Bvp { solution, profile } => {
                    let ode = reduced_ode_residual(p, solution)?;
                    let value = ode.max_norm;
                    checks.push(Check::judge(ode, value, LAKE_ODE_GATE));
                    let field = SeparableField {
                        profile: profile.clone(),
                        m: p.m,
                    };
                    let base = lake_residual(p, case, profile.clone(), &field, &z, &t)?;
                    let gate = 2.0 * base.relative_max().max(1e-14);
                    let mut s = scenario.clone();
                    s.grids.insert("z".into(), z.clone());
                    s.grids.insert("t".into(), t.clone());
                    let mut r = symmetry_check(&elem, &s, solved)?.remove(0);
                    r.equation = format!("{}-symmetry", r.equation);
                    checks.push(Check::relative(base, LAKE_ODE_GATE));
                    checks.push(Check::relative(r, gate));
                }
            }
        }
        Solved::Blayer(sol) => {
            let p = scenario.blayer_params().expect("blayer parameters");
            let coll = collocation_check(sol, p);
            let value = coll.max_norm;
            checks.push(Check::judge(coll, value, COLLOCATION_GATE));
            let last = sol.eta.len() - 1;
            let far = ResidualReport::from_samples(
                "similarity-far-field",
                &[sol.df[last], sol.theta[last]],
                0.0,
                vec![],
            );
            let value = far.max_norm;
            checks.push(Check::judge(far, value, FAR_FIELD_GATE * (1.0 + 1e-9)));
            let dy = scenario.fd_step("y");
            let samples = SampleBox {
                x: scenario.grid("x")?.clone(),
                y: interior_or(
                    scenario.grids.get("y"),
                    dy,
                    f64::INFINITY,
                    linspace(0.25, 0.5 * p.eta_max, 21)?,
                ),
                t: scenario.grid("t")?.clone(),
                steps: [
                    scenario.fd_step("x"),
                    scenario.fd_step("y"),
                    scenario.fd_step("t"),
                ],
            };
            let r = pde_residual_blayer(sol, p, &samples)?;
            checks.push(Check::relative(r.continuity, CONTINUITY_GATE));
            checks.push(Check::relative(r.momentum, MOMENTUM_ENERGY_GATE));
            checks.push(Check::relative(r.energy, MOMENTUM_ENERGY_GATE));
        }
        Solved::Plume => {
            let p = scenario.plume_params().expect("plume parameters");
            let case = scenario
                .application
                .plume_case()
                .expect("plume application");
            let modes = termwise_residual(p, case)?;
            let value = modes.max_norm;
            checks.push(Check::judge(modes, value, PLUME_MODE_GATE));
            if case == PlumeCase::LargeLambda {
                let slowest = decay_rate(p, 0.5 * std::f64::consts::PI)?;
                let x_max = (1e-4f64).ln() / slowest;
                let fd = plume_fd_solve(p, x_max, 129, 65, case)?;
                let cmp = compare_with_series(p, &fd, 0.05, 0.05, 1e-2)?;
                let mut report = ResidualReport::from_samples(
                    "plume-fd-vs-series",
                    &[cmp.max_deviation],
                    0.0,
                    vec![],
                );
                report.samples = cmp.samples;
                checks.push(Check::judge(report, cmp.max_deviation, PLUME_FD_GATE));
            }
        }
    }
    Ok(checks)
}
