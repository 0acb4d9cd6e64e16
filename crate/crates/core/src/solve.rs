//! Solving a scenario and rendering its requested outputs.

use rayon::prelude::*;

use crate::blayer::{reconstruct_fields, solve_similarity, SimilaritySolution};
use crate::error::{Error, Result};
use crate::field::{Axis, ScalarField};
use crate::grid::{linspace, Grid1D};
use crate::lake::{
    reduced_ode_general_m, BvpProfile, LakeBvpSolution, LakeCase, LakeParams, LakeProfile, Profile,
};
use crate::plume::{
    concentration_no_absorption, eigen_table, full_absorption_rates, full_absorption_with_rates,
};
use crate::scenario::{OutputRequest, Scenario};

/// Points of the depth grid used by the general-m solver.
pub const BVP_POINTS: usize = 40_001;

/// Lake profile from the closed form (`m = 1`) or the boundary-value solver.
#[derive(Debug, Clone)]
pub enum LakeSolution {
    Closed(LakeProfile),
    Bvp {
        solution: LakeBvpSolution,
        profile: BvpProfile,
    },
}

impl LakeSolution {
    pub fn solve(params: &LakeParams, case: LakeCase) -> Result<Self> {
        if params.m == 1.0 || case == LakeCase::Case2 {
            return Ok(LakeSolution::Closed(LakeProfile::for_case(params, case)?));
        }
        let grid = linspace(0.0, params.h, BVP_POINTS)?;
        let solution = reduced_ode_general_m(params, &grid)?;
        let profile = solution.profile()?;
        Ok(LakeSolution::Bvp { solution, profile })
    }

    pub fn f(&self, z: f64) -> f64 {
        match self {
            LakeSolution::Closed(p) => p.f(z),
            LakeSolution::Bvp { profile, .. } => profile.f(z),
        }
    }

    /// `T0 + (m t)^(1/m) F(z)`.
    pub fn temperature(&self, params: &LakeParams, z: f64, t: f64) -> f64 {
        let amp = if params.m == 1.0 {
            t
        } else {
            (params.m * t).powf(1.0 / params.m)
        };
        params.t0 + amp * self.f(z)
    }
}

#[derive(Debug, Clone)]
pub enum Solved {
    Lake(LakeSolution),
    Blayer(SimilaritySolution),
    /// plume outputs are evaluated directly from closed forms
    Plume,
}

pub fn solve(scenario: &Scenario) -> Result<Solved> {
    scenario.validate()?;
    if let Some(p) = scenario.lake_params() {
        let case = scenario.application.lake_case().expect("lake application");
        Ok(Solved::Lake(LakeSolution::solve(p, case)?))
    } else if let Some(p) = scenario.blayer_params() {
        Ok(Solved::Blayer(solve_similarity(p)?))
    } else {
        Ok(Solved::Plume)
    }
}

/// Rendered output: fields sharing one grid, or a plain table.
#[derive(Debug, Clone, PartialEq)]
pub enum Rendered {
    Fields(Vec<ScalarField>),
    Table {
        header: Vec<String>,
        rows: Vec<Vec<f64>>,
    },
}

impl Rendered {
    pub fn write_csv<W: std::io::Write>(&self, sink: W) -> Result<()> {
        match self {
            Rendered::Fields(fields) => crate::csv::write_csv(fields, sink),
            Rendered::Table { header, rows } => crate::csv::write_table(header, rows, sink),
        }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }
}

fn number_label(prefix: &str, v: f64) -> String {
    format!("{prefix}{v}")
}

fn check_range(z: f64, h: f64, what: &str) -> Result<()> {
    if !(0.0..=h).contains(&z) {
        return Err(Error::Scenario(format!("{what} {z} outside [0, {h}]")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Scenario(format!("time {t} must be finite and >= 0")));
    }
    Ok(())
}

/// Renders every requested output of a solved scenario, in request order.
pub fn render(scenario: &Scenario, solved: &Solved) -> Result<Vec<(String, Rendered)>> {
    scenario
        .outputs
        .iter()
        .map(|out| Ok((out.name().to_string(), render_one(scenario, solved, out)?)))
        .collect()
}

fn render_one(scenario: &Scenario, solved: &Solved, out: &OutputRequest) -> Result<Rendered> {
    match (solved, out) {
        (Solved::Lake(sol), _) => {
            let p = scenario.lake_params().expect("lake parameters");
            render_lake(scenario, p, sol, out)
        }
        (Solved::Blayer(sol), _) => render_blayer(scenario, sol, out),
        (Solved::Plume, _) => render_plume(scenario, out),
    }
}

fn render_lake(
    scenario: &Scenario,
    p: &LakeParams,
    sol: &LakeSolution,
    out: &OutputRequest,
) -> Result<Rendered> {
    let z = scenario.grid("z")?;
    for &zz in [z.first(), z.last()].iter() {
        check_range(zz, p.h, "depth")?;
    }
    let z_axis = Axis::new("z", z.clone());
    match out {
        OutputRequest::TemperatureProfile { times, .. } => {
            let fields = times
                .iter()
                .map(|&t| {
                    check_time(t)?;
                    ScalarField::from_fn_1d(z_axis.clone(), number_label("T_", t), |zz| {
                        sol.temperature(p, zz, t)
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Rendered::Fields(fields))
        }
        OutputRequest::TemperatureHistory { depths, .. } => {
            let t = scenario.grid("t")?;
            check_time(t.first())?;
            let t_axis = Axis::new("t", t.clone());
            let fields = depths
                .iter()
                .map(|&d| {
                    check_range(d, p.h, "depth")?;
                    ScalarField::from_fn_1d(t_axis.clone(), number_label("T_z", d), |tt| {
                        sol.temperature(p, d, tt)
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Rendered::Fields(fields))
        }
        OutputRequest::AlphaSweep { time, alphas, .. } => {
            check_time(*time)?;
            let case = scenario.application.lake_case().expect("lake application");
            let fields = alphas
                .iter()
                .map(|&a| {
                    let pa = LakeParams {
                        alpha: a,
                        ..p.clone()
                    };
                    pa.validate(case)?;
                    let s = LakeSolution::solve(&pa, case)?;
                    ScalarField::from_fn_1d(z_axis.clone(), number_label("T_alpha", a), |zz| {
                        s.temperature(&pa, zz, *time)
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Rendered::Fields(fields))
        }
        OutputRequest::Profile { .. } => Ok(Rendered::Fields(vec![ScalarField::from_fn_1d(
            Axis::new("eta", z.clone()),
            "F",
            |zz| sol.f(zz),
        )?])),
        _ => Err(unsupported(scenario, out)),
    }
}

fn unsupported(scenario: &Scenario, out: &OutputRequest) -> Error {
    Error::Scenario(format!(
        "output `{}` is not defined for application `{}`",
        out.name(),
        scenario.application.tag()
    ))
}

fn render_blayer(
    scenario: &Scenario,
    sol: &SimilaritySolution,
    out: &OutputRequest,
) -> Result<Rendered> {
    let p = scenario.blayer_params().expect("blayer parameters");
    match out {
        OutputRequest::Profile { .. } => {
            let axis = Axis::new("eta", sol.eta.clone());
            Ok(Rendered::Fields(vec![
                ScalarField::new_1d(axis.clone(), sol.f.clone(), "F")?,
                ScalarField::new_1d(axis.clone(), sol.df.clone(), "dF")?,
                ScalarField::new_1d(axis, sol.theta.clone(), "Theta")?,
            ]))
        }
        OutputRequest::FieldSlice { x, t, .. } => {
            let y = scenario.grid("y")?;
            let samples = y
                .points()
                .iter()
                .map(|&yy| reconstruct_fields(sol, p, *x, yy, *t))
                .collect::<Result<Vec<_>>>()?;
            let axis = Axis::new("y", y.clone());
            Ok(Rendered::Fields(vec![
                ScalarField::new_1d(axis.clone(), samples.iter().map(|s| s.u).collect(), "u")?,
                ScalarField::new_1d(axis.clone(), samples.iter().map(|s| s.v).collect(), "v")?,
                ScalarField::new_1d(axis, samples.iter().map(|s| s.temperature).collect(), "T")?,
            ]))
        }
        OutputRequest::Wall { .. } => Ok(Rendered::Table {
            header: vec!["d2F0".into(), "dTheta0".into()],
            rows: vec![vec![sol.wall_shear, sol.wall_theta_slope]],
        }),
        _ => Err(unsupported(scenario, out)),
    }
}

fn render_plume(scenario: &Scenario, out: &OutputRequest) -> Result<Rendered> {
    let p = scenario.plume_params().expect("plume parameters");
    let case = scenario
        .application
        .plume_case()
        .expect("plume application");
    match out {
        OutputRequest::ConcentrationLine { .. } => {
            let x = scenario.grid("x")?;
            if x.first() < 0.0 {
                return Err(Error::Scenario("x grid must be >= 0".into()));
            }
            Ok(Rendered::Fields(vec![ScalarField::from_fn_1d(
                Axis::new("x", x.clone()),
                "C",
                |xx| concentration_no_absorption(p, xx),
            )?]))
        }
        OutputRequest::ConcentrationField { .. } => {
            let x = scenario.grid("x")?;
            let y = scenario.grid("y")?;
            concentration_field(p, x, y).map(|f| Rendered::Fields(vec![f]))
        }
        OutputRequest::EigenTable { branches, .. } => {
            let rows = eigen_table(p, case, *branches)?
                .into_iter()
                .map(|r| vec![r.n as f64, r.big_n, r.p, r.m])
                .collect();
            Ok(Rendered::Table {
                header: ["n", "N", "p", "m"].map(String::from).to_vec(),
                rows,
            })
        }
        _ => Err(unsupported(scenario, out)),
    }
}

/// Strong-absorption series on a tensor grid.
pub fn concentration_field(
    p: &crate::plume::PlumeParams,
    x: &Grid1D,
    y: &Grid1D,
) -> Result<ScalarField> {
    let rates = full_absorption_rates(p)?;
    let ny = y.len();
    let values: Vec<Result<f64>> = (0..x.len() * ny)
        .into_par_iter()
        .map(|k| {
            full_absorption_with_rates(p, &rates, x.points()[k / ny], y.points()[k % ny])
                .map(|v| v.value)
        })
        .collect();
    ScalarField::new_2d(
        Axis::new("x", x.clone()),
        Axis::new("y", y.clone()),
        values.into_iter().collect::<Result<_>>()?,
        "C",
    )
}
