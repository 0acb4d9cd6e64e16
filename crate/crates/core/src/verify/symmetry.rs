//! Group actions on scenarios and the numeric check that a mapped solution
//! solves the mapped problem.
//!
//! * lake: `z_bar = z`, `t_bar = (C^w)^m t`, `w_bar = C^w w`, `q_bar = C^q q`,
//!   `g_bar = C^q g`, `r_bar = C^q C^w r`. In case 1 the factor `C^q` is
//!   carried by `alpha`, `beta` and `C2`; in case 2 it cancels from the
//!   equation, so only time is rescaled.
//! * blayer: `x_bar = c P x + K^x`, `y_bar = c y`, `t_bar = c^2 t + K^t`,
//!   `Psi_bar = P Psi + K^Psi`, `T_bar = (P / c^3) T`.
//! * plume: `x_bar = E x`, `y_bar = y`, `u_bar = E u`, `kappa1_bar = E^2 kappa1`,
//!   `C_bar = E^C C`.
//!
//! Each element may override its time (or diffusivity) exponent to build a
//! deliberately broken action.

use serde::{Deserialize, Serialize};

use super::blayer::{blayer_residuals, BlayerSource, Reconstructed, SampleBox};
use super::lake::{lake_residual, LakeField, MappedField, SeparableField};
use super::plume::{plume_residual, MappedPlume, ModeSource, PlumeSource, SeriesSource};
use super::ResidualReport;
use crate::error::{Error, Result};
use crate::grid::{linspace, Grid1D};
use crate::lake::LakeCase;
use crate::scenario::{AppParams, OutputRequest, Scenario};
use crate::solve::{LakeSolution, Solved};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LakeAction {
    pub c_w: f64,
    pub c_q: f64,
    /// replaces `m` in `t_bar = (C^w)^m t`
    pub time_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlayerAction {
    /// `C^y`
    pub c: f64,
    /// `C^Psi`
    pub c_psi: f64,
    pub k_x: f64,
    pub k_t: f64,
    pub k_psi: f64,
    /// replaces `2` in `t_bar = c^2 t + K^t`
    pub time_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlumeAction {
    pub e_x: f64,
    pub e_c: f64,
    /// replaces `2` in `kappa1_bar = E^2 kappa1`
    pub kappa1_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Lake(LakeAction),
    Blayer(BlayerAction),
    Plume(PlumeAction),
}

impl GroupElement {
    pub fn lake(c_w: f64, c_q: f64) -> Self {
        GroupElement::Lake(LakeAction {
            c_w,
            c_q,
            time_exponent: None,
        })
    }

    pub fn blayer(c: f64, c_psi: f64, k_x: f64, k_t: f64, k_psi: f64) -> Self {
        GroupElement::Blayer(BlayerAction {
            c,
            c_psi,
            k_x,
            k_t,
            k_psi,
            time_exponent: None,
        })
    }

    pub fn plume(e_x: f64, e_c: f64) -> Self {
        GroupElement::Plume(PlumeAction {
            e_x,
            e_c,
            kappa1_exponent: None,
        })
    }

    pub fn identity_for(scenario: &Scenario) -> Self {
        match scenario.params {
            AppParams::Lake(_) => Self::lake(1.0, 1.0),
            AppParams::Blayer(_) => Self::blayer(1.0, 1.0, 0.0, 0.0, 0.0),
            AppParams::Plume(_) => Self::plume(1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (scales, shifts): (Vec<(&str, f64)>, Vec<(&str, f64)>) = match self {
            GroupElement::Lake(a) => (vec![("C^w", a.c_w), ("C^q", a.c_q)], vec![]),
            GroupElement::Blayer(a) => (
                vec![("C^y", a.c), ("C^Psi", a.c_psi)],
                vec![("K^x", a.k_x), ("K^t", a.k_t), ("K^Psi", a.k_psi)],
            ),
            GroupElement::Plume(a) => (vec![("E^x", a.e_x), ("E^C", a.e_c)], vec![]),
        };
        for (name, v) in scales {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::arg(format!(
                    "scale factor {name} = {v} must be positive and finite"
                )));
            }
        }
        for (name, v) in shifts {
            if !v.is_finite() {
                return Err(Error::arg(format!("shift {name} must be finite")));
            }
        }
        Ok(())
    }

    /// The element acting as `self` followed by `then`.
    pub fn compose(&self, then: &GroupElement) -> Result<GroupElement> {
        match (self, then) {
            (GroupElement::Lake(a), GroupElement::Lake(b))
                if a.time_exponent == b.time_exponent =>
            {
                Ok(GroupElement::Lake(LakeAction {
                    c_w: a.c_w * b.c_w,
                    c_q: a.c_q * b.c_q,
                    time_exponent: a.time_exponent,
                }))
            }
            (GroupElement::Blayer(a), GroupElement::Blayer(b))
                if a.time_exponent == b.time_exponent =>
            {
                let e = a.time_exponent.unwrap_or(2.0);
                Ok(GroupElement::Blayer(BlayerAction {
                    c: a.c * b.c,
                    c_psi: a.c_psi * b.c_psi,
                    k_x: b.c * b.c_psi * a.k_x + b.k_x,
                    k_t: b.c.powf(e) * a.k_t + b.k_t,
                    k_psi: b.c_psi * a.k_psi + b.k_psi,
                    time_exponent: a.time_exponent,
                }))
            }
            (GroupElement::Plume(a), GroupElement::Plume(b))
                if a.kappa1_exponent == b.kappa1_exponent =>
            {
                Ok(GroupElement::Plume(PlumeAction {
                    e_x: a.e_x * b.e_x,
                    e_c: a.e_c * b.e_c,
                    kappa1_exponent: a.kappa1_exponent,
                }))
            }
            _ => Err(Error::arg("cannot compose elements of different groups")),
        }
    }
}

fn time_scale(a: &LakeAction, m: f64) -> f64 {
    let e = a.time_exponent.unwrap_or(m);
    if e == 1.0 {
        a.c_w
    } else {
        a.c_w.powf(e)
    }
}

fn blayer_time_scale(a: &BlayerAction) -> f64 {
    match a.time_exponent {
        None => a.c * a.c,
        Some(e) => a.c.powf(e),
    }
}

fn plume_kappa_scale(a: &PlumeAction) -> f64 {
    match a.kappa1_exponent {
        None => a.e_x * a.e_x,
        Some(e) => a.e_x.powf(e),
    }
}

fn map_grid(s: &mut Scenario, name: &str, scale: f64, shift: f64) -> Result<()> {
    if let Some(g) = s.grids.get_mut(name) {
        if scale != 1.0 || shift != 0.0 {
            *g = g.affine(scale, shift)?;
        }
    }
    Ok(())
}

fn map_step(s: &mut Scenario, axis: &str, scale: f64) {
    let step = s.fd_step(axis) * scale;
    if scale != 1.0 || s.fd_steps.contains_key(axis) {
        s.fd_steps.insert(axis.to_string(), step);
    }
}

/// Transforms parameters, grids, output coordinates and FD steps of a
/// scenario by the group element; the input is left untouched.
pub fn apply_group_action(elem: &GroupElement, scenario: &Scenario) -> Result<Scenario> {
    elem.validate()?;
    let mut s = scenario.clone();
    match (elem, &mut s.params) {
        (GroupElement::Lake(a), AppParams::Lake(p)) => {
            let tau = time_scale(a, p.m);
            if scenario.application.lake_case() == Some(LakeCase::Case1) && a.c_q != 1.0 {
                p.alpha *= a.c_q;
                p.beta *= a.c_q;
                p.c2 *= a.c_q;
            }
            map_grid(&mut s, "t", tau, 0.0)?;
            map_step(&mut s, "t", tau);
            for out in &mut s.outputs {
                match out {
                    OutputRequest::TemperatureProfile { times, .. } => {
                        times.iter_mut().for_each(|t| *t *= tau)
                    }
                    OutputRequest::AlphaSweep { time, alphas, .. } => {
                        *time *= tau;
                        if scenario.application.lake_case() == Some(LakeCase::Case1) {
                            alphas.iter_mut().for_each(|v| *v *= a.c_q);
                        }
                    }
                    _ => {}
                }
            }
        }
        (GroupElement::Blayer(a), AppParams::Blayer(p)) => {
            let tau = blayer_time_scale(a);
            let sx = a.c * a.c_psi;
            p.b1 = tau * p.b1 - p.a1 * a.k_t;
            p.b2 = sx * p.b2 - a.k_x;
            map_grid(&mut s, "x", sx, a.k_x)?;
            map_grid(&mut s, "y", a.c, 0.0)?;
            map_grid(&mut s, "t", tau, a.k_t)?;
            map_step(&mut s, "x", sx);
            map_step(&mut s, "y", a.c);
            map_step(&mut s, "t", tau);
            for out in &mut s.outputs {
                if let OutputRequest::FieldSlice { x, t, .. } = out {
                    *x = sx * *x + a.k_x;
                    *t = tau * *t + a.k_t;
                }
            }
        }
        (GroupElement::Plume(a), AppParams::Plume(p)) => {
            p.u *= a.e_x;
            p.kappa1 *= plume_kappa_scale(a);
            p.inlet_amplitude *= a.e_c;
            map_grid(&mut s, "x", a.e_x, 0.0)?;
            map_step(&mut s, "x", a.e_x);
        }
        _ => {
            return Err(Error::arg(format!(
                "group element does not act on application `{}`",
                scenario.application.tag()
            )))
        }
    }
    Ok(s)
}

/// Interior part of a grid (points strictly inside `(lo, hi)`).
fn interior(g: &Grid1D, lo: f64, hi: f64) -> Result<Grid1D> {
    let pts: Vec<f64> = g
        .points()
        .iter()
        .copied()
        .filter(|v| *v > lo && *v < hi)
        .collect();
    Grid1D::new(pts)
}

/// Maps the solution of `scenario` by `elem` and evaluates the residual of
/// the mapped problem on the mapped grids.
///
/// Returns one report per equation (three for the boundary layer).
pub fn symmetry_check(
    elem: &GroupElement,
    scenario: &Scenario,
    solved: &Solved,
) -> Result<Vec<ResidualReport>> {
    let mapped = apply_group_action(elem, scenario)?;
    match (elem, solved) {
        (GroupElement::Lake(a), Solved::Lake(sol)) => {
            let p = scenario.lake_params().expect("lake parameters");
            let case = scenario.application.lake_case().expect("lake application");
            let mp = mapped.lake_params().expect("lake parameters");
            let tau = time_scale(a, p.m);
            let z = interior(mapped.grid("z")?, 0.0, p.h)?;
            let t = interior(mapped.grid("t")?, 0.0, f64::INFINITY)?;
            let report = match sol {
                LakeSolution::Closed(prof) => {
                    let base = SeparableField {
                        profile: prof.clone(),
                        m: p.m,
                    };
                    let field = MappedField {
                        inner: &base as &dyn LakeField,
                        c_w: a.c_w,
                        time_scale: tau,
                    };
                    lake_residual(mp, case, prof.clone(), &field, &z, &t)?
                }
                LakeSolution::Bvp { profile, .. } => {
                    let base = SeparableField {
                        profile: profile.clone(),
                        m: p.m,
                    };
                    let field = MappedField {
                        inner: &base as &dyn LakeField,
                        c_w: a.c_w,
                        time_scale: tau,
                    };
                    lake_residual(mp, case, profile.clone(), &field, &z, &t)?
                }
            };
            Ok(vec![report])
        }
        (GroupElement::Blayer(a), Solved::Blayer(sol)) => {
            let p = scenario.blayer_params().expect("blayer parameters");
            let base = Reconstructed { sol, params: p };
            let source = MappedBlayer {
                inner: &base,
                action: *a,
            };
            let samples = SampleBox {
                x: mapped.grid("x")?.clone(),
                y: interior(mapped.grid("y")?, mapped.fd_step("y"), f64::INFINITY)?,
                t: mapped.grid("t")?.clone(),
                steps: [
                    mapped.fd_step("x"),
                    mapped.fd_step("y"),
                    mapped.fd_step("t"),
                ],
            };
            let r = blayer_residuals(&source, p.prandtl, &samples)?;
            Ok(vec![r.continuity, r.momentum, r.energy])
        }
        (GroupElement::Plume(a), Solved::Plume) => {
            let p = scenario.plume_params().expect("plume parameters");
            let mp = mapped.plume_params().expect("plume parameters");
            let base: Box<dyn PlumeSource> = match scenario.application.plume_case() {
                Some(crate::plume::PlumeCase::LargeLambda) => Box::new(SeriesSource::new(p)?),
                _ => Box::new(ModeSource::leading(p)?),
            };
            let source = MappedPlume {
                inner: base.as_ref(),
                e_x: a.e_x,
                e_c: a.e_c,
            };
            let dx = mapped.fd_step("x");
            let dy = mapped.fd_step("y");
            let x = interior(mapped.grid("x")?, dx, f64::INFINITY)?;
            let y = match mapped.grids.get("y") {
                Some(g) => interior(g, dy, 1.0 - dy)?,
                None => linspace(0.05, 0.95, 19)?,
            };
            Ok(vec![plume_residual(&source, mp.into(), &x, &y, [dx, dy])?])
        }
        _ => Err(Error::arg(
            "group element does not match the solved application",
        )),
    }
}

/// Boundary-layer fields pushed forward by a group element.
///
/// The action is applied to the stream function, `Psi_bar = P Psi + K^Psi`,
/// and the velocities follow from `u = Psi_y`, `v = -Psi_x`:
/// `u_bar = (P / c) u`, `v_bar = v / c`.
pub struct MappedBlayer<'a> {
    pub inner: &'a dyn BlayerSource,
    pub action: BlayerAction,
}

impl BlayerSource for MappedBlayer<'_> {
    fn fields(&self, x: f64, y: f64, t: f64) -> Result<[f64; 3]> {
        let a = &self.action;
        let tau = blayer_time_scale(a);
        let x0 = (x - a.k_x) / (a.c * a.c_psi);
        let y0 = y / a.c;
        let t0 = (t - a.k_t) / tau;
        let [u, v, temp] = self.inner.fields(x0, y0, t0)?;
        Ok([
            a.c_psi / a.c * u,
            v / a.c,
            a.c_psi / (a.c * a.c * a.c) * temp,
        ])
    }
}
