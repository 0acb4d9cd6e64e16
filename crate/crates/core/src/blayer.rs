//! Unsteady free convection along a vertical plate with wall temperature
//! varying in `x` and `t`.
//!
//! The invariant `eta = y / sqrt(a1 t + b1)` reduces the boundary-layer
//! equations to
//!
//! ```text
//! F''' = -(a1 eta / 2 + F) F'' + F'^2 - a1 F' - Theta
//! Theta'' = -Pr [(a1 eta / 2 + F) Theta' + (2 a1 - F') Theta]
//! ```
//!
//! with `F(0) = F'(0) = 0`, `Theta(0) = 1` and `F'`, `Theta -> 0` far from
//! the plate. The two missing wall values `(F''(0), Theta'(0))` are found by
//! Newton iteration on the shooting map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{linspace, Grid1D};
use crate::ode::Dopri5;

/// Constant multiplying `a1 t` in the printed wall-temperature law.
pub const WALL_LAW_CONSTANT: f64 = 0.4472;

/// Form of the wall temperature `T_w(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallLaw {
    /// `(x + b2) / (0.4472 a1 t + b1)^2`
    #[default]
    Printed,
    /// `(x + b2) / (a1 t + b1)^2`, the form for which the reconstructed
    /// fields satisfy the momentum and energy equations when `a1 != 0`
    Consistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BLayerParams {
    pub prandtl: f64,
    #[serde(default)]
    pub a1: f64,
    #[serde(default = "one")]
    pub b1: f64,
    #[serde(default)]
    pub b2: f64,
    #[serde(default = "default_eta_max")]
    pub eta_max: f64,
    /// temperature scale of the wall law; the reconstruction treats `T_w` as
    /// already scaled, so this is carried as metadata only
    #[serde(default = "one")]
    pub t0_scale: f64,
    /// use `b1` instead of `b2` in the heat-flux denominator
    #[serde(default)]
    pub flux_b1_variant: bool,
    #[serde(default)]
    pub wall_law: WallLaw,
    /// points of the tabulated profile
    #[serde(default = "default_points")]
    pub grid_points: usize,
}

fn one() -> f64 {
    1.0
}

fn default_eta_max() -> f64 {
    15.0
}

fn default_points() -> usize {
    4001
}

impl BLayerParams {
    pub fn new(prandtl: f64, a1: f64) -> Self {
        BLayerParams {
            prandtl,
            a1,
            b1: 1.0,
            b2: 0.0,
            eta_max: default_eta_max(),
            t0_scale: 1.0,
            flux_b1_variant: false,
            wall_law: WallLaw::Printed,
            grid_points: default_points(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("prandtl", self.prandtl),
            ("a1", self.a1),
            ("b1", self.b1),
            ("b2", self.b2),
            ("eta_max", self.eta_max),
            ("t0_scale", self.t0_scale),
        ] {
            if !v.is_finite() {
                return Err(Error::param(key, "must be finite"));
            }
        }
        if self.prandtl <= 0.0 {
            return Err(Error::param("prandtl", "must be positive"));
        }
        if self.eta_max < 10.0 {
            return Err(Error::param("eta_max", "must be at least 10"));
        }
        if self.t0_scale <= 0.0 {
            return Err(Error::param("t0_scale", "must be positive"));
        }
        if self.grid_points < 11 {
            return Err(Error::param("grid_points", "must be at least 11"));
        }
        Ok(())
    }
}

/// `(F', F'', F''', Theta', Theta'')` for the state `(F, F', F'', Theta, Theta')`.
pub fn similarity_rhs(eta: f64, state: &[f64; 5], params: &BLayerParams) -> Result<[f64; 5]> {
    if state.iter().any(|v| !v.is_finite()) || !eta.is_finite() {
        return Err(Error::arg("similarity state must be finite"));
    }
    Ok(rhs(eta, state, params.prandtl, params.a1))
}

fn rhs(eta: f64, y: &[f64; 5], pr: f64, a1: f64) -> [f64; 5] {
    let [f, df, d2f, th, dth] = *y;
    let g = 0.5 * a1 * eta + f;
    [
        df,
        d2f,
        -g * d2f + df * df - a1 * df - th,
        dth,
        -pr * (g * dth + (2.0 * a1 - df) * th),
    ]
}

/// `(F'''', Theta''')` from the state and its first derivatives.
fn rhs_derivative(eta: f64, y: &[f64; 5], d: &[f64; 5], pr: f64, a1: f64) -> (f64, f64) {
    let [f, df, d2f, th, dth] = *y;
    let d3f = d[2];
    let d2th = d[4];
    let g = 0.5 * a1 * eta + f;
    let dg = 0.5 * a1 + df;
    let d4f = -(dg * d2f + g * d3f) + 2.0 * df * d2f - a1 * d2f - dth;
    let d3th = -pr * (dg * dth + g * d2th - d2f * th + (2.0 * a1 - df) * dth);
    (d4f, d3th)
}

const SHOOT_TOLERANCE: f64 = 1e-8;
const POLISH_TOLERANCE: f64 = 1e-12;
const NEWTON_MAX_ITERATIONS: usize = 50;
const NEWTON_MAX_HALVINGS: usize = 8;
const FD_STEP: f64 = 1e-6;
const STAGNATION_STEP: f64 = 1e-14;
const INITIAL_GUESS: [f64; 2] = [0.6, -0.5];
const FIRST_ETA: f64 = 4.0;

fn integrator() -> Dopri5 {
    Dopri5 {
        rtol: 1e-10,
        atol: 1e-12,
        max_steps: 200_000,
        blowup: 1e6,
    }
}

/// Shooting map `(F''(0), Theta'(0)) -> (F'(L), Theta(L))` for given `a1` and `L`.
pub fn shooting_map(prandtl: f64, a1: f64, eta_max: f64, guess: [f64; 2]) -> Result<[f64; 2]> {
    let y0 = [0.0, 0.0, guess[0], 1.0, guess[1]];
    let y = integrator().solve(|eta, y| rhs(eta, y, prandtl, a1), 0.0, y0, eta_max)?;
    Ok([y[1], y[3]])
}

/// Jacobian of [`shooting_map`] by forward differences with step `FD_STEP`.
fn forward_jacobian(
    prandtl: f64,
    a1: f64,
    eta_max: f64,
    guess: [f64; 2],
    base: [f64; 2],
) -> Result<[[f64; 2]; 2]> {
    let mut jac = [[0.0; 2]; 2];
    for k in 0..2 {
        let mut g = guess;
        g[k] += FD_STEP;
        let v = shooting_map(prandtl, a1, eta_max, g)?;
        jac[0][k] = (v[0] - base[0]) / FD_STEP;
        jac[1][k] = (v[1] - base[1]) / FD_STEP;
    }
    Ok(jac)
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// One accepted Newton iterate, kept for auditing the Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingIterate {
    pub a1: f64,
    pub eta_max: f64,
    pub guess: [f64; 2],
    pub mismatch: [f64; 2],
    pub jacobian: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShootingTrace {
    pub iterates: Vec<ShootingIterate>,
    /// number of continuation stages (in `eta_max` and in `a1`)
    pub stages: usize,
}

fn newton(
    prandtl: f64,
    a1: f64,
    eta_max: f64,
    start: [f64; 2],
    trace: &mut ShootingTrace,
) -> Result<[f64; 2]> {
    let mut s = start;
    let mut g = shooting_map(prandtl, a1, eta_max, s)?;
    let mut polishing = 0;
    for it in 0..NEWTON_MAX_ITERATIONS {
        let mismatch = norm(g);
        if mismatch <= POLISH_TOLERANCE || (mismatch <= SHOOT_TOLERANCE && polishing >= 3) {
            return Ok(s);
        }
        let jac = forward_jacobian(prandtl, a1, eta_max, s, g)?;
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Convergence {
                iterations: it,
                mismatch,
            });
        }
        trace.iterates.push(ShootingIterate {
            a1,
            eta_max,
            guess: s,
            mismatch: g,
            jacobian: jac,
        });
        let step = [
            -(jac[1][1] * g[0] - jac[0][1] * g[1]) / det,
            -(-jac[1][0] * g[0] + jac[0][0] * g[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial = [s[0] + lambda * step[0], s[1] + lambda * step[1]];
            if let Ok(v) = shooting_map(prandtl, a1, eta_max, trial) {
                if norm(v) < mismatch {
                    accepted = Some((trial, v));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, v)) => {
                let moved = (lambda * step[0]).abs().max((lambda * step[1]).abs());
                s = trial;
                g = v;
                if mismatch <= SHOOT_TOLERANCE {
                    polishing += 1;
                }
                if moved < STAGNATION_STEP && norm(g) > SHOOT_TOLERANCE {
                    return Err(Error::Convergence {
                        iterations: it + 1,
                        mismatch: norm(g),
                    });
                }
            }
            None if mismatch <= SHOOT_TOLERANCE => return Ok(s),
            None => {
                return Err(Error::Convergence {
                    iterations: it + 1,
                    mismatch,
                })
            }
        }
    }
    if norm(g) <= SHOOT_TOLERANCE {
        Ok(s)
    } else {
        Err(Error::Convergence {
            iterations: NEWTON_MAX_ITERATIONS,
            mismatch: norm(g),
        })
    }
}

/// Best point of a 9x9 grid over `[0, 2] x [-2, 0]`.
fn grid_search(prandtl: f64, a1: f64, eta_max: f64) -> Option<[f64; 2]> {
    let mut best: Option<([f64; 2], f64)> = None;
    for i in 0..9 {
        for j in 0..9 {
            let s = [2.0 * i as f64 / 8.0, -2.0 * j as f64 / 8.0];
            if let Ok(v) = shooting_map(prandtl, a1, eta_max, s) {
                let n = norm(v);
                if best.is_none_or(|(_, b)| n < b) {
                    best = Some((s, n));
                }
            }
        }
    }
    best.map(|(s, _)| s)
}

fn eta_schedule(eta_max: f64) -> Vec<f64> {
    let mut out: Vec<f64> = [FIRST_ETA, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0]
        .into_iter()
        .chain((3..).map(|k| 10.0 * k as f64))
        .take_while(|l| *l < eta_max)
        .collect();
    out.push(eta_max);
    out
}

/// Tabulated similarity profile with the wall values found by shooting.
#[derive(Debug, Clone)]
pub struct SimilaritySolution {
    pub eta: Grid1D,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    /// `F'''` from the ODE at each node
    pub d3f: Vec<f64>,
    /// `Theta''` from the ODE at each node
    pub d2theta: Vec<f64>,
    d4f: Vec<f64>,
    d3theta: Vec<f64>,
    /// `F''(0)`
    pub wall_shear: f64,
    /// `Theta'(0)`
    pub wall_theta_slope: f64,
    pub prandtl: f64,
    pub a1: f64,
    pub trace: ShootingTrace,
}

/// Interpolated profile values at one `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub theta: f64,
    pub dtheta: f64,
}

/// Solves the similarity system by damped Newton shooting.
///
/// The far-field conditions are first met on a short domain, which is then
/// stretched to `eta_max`; a nonzero `a1` is reached by continuation from
/// `a1 = 0`. Direct shooting over the full domain from a generic guess
/// blows up through the `F'^2` term.
pub fn solve_similarity(params: &BLayerParams) -> Result<SimilaritySolution> {
    params.validate()?;
    let pr = params.prandtl;
    let mut trace = ShootingTrace::default();

    let schedule = eta_schedule(params.eta_max);
    let mut s = match newton(pr, 0.0, schedule[0], INITIAL_GUESS, &mut trace) {
        Ok(s) => s,
        Err(_) => {
            let start = grid_search(pr, 0.0, schedule[0]).ok_or(Error::Divergence { eta: 0.0 })?;
            newton(pr, 0.0, schedule[0], start, &mut trace)?
        }
    };
    trace.stages += 1;
    for &l in &schedule[1..] {
        s = newton(pr, 0.0, l, s, &mut trace)?;
        trace.stages += 1;
    }

    let target = params.a1;
    let mut a = 0.0;
    let mut prev: Option<(f64, [f64; 2])> = None;
    let mut delta = 0.25f64.copysign(target);
    while a != target {
        let next = if (target - a).abs() <= delta.abs() {
            target
        } else {
            a + delta
        };
        // secant predictor along the continuation path
        let predicted = match prev {
            Some((ap, sp)) => {
                let w = (next - a) / (a - ap);
                [s[0] + w * (s[0] - sp[0]), s[1] + w * (s[1] - sp[1])]
            }
            None => s,
        };
        match newton(pr, next, params.eta_max, predicted, &mut trace)
            .or_else(|_| newton(pr, next, params.eta_max, s, &mut trace))
        {
            Ok(sn) => {
                prev = Some((a, s));
                a = next;
                s = sn;
                trace.stages += 1;
                delta = (delta * 1.5).clamp(-0.5, 0.5);
            }
            Err(e) => {
                delta *= 0.5;
                if delta.abs() < 1.0 / 256.0 {
                    return Err(e);
                }
            }
        }
    }

    tabulate(params, s, trace)
}

fn tabulate(
    params: &BLayerParams,
    s: [f64; 2],
    trace: ShootingTrace,
) -> Result<SimilaritySolution> {
    let (pr, a1) = (params.prandtl, params.a1);
    let eta = linspace(0.0, params.eta_max, params.grid_points)?;
    let n = eta.len();
    let mut states = vec![[0.0; 5]; n];
    let y0 = [0.0, 0.0, s[0], 1.0, s[1]];
    integrator().integrate(
        |e, y| rhs(e, y, pr, a1),
        0.0,
        y0,
        params.eta_max,
        eta.points(),
        |i, _, y| states[i] = *y,
    )?;
    // the initial conditions are imposed exactly
    states[0] = y0;

    let mut sol = SimilaritySolution {
        eta,
        f: Vec::with_capacity(n),
        df: Vec::with_capacity(n),
        d2f: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        dtheta: Vec::with_capacity(n),
        d3f: Vec::with_capacity(n),
        d2theta: Vec::with_capacity(n),
        d4f: Vec::with_capacity(n),
        d3theta: Vec::with_capacity(n),
        wall_shear: s[0],
        wall_theta_slope: s[1],
        prandtl: pr,
        a1,
        trace,
    };
    for (y, &e) in states.iter().zip(sol.eta.points()) {
        let d = rhs(e, y, pr, a1);
        let (d4f, d3th) = rhs_derivative(e, y, &d, pr, a1);
        sol.f.push(y[0]);
        sol.df.push(y[1]);
        sol.d2f.push(y[2]);
        sol.theta.push(y[3]);
        sol.dtheta.push(y[4]);
        sol.d3f.push(d[2]);
        sol.d2theta.push(d[4]);
        sol.d4f.push(d4f);
        sol.d3theta.push(d3th);
    }
    Ok(sol)
}

fn quintic(s: f64, h: f64, v0: [f64; 3], v1: [f64; 3]) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    h0 * v0[0]
        + h1 * h * v0[1]
        + h2 * h * h * v0[2]
        + h3 * h * h * v1[2]
        + h4 * h * v1[1]
        + h5 * v1[0]
}

impl SimilaritySolution {
    pub fn eta_max(&self) -> f64 {
        self.eta.last()
    }

    /// Profile values at `eta`, interpolated by quintic Hermite polynomials
    /// whose node derivatives come from the ODE itself.
    pub fn sample(&self, eta: f64) -> Result<ProfileSample> {
        let eta_max = self.eta_max();
        if !(eta >= 0.0) {
            return Err(Error::arg(format!("eta = {eta} must be >= 0")));
        }
        if eta > eta_max * (1.0 + 1e-12) {
            return Err(Error::Extrapolation { eta, eta_max });
        }
        let p = self.eta.points();
        let i = self.eta.locate(eta);
        let h = p[i + 1] - p[i];
        let s = ((eta - p[i]) / h).clamp(0.0, 1.0);
        let at = |a: &[f64], b: &[f64], c: &[f64]| {
            quintic(s, h, [a[i], b[i], c[i]], [a[i + 1], b[i + 1], c[i + 1]])
        };
        Ok(ProfileSample {
            f: at(&self.f, &self.df, &self.d2f),
            df: at(&self.df, &self.d2f, &self.d3f),
            d2f: at(&self.d2f, &self.d3f, &self.d4f),
            theta: at(&self.theta, &self.dtheta, &self.d2theta),
            dtheta: at(&self.dtheta, &self.d2theta, &self.d3theta),
        })
    }

    pub fn max_theta(&self) -> f64 {
        self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy with one column replaced, for oracle sensitivity tests.
    pub fn with_column(&self, column: Column, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.eta.len() {
            return Err(Error::arg("column length differs from the eta grid"));
        }
        let mut out = self.clone();
        *match column {
            Column::F => &mut out.f,
            Column::DF => &mut out.df,
            Column::D2F => &mut out.d2f,
            Column::Theta => &mut out.theta,
            Column::DTheta => &mut out.dtheta,
        } = values;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    F,
    DF,
    D2F,
    Theta,
    DTheta,
}

/// Physical fields at one point `(x, y, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlayerFields {
    pub eta: f64,
    pub u: f64,
    pub v: f64,
    pub t_w: f64,
    /// `None` where the flux denominator is not positive
    pub q_flux: Option<f64>,
    pub temperature: f64,
    pub psi: f64,
}

/// Reconstructs velocity, temperature and wall quantities from the profile.
pub fn reconstruct_fields(
    sol: &SimilaritySolution,
    params: &BLayerParams,
    x: f64,
    y: f64,
    t: f64,
) -> Result<BlayerFields> {
    let a1 = params.a1;
    let s2 = a1 * t + params.b1;
    if !(s2 > 0.0) {
        return Err(Error::arg(format!("a1 t + b1 = {s2} must be positive")));
    }
    let wall_den = match params.wall_law {
        WallLaw::Printed => WALL_LAW_CONSTANT * a1 * t + params.b1,
        WallLaw::Consistent => s2,
    };
    if !(wall_den > 0.0) {
        return Err(Error::arg(format!(
            "wall-temperature denominator {wall_den} must be positive"
        )));
    }
    if !(y >= 0.0) {
        return Err(Error::arg(format!("y = {y} must be >= 0")));
    }
    let s = s2.sqrt();
    let eta = y / s;
    let p = sol.sample(eta)?;
    let lead = x + params.b2;
    let t_w = lead / (wall_den * wall_den);
    let flux_base = a1 * t
        + if params.flux_b1_variant {
            params.b1
        } else {
            params.b2
        };
    let q_flux = (flux_base > 0.0).then(|| lead * (-sol.wall_theta_slope) / flux_base.powf(2.5));
    Ok(BlayerFields {
        eta,
        u: lead / s2 * p.df,
        v: -p.f / s,
        t_w,
        q_flux,
        temperature: t_w * p.theta,
        psi: lead / s * p.f,
    })
}
