//! Vertical temperature distribution in a stagnant lake heated by absorbed
//! solar radiation.
//!
//! With `T = T0 + w` the heat equation `rho(T) T_t = (kappa(T) T_z)_z + r`
//! admits the separable form `w = (m t)^(1/m) F(z)` under the scaling group
//! that leaves depth fixed. Two coefficient families are covered:
//!
//! * case 1: `rho = alpha q(z) w^m`, `kappa = beta g(z)` with
//!   `g = exp(-mu z)` and `q = g / F`;
//! * case 2: `rho = alpha q(z) w^s`, `kappa = beta w^n` with `n = s - m`
//!   and `q = 1 / F` (closed form for `m = s = 1`, `n = 0`).
//!
//! The surface condition is `F'(0) = 0` (no heat flux through the surface),
//! which is what both closed forms satisfy.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{central_derivative, Axis, ScalarField};
use crate::grid::Grid1D;
use crate::ode::Dopri5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LakeCase {
    Case1,
    Case2,
}

/// Physical constants of the lake model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LakeParams {
    /// density scale
    pub alpha: f64,
    /// conductivity scale
    pub beta: f64,
    /// conductivity decay exponent (1/m)
    #[serde(default)]
    pub mu: f64,
    /// absorption coefficient of water (1/m)
    pub xi: f64,
    /// source amplitude
    pub c2: f64,
    /// bottom forcing amplitude
    #[serde(default)]
    pub gamma: f64,
    /// time exponent
    #[serde(default = "one")]
    pub m: f64,
    /// density exponent (case 2)
    #[serde(default = "one")]
    pub s: f64,
    /// conductivity exponent (case 2)
    #[serde(default)]
    pub n: f64,
    /// depth (m)
    pub h: f64,
    /// homothermy temperature (deg C)
    pub t0: f64,
}

fn one() -> f64 {
    1.0
}

impl LakeParams {
    /// Case-1 constants used for the time-series figures (alpha = 14095).
    pub fn case1_reference() -> Self {
        LakeParams {
            alpha: 14095.0,
            beta: 12355.0,
            mu: 1.439239e-4,
            xi: 0.048,
            c2: 2496.0,
            gamma: 0.0,
            m: 1.0,
            s: 1.0,
            n: 0.0,
            h: 400.0,
            t0: 4.0,
        }
    }

    /// Case-2 constants used for the time-series figures (alpha = 13306).
    pub fn case2_reference() -> Self {
        LakeParams {
            alpha: 13306.0,
            beta: 12391.0,
            mu: 0.0,
            xi: 0.048,
            c2: 0.2014,
            gamma: 0.0,
            m: 1.0,
            s: 1.0,
            n: 0.0,
            h: 400.0,
            t0: 4.0,
        }
    }

    /// `sigma^2 = alpha / beta`.
    pub fn sigma_squared(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn validate(&self, case: LakeCase) -> Result<()> {
        let finite = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("mu", self.mu),
            ("xi", self.xi),
            ("c2", self.c2),
            ("gamma", self.gamma),
            ("m", self.m),
            ("s", self.s),
            ("n", self.n),
            ("h", self.h),
            ("t0", self.t0),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(key, "must be finite"));
            }
        }
        if self.alpha <= 0.0 {
            return Err(Error::param("alpha", "must be positive"));
        }
        if self.beta <= 0.0 {
            return Err(Error::param("beta", "must be positive"));
        }
        if self.xi <= 0.0 {
            return Err(Error::param("xi", "must be positive"));
        }
        if self.mu < 0.0 {
            return Err(Error::param("mu", "must be non-negative"));
        }
        if self.xi == self.mu {
            return Err(Error::param("xi", "must differ from mu"));
        }
        if self.h <= 0.0 {
            return Err(Error::param("h", "must be positive"));
        }
        if self.m <= 0.0 {
            return Err(Error::param("m", "must be positive"));
        }
        if self.gamma < 0.0 {
            return Err(Error::param("gamma", "must be non-negative"));
        }
        if case == LakeCase::Case2 {
            if self.s <= 0.0 {
                return Err(Error::param("s", "must be positive"));
            }
            if self.n < 0.0 {
                return Err(Error::param("n", "must be non-negative"));
            }
            if self.n != self.s - self.m {
                return Err(Error::param(
                    "n",
                    format!(
                        "case 2 requires n = s - m exactly (n = {}, s - m = {})",
                        self.n,
                        self.s - self.m
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Roots `(mu ± sqrt(mu^2 + 4 sigma^2)) / 2` of `r^2 - mu r - sigma^2 = 0`.
pub fn characteristic_roots(params: &LakeParams) -> Result<(f64, f64)> {
    if !(params.alpha > 0.0) {
        return Err(Error::param("alpha", "must be positive"));
    }
    if !(params.beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let sigma2 = params.sigma_squared();
    let mu = params.mu;
    let disc = (mu * mu + 4.0 * sigma2).sqrt();
    let r1 = 0.5 * (mu + disc);
    // avoid cancellation in mu - disc when mu dominates
    let r2 = if mu.abs() < 0.5 * disc {
        0.5 * (mu - disc)
    } else {
        -sigma2 / r1
    };
    Ok((r1, r2))
}

/// Closed-form similarity profile `F(eta)` (here `eta = z`).
pub trait Profile {
    fn f(&self, eta: f64) -> f64;
    fn df(&self, eta: f64) -> f64;
    fn d2f(&self, eta: f64) -> f64;
}

/// Analytic profile of either case, with the growing mode discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct LakeProfile {
    pub case: LakeCase,
    pub r1: f64,
    pub r2: f64,
    /// `a3` for case 1, `C2 / (sigma^2 - xi^2)` for case 2
    pub coefficient: f64,
    /// exponent of the particular solution, `exp(-decay * eta)`
    decay: f64,
    /// ratio multiplying the homogeneous mode
    mode_weight: f64,
}

impl LakeProfile {
    /// `F = a3 [exp(-(xi - mu) eta) + ((xi - mu) / r2) exp(r2 eta)]`, valid for `m = 1`.
    pub fn case1(params: &LakeParams) -> Result<Self> {
        params.validate(LakeCase::Case1)?;
        if params.m != 1.0 {
            return Err(Error::param(
                "m",
                "the case-1 closed form needs m = 1; use the general-m solver",
            ));
        }
        let (r1, r2) = characteristic_roots(params)?;
        let k = params.xi - params.mu;
        let denom = case1_denominator(params);
        if denom == 0.0 || denom.abs() <= 1e-14 * params.alpha {
            return Err(Error::SingularParameters(format!(
                "beta (mu - xi)^2 - beta mu (mu - xi) - alpha vanishes ({denom:e})"
            )));
        }
        Ok(LakeProfile {
            case: LakeCase::Case1,
            r1,
            r2,
            coefficient: -params.c2 / denom,
            decay: k,
            mode_weight: k / r2,
        })
    }

    /// `F = C2 / (sigma^2 - xi^2) [exp(-xi eta) - (xi / sigma) exp(-sigma eta)]`,
    /// valid for `m = s = 1`, `n = 0`.
    pub fn case2(params: &LakeParams) -> Result<Self> {
        params.validate(LakeCase::Case2)?;
        if params.m != 1.0 || params.s != 1.0 || params.n != 0.0 {
            return Err(Error::param(
                "m",
                "the case-2 closed form needs m = s = 1 and n = 0",
            ));
        }
        let sigma = params.sigma_squared().sqrt();
        let xi = params.xi;
        let gap = sigma * sigma - xi * xi;
        if sigma == xi || gap.abs() <= 1e-14 * sigma * sigma {
            return Err(Error::SingularParameters(format!(
                "sigma = sqrt(alpha / beta) = {sigma} coincides with xi = {xi}"
            )));
        }
        Ok(LakeProfile {
            case: LakeCase::Case2,
            r1: sigma,
            r2: -sigma,
            coefficient: params.c2 / gap,
            decay: xi,
            mode_weight: -xi / sigma,
        })
    }

    pub fn for_case(params: &LakeParams, case: LakeCase) -> Result<Self> {
        match case {
            LakeCase::Case1 => Self::case1(params),
            LakeCase::Case2 => Self::case2(params),
        }
    }
}

impl Profile for LakeProfile {
    fn f(&self, eta: f64) -> f64 {
        self.coefficient * ((-self.decay * eta).exp() + self.mode_weight * (self.r2 * eta).exp())
    }

    fn df(&self, eta: f64) -> f64 {
        self.coefficient
            * (-self.decay * (-self.decay * eta).exp()
                + self.mode_weight * self.r2 * (self.r2 * eta).exp())
    }

    fn d2f(&self, eta: f64) -> f64 {
        self.coefficient
            * (self.decay * self.decay * (-self.decay * eta).exp()
                + self.mode_weight * self.r2 * self.r2 * (self.r2 * eta).exp())
    }
}

fn case1_denominator(p: &LakeParams) -> f64 {
    let d = p.mu - p.xi;
    p.beta * d * d - p.beta * p.mu * d - p.alpha
}

fn check_depth_time(params: &LakeParams, z: f64, t: f64) -> Result<()> {
    if !(0.0..=params.h).contains(&z) {
        return Err(Error::arg(format!(
            "depth z = {z} outside [0, {}]",
            params.h
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::arg(format!("time t = {t} must be finite and >= 0")));
    }
    Ok(())
}

/// Case-1 temperature `T0 + t F(z)` for `m = 1`.
pub fn temperature_case1(params: &LakeParams, z: f64, t: f64) -> Result<f64> {
    let profile = LakeProfile::case1(params)?;
    check_depth_time(params, z, t)?;
    Ok(params.t0 + t * profile.f(z))
}

/// Case-2 temperature `T0 + t F(z)` for `m = s = 1`, `n = 0`.
pub fn temperature_case2(params: &LakeParams, z: f64, t: f64) -> Result<f64> {
    let profile = LakeProfile::case2(params)?;
    check_depth_time(params, z, t)?;
    Ok(params.t0 + t * profile.f(z))
}

/// Absorbed radiation `r = C2 (m t)^(1/m) exp(-xi z)`.
pub fn source_term(params: &LakeParams, z: f64, t: f64) -> Result<f64> {
    if !(params.m > 0.0) {
        return Err(Error::param("m", "must be positive"));
    }
    if !(t >= 0.0) {
        return Err(Error::arg(format!("time t = {t} must be >= 0")));
    }
    Ok(params.c2 * (params.m * t).powf(1.0 / params.m) * (-params.xi * z).exp())
}

/// Coefficient functions `q(z)` and `g(z)` built from a profile.
#[derive(Debug, Clone)]
pub struct Coefficients<P> {
    pub case: LakeCase,
    mu: f64,
    profile: P,
}

impl<P: Profile> Coefficients<P> {
    pub fn q(&self, z: f64) -> f64 {
        match self.case {
            LakeCase::Case1 => self.g(z) / self.profile.f(z),
            LakeCase::Case2 => 1.0 / self.profile.f(z),
        }
    }

    pub fn g(&self, z: f64) -> f64 {
        match self.case {
            LakeCase::Case1 => (-self.mu * z).exp(),
            LakeCase::Case2 => 1.0,
        }
    }

    pub fn g_z(&self, z: f64) -> f64 {
        match self.case {
            LakeCase::Case1 => -self.mu * (-self.mu * z).exp(),
            LakeCase::Case2 => 0.0,
        }
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }
}

const ZERO_SCAN_POINTS: usize = 4000;

/// Builds `q = g / F`, `g = exp(-mu z)` (case 1) or `q = 1 / F`, `g = 1`
/// (case 2), after checking that `F` does not vanish on `(0, h]`.
pub fn coefficient_functions<P: Profile>(
    params: &LakeParams,
    case: LakeCase,
    profile: P,
) -> Result<Coefficients<P>> {
    params.validate(case)?;
    let h = params.h;
    let mut prev_z = 0.0;
    let mut prev = profile.f(0.0);
    for k in 1..=ZERO_SCAN_POINTS {
        let z = h * k as f64 / ZERO_SCAN_POINTS as f64;
        let v = profile.f(z);
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Domain(format!("F vanishes at z = {z}")));
        }
        if prev != 0.0 && prev.signum() != v.signum() {
            let (mut a, mut b) = (prev_z, z);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if profile.f(mid).signum() == prev.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Err(Error::Domain(format!(
                "F changes sign near z = {:.9}",
                0.5 * (a + b)
            )));
        }
        prev = v;
        prev_z = z;
    }
    Ok(Coefficients {
        case,
        mu: params.mu,
        profile,
    })
}

/// Output of the general-m boundary-value solver.
#[derive(Debug, Clone)]
pub struct LakeBvpSolution {
    pub f: ScalarField,
    pub df: ScalarField,
    pub m: f64,
    pub iterations: usize,
    /// max-norm of the boundary and matching conditions at convergence
    pub mismatch: f64,
}

impl LakeBvpSolution {
    pub fn grid(&self) -> &Grid1D {
        &self.f.axes()[0].grid
    }

    /// Interpolating profile; `F''` is taken from central differences of `F'`.
    pub fn profile(&self) -> Result<BvpProfile> {
        let d2f = central_derivative(&self.df, 0)?;
        Ok(BvpProfile {
            grid: self.grid().clone(),
            f: self.f.values().to_vec(),
            df: self.df.values().to_vec(),
            d2f: d2f.values().to_vec(),
        })
    }

    /// `T0 + (m t)^(1/m) F(z)` at the grid node `index`.
    pub fn temperature_at(&self, params: &LakeParams, index: usize, t: f64) -> f64 {
        params.t0 + (self.m * t).powf(1.0 / self.m) * self.f.values()[index]
    }
}

/// Tabulated profile from the boundary-value solver.
#[derive(Debug, Clone)]
pub struct BvpProfile {
    grid: Grid1D,
    f: Vec<f64>,
    df: Vec<f64>,
    d2f: Vec<f64>,
}

impl BvpProfile {
    fn node(&self, eta: f64) -> (usize, f64) {
        let p = self.grid.points();
        let i = self.grid.locate(eta);
        let h = p[i + 1] - p[i];
        (i, (eta - p[i]) / h)
    }

    fn hermite(i: usize, s: f64, h: f64, v: &[f64], d: &[f64]) -> f64 {
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * v[i] + h10 * h * d[i] + h01 * v[i + 1] + h11 * h * d[i + 1]
    }

    fn spacing(&self, i: usize) -> f64 {
        let p = self.grid.points();
        p[i + 1] - p[i]
    }
}

impl Profile for BvpProfile {
    fn f(&self, eta: f64) -> f64 {
        let (i, s) = self.node(eta);
        Self::hermite(i, s, self.spacing(i), &self.f, &self.df)
    }

    fn df(&self, eta: f64) -> f64 {
        let (i, s) = self.node(eta);
        Self::hermite(i, s, self.spacing(i), &self.df, &self.d2f)
    }

    fn d2f(&self, eta: f64) -> f64 {
        let (i, s) = self.node(eta);
        (1.0 - s) * self.d2f[i] + s * self.d2f[i + 1]
    }
}

const BVP_MAX_ITERATIONS: usize = 50;
const BVP_TOLERANCE: f64 = 1e-10;
const BVP_MAX_HALVINGS: usize = 8;
/// Growth allowed across one shooting segment.
const SEGMENT_GROWTH: f64 = 1e3;

struct ReducedOde {
    mu: f64,
    sigma2: f64,
    m: f64,
    forcing: f64,
    decay: f64,
    integer_power: Option<i32>,
}

impl ReducedOde {
    fn new(p: &LakeParams) -> Self {
        let integer_power = (p.m.fract() == 0.0 && p.m <= 64.0).then_some(p.m as i32);
        ReducedOde {
            mu: p.mu,
            sigma2: p.sigma_squared(),
            m: p.m,
            forcing: p.c2 / p.beta,
            decay: p.xi - p.mu,
            integer_power,
        }
    }

    /// `(F^m, m F^(m-1))`, or `None` where the power is undefined.
    fn power(&self, f: f64) -> Option<(f64, f64)> {
        match self.integer_power {
            Some(1) => Some((f, 1.0)),
            Some(k) => Some((f.powi(k), self.m * f.powi(k - 1))),
            None if f < 0.0 => None,
            None => Some((f.powf(self.m), self.m * f.powf(self.m - 1.0))),
        }
    }

    fn source(&self, eta: f64) -> f64 {
        self.forcing * (-self.decay * eta).exp()
    }
}

/// Solves `F'' - mu F' - (alpha / beta) F^m = -(C2 / beta) exp(-(xi - mu) eta)`
/// with `F'(0) = 0` and `F(h) = gamma / m^(1/m)`.
///
/// Plain shooting on `F(0)` amplifies errors by `exp(r1 h)`, far beyond double
/// precision for realistic depths, so the shooting is done in parallel over
/// segments short enough that each grows by at most `SEGMENT_GROWTH`; the
/// unknowns are `F` and `F'` at the segment starts (the first of which is the
/// surface value `F(0)`), updated by damped Newton with exact sensitivities.
pub fn reduced_ode_general_m(params: &LakeParams, eta_grid: &Grid1D) -> Result<LakeBvpSolution> {
    params.validate(LakeCase::Case1)?;
    if params.m < 1.0 {
        return Err(Error::param("m", "the reduced ODE solver needs m >= 1"));
    }
    let h = params.h;
    if eta_grid.first() != 0.0 || (eta_grid.last() - h).abs() > 1e-12 * h {
        return Err(Error::arg(format!(
            "eta grid must span [0, {h}], got [{}, {}]",
            eta_grid.first(),
            eta_grid.last()
        )));
    }
    let ode = ReducedOde::new(params);
    let target = params.gamma / params.m.powf(1.0 / params.m);

    // quasi-static balance sigma^2 F^m ~ (C2 / beta) exp(-(xi - mu) eta)
    let guess = |eta: f64| -> (f64, f64) {
        let rhs = ode.source(eta) / ode.sigma2;
        let f = rhs.signum() * rhs.abs().powf(1.0 / ode.m);
        (f, -ode.decay / ode.m * f)
    };
    let f_scale = guess(0.0).0.abs().max(target.abs()).max(1e-300);
    let local = ode.m * ode.sigma2 * f_scale.powf(ode.m - 1.0);
    let rate = 0.5 * (ode.mu.abs() + (ode.mu * ode.mu + 4.0 * local).sqrt());
    let seg_len = (SEGMENT_GROWTH.ln() / rate).min(h);
    let segments = ((h / seg_len).ceil() as usize).clamp(1, 20_000);
    let nodes: Vec<f64> = (0..=segments)
        .map(|k| {
            if k == segments {
                h
            } else {
                h * k as f64 / segments as f64
            }
        })
        .collect();

    let mut x = DVector::zeros(2 * segments);
    for k in 0..segments {
        let (f, df) = guess(nodes[k]);
        x[2 * k] = f;
        x[2 * k + 1] = df;
    }

    let integrator = Dopri5 {
        rtol: 1e-12,
        atol: 1e-15,
        max_steps: 1_000_000,
        blowup: 1e100,
    };

    // residual and Jacobian of the matching system
    let assemble =
        |x: &DVector<f64>, with_jacobian: bool| -> Result<(DVector<f64>, DMatrix<f64>)> {
            let n = 2 * segments;
            let mut res = DVector::zeros(n);
            let mut jac = if with_jacobian {
                DMatrix::zeros(n, n)
            } else {
                DMatrix::zeros(0, 0)
            };
            res[0] = x[1];
            if with_jacobian {
                jac[(0, 1)] = 1.0;
            }
            for k in 0..segments {
                let (end, phi) = shoot_segment(
                    &ode,
                    &integrator,
                    nodes[k],
                    nodes[k + 1],
                    x[2 * k],
                    x[2 * k + 1],
                )?;
                let c = 2 * k;
                if k + 1 < segments {
                    res[c + 1] = end[0] - x[c + 2];
                    res[c + 2] = end[1] - x[c + 3];
                    if with_jacobian {
                        jac[(c + 1, c)] = phi[0][0];
                        jac[(c + 1, c + 1)] = phi[0][1];
                        jac[(c + 1, c + 2)] = -1.0;
                        jac[(c + 2, c)] = phi[1][0];
                        jac[(c + 2, c + 1)] = phi[1][1];
                        jac[(c + 2, c + 3)] = -1.0;
                    }
                } else {
                    res[c + 1] = end[0] - target;
                    if with_jacobian {
                        jac[(c + 1, c)] = phi[0][0];
                        jac[(c + 1, c + 1)] = phi[0][1];
                    }
                }
            }
            Ok((res, jac))
        };

    let mut iterations = 0;
    let (mut res, mut jac) = assemble(&x, true)?;
    let mut norm = res.amax();
    while norm > BVP_TOLERANCE {
        if iterations == BVP_MAX_ITERATIONS {
            return Err(Error::Convergence {
                iterations,
                mismatch: norm,
            });
        }
        iterations += 1;
        let step = jac
            .clone()
            .lu()
            .solve(&(-&res))
            .ok_or(Error::Convergence {
                iterations,
                mismatch: norm,
            })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut domain_failure = None;
        for _ in 0..=BVP_MAX_HALVINGS {
            let trial = &x + lambda * &step;
            match assemble(&trial, false) {
                Ok((r, _)) if r.amax() < norm => {
                    accepted = Some(trial);
                    break;
                }
                Ok(_) => {}
                Err(e @ Error::Domain(_)) => domain_failure = Some(e),
                Err(Error::Divergence { .. }) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        match accepted {
            Some(next) => x = next,
            None => {
                return Err(domain_failure.unwrap_or(Error::Convergence {
                    iterations,
                    mismatch: norm,
                }))
            }
        }
        let (r, j) = assemble(&x, true)?;
        res = r;
        jac = j;
        norm = res.amax();
    }

    // tabulate on the requested grid
    let pts = eta_grid.points();
    let mut f = vec![0.0; pts.len()];
    let mut df = vec![0.0; pts.len()];
    let mut start = 0;
    for k in 0..segments {
        let last = k + 1 == segments;
        let end = if last {
            pts.len()
        } else {
            start + pts[start..].partition_point(|p| *p < nodes[k + 1])
        };
        let outs = &pts[start..end];
        let y0 = [x[2 * k], x[2 * k + 1]];
        let rhs = |eta: f64, y: &[f64; 2]| reduced_rhs(&ode, eta, y).unwrap_or([f64::NAN; 2]);
        integrator.integrate(rhs, nodes[k], y0, nodes[k + 1], outs, |i, _, y| {
            f[start + i] = y[0];
            df[start + i] = y[1];
        })?;
        start = end;
    }
    if f.iter().chain(df.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "F^m undefined for negative F with non-integer m".into(),
        ));
    }
    let axis = Axis::new("eta", eta_grid.clone());
    Ok(LakeBvpSolution {
        f: ScalarField::new_1d(axis.clone(), f, "F")?,
        df: ScalarField::new_1d(axis, df, "dF")?,
        m: params.m,
        iterations,
        mismatch: norm,
    })
}

fn reduced_rhs(ode: &ReducedOde, eta: f64, y: &[f64; 2]) -> Option<[f64; 2]> {
    let (pow, _) = ode.power(y[0])?;
    Some([y[1], ode.mu * y[1] + ode.sigma2 * pow - ode.source(eta)])
}

type Sensitivity = [[f64; 2]; 2];

fn shoot_segment(
    ode: &ReducedOde,
    integrator: &Dopri5,
    a: f64,
    b: f64,
    f0: f64,
    df0: f64,
) -> Result<([f64; 2], Sensitivity)> {
    let mut undefined = false;
    let rhs = |eta: f64, y: &[f64; 6]| -> [f64; 6] {
        match ode.power(y[0]) {
            Some((pow, dpow)) => {
                let jf = ode.sigma2 * dpow;
                [
                    y[1],
                    ode.mu * y[1] + ode.sigma2 * pow - ode.source(eta),
                    // columns of the state-transition matrix, row-major [p00, p01, p10, p11]
                    y[4],
                    y[5],
                    jf * y[2] + ode.mu * y[4],
                    jf * y[3] + ode.mu * y[5],
                ]
            }
            None => {
                undefined = true;
                [0.0; 6]
            }
        }
    };
    let y = integrator.solve(rhs, a, [f0, df0, 1.0, 0.0, 0.0, 1.0], b)?;
    if undefined {
        return Err(Error::Domain(format!(
            "F^m undefined for negative F with non-integer m = {} on [{a}, {b}]",
            ode.m
        )));
    }
    Ok(([y[0], y[1]], [[y[2], y[3]], [y[4], y[5]]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    fn ulps(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / (f64::EPSILON * scale)
    }

    #[test]
    fn symmetric_roots() {
        let p = LakeParams {
            mu: 0.0,
            alpha: 3.0,
            beta: 3.0,
            ..LakeParams::case1_reference()
        };
        assert_eq!(characteristic_roots(&p).unwrap(), (1.0, -1.0));
    }

    #[test]
    fn roots_reject_bad_scales() {
        let mut p = LakeParams::case1_reference();
        p.alpha = 0.0;
        assert!(characteristic_roots(&p).is_err());
        p.alpha = 1.0;
        p.beta = -1.0;
        assert!(characteristic_roots(&p).is_err());
    }

    #[test]
    fn reference_roots_solve_quadratic() {
        let p = LakeParams::case1_reference();
        let (r1, r2) = characteristic_roots(&p).unwrap();
        let s2 = p.sigma_squared();
        for r in [r1, r2] {
            let res = r * r - p.mu * r - s2;
            assert!(res.abs() < 1e-12 * s2, "{res:e}");
        }
        assert!(r1 > 0.0 && r2 < 0.0);
        // independent high-precision evaluation
        assert!((r1 - 1.068_170_120_246_902_7).abs() < 1e-14);
        assert!((r2 + 1.068_026_196_346_902_7).abs() < 1e-14);
    }

    #[test]
    fn temperature_starts_at_homothermy() {
        let p = LakeParams::case1_reference();
        for z in [0.0, 10.0, 250.0, 400.0] {
            assert_eq!(temperature_case1(&p, z, 0.0).unwrap(), p.t0);
            assert_eq!(
                temperature_case2(&LakeParams::case2_reference(), z, 0.0).unwrap(),
                4.0
            );
        }
    }

    #[test]
    fn case1_surface_value_at_forty_days() {
        // 40-digit evaluation of the closed form
        let want = 10.779_622_754_098_79;
        let got = temperature_case1(&LakeParams::case1_reference(), 0.0, 40.0).unwrap();
        assert!((got - want).abs() / want < 1e-13, "{got}");
    }

    #[test]
    fn case1_singular_denominator() {
        let mut p = LakeParams::case1_reference();
        p.mu = 0.0;
        p.xi = 1.0;
        p.beta = 1.0;
        p.alpha = 1.0; // beta xi^2 - alpha = 0
        assert!(matches!(
            temperature_case1(&p, 0.0, 1.0),
            Err(Error::SingularParameters(_))
        ));
    }

    #[test]
    fn out_of_range_inputs() {
        let p = LakeParams::case1_reference();
        assert!(matches!(
            temperature_case1(&p, -1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            temperature_case1(&p, 401.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            temperature_case1(&p, 1.0, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn case2_singular_when_sigma_equals_xi() {
        let mut p = LakeParams::case2_reference();
        p.beta = 1.0;
        p.alpha = p.xi * p.xi;
        assert!(matches!(
            temperature_case2(&p, 0.0, 1.0),
            Err(Error::SingularParameters(_))
        ));
    }

    #[test]
    fn case2_deep_tail_vanishes() {
        let p = LakeParams::case2_reference();
        let t = 40.0;
        let top = temperature_case2(&p, 0.0, t).unwrap() - p.t0;
        let bottom = temperature_case2(&p, 400.0, t).unwrap() - p.t0;
        assert!(bottom < 1e-6 * top, "{bottom} vs {top}");
        // 40-digit evaluation of the surface value
        assert!((top + 4.0 - 11.169_909_524_410_034).abs() < 1e-12);
    }

    #[test]
    fn surface_slope_vanishes() {
        for profile in [
            LakeProfile::case1(&LakeParams::case1_reference()).unwrap(),
            LakeProfile::case2(&LakeParams::case2_reference()).unwrap(),
        ] {
            let scale = profile.f(0.0).abs();
            assert!(profile.df(0.0).abs() <= 4.0 * f64::EPSILON * scale * 10.0);
        }
    }

    #[test]
    fn case2_exponent_relation_enforced() {
        let mut p = LakeParams::case2_reference();
        p.s = 2.0;
        p.n = 0.5;
        assert!(
            matches!(p.validate(LakeCase::Case2), Err(Error::InvalidParameter { ref key, .. }) if key == "n")
        );
        p.n = 1.0;
        assert!(p.validate(LakeCase::Case2).is_ok());
    }

    #[test]
    fn source_term_values() {
        let p = LakeParams::case1_reference();
        assert_eq!(source_term(&p, 35.0, 0.0).unwrap(), 0.0);
        assert_eq!(source_term(&p, 0.0, 7.0).unwrap(), p.c2 * 7.0);
        let p2 = LakeParams {
            m: 2.0,
            ..p.clone()
        };
        let z = 12.5;
        let direct = p.c2 * 4f64.sqrt() * (-p.xi * z).exp();
        let got = source_term(&p2, z, 2.0).unwrap();
        assert!((got - direct).abs() <= 2.0 * f64::EPSILON * direct);
        assert!((got - p.c2 * 2.0 * (-0.048f64 * z).exp()).abs() < 1e-12 * got);
    }

    #[test]
    fn coefficient_functions_case1() {
        let p = LakeParams::case1_reference();
        let prof = LakeProfile::case1(&p).unwrap();
        let c = coefficient_functions(&p, LakeCase::Case1, prof.clone()).unwrap();
        for k in 0..=40 {
            let z = 10.0 * k as f64;
            let lhs = c.q(z) * prof.f(z);
            assert!((lhs - c.g(z)).abs() <= 4.0 * f64::EPSILON * c.g(z));
        }
        // direct formula with hand-written a3
        let z = 200.0;
        let d = p.mu - p.xi;
        let a3 = -p.c2 / (p.beta * d * d - p.beta * p.mu * d - p.alpha);
        let (_, r2) = characteristic_roots(&p).unwrap();
        let direct = (-p.mu * z).exp() / (a3 * ((d * z).exp() + (-d / r2) * (r2 * z).exp()));
        assert!((c.q(z) - direct).abs() / direct < 1e-12);
        assert!((direct - 78_554.314_108_606_6).abs() / direct < 1e-9);

        let flat = LakeParams { mu: 0.0, ..p };
        let c = coefficient_functions(&flat, LakeCase::Case1, LakeProfile::case1(&flat).unwrap())
            .unwrap();
        assert_eq!(c.g(123.0), 1.0);
        assert_eq!(c.g_z(123.0), 0.0);
    }

    #[derive(Debug)]
    struct Crossing;
    impl Profile for Crossing {
        fn f(&self, eta: f64) -> f64 {
            eta - 123.456
        }
        fn df(&self, _: f64) -> f64 {
            1.0
        }
        fn d2f(&self, _: f64) -> f64 {
            0.0
        }
    }

    #[test]
    fn zero_crossing_is_located() {
        let p = LakeParams::case1_reference();
        match coefficient_functions(&p, LakeCase::Case1, Crossing) {
            Err(Error::Domain(msg)) => assert!(msg.contains("123.456"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn homogeneous_problem_gives_zero() {
        let p = LakeParams {
            c2: 0.0,
            gamma: 0.0,
            ..LakeParams::case1_reference()
        };
        let sol = reduced_ode_general_m(&p, &linspace(0.0, 400.0, 101).unwrap()).unwrap();
        assert!(sol.f.values().iter().all(|v| *v == 0.0));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn bvp_rejects_bad_grid_and_m() {
        let p = LakeParams::case1_reference();
        assert!(reduced_ode_general_m(&p, &linspace(0.0, 300.0, 11).unwrap()).is_err());
        let p = LakeParams { m: 0.5, ..p };
        assert!(reduced_ode_general_m(&p, &linspace(0.0, 400.0, 11).unwrap()).is_err());
    }

    #[test]
    fn bvp_matches_closed_form_for_m1() {
        let p = LakeParams::case1_reference();
        let grid = linspace(0.0, 400.0, 401).unwrap();
        let sol = reduced_ode_general_m(&p, &grid).unwrap();
        let prof = LakeProfile::case1(&p).unwrap();
        let scale = prof.f(0.0).abs();
        let worst = grid
            .points()
            .iter()
            .zip(sol.f.values())
            .map(|(z, v)| (v - prof.f(*z)).abs())
            .fold(0.0, f64::max);
        assert!(worst / scale < 1e-8, "{:e}", worst / scale);
        assert!(sol.mismatch <= 1e-10);
    }

    #[test]
    fn non_integer_m_rejects_negative_profile() {
        // cooling source drives F negative
        let p = LakeParams {
            m: 1.5,
            c2: -2496.0,
            ..LakeParams::case1_reference()
        };
        let r = reduced_ode_general_m(&p, &linspace(0.0, 400.0, 41).unwrap());
        assert!(matches!(r, Err(Error::Domain(_))), "{r:?}");
    }

    #[test]
    fn ulps_helper_sanity() {
        assert_eq!(ulps(1.0, 1.0, 1.0), 0.0);
    }
}
