//! Steady dispersion of a pollutant beneath an inversion lid.
//!
//! `u C_x = kappa1 C_xx + kappa2 C_yy` on `x > 0`, `0 < y < 1`, with the
//! source at the inlet `C(0, y) = 1`, decay far downstream, no flux through
//! the lid (`C_y = 0` at `y = 1`) and partial absorption at the ground
//! (`kappa2 C_y = lambda gamma C` at `y = 0`). Separation gives modes
//! `exp(m x) cos(p (y - 1))` with `tan p = lambda gamma / (kappa2 p)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which root formula is used for the streamwise decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMode {
    /// `m = beta - sqrt(beta^2 + alpha p^2)`
    #[default]
    PaperExact,
    /// `m = (beta - sqrt(beta^2 + alpha p^2)) / alpha`, the decaying root of
    /// `alpha m^2 - 2 beta m - p^2 = 0`
    ConsistentQuadratic,
}

/// The two absorption limits with closed-form concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlumeCase {
    /// weak absorption: single transverse mode, `C` independent of `y`
    SmallLambda,
    /// strong absorption: `C = 0` on the ground
    LargeLambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlumeParams {
    pub u: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "one")]
    pub h: f64,
    #[serde(default = "one")]
    pub u0: f64,
    #[serde(default = "default_terms")]
    pub n_terms: usize,
    #[serde(default)]
    pub root_mode: RootMode,
    /// concentration at the inlet
    #[serde(default = "one")]
    pub inlet_amplitude: f64,
}

fn one() -> f64 {
    1.0
}

fn default_terms() -> usize {
    200
}

impl PlumeParams {
    /// `u = 1`, `kappa1 = kappa2 = 0.1`, `h = u0 = 1`.
    pub fn reference() -> Self {
        PlumeParams {
            u: 1.0,
            kappa1: 0.1,
            kappa2: 0.1,
            lambda: 0.0,
            h: 1.0,
            u0: 1.0,
            n_terms: default_terms(),
            root_mode: RootMode::PaperExact,
            inlet_amplitude: 1.0,
        }
    }

    /// `gamma = sqrt(h / u0)`.
    pub fn gamma(&self) -> f64 {
        (self.h / self.u0).sqrt()
    }

    /// `lambda gamma / kappa2`, the right-hand constant of the eigencondition.
    pub fn absorption_number(&self) -> f64 {
        self.lambda * self.gamma() / self.kappa2
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("u", self.u),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("lambda", self.lambda),
            ("h", self.h),
            ("u0", self.u0),
            ("inlet_amplitude", self.inlet_amplitude),
        ] {
            if !v.is_finite() {
                return Err(Error::param(key, "must be finite"));
            }
        }
        if self.u <= 0.0 {
            return Err(Error::param("u", "must be positive"));
        }
        if self.kappa1 <= 0.0 {
            return Err(Error::param("kappa1", "must be positive"));
        }
        if self.kappa2 <= 0.0 {
            return Err(Error::param("kappa2", "must be positive"));
        }
        if self.lambda < 0.0 {
            return Err(Error::param("lambda", "must be non-negative"));
        }
        if self.h <= 0.0 {
            return Err(Error::param("h", "must be positive"));
        }
        if self.u0 <= 0.0 {
            return Err(Error::param("u0", "must be positive"));
        }
        if self.n_terms < 1 {
            return Err(Error::param("n_terms", "must be at least 1"));
        }
        Ok(())
    }
}

/// `(alpha, beta) = (kappa1 / kappa2, u / (2 kappa2))`.
pub fn alpha_beta(params: &PlumeParams) -> Result<(f64, f64)> {
    if params.kappa2 == 0.0 || !params.kappa2.is_finite() {
        return Err(Error::arg("kappa2 must be nonzero and finite"));
    }
    Ok((
        params.kappa1 / params.kappa2,
        params.u / (2.0 * params.kappa2),
    ))
}

const EIGEN_TOLERANCE: f64 = 1e-12;

/// `n`-th positive root of `tan p = K / p`, `K = lambda gamma / kappa2`.
///
/// The root lies in `((n - 1) pi, (n - 1) pi + pi / 2)`; bisection runs on
/// `(-1)^(n-1) (p sin p - K cos p)`, which is `-K` at the left end and
/// positive at the right end.
pub fn eigen_p(params: &PlumeParams, branch: usize) -> Result<f64> {
    if branch == 0 {
        return Err(Error::arg("eigenvalue branches are numbered from 1"));
    }
    if !(params.lambda >= 0.0) {
        return Err(Error::param("lambda", "must be non-negative"));
    }
    let k = params.absorption_number();
    if !k.is_finite() {
        return Err(Error::arg("lambda gamma / kappa2 must be finite"));
    }
    let left = (branch - 1) as f64 * PI;
    if k == 0.0 {
        return Ok(left);
    }
    let sign = if branch % 2 == 1 { 1.0 } else { -1.0 };
    let g = |p: f64| sign * (p * p.sin() - k * p.cos());
    let (mut a, mut b) = (left, left + 0.5 * PI);
    while b - a > EIGEN_TOLERANCE {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Streamwise decay rate of the transverse mode `p` (always `<= 0`).
pub fn decay_rate(params: &PlumeParams, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::arg(format!("p = {p} must be >= 0")));
    }
    let (alpha, beta) = alpha_beta(params)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    let ap2 = alpha * p * p;
    // beta - sqrt(beta^2 + a p^2) without cancellation
    let root = -ap2 / (beta + (beta * beta + ap2).sqrt());
    Ok(match params.root_mode {
        RootMode::PaperExact => root,
        RootMode::ConsistentQuadratic => root / alpha,
    })
}

/// `C = exp{[u - sqrt(u^2 + 4 lambda kappa1 gamma)] x / (2 kappa2)}`.
pub fn concentration_no_absorption(params: &PlumeParams, x: f64) -> f64 {
    let u = params.u;
    let q = 4.0 * params.lambda * params.kappa1 * params.gamma();
    let rate = -q / (u + (u * u + q).sqrt()) / (2.0 * params.kappa2);
    params.inlet_amplitude * (rate * x).exp()
}

/// Truncated series value together with its stated tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Series tail bound `2 / (pi n_terms)`.
pub fn series_tail_bound(n_terms: usize) -> f64 {
    2.0 / (PI * n_terms as f64)
}

/// Decay rates `m_n` of the strong-absorption modes `N = (2n - 1) / 2`.
pub fn full_absorption_rates(params: &PlumeParams) -> Result<Vec<f64>> {
    (1..=params.n_terms)
        .map(|n| decay_rate(params, half_integer(n) * PI))
        .collect()
}

fn half_integer(n: usize) -> f64 {
    (2 * n - 1) as f64 / 2.0
}

/// `C = 2 sum sin(N pi) / (N pi) e^(m x) cos[N pi (y - 1)]` over `n = 1..n_terms`.
///
/// For half-integer `N`, `sin(N pi) cos[N pi (y - 1)] = sin(N pi y)`, so each
/// term is evaluated as `2 / (N pi) e^(m x) sin(N pi y)`; this keeps the
/// ground value exactly zero.
pub fn concentration_full_absorption(params: &PlumeParams, x: f64, y: f64) -> Result<SeriesValue> {
    params.validate()?;
    let rates = full_absorption_rates(params)?;
    full_absorption_with_rates(params, &rates, x, y)
}

/// As [`concentration_full_absorption`] with precomputed decay rates.
pub fn full_absorption_with_rates(
    params: &PlumeParams,
    rates: &[f64],
    x: f64,
    y: f64,
) -> Result<SeriesValue> {
    if !(x >= 0.0) {
        return Err(Error::arg(format!("x = {x} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::arg(format!("y = {y} outside [0, 1]")));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (n, &m) in rates.iter().enumerate() {
        let big_n = half_integer(n + 1);
        let term = 2.0 / (big_n * PI) * (m * x).exp() * (big_n * PI * y).sin();
        // Neumaier compensated summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(SeriesValue {
        value: params.inlet_amplitude * (sum + comp),
        tail_bound: params.inlet_amplitude.abs() * series_tail_bound(rates.len()),
    })
}

/// Relative residual of a single mode `exp(m x) cos(p (y - 1))` in the PDE,
/// `|u m - kappa1 m^2 + kappa2 p^2| / max(|u m|, kappa1 m^2, kappa2 p^2)`.
pub fn mode_residual(params: &PlumeParams, p: f64, m: f64) -> f64 {
    let a = params.u * m;
    let b = params.kappa1 * m * m;
    let c = params.kappa2 * p * p;
    let scale = a.abs().max(b).max(c);
    if scale == 0.0 {
        0.0
    } else {
        (a - b + c).abs() / scale
    }
}

/// One row of the eigenvalue table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRow {
    pub n: usize,
    /// `p / pi`
    pub big_n: f64,
    pub p: f64,
    pub m: f64,
}

/// Eigenvalues for the first `branches` modes of the given regime.
pub fn eigen_table(
    params: &PlumeParams,
    case: PlumeCase,
    branches: usize,
) -> Result<Vec<EigenRow>> {
    params.validate()?;
    (1..=branches)
        .map(|n| {
            let p = match case {
                PlumeCase::SmallLambda => eigen_p(params, n)?,
                PlumeCase::LargeLambda => half_integer(n) * PI,
            };
            Ok(EigenRow {
                n,
                big_n: p / PI,
                p,
                m: decay_rate(params, p)?,
            })
        })
        .collect()
}
