//! Plume checks: finite-difference residual of a concentration field,
//! termwise residual of the series, and series-versus-FD comparison.

use rayon::prelude::*;

use super::lake::spacing;
use super::plume_fd::FdSolution;
use super::ResidualReport;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::plume::{
    decay_rate, eigen_p, full_absorption_rates, full_absorption_with_rates, mode_residual,
    PlumeCase, PlumeParams,
};

/// Coefficients of `u C_x = kappa1 C_xx + kappa2 C_yy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlumeEquation {
    pub u: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl From<&PlumeParams> for PlumeEquation {
    fn from(p: &PlumeParams) -> Self {
        PlumeEquation {
            u: p.u,
            kappa1: p.kappa1,
            kappa2: p.kappa2,
        }
    }
}

/// A concentration field `C(x, y)`.
pub trait PlumeSource: Sync {
    fn value(&self, x: f64, y: f64) -> Result<f64>;
}

/// Central-difference residual `u C_x - kappa1 C_xx - kappa2 C_yy`, scaled by
/// the largest single term over the sample set.
pub fn plume_residual(
    source: &dyn PlumeSource,
    eq: PlumeEquation,
    x: &Grid1D,
    y: &Grid1D,
    steps: [f64; 2],
) -> Result<ResidualReport> {
    let [dx, dy] = steps;
    if !(dx > 0.0 && dy > 0.0) {
        return Err(Error::arg("finite-difference steps must be positive"));
    }
    let ny = y.len();
    let out: Vec<Result<(f64, f64)>> = (0..x.len() * ny)
        .into_par_iter()
        .map(|k| {
            let (xx, yy) = (x.points()[k / ny], y.points()[k % ny]);
            let c = source.value(xx, yy)?;
            let xp = source.value(xx + dx, yy)?;
            let xm = source.value(xx - dx, yy)?;
            let yp = source.value(xx, yy + dy)?;
            let ym = source.value(xx, yy - dy)?;
            let adv = eq.u * (xp - xm) / (2.0 * dx);
            let diff_x = eq.kappa1 * (xp - 2.0 * c + xm) / (dx * dx);
            let diff_y = eq.kappa2 * (yp - 2.0 * c + ym) / (dy * dy);
            Ok((
                adv - diff_x - diff_y,
                adv.abs().max(diff_x.abs()).max(diff_y.abs()),
            ))
        })
        .collect();
    let out: Vec<(f64, f64)> = out.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = out.iter().map(|v| v.0).collect();
    let scale = out.iter().fold(0.0f64, |m, v| m.max(v.1));
    Ok(ResidualReport::from_samples(
        "plume",
        &values,
        scale,
        vec![spacing(x), spacing(y)],
    ))
}

/// Truncated strong-absorption series with precomputed rates.
pub struct SeriesSource {
    params: PlumeParams,
    rates: Vec<f64>,
}

impl SeriesSource {
    pub fn new(params: &PlumeParams) -> Result<Self> {
        params.validate()?;
        Ok(SeriesSource {
            params: params.clone(),
            rates: full_absorption_rates(params)?,
        })
    }
}

impl PlumeSource for SeriesSource {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(full_absorption_with_rates(&self.params, &self.rates, x, y)?.value)
    }
}

/// Leading weak-absorption mode `A exp(m x) cos(p (y - 1))`.
pub struct ModeSource {
    pub amplitude: f64,
    pub p: f64,
    pub m: f64,
}

impl ModeSource {
    pub fn leading(params: &PlumeParams) -> Result<Self> {
        let p = eigen_p(params, 1)?;
        Ok(ModeSource {
            amplitude: params.inlet_amplitude,
            p,
            m: decay_rate(params, p)?,
        })
    }
}

impl PlumeSource for ModeSource {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.amplitude * (self.m * x).exp() * (self.p * (y - 1.0)).cos())
    }
}

/// `E_c C(x / E_x, y)`.
pub struct MappedPlume<'a> {
    pub inner: &'a dyn PlumeSource,
    pub e_x: f64,
    pub e_c: f64,
}

impl PlumeSource for MappedPlume<'_> {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.e_c * self.inner.value(x / self.e_x, y)?)
    }
}

/// Largest relative residual of the individual modes in the PDE, over the
/// first `n_terms` modes of the regime.
pub fn termwise_residual(params: &PlumeParams, case: PlumeCase) -> Result<ResidualReport> {
    params.validate()?;
    let residuals: Vec<f64> = (1..=params.n_terms)
        .map(|n| {
            let p = match case {
                PlumeCase::SmallLambda => eigen_p(params, n)?,
                PlumeCase::LargeLambda => (2 * n - 1) as f64 * 0.5 * std::f64::consts::PI,
            };
            Ok(mode_residual(params, p, decay_rate(params, p)?))
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport::from_samples(
        "plume-modes",
        &residuals,
        0.0,
        vec![],
    ))
}

/// Deviation of the FD field from the series on the nodes with
/// `x >= x_min` and `y >= y_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesComparison {
    /// `max |C_fd - C_series| / max |C_series|`
    pub max_deviation: f64,
    /// largest pointwise relative deviation where the series exceeds `floor`
    pub max_pointwise: f64,
    pub samples: usize,
}

pub fn compare_with_series(
    params: &PlumeParams,
    fd: &FdSolution,
    x_min: f64,
    y_min: f64,
    floor: f64,
) -> Result<SeriesComparison> {
    let src = SeriesSource::new(params)?;
    let axes = fd.field.axes();
    let (xg, yg) = (axes[0].grid.points(), axes[1].grid.points());
    let ny = yg.len();
    let pairs: Vec<Result<Option<(f64, f64)>>> = (0..xg.len() * ny)
        .into_par_iter()
        .map(|k| {
            let (x, y) = (xg[k / ny], yg[k % ny]);
            if x < x_min || y < y_min {
                return Ok(None);
            }
            Ok(Some((fd.field.values()[k], src.value(x, y)?)))
        })
        .collect();
    let pairs: Vec<(f64, f64)> = pairs
        .into_iter()
        .filter_map(|r| r.transpose())
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::arg(
            "no finite-difference nodes in the comparison region",
        ));
    }
    let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let worst = pairs.iter().fold(0.0f64, |m, p| m.max((p.0 - p.1).abs()));
    let pointwise = pairs
        .iter()
        .filter(|p| p.1.abs() > floor)
        .fold(0.0f64, |m, p| m.max((p.0 - p.1).abs() / p.1.abs()));
    Ok(SeriesComparison {
        max_deviation: worst / scale,
        max_pointwise: pointwise,
        samples: pairs.len(),
    })
}
