//! Checks of the boundary-layer solution: collocation of the similarity ODEs
//! and finite-difference residuals of the reconstructed PDE fields.

use rayon::prelude::*;

use super::lake::spacing;
use super::ResidualReport;
use crate::blayer::{reconstruct_fields, BLayerParams, SimilaritySolution};
use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Value and derivative at `x` of the cubic through four nodes.
fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut deriv = 0.0;
    for j in 0..4 {
        let mut basis = 1.0;
        let mut denom = 1.0;
        let mut dsum = 0.0;
        for k in 0..4 {
            if k == j {
                continue;
            }
            denom *= xs[j] - xs[k];
            basis *= x - xs[k];
            let mut prod = 1.0;
            for l in 0..4 {
                if l != j && l != k {
                    prod *= x - xs[l];
                }
            }
            dsum += prod;
        }
        value += ys[j] * basis / denom;
        deriv += ys[j] * dsum / denom;
    }
    (value, deriv)
}

/// Re-evaluates both similarity ODEs at the midpoints of the profile grid.
///
/// Values and the highest derivatives at each midpoint come from cubics
/// through the four nearest tabulated nodes, so the check never sees the
/// integrator's internal steps. `boundary_violation` is set when the wall
/// conditions `F(0) = F'(0) = 0`, `Theta(0) = 1` do not hold.
pub fn collocation_check(sol: &SimilaritySolution, params: &BLayerParams) -> ResidualReport {
    let eta = sol.eta.points();
    let n = eta.len();
    let (pr, a1) = (params.prandtl, params.a1);
    let mut residuals = Vec::with_capacity(2 * (n - 1));
    for i in 0..n - 1 {
        let j0 = i.saturating_sub(1).min(n.saturating_sub(4));
        let xs = &eta[j0..j0 + 4];
        let mid = 0.5 * (eta[i] + eta[i + 1]);
        let at = |col: &[f64]| lagrange4(xs, &col[j0..j0 + 4], mid);
        let (f, _) = at(&sol.f);
        let (df, _) = at(&sol.df);
        let (d2f, d3f) = at(&sol.d2f);
        let (th, _) = at(&sol.theta);
        let (dth, d2th) = at(&sol.dtheta);
        let g = 0.5 * a1 * mid + f;
        residuals.push(d3f + g * d2f - df * df + a1 * df + th);
        residuals.push(d2th / pr + g * dth + (2.0 * a1 - df) * th);
    }
    let mut report =
        ResidualReport::from_samples("similarity-ode", &residuals, 0.0, vec![spacing(&sol.eta)]);
    report.boundary_violation = sol.f[0] != 0.0 || sol.df[0] != 0.0 || sol.theta[0] != 1.0;
    report
}

/// Velocity and temperature `(u, v, T)` at a point.
pub trait BlayerSource: Sync {
    fn fields(&self, x: f64, y: f64, t: f64) -> Result<[f64; 3]>;
}

/// Fields reconstructed from a similarity solution.
pub struct Reconstructed<'a> {
    pub sol: &'a SimilaritySolution,
    pub params: &'a BLayerParams,
}

impl BlayerSource for Reconstructed<'_> {
    fn fields(&self, x: f64, y: f64, t: f64) -> Result<[f64; 3]> {
        let f = reconstruct_fields(self.sol, self.params, x, y, t)?;
        Ok([f.u, f.v, f.temperature])
    }
}

/// Tensor sample set with the finite-difference step per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub x: Grid1D,
    pub y: Grid1D,
    pub t: Grid1D,
    /// steps along `(x, y, t)`
    pub steps: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlayerResiduals {
    pub continuity: ResidualReport,
    pub momentum: ResidualReport,
    pub energy: ResidualReport,
}

impl BlayerResiduals {
    pub fn reports(&self) -> [&ResidualReport; 3] {
        [&self.continuity, &self.momentum, &self.energy]
    }
}

/// Residuals of continuity, momentum and energy for reconstructed fields.
pub fn pde_residual_blayer(
    sol: &SimilaritySolution,
    params: &BLayerParams,
    samples: &SampleBox,
) -> Result<BlayerResiduals> {
    blayer_residuals(&Reconstructed { sol, params }, params.prandtl, samples)
}

struct PointResidual {
    values: [f64; 3],
    scales: [f64; 3],
}

/// Central-difference residuals of
/// `u_x + v_y`, `u_t + u u_x + v u_y - T - u_yy` and
/// `T_t + u T_x + v T_y - T_yy / Pr` for any field source.
///
/// Each report is scaled by the largest magnitude of a single term of its
/// equation over the box.
pub fn blayer_residuals(
    source: &dyn BlayerSource,
    prandtl: f64,
    samples: &SampleBox,
) -> Result<BlayerResiduals> {
    let [dx, dy, dt] = samples.steps;
    if !(dx > 0.0 && dy > 0.0 && dt > 0.0) {
        return Err(Error::arg("finite-difference steps must be positive"));
    }
    let (nx, ny, nt) = (samples.x.len(), samples.y.len(), samples.t.len());
    let points: Vec<Result<PointResidual>> = (0..nx * ny * nt)
        .into_par_iter()
        .map(|k| {
            let x = samples.x.points()[k / (ny * nt)];
            let y = samples.y.points()[(k / nt) % ny];
            let t = samples.t.points()[k % nt];
            let c = source.fields(x, y, t)?;
            let xp = source.fields(x + dx, y, t)?;
            let xm = source.fields(x - dx, y, t)?;
            let yp = source.fields(x, y + dy, t)?;
            let ym = source.fields(x, y - dy, t)?;
            let tp = source.fields(x, y, t + dt)?;
            let tm = source.fields(x, y, t - dt)?;
            let d = |p: &[f64; 3], m: &[f64; 3], i: usize, h: f64| (p[i] - m[i]) / (2.0 * h);
            let dd =
                |p: &[f64; 3], m: &[f64; 3], i: usize, h: f64| (p[i] - 2.0 * c[i] + m[i]) / (h * h);
            let [u, v, temp] = c;
            let u_x = d(&xp, &xm, 0, dx);
            let v_y = d(&yp, &ym, 1, dy);
            let u_y = d(&yp, &ym, 0, dy);
            let u_t = d(&tp, &tm, 0, dt);
            let u_yy = dd(&yp, &ym, 0, dy);
            let t_x = d(&xp, &xm, 2, dx);
            let t_y = d(&yp, &ym, 2, dy);
            let t_t = d(&tp, &tm, 2, dt);
            let t_yy = dd(&yp, &ym, 2, dy);
            let mom = [u_t, u * u_x, v * u_y, -temp, -u_yy];
            let en = [t_t, u * t_x, v * t_y, -t_yy / prandtl];
            let maxabs = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(PointResidual {
                values: [u_x + v_y, mom.iter().sum(), en.iter().sum()],
                scales: [u_x.abs().max(v_y.abs()), maxabs(&mom), maxabs(&en)],
            })
        })
        .collect();
    let points: Vec<PointResidual> = points.into_iter().collect::<Result<_>>()?;
    let spacing = vec![
        spacing(&samples.x),
        spacing(&samples.y),
        spacing(&samples.t),
    ];
    let report = |i: usize, name: &str| {
        let values: Vec<f64> = points.iter().map(|p| p.values[i]).collect();
        let scale = points.iter().fold(0.0f64, |m, p| m.max(p.scales[i]));
        ResidualReport::from_samples(name, &values, scale, spacing.clone())
    };
    Ok(BlayerResiduals {
        continuity: report(0, "blayer-continuity"),
        momentum: report(1, "blayer-momentum"),
        energy: report(2, "blayer-energy"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_is_exact_for_cubics() {
        let xs = [0.0, 0.5, 1.5, 2.0];
        let f = |x: f64| 2.0 - x + 3.0 * x * x - 0.5 * x * x * x;
        let df = |x: f64| -1.0 + 6.0 * x - 1.5 * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let (v, d) = lagrange4(&xs, &ys, 0.8);
        assert!((v - f(0.8)).abs() < 1e-13);
        assert!((d - df(0.8)).abs() < 1e-13);
    }
}
