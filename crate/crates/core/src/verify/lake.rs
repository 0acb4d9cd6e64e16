//! Residuals of the lake heat equation for separable fields.

use rayon::prelude::*;

use super::ResidualReport;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::lake::{
    coefficient_functions, LakeBvpSolution, LakeCase, LakeParams, LakeProfile, Profile,
};

/// A temperature excess `w(z, t)` with exact partial derivatives.
pub trait LakeField: Sync {
    fn w(&self, z: f64, t: f64) -> f64;
    fn w_z(&self, z: f64, t: f64) -> f64;
    fn w_zz(&self, z: f64, t: f64) -> f64;
    fn w_t(&self, z: f64, t: f64) -> f64;
}

/// `w = (m t)^(1/m) F(z)`.
#[derive(Debug, Clone)]
pub struct SeparableField<P> {
    pub profile: P,
    pub m: f64,
}

impl<P: Profile + Sync> SeparableField<P> {
    fn amplitude(&self, t: f64) -> f64 {
        if self.m == 1.0 {
            t
        } else {
            (self.m * t).powf(1.0 / self.m)
        }
    }

    fn amplitude_rate(&self, t: f64) -> f64 {
        if self.m == 1.0 {
            1.0
        } else {
            (self.m * t).powf(1.0 / self.m - 1.0)
        }
    }
}

impl<P: Profile + Sync> LakeField for SeparableField<P> {
    fn w(&self, z: f64, t: f64) -> f64 {
        self.amplitude(t) * self.profile.f(z)
    }
    fn w_z(&self, z: f64, t: f64) -> f64 {
        self.amplitude(t) * self.profile.df(z)
    }
    fn w_zz(&self, z: f64, t: f64) -> f64 {
        self.amplitude(t) * self.profile.d2f(z)
    }
    fn w_t(&self, z: f64, t: f64) -> f64 {
        self.amplitude_rate(t) * self.profile.f(z)
    }
}

/// `factor * w`.
pub struct ScaledField<'a> {
    pub inner: &'a dyn LakeField,
    pub factor: f64,
}

impl LakeField for ScaledField<'_> {
    fn w(&self, z: f64, t: f64) -> f64 {
        self.factor * self.inner.w(z, t)
    }
    fn w_z(&self, z: f64, t: f64) -> f64 {
        self.factor * self.inner.w_z(z, t)
    }
    fn w_zz(&self, z: f64, t: f64) -> f64 {
        self.factor * self.inner.w_zz(z, t)
    }
    fn w_t(&self, z: f64, t: f64) -> f64 {
        self.factor * self.inner.w_t(z, t)
    }
}

/// `w_bar(z, t_bar) = c_w w(z, t_bar / time_scale)`.
pub struct MappedField<'a> {
    pub inner: &'a dyn LakeField,
    pub c_w: f64,
    pub time_scale: f64,
}

impl LakeField for MappedField<'_> {
    fn w(&self, z: f64, t: f64) -> f64 {
        self.c_w * self.inner.w(z, t / self.time_scale)
    }
    fn w_z(&self, z: f64, t: f64) -> f64 {
        self.c_w * self.inner.w_z(z, t / self.time_scale)
    }
    fn w_zz(&self, z: f64, t: f64) -> f64 {
        self.c_w * self.inner.w_zz(z, t / self.time_scale)
    }
    fn w_t(&self, z: f64, t: f64) -> f64 {
        self.c_w * self.inner.w_t(z, t / self.time_scale) / self.time_scale
    }
}

fn check_interior(params: &LakeParams, z_grid: &Grid1D, t_grid: &Grid1D) -> Result<()> {
    if z_grid.first() <= 0.0 || z_grid.last() >= params.h {
        return Err(Error::arg(format!(
            "depth grid must lie inside (0, {}), got [{}, {}]",
            params.h,
            z_grid.first(),
            z_grid.last()
        )));
    }
    if t_grid.first() <= 0.0 {
        return Err(Error::arg("time grid must be positive"));
    }
    Ok(())
}

/// Residual of the case-1 or case-2 equation for `field`, with `q` built
/// from `q_profile` and the source from `params`.
///
/// Case 1: `beta g w_zz + beta g_z w_z - alpha q w^m w_t + r`.
/// Case 2: `w^n w_zz + n w^(n-1) w_z^2 - sigma^2 q w^s w_t + r`.
/// The scale of the report is the largest source magnitude on the grid.
pub fn lake_residual<P: Profile + Sync>(
    params: &LakeParams,
    case: LakeCase,
    q_profile: P,
    field: &dyn LakeField,
    z_grid: &Grid1D,
    t_grid: &Grid1D,
) -> Result<ResidualReport> {
    check_interior(params, z_grid, t_grid)?;
    let coeffs = coefficient_functions(params, case, q_profile)?;
    let p = params;
    let sigma2 = p.sigma_squared();
    let nt = t_grid.len();
    let (residuals, sources): (Vec<f64>, Vec<f64>) = (0..z_grid.len() * nt)
        .into_par_iter()
        .map(|k| {
            let z = z_grid.points()[k / nt];
            let t = t_grid.points()[k % nt];
            let w = field.w(z, t);
            let r = p.c2 * power(p.m * t, 1.0 / p.m) * (-p.xi * z).exp();
            let res = match case {
                LakeCase::Case1 => {
                    p.beta * coeffs.g(z) * field.w_zz(z, t)
                        + p.beta * coeffs.g_z(z) * field.w_z(z, t)
                        - p.alpha * coeffs.q(z) * power(w, p.m) * field.w_t(z, t)
                        + r
                }
                LakeCase::Case2 => {
                    let wz = field.w_z(z, t);
                    let gradient = if p.n == 0.0 {
                        0.0
                    } else {
                        p.n * power(w, p.n - 1.0) * wz * wz
                    };
                    power(w, p.n) * field.w_zz(z, t) + gradient
                        - sigma2 * coeffs.q(z) * power(w, p.s) * field.w_t(z, t)
                        + r
                }
            };
            (res, r.abs())
        })
        .unzip();
    let scale = sources.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport::from_samples(
        match case {
            LakeCase::Case1 => "lake-case1",
            LakeCase::Case2 => "lake-case2",
        },
        &residuals,
        scale,
        vec![spacing(z_grid), spacing(t_grid)],
    ))
}

fn power(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() <= 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

pub(crate) fn spacing(g: &Grid1D) -> f64 {
    (g.last() - g.first()) / (g.len() - 1) as f64
}

/// Residual of the closed-form solution of `case` using its analytic derivatives.
pub fn lake_pde_residual(
    params: &LakeParams,
    case: LakeCase,
    z_grid: &Grid1D,
    t_grid: &Grid1D,
) -> Result<ResidualReport> {
    let profile = LakeProfile::for_case(params, case)?;
    let field = SeparableField {
        profile: profile.clone(),
        m: params.m,
    };
    lake_residual(params, case, profile, &field, z_grid, t_grid)
}

/// Residual of `F'' - mu F' - sigma^2 F^m + (C2 / beta) exp(-(xi - mu) eta)`
/// with three-point differences of the tabulated `F` at interior nodes.
pub fn reduced_ode_residual(params: &LakeParams, sol: &LakeBvpSolution) -> Result<ResidualReport> {
    let eta = sol.grid().points();
    let f = sol.f.values();
    if eta.len() < 3 {
        return Err(Error::arg("need at least three nodes"));
    }
    let sigma2 = params.sigma_squared();
    let residuals: Vec<f64> = (1..eta.len() - 1)
        .map(|i| {
            let (h0, h1) = (eta[i] - eta[i - 1], eta[i + 1] - eta[i]);
            let d1 = (f[i + 1] * h0 * h0 - f[i - 1] * h1 * h1 + f[i] * (h1 * h1 - h0 * h0))
                / (h0 * h1 * (h0 + h1));
            let d2 =
                2.0 * (f[i + 1] * h0 + f[i - 1] * h1 - f[i] * (h0 + h1)) / (h0 * h1 * (h0 + h1));
            d2 - params.mu * d1 - sigma2 * power(f[i], params.m)
                + params.c2 / params.beta * (-(params.xi - params.mu) * eta[i]).exp()
        })
        .collect();
    Ok(ResidualReport::from_samples(
        "lake-reduced-ode",
        &residuals,
        0.0,
        vec![spacing(sol.grid())],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    struct Zero;
    impl LakeField for Zero {
        fn w(&self, _: f64, _: f64) -> f64 {
            0.0
        }
        fn w_z(&self, _: f64, _: f64) -> f64 {
            0.0
        }
        fn w_zz(&self, _: f64, _: f64) -> f64 {
            0.0
        }
        fn w_t(&self, _: f64, _: f64) -> f64 {
            0.0
        }
    }

    fn grids() -> (Grid1D, Grid1D) {
        (
            linspace(10.0, 390.0, 101).unwrap(),
            linspace(1.0, 150.0, 51).unwrap(),
        )
    }

    #[test]
    fn trivial_solution_has_zero_residual() {
        let p = LakeParams::case1_reference();
        let q = LakeProfile::case1(&p).unwrap();
        let p0 = LakeParams { c2: 0.0, ..p };
        let (z, t) = grids();
        let r = lake_residual(&p0, LakeCase::Case1, q, &Zero, &z, &t).unwrap();
        assert_eq!(r.max_norm, 0.0);
        assert_eq!(r.l2_norm, 0.0);
    }

    #[test]
    fn closed_forms_solve_their_equations() {
        let (z, t) = grids();
        let r = lake_pde_residual(&LakeParams::case1_reference(), LakeCase::Case1, &z, &t).unwrap();
        assert!(r.relative_max() < 1e-8, "{:e}", r.relative_max());
        assert_eq!(r.samples, 101 * 51);
        let r = lake_pde_residual(&LakeParams::case2_reference(), LakeCase::Case2, &z, &t).unwrap();
        assert!(r.relative_max() < 1e-8, "{:e}", r.relative_max());
    }

    #[test]
    fn perturbation_is_detected() {
        let p = LakeParams::case1_reference();
        let prof = LakeProfile::case1(&p).unwrap();
        let field = SeparableField {
            profile: prof.clone(),
            m: 1.0,
        };
        let bent = ScaledField {
            inner: &field,
            factor: 1.001,
        };
        let (z, t) = grids();
        let r = lake_residual(&p, LakeCase::Case1, prof, &bent, &z, &t).unwrap();
        assert!(r.relative_max() > 1e-4, "{:e}", r.relative_max());
    }

    #[test]
    fn boundary_grids_rejected() {
        let p = LakeParams::case1_reference();
        let z = linspace(0.0, 390.0, 11).unwrap();
        let t = linspace(1.0, 2.0, 3).unwrap();
        assert!(lake_pde_residual(&p, LakeCase::Case1, &z, &t).is_err());
    }
}
