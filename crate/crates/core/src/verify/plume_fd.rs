//! Finite-difference solution of the plume equation by line SOR.
//!
//! The domain `[0, x_max] x [0, 1]` is mapped from a uniform computational
//! grid by geometric stretchings that cluster nodes near the inlet and the
//! ground, where the solution varies fastest. Derivatives are second-order
//! central differences in the computational coordinates:
//! `C_x = C_s / X'` and `C_xx = (C_ss - (X'' / X') C_s) / X'^2`.

use crate::error::{Error, Result};
use crate::field::{Axis, ScalarField};
use crate::grid::Grid1D;
use crate::plume::{decay_rate, eigen_p, PlumeCase, PlumeParams};

/// Stretching of `x` toward the inlet.
pub const X_STRETCH: f64 = 6.0;
/// Stretching of `y` toward the ground.
pub const Y_STRETCH: f64 = 2.0;

const SOR_OMEGA: f64 = 1.8;
const SOR_TOLERANCE: f64 = 1e-10;
const SOR_MAX_SWEEPS: usize = 1_000_000;
const OUTLET_LEVEL: f64 = 1e-3;

/// Converged finite-difference field.
#[derive(Debug, Clone)]
pub struct FdSolution {
    /// `C(x, y)` with `x` the outer axis
    pub field: ScalarField,
    pub sweeps: usize,
    /// largest scaled residual at exit
    pub residual: f64,
    /// relaxation factor in effect at exit
    pub omega: f64,
}

/// Map `[0, 1] -> [0, len]`, `X(s) = len (e^(k s) - 1) / (e^k - 1)`, with
/// its first two derivatives.
fn stretch(len: f64, k: f64, s: f64) -> (f64, f64, f64) {
    let d = k.exp_m1();
    let e = (k * s).exp();
    (
        len * (k * s).exp_m1() / d,
        len * k * e / d,
        len * k * k * e / d,
    )
}

/// Solves `u C_x = kappa1 C_xx + kappa2 C_yy` with `C = A` at the inlet,
/// `C_x = 0` at `x_max`, `C_y = 0` at the lid and, on the ground, either
/// `kappa2 C_y = lambda gamma C` (weak absorption) or `C = 0` (strong).
pub fn plume_fd_solve(
    params: &PlumeParams,
    x_max: f64,
    nx: usize,
    ny: usize,
    case: PlumeCase,
) -> Result<FdSolution> {
    params.validate()?;
    if nx < 16 || ny < 16 {
        return Err(Error::arg(
            "finite-difference grid needs at least 16 x 16 nodes",
        ));
    }
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::arg("x_max must be positive"));
    }
    let slowest = match case {
        PlumeCase::SmallLambda => decay_rate(params, eigen_p(params, 1)?)?,
        PlumeCase::LargeLambda => decay_rate(params, 0.5 * std::f64::consts::PI)?,
    };
    // a mode that does not decay satisfies the outlet condition exactly
    if slowest < 0.0 && (slowest * x_max).exp() >= OUTLET_LEVEL {
        return Err(Error::arg(format!(
            "x_max = {x_max} too short: slowest mode exp({slowest:.4} x) is still above {OUTLET_LEVEL} at the outlet"
        )));
    }

    let ds = 1.0 / (nx - 1) as f64;
    let dz = 1.0 / (ny - 1) as f64;
    let xs: Vec<(f64, f64, f64)> = (0..nx)
        .map(|i| stretch(x_max, X_STRETCH, i as f64 * ds))
        .collect();
    let ys: Vec<(f64, f64, f64)> = (0..ny)
        .map(|j| stretch(1.0, Y_STRETCH, j as f64 * dz))
        .collect();
    let mut xp: Vec<f64> = xs.iter().map(|v| v.0).collect();
    let mut yp: Vec<f64> = ys.iter().map(|v| v.0).collect();
    xp[nx - 1] = x_max;
    yp[ny - 1] = 1.0;

    let (u, k1, k2) = (params.u, params.kappa1, params.kappa2);
    let robin = params.lambda * params.gamma() / k2;
    let amp = params.inlet_amplitude;

    // stencil coefficients: a_w C[i-1] + a_e C[i+1] + a_s C[j-1] + a_n C[j+1] + a_p C = 0
    struct Stencil {
        w: f64,
        e: f64,
        s: f64,
        n: f64,
        p: f64,
    }
    let stencil = |i: usize, j: usize| -> Stencil {
        let (_, x1, x2) = xs[i];
        let (_, y1, y2) = ys[j];
        let cxx = k1 / (x1 * x1);
        let cx = -(k1 * x2 / (x1 * x1 * x1) + u / x1);
        let cyy = k2 / (y1 * y1);
        let cy = -k2 * y2 / (y1 * y1 * y1);
        Stencil {
            w: cxx / (ds * ds) - cx / (2.0 * ds),
            e: cxx / (ds * ds) + cx / (2.0 * ds),
            s: cyy / (dz * dz) - cy / (2.0 * dz),
            n: cyy / (dz * dz) + cy / (2.0 * dz),
            p: -2.0 * cxx / (ds * ds) - 2.0 * cyy / (dz * dz),
        }
    };

    let j_start = match case {
        PlumeCase::SmallLambda => 0,
        PlumeCase::LargeLambda => 1,
    };
    let idx = |i: usize, j: usize| i * ny + j;
    let initial = || {
        let mut c = vec![amp; nx * ny];
        if case == PlumeCase::LargeLambda {
            for i in 0..nx {
                c[idx(i, 0)] = 0.0;
            }
        }
        c
    };

    // folds ghost nodes into the row equation of node (i, j):
    // returns (west, diag, east, rhs from vertical neighbours)
    let row_coeffs = |c: &[f64], i: usize, j: usize| -> (f64, f64, f64, f64) {
        let st = stencil(i, j);
        let mut diag = st.p;
        let mut west = st.w;
        let mut east = st.e;
        if i == nx - 1 {
            // C[nx] = C[nx - 2]
            west += east;
            east = 0.0;
        }
        let mut south = st.s;
        let mut north = st.n;
        if j == ny - 1 {
            south += north;
            north = 0.0;
        }
        let mut vertical = 0.0;
        if j == 0 {
            // C[-1] = C[1] - 2 dz Y'(0) (lambda gamma / kappa2) C[0]
            north += south;
            diag -= south * 2.0 * dz * ys[0].1 * robin;
        } else {
            vertical += south * c[idx(i, j - 1)];
        }
        if north != 0.0 {
            vertical += north * c[idx(i, j + 1)];
        }
        (west, diag, east, vertical)
    };

    let residual_of = |c: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for j in j_start..ny {
            for i in 1..nx {
                let (w, d, e, vert) = row_coeffs(c, i, j);
                let east = if i + 1 < nx {
                    e * c[idx(i + 1, j)]
                } else {
                    0.0
                };
                let r = w * c[idx(i - 1, j)] + d * c[idx(i, j)] + east + vert;
                worst = worst.max((r / d).abs());
            }
        }
        worst
    };

    let mut omega = SOR_OMEGA;
    let mut c = initial();
    let start_residual = residual_of(&c).max(f64::MIN_POSITIVE);
    let m = nx - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut sweeps = 0;
    let mut residual = start_residual;
    while sweeps < SOR_MAX_SWEEPS {
        sweeps += 1;
        for j in j_start..ny {
            for i in 1..nx {
                let (w, d, e, vert) = row_coeffs(&c, i, j);
                let k = i - 1;
                lower[k] = w;
                diag[k] = d;
                upper[k] = e;
                rhs[k] = -vert;
                if i == 1 {
                    rhs[k] -= w * c[idx(0, j)];
                    lower[k] = 0.0;
                }
            }
            thomas(&lower, &mut diag, &upper, &mut rhs);
            for i in 1..nx {
                let old = c[idx(i, j)];
                c[idx(i, j)] = old + omega * (rhs[i - 1] - old);
            }
        }
        residual = residual_of(&c);
        if residual <= SOR_TOLERANCE {
            break;
        }
        if !residual.is_finite() || residual > 1e3 * start_residual {
            omega *= 0.5;
            if omega < 1e-3 {
                break;
            }
            c = initial();
        }
    }
    if !(residual <= SOR_TOLERANCE) {
        return Err(Error::Convergence {
            iterations: sweeps,
            mismatch: residual,
        });
    }
    let field = ScalarField::new_2d(
        Axis::new("x", Grid1D::new(xp)?),
        Axis::new("y", Grid1D::new(yp)?),
        c,
        "C_fd",
    )?;
    Ok(FdSolution {
        field,
        sweeps,
        residual,
        omega,
    })
}

/// Solves a tridiagonal system in place; the solution is left in `rhs`.
fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for k in 1..n {
        let w = lower[k] / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for k in (0..n - 1).rev() {
        rhs[k] = (rhs[k] - upper[k] * rhs[k + 1]) / diag[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_small_system() {
        let lower = [0.0, 1.0, 1.0];
        let mut diag = [4.0, 4.0, 4.0];
        let upper = [1.0, 1.0, 0.0];
        // solution (1, 2, 3)
        let mut rhs = [6.0, 12.0, 14.0];
        thomas(&lower, &mut diag, &upper, &mut rhs);
        for (got, want) in rhs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn stretch_endpoints() {
        let (a, _, _) = stretch(30.0, 5.0, 0.0);
        let (b, _, _) = stretch(30.0, 5.0, 1.0);
        assert_eq!(a, 0.0);
        assert!((b - 30.0).abs() < 1e-12);
    }

    #[test]
    fn no_absorption_is_uniform() {
        let p = PlumeParams::reference();
        let sol = plume_fd_solve(&p, 5.0, 17, 17, PlumeCase::SmallLambda).unwrap();
        assert!(sol.field.values().iter().all(|c| (c - 1.0).abs() < 1e-9));
    }

    #[test]
    fn rejects_short_domain_and_small_grid() {
        let p = PlumeParams::reference();
        assert!(plume_fd_solve(&p, 2.0, 33, 17, PlumeCase::LargeLambda).is_err());
        assert!(plume_fd_solve(&p, 30.0, 8, 17, PlumeCase::LargeLambda).is_err());
    }
}
