//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size controlled integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Any state component exceeding this magnitude aborts with [`Error::Divergence`].
    pub blowup: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 200_000,
            blowup: 1e8,
        }
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            ..Default::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
    ///
    /// The integrator lands exactly on every point of `outputs` (sorted,
    /// inside `[t0, t1]`) and reports the state there through `on_output`.
    /// Returns the state at `t1`.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        outputs: &[f64],
        mut on_output: O,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(usize, f64, &[f64; N]),
    {
        if !(t1 >= t0) {
            return Err(Error::arg(format!(
                "integration interval [{t0}, {t1}] is reversed"
            )));
        }
        let mut next_out = 0;
        while next_out < outputs.len() && outputs[next_out] <= t0 {
            on_output(next_out, outputs[next_out], &y0);
            next_out += 1;
        }
        if t1 == t0 {
            return Ok(y0);
        }

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = ((t1 - t0) / 100.0).min(0.1);
        let h_min = 1e-14 * (t1.abs().max(t0.abs()).max(1.0));

        for _ in 0..self.max_steps {
            let target = if next_out < outputs.len() && outputs[next_out] < t1 {
                outputs[next_out]
            } else {
                t1
            };
            let mut landing = false;
            if t + h >= target {
                h = target - t;
                landing = true;
            }

            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();

            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if h.abs() < h_min {
                    return Err(Error::Divergence { eta: t });
                }
                h *= 0.25;
                continue;
            }

            if err <= 1.0 {
                t = if landing { target } else { t + h };
                y = y_new;
                k1 = k7;
                if y.iter().any(|v| v.abs() > self.blowup) {
                    return Err(Error::Divergence { eta: t });
                }
                if landing && target < t1 {
                    on_output(next_out, t, &y);
                    next_out += 1;
                    while next_out < outputs.len() && outputs[next_out] <= t {
                        on_output(next_out, outputs[next_out], &y);
                        next_out += 1;
                    }
                } else if landing {
                    while next_out < outputs.len() && outputs[next_out] <= t1 {
                        on_output(next_out, outputs[next_out], &y);
                        next_out += 1;
                    }
                    return Ok(y);
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a landing step may have been truncated; keep the untruncated proposal
                h *= factor;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < h_min {
                    return Err(Error::Divergence { eta: t });
                }
            }
        }
        Err(Error::Convergence {
            iterations: self.max_steps,
            mismatch: f64::NAN,
        })
    }

    /// Integrates to `t1` without intermediate output.
    pub fn solve<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        self.integrate(f, t0, y0, t1, &[], |_, _, _| {})
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = Dopri5::with_tolerances(1e-12, 1e-14)
            .solve(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0)
            .unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator_with_outputs() {
        let outs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let mut seen = Vec::new();
        let y = Dopri5::with_tolerances(1e-12, 1e-14)
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [0.0, 1.0],
                10.0,
                &outs,
                |k, t, y| seen.push((k, t, y[0])),
            )
            .unwrap();
        assert_eq!(seen.len(), outs.len());
        for (k, t, v) in seen {
            assert_eq!(t, outs[k]);
            assert!((v - t.sin()).abs() < 1e-10, "t={t}");
        }
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn blowup_is_reported_with_location() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let err = Dopri5::default()
            .solve(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0)
            .unwrap_err();
        match err {
            Error::Divergence { eta } => assert!(eta > 0.9 && eta <= 1.0, "{eta}"),
            other => panic!("{other:?}"),
        }
    }
}
