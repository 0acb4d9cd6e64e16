use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, finite sample coordinates along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid1D {
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::arg(format!(
                "a grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::arg(format!("non-finite grid point {bad}")));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::arg(format!(
                "grid is not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Grid1D { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a grid holds at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Applies the affine map `p -> scale * p + shift` to every point.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::arg(format!(
                "affine grid map needs a positive finite scale and a finite shift (got {scale}, {shift})"
            )));
        }
        Grid1D::new(self.points.iter().map(|p| scale * p + shift).collect())
    }

    /// Index of the interval `[p_i, p_{i+1}]` containing `x`, clamped to the grid.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.points.len();
        match self.points.partition_point(|p| *p <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }
}

impl TryFrom<Vec<f64>> for Grid1D {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        Grid1D::new(points)
    }
}

impl From<Grid1D> for Vec<f64> {
    fn from(g: Grid1D) -> Self {
        g.points
    }
}

/// `n` equally spaced points from `a` to `b`; both endpoints are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Grid1D> {
    if n < 2 {
        return Err(Error::arg(format!("linspace needs n >= 2, got {n}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::arg("linspace endpoints must be finite"));
    }
    if a >= b {
        return Err(Error::arg(format!("linspace needs a < b, got {a} >= {b}")));
    }
    let last = (n - 1) as f64;
    let span = b - a;
    let mut points: Vec<f64> = (0..n).map(|i| a + (i as f64 * span) / last).collect();
    points[0] = a;
    points[n - 1] = b;
    Grid1D::new(points)
}

/// Points `a + (b - a) * (exp(k s) - 1) / (exp(k) - 1)` for `s` uniform on `[0, 1]`,
/// clustering towards `a` for `k > 0`. `k == 0` gives `linspace`.
pub fn geometric_stretch(a: f64, b: f64, n: usize, k: f64) -> Result<Grid1D> {
    if k == 0.0 {
        return linspace(a, b, n);
    }
    let base = linspace(0.0, 1.0, n)?;
    let denom = k.exp_m1();
    let mut points: Vec<f64> = base
        .points()
        .iter()
        .map(|s| a + (b - a) * (k * s).exp_m1() / denom)
        .collect();
    points[0] = a;
    points[n - 1] = b;
    Grid1D::new(points)
}
