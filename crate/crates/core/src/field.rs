use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// A named coordinate axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub grid: Grid1D,
}

impl Axis {
    pub fn new(name: impl Into<String>, grid: Grid1D) -> Self {
        Axis {
            name: name.into(),
            grid,
        }
    }
}

/// Samples of a scalar quantity on a 1-D grid or a 2-D tensor grid.
///
/// 2-D values are row-major with the first axis slowest:
/// `values[i * n1 + j]` is the sample at `(axes[0][i], axes[1][j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    axes: Vec<Axis>,
    values: Vec<f64>,
    label: String,
    masked: bool,
}

impl ScalarField {
    pub fn new_1d(axis: Axis, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::build(vec![axis], values, label.into(), false)
    }

    pub fn new_2d(
        outer: Axis,
        inner: Axis,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::build(vec![outer, inner], values, label.into(), false)
    }

    /// Like [`ScalarField::new_1d`] but non-finite entries are allowed and mark masked samples.
    pub fn new_masked_1d(axis: Axis, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::build(vec![axis], values, label.into(), true)
    }

    fn build(axes: Vec<Axis>, values: Vec<f64>, label: String, masked: bool) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.grid.len()).product();
        if values.len() != expected {
            return Err(Error::arg(format!(
                "field `{label}` has {} values for a grid of {expected} points",
                values.len()
            )));
        }
        if !masked {
            if let Some(k) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::arg(format!(
                    "field `{label}` has a non-finite value at index {k}"
                )));
            }
        }
        Ok(ScalarField {
            axes,
            values,
            label,
            masked,
        })
    }

    /// Samples `f` on a 1-D grid.
    pub fn from_fn_1d(
        axis: Axis,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = axis.grid.points().iter().map(|&x| f(x)).collect();
        Self::new_1d(axis, values, label)
    }

    /// Samples `f` on a 2-D tensor grid, outer axis slowest.
    pub fn from_fn_2d(
        outer: Axis,
        inner: Axis,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(outer.grid.len() * inner.grid.len());
        for &a in outer.grid.points() {
            for &b in inner.grid.points() {
                values.push(f(a, b));
            }
        }
        Self::new_2d(outer, inner, values, label)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_masked(&self) -> bool {
        self.masked
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        self.axes == other.axes
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Three-point weights `(w_prev, w_here, w_next)` for the first derivative at
/// the middle of `x0 < x1 < x2`, exact for quadratics.
fn interior_weights(x0: f64, x1: f64, x2: f64) -> (f64, f64, f64) {
    let hm = x1 - x0;
    let hp = x2 - x1;
    (
        -hp / (hm * (hm + hp)),
        (hp - hm) / (hm * hp),
        hm / (hp * (hm + hp)),
    )
}

/// One-sided weights for the derivative at `x0` from `x0, x1, x2` (either
/// ordering), exact for quadratics.
fn edge_weights(x0: f64, x1: f64, x2: f64) -> (f64, f64, f64) {
    let d1 = x1 - x0;
    let d2 = x2 - x0;
    (
        -(d1 + d2) / (d1 * d2),
        d2 / (d1 * (d2 - d1)),
        -d1 / (d2 * (d2 - d1)),
    )
}

fn derivative_line(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let (a, b, c) = edge_weights(x[0], x[1], x[2]);
    out[0] = a * f[0] + b * f[1] + c * f[2];
    for i in 1..n - 1 {
        let (a, b, c) = interior_weights(x[i - 1], x[i], x[i + 1]);
        out[i] = a * f[i - 1] + b * f[i] + c * f[i + 1];
    }
    let (a, b, c) = edge_weights(x[n - 1], x[n - 2], x[n - 3]);
    out[n - 1] = a * f[n - 1] + b * f[n - 2] + c * f[n - 3];
    out
}

/// Second-order derivative of `field` along `axis`: central differences in the
/// interior, one-sided three-point stencils at both ends. Works on non-uniform grids.
pub fn central_derivative(field: &ScalarField, axis: usize) -> Result<ScalarField> {
    if axis >= field.dim() {
        return Err(Error::arg(format!(
            "axis {axis} out of range for a {}-D field",
            field.dim()
        )));
    }
    let x = field.axes[axis].grid.points();
    if x.len() < 3 {
        return Err(Error::arg(format!(
            "central_derivative needs at least 3 points along axis {axis}, got {}",
            x.len()
        )));
    }
    let label = format!("d({})/d{}", field.label, field.axes[axis].name);
    let values = match (field.dim(), axis) {
        (1, _) => derivative_line(x, &field.values),
        (2, 0) => {
            let n0 = field.axes[0].grid.len();
            let n1 = field.axes[1].grid.len();
            let mut out = vec![0.0; n0 * n1];
            let mut col = vec![0.0; n0];
            for j in 0..n1 {
                for i in 0..n0 {
                    col[i] = field.values[i * n1 + j];
                }
                for (i, d) in derivative_line(x, &col).into_iter().enumerate() {
                    out[i * n1 + j] = d;
                }
            }
            out
        }
        _ => {
            let n1 = field.axes[1].grid.len();
            field
                .values
                .chunks(n1)
                .flat_map(|row| derivative_line(x, row))
                .collect()
        }
    };
    ScalarField::build(field.axes.clone(), values, label, field.masked)
}
