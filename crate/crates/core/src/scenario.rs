//! Scenario files: one application's parameters, grids and requested outputs.
//!
//! ```toml
//! name = "fig2"
//! application = "lake-case1"
//!
//! [params]
//! alpha = 14095.0
//! beta = 12355.0
//! # ...
//!
//! [grids.z]
//! start = 0.0
//! end = 400.0
//! points = 401
//!
//! [[outputs]]
//! kind = "temperature-profile"
//! name = "profiles"
//! times = [10.0, 20.0, 40.0]
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blayer::BLayerParams;
use crate::error::{Error, Result};
use crate::grid::{geometric_stretch, linspace, Grid1D};
use crate::lake::{LakeCase, LakeParams};
use crate::plume::{PlumeCase, PlumeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Application {
    LakeCase1,
    LakeCase2,
    Blayer,
    PlumeSmallLambda,
    PlumeLargeLambda,
}

impl Application {
    pub fn tag(self) -> &'static str {
        match self {
            Application::LakeCase1 => "lake-case1",
            Application::LakeCase2 => "lake-case2",
            Application::Blayer => "blayer",
            Application::PlumeSmallLambda => "plume-small-lambda",
            Application::PlumeLargeLambda => "plume-large-lambda",
        }
    }

    pub fn lake_case(self) -> Option<LakeCase> {
        match self {
            Application::LakeCase1 => Some(LakeCase::Case1),
            Application::LakeCase2 => Some(LakeCase::Case2),
            _ => None,
        }
    }

    pub fn plume_case(self) -> Option<PlumeCase> {
        match self {
            Application::PlumeSmallLambda => Some(PlumeCase::SmallLambda),
            Application::PlumeLargeLambda => Some(PlumeCase::LargeLambda),
            _ => None,
        }
    }

    fn required_grids(self) -> &'static [&'static str] {
        match self {
            Application::LakeCase1 | Application::LakeCase2 => &["z", "t"],
            Application::Blayer => &["x", "y", "t"],
            Application::PlumeSmallLambda => &["x"],
            Application::PlumeLargeLambda => &["x", "y"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AppParams {
    Lake(LakeParams),
    Blayer(BLayerParams),
    Plume(PlumeParams),
}

/// A requested CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OutputRequest {
    /// lake: `T(z)` on the `z` grid at each time
    TemperatureProfile { name: String, times: Vec<f64> },
    /// lake: `T(t)` on the `t` grid at each depth
    TemperatureHistory { name: String, depths: Vec<f64> },
    /// lake: `T(z)` at one time for several `alpha`
    AlphaSweep {
        name: String,
        time: f64,
        alphas: Vec<f64>,
    },
    /// lake: `F(eta)`; blayer: `F`, `F'`, `Theta` on the profile grid
    Profile { name: String },
    /// blayer: `u`, `v`, `T` on the `y` grid at one `(x, t)`
    FieldSlice { name: String, x: f64, t: f64 },
    /// blayer: `F''(0)` and `Theta'(0)`
    Wall { name: String },
    /// plume: `C(x)` on the `x` grid
    ConcentrationLine { name: String },
    /// plume: `C(x, y)` on the `x` and `y` grids
    ConcentrationField { name: String },
    /// plume: `(n, N, p, m)` for the first modes
    EigenTable { name: String, branches: usize },
}

impl OutputRequest {
    pub fn name(&self) -> &str {
        match self {
            OutputRequest::TemperatureProfile { name, .. }
            | OutputRequest::TemperatureHistory { name, .. }
            | OutputRequest::AlphaSweep { name, .. }
            | OutputRequest::Profile { name }
            | OutputRequest::FieldSlice { name, .. }
            | OutputRequest::Wall { name }
            | OutputRequest::ConcentrationLine { name }
            | OutputRequest::ConcentrationField { name }
            | OutputRequest::EigenTable { name, .. } => name,
        }
    }

    fn allowed(&self, app: Application) -> bool {
        use Application::*;
        match self {
            OutputRequest::TemperatureProfile { .. }
            | OutputRequest::TemperatureHistory { .. }
            | OutputRequest::AlphaSweep { .. } => matches!(app, LakeCase1 | LakeCase2),
            OutputRequest::Profile { .. } => matches!(app, LakeCase1 | LakeCase2 | Blayer),
            OutputRequest::FieldSlice { .. } | OutputRequest::Wall { .. } => app == Blayer,
            OutputRequest::ConcentrationLine { .. } => app == PlumeSmallLambda,
            OutputRequest::ConcentrationField { .. } => app == PlumeLargeLambda,
            OutputRequest::EigenTable { .. } => matches!(app, PlumeSmallLambda | PlumeLargeLambda),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub application: Application,
    pub params: AppParams,
    pub grids: BTreeMap<String, Grid1D>,
    pub outputs: Vec<OutputRequest>,
    /// finite-difference steps of the residual checks, per axis
    pub fd_steps: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    name: String,
    #[serde(default)]
    description: String,
    application: Application,
    params: toml::Table,
    #[serde(default)]
    grids: BTreeMap<String, GridSpec>,
    #[serde(default)]
    outputs: Vec<OutputRequest>,
    #[serde(default)]
    fd_steps: BTreeMap<String, f64>,
}

/// Grid description: `start`/`end`/`points` (optionally with a geometric
/// `stretch` toward `start`) or an explicit `values` list.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    start: Option<f64>,
    end: Option<f64>,
    points: Option<usize>,
    stretch: Option<f64>,
    values: Option<Vec<f64>>,
}

impl GridSpec {
    fn build(&self, name: &str) -> Result<Grid1D> {
        let wrap = |e: Error| Error::Scenario(format!("grid `{name}`: {e}"));
        match (self.values.as_ref(), self.start, self.end, self.points) {
            (Some(v), None, None, None) if self.stretch.is_none() => {
                Grid1D::new(v.clone()).map_err(wrap)
            }
            (None, Some(a), Some(b), Some(n)) => match self.stretch {
                Some(k) => geometric_stretch(a, b, n, k).map_err(wrap),
                None => linspace(a, b, n).map_err(wrap),
            },
            _ => Err(Error::Scenario(format!(
                "grid `{name}` needs either `values` or `start`, `end` and `points`"
            ))),
        }
    }
}

fn param_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    // serde names the offending key in backticks
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "params".to_string());
    Error::InvalidParameter { key, reason: msg }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string().trim().to_string()))?;
        let app = raw.application;
        let mut table = raw.params;
        if let Some(case) = table.remove("case") {
            check_case(app, &case)?;
        }
        let value = toml::Value::Table(table);
        let params = match app {
            Application::LakeCase1 | Application::LakeCase2 => {
                let p: LakeParams = value.try_into().map_err(param_error)?;
                p.validate(app.lake_case().expect("lake application"))?;
                AppParams::Lake(p)
            }
            Application::Blayer => {
                let p: BLayerParams = value.try_into().map_err(param_error)?;
                p.validate()?;
                AppParams::Blayer(p)
            }
            Application::PlumeSmallLambda | Application::PlumeLargeLambda => {
                let p: PlumeParams = value.try_into().map_err(param_error)?;
                p.validate()?;
                AppParams::Plume(p)
            }
        };
        let grids = raw
            .grids
            .iter()
            .map(|(k, spec)| Ok((k.clone(), spec.build(k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let scenario = Scenario {
            name: raw.name,
            description: raw.description,
            application: app,
            params,
            grids,
            outputs: raw.outputs,
            fd_steps: raw.fd_steps,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        let app = self.application;
        match (&self.params, app) {
            (AppParams::Lake(p), Application::LakeCase1 | Application::LakeCase2) => {
                p.validate(app.lake_case().expect("lake application"))?
            }
            (AppParams::Blayer(p), Application::Blayer) => p.validate()?,
            (
                AppParams::Plume(p),
                Application::PlumeSmallLambda | Application::PlumeLargeLambda,
            ) => p.validate()?,
            _ => {
                return Err(Error::Scenario(format!(
                    "parameters do not match application `{}`",
                    app.tag()
                )))
            }
        }
        for g in app.required_grids() {
            if !self.grids.contains_key(*g) {
                return Err(Error::Scenario(format!(
                    "application `{}` needs a `{g}` grid",
                    app.tag()
                )));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for out in &self.outputs {
            if !out.allowed(app) {
                return Err(Error::Scenario(format!(
                    "output `{}` is not defined for application `{}`",
                    out.name(),
                    app.tag()
                )));
            }
            if out.name().is_empty()
                || !out
                    .name()
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(Error::Scenario(format!(
                    "output name `{}` must be non-empty and use only letters, digits, `-` or `_`",
                    out.name()
                )));
            }
            if !names.insert(out.name()) {
                return Err(Error::Scenario(format!(
                    "duplicate output name `{}`",
                    out.name()
                )));
            }
        }
        for (axis, step) in &self.fd_steps {
            if !(*step > 0.0) || !step.is_finite() {
                return Err(Error::Scenario(format!(
                    "fd step for `{axis}` must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self, name: &str) -> Result<&Grid1D> {
        self.grids
            .get(name)
            .ok_or_else(|| Error::Scenario(format!("missing `{name}` grid")))
    }

    /// Finite-difference step for `axis`, defaulting to `1e-3`.
    pub fn fd_step(&self, axis: &str) -> f64 {
        self.fd_steps.get(axis).copied().unwrap_or(1e-3)
    }

    pub fn lake_params(&self) -> Option<&LakeParams> {
        match &self.params {
            AppParams::Lake(p) => Some(p),
            _ => None,
        }
    }

    pub fn blayer_params(&self) -> Option<&BLayerParams> {
        match &self.params {
            AppParams::Blayer(p) => Some(p),
            _ => None,
        }
    }

    pub fn plume_params(&self) -> Option<&PlumeParams> {
        match &self.params {
            AppParams::Plume(p) => Some(p),
            _ => None,
        }
    }

    /// Serializes back to the scenario file format.
    pub fn to_toml_string(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a> {
            name: &'a str,
            description: &'a str,
            application: Application,
            params: &'a AppParams,
            grids: BTreeMap<&'a str, BTreeMap<&'static str, &'a [f64]>>,
            outputs: &'a [OutputRequest],
            fd_steps: &'a BTreeMap<String, f64>,
        }
        let grids = self
            .grids
            .iter()
            .map(|(k, g)| (k.as_str(), BTreeMap::from([("values", g.points())])))
            .collect();
        toml::to_string(&Out {
            name: &self.name,
            description: &self.description,
            application: self.application,
            params: &self.params,
            grids,
            outputs: &self.outputs,
            fd_steps: &self.fd_steps,
        })
        .map_err(|e| Error::Scenario(e.to_string()))
    }
}

fn check_case(app: Application, case: &toml::Value) -> Result<()> {
    let given = case
        .as_integer()
        .map(|v| v.to_string())
        .or_else(|| case.as_str().map(str::to_string))
        .unwrap_or_default();
    let expected = match app {
        Application::LakeCase1 | Application::PlumeSmallLambda => "1",
        Application::LakeCase2 | Application::PlumeLargeLambda => "2",
        Application::Blayer => {
            return Err(Error::param("case", "not a boundary-layer parameter"));
        }
    };
    if given != expected {
        return Err(Error::param(
            "case",
            format!("application `{}` implies case {expected}", app.tag()),
        ));
    }
    Ok(())
}

/// 1-based line of the first `key = ...` assignment in `text`, for diagnostics.
pub fn locate_key(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|line| {
            let l = line.trim_start();
            l.strip_prefix(key)
                .map(|rest| rest.trim_start().starts_with('='))
                .unwrap_or(false)
        })
        .map(|i| i + 1)
}
