//! Run configuration and single-run simulation shared by the CLI, the sweep
//! driver and the Python bindings.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constant_force::{ConstantForceModel, ConstantForceParams, InitialData};
use crate::deformations::{DeformationSpec, Family, Variant};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Diagnostics, IntegrationConfig, StateRate, Trajectory};
use crate::oscillator::{classify_conservative, OscillatorModel, OscillatorParams};
use crate::phase_space::CanonicalState;
use crate::vector::norm;

/// Above this value of `|f(t_end)|·m·ω` the oscillator is flagged as stiff.
pub const STIFFNESS_WARNING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    ConstantForce,
    Oscillator,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::ConstantForce => "constant_force",
            ModelKind::Oscillator => "oscillator",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_force" | "constant-force" => Ok(ModelKind::ConstantForce),
            "oscillator" => Ok(ModelKind::Oscillator),
            _ => Err(Error::config(format!(
                "unknown model `{s}` (expected constant_force or oscillator)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config(format!(
                "unknown output format `{s}` (expected csv or json)"
            ))),
        }
    }
}

/// Union of both models' parameter objects: `{"m","F"}` or `{"m","omega"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub force: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            force: None,
            omega: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub deformation: DeformationSpec,
    pub params: ModelParams,
    #[serde(default)]
    pub initial: InitialData,
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::ConstantForce,
            deformation: DeformationSpec::undeformed(),
            params: ModelParams::default(),
            initial: InitialData::default(),
            integration: IntegrationConfig::new(0.0, 10.0, 1e-3).recording_every(10),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.integration.validate()?;
        if !self
            .initial
            .x0
            .iter()
            .chain(&self.initial.v0)
            .all(|v| v.is_finite())
        {
            return Err(Error::config("initial data must be finite"));
        }
        self.build_model().map(|_| ())
    }

    pub fn build_model(&self) -> Result<Model> {
        match self.model {
            ModelKind::ConstantForce => {
                let params =
                    ConstantForceParams::new(self.params.m, self.params.force.unwrap_or([0.0; 3]))?;
                Ok(Model::ConstantForce(ConstantForceModel::new(
                    params,
                    self.deformation,
                )?))
            }
            ModelKind::Oscillator => {
                let omega = self
                    .params
                    .omega
                    .ok_or_else(|| Error::config("oscillator model requires omega"))?;
                let params = OscillatorParams::new(self.params.m, omega)?;
                Ok(Model::Oscillator(OscillatorModel::new(
                    params,
                    self.deformation,
                )?))
            }
        }
    }
}

/// Either dynamical model behind one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    ConstantForce(ConstantForceModel),
    Oscillator(OscillatorModel),
}

impl Model {
    pub fn spec(&self) -> &DeformationSpec {
        match self {
            Model::ConstantForce(m) => &m.spec,
            Model::Oscillator(m) => &m.spec,
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Model::ConstantForce(m) => m.params.m,
            Model::Oscillator(m) => m.params.m,
        }
    }

    pub fn with_spec(&self, spec: DeformationSpec) -> Model {
        match *self {
            Model::ConstantForce(m) => Model::ConstantForce(ConstantForceModel { spec, ..m }),
            Model::Oscillator(m) => Model::Oscillator(OscillatorModel { spec, ..m }),
        }
    }

    pub fn rhs(&self, state: &CanonicalState) -> StateRate {
        match self {
            Model::ConstantForce(m) => m.eom_rhs(state),
            Model::Oscillator(m) => m.eom_rhs(state),
        }
    }

    pub fn energy(&self, state: &CanonicalState) -> f64 {
        match self {
            Model::ConstantForce(m) => m.hamiltonian(state),
            Model::Oscillator(m) => m.hamiltonian(state),
        }
    }

    pub fn diagnostics(&self, state: &CanonicalState) -> Diagnostics {
        match self {
            Model::ConstantForce(m) => m.diagnostics(state),
            Model::Oscillator(m) => m.diagnostics(state),
        }
    }

    /// Canonical state at `t0` with position `x0` and velocity `v0`.
    pub fn initial_state(&self, init: &InitialData, t0: f64) -> CanonicalState {
        match self {
            Model::ConstantForce(m) => m.initial_state_at(init, t0),
            Model::Oscillator(m) => m.initial_state_at(init, t0),
        }
    }

    /// Largest curl of the total force term over the given samples.
    pub fn max_curl(&self, samples: &[CanonicalState]) -> f64 {
        samples
            .iter()
            .map(|s| match self {
                Model::ConstantForce(m) => norm(&m.curl_g(s.t, &s.x, 1e-4 * (1.0 + norm(&s.x)))),
                Model::Oscillator(m) => norm(&m.curl_h_analytic(s.t)),
            })
            .fold(0.0, f64::max)
    }

    /// The constant-force model is curl-free for every deformation, the
    /// oscillator only when `f` is constant.
    pub fn conservative(&self) -> bool {
        match self {
            Model::ConstantForce(_) => true,
            Model::Oscillator(m) => classify_conservative(&m.spec),
        }
    }

    /// Integrates from the configured initial data and fills diagnostics.
    pub fn run(&self, init: &InitialData, cfg: &IntegrationConfig) -> Result<Trajectory> {
        let start = self.initial_state(init, cfg.t0);
        let mut traj = integrate(|s: &CanonicalState| self.rhs(s), &start, cfg)?;
        traj.annotate(|s| self.diagnostics(s));
        Ok(traj)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub model: ModelKind,
    pub deformation: DeformationSpec,
    pub final_state: CanonicalState,
    pub max_abs_f: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub energy_drift: f64,
    pub max_curl: f64,
    pub undeformed: bool,
    pub conservative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceleration_offset: Option<[f64; 3]>,
    /// True when `(G − F)/m` does not change in time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_acceleration: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

pub struct SimulationOutcome {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let trajectory = model.run(&cfg.initial, &cfg.integration)?;
    let summary = summarize(cfg, &model, &trajectory);
    Ok(SimulationOutcome {
        trajectory,
        summary,
    })
}

fn summarize(cfg: &RunConfig, model: &Model, traj: &Trajectory) -> RunSummary {
    let first = traj.first().copied().unwrap_or_default();
    let last = traj.last().copied().unwrap_or_default();
    let spec = model.spec();
    let initial_energy = model.energy(&first);
    let final_energy = model.energy(&last);
    let max_abs_f = traj.times().map(|t| spec.f(t).abs()).fold(0.0, f64::max);
    let (acceleration_offset, constant_acceleration) = match model {
        Model::ConstantForce(m) => {
            let end = m.acceleration_offset(last.t);
            // ḟ is constant only for the linear Galilean family (or f constant)
            let constant = spec.is_time_independent()
                || (spec.family() == Family::K2 && spec.variant() == Variant::GalileanLimit);
            (Some(end), Some(constant))
        }
        Model::Oscillator(_) => (None, None),
    };
    let mut warnings = Vec::new();
    if let Model::Oscillator(m) = model {
        let stiff = spec.f(cfg.integration.t_end).abs() * m.params.m * m.params.omega;
        if stiff > STIFFNESS_WARNING {
            warnings.push(format!(
                "|f(t_end)|·m·ω = {stiff:.3e} exceeds {STIFFNESS_WARNING:e}; fixed-step results may be inaccurate"
            ));
        }
    }
    let max_error_estimate = traj
        .diagnostics
        .iter()
        .filter_map(|d| d.error_estimate)
        .reduce(f64::max);
    RunSummary {
        model: cfg.model,
        deformation: *spec,
        final_state: last,
        max_abs_f,
        initial_energy,
        final_energy,
        energy_drift: final_energy - initial_energy,
        max_curl: model.max_curl(&traj.samples),
        undeformed: spec.is_undeformed(),
        conservative: model.conservative(),
        acceleration_offset,
        constant_acceleration,
        max_error_estimate,
        warnings,
    }
}
