//! Verification suites run over every deformation configuration.
//!
//! Each suite evaluates one structural claim at seeded random points and
//! reports the worst residual per configuration.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constant_force::{ConstantForceModel, ConstantForceParams, InitialData};
use crate::deformations::{DeformationSpec, Variant};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrationConfig};
use crate::oscillator::{classify_conservative, OscillatorModel, OscillatorParams};
use crate::phase_space::{verify_deformed_brackets, verify_jacobi, CanonicalState};
use crate::simulate::ModelKind;
use crate::vector::{norm, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Brackets,
    Jacobi,
    Curl,
    Limits,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Brackets,
        Suite::Jacobi,
        Suite::Curl,
        Suite::Limits,
        Suite::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Brackets => "brackets",
            Suite::Jacobi => "jacobi",
            Suite::Curl => "curl",
            Suite::Limits => "limits",
            Suite::Oracle => "oracle",
        }
    }

    /// Default tolerance on the per-configuration residual.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Brackets | Suite::Jacobi => 1e-6,
            Suite::Curl => 1e-9,
            Suite::Limits => 1e-4,
            Suite::Oracle => 1e-6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown suite `{s}` (expected brackets, jacobi, curl, limits or oracle)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub suite: Suite,
    /// Only used by the curl suite.
    pub model: ModelKind,
    /// `None` runs all 18 configurations (12 for limits).
    pub only: Option<DeformationSpec>,
    pub kappa: f64,
    pub tau: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl CheckOptions {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            model: ModelKind::ConstantForce,
            only: None,
            kappa: 0.5,
            tau: if suite == Suite::Limits { 1e6 } else { 2.0 },
            samples: match suite {
                Suite::Brackets => 50,
                Suite::Jacobi => 20,
                Suite::Curl => 100,
                Suite::Limits => 301,
                Suite::Oracle => 1,
            },
            tolerance: suite.default_tolerance(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub spec: DeformationSpec,
    pub max_residual: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: Suite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    pub tolerance: f64,
    pub configurations: Vec<ConfigResult>,
    pub passed: bool,
}

fn random_state(rng: &mut StdRng, t: f64) -> CanonicalState {
    CanonicalState {
        t,
        x: std::array::from_fn(|_| rng.random_range(-2.0..2.0)),
        p: std::array::from_fn(|_| rng.random_range(-2.0..2.0)),
    }
}

fn random_vec(rng: &mut StdRng, lo: f64, hi: f64) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(lo..hi))
}

fn nan_max(acc: f64, v: f64) -> f64 {
    if acc.is_nan() || v.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

fn configurations(opts: &CheckOptions) -> Result<Vec<DeformationSpec>> {
    let mut specs = match opts.only {
        Some(spec) => vec![spec],
        None => DeformationSpec::all_configurations(opts.kappa, opts.tau)?,
    };
    if opts.suite == Suite::Limits {
        specs.retain(|s| s.variant() != Variant::GalileanLimit);
        if specs.is_empty() {
            return Err(Error::config(
                "limits suite needs a Newton-Hooke (nh+ or nh-) configuration",
            ));
        }
    }
    Ok(specs)
}

pub fn run_check(opts: &CheckOptions) -> Result<CheckReport> {
    if !(opts.tolerance > 0.0) || opts.samples == 0 {
        return Err(Error::config("tolerance and sample count must be positive"));
    }
    let specs = configurations(opts)?;
    let configurations = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut rng = StdRng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            check_one(opts, spec, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = configurations.iter().all(|c| c.passed);
    Ok(CheckReport {
        suite: opts.suite,
        model: (opts.suite == Suite::Curl).then_some(opts.model),
        tolerance: opts.tolerance,
        configurations,
        passed,
    })
}

fn check_one(
    opts: &CheckOptions,
    spec: &DeformationSpec,
    rng: &mut StdRng,
) -> Result<ConfigResult> {
    let tol = opts.tolerance;
    let mut note = None;
    let max_residual = match opts.suite {
        Suite::Brackets => (0..opts.samples)
            .map(|_| {
                let t = rng.random_range(0.0..3.0);
                verify_deformed_brackets(spec, &random_state(rng, t), tol).max_residual
            })
            .fold(0.0, nan_max),
        Suite::Jacobi => (0..opts.samples)
            .map(|_| {
                let t = rng.random_range(0.0..3.0);
                verify_jacobi(spec, &random_state(rng, t), tol).max_residual
            })
            .fold(0.0, nan_max),
        Suite::Curl => match opts.model {
            ModelKind::ConstantForce => {
                let params = ConstantForceParams::new(
                    rng.random_range(0.5..2.0),
                    random_vec(rng, -1.0, 1.0),
                )?;
                let model = ConstantForceModel::new(params, *spec)?;
                (0..opts.samples)
                    .map(|_| {
                        let t = rng.random_range(0.0..3.0);
                        let x = random_vec(rng, -5.0, 5.0);
                        norm(&model.curl_g(t, &x, 1e-4))
                    })
                    .fold(0.0, nan_max)
            }
            ModelKind::Oscillator => {
                let params =
                    OscillatorParams::new(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0))?;
                let model = OscillatorModel::new(params, *spec)?;
                let structural = classify_conservative(spec);
                note = Some(format!("classified conservative: {structural}"));
                (0..opts.samples)
                    .map(|_| {
                        let t = rng.random_range(0.0..2.0);
                        let x = random_vec(rng, -2.0, 2.0);
                        let v = random_vec(rng, -2.0, 2.0);
                        norm(&model.curl_h_fd(&x, &v, t, 1e-3))
                    })
                    .fold(0.0, nan_max)
            }
        },
        Suite::Limits => {
            let limit = spec.galilean_limit()?;
            let n = opts.samples.max(2);
            (0..n)
                .map(|i| {
                    let t = 3.0 * i as f64 / (n - 1) as f64;
                    let reference = limit.f(t);
                    (spec.f(t) - reference).abs() / (1.0 + reference.abs())
                })
                .fold(0.0, nan_max)
        }
        Suite::Oracle => (0..opts.samples)
            .map(|_| -> Result<f64> {
                let params = ConstantForceParams::new(
                    rng.random_range(0.5..2.0),
                    random_vec(rng, -1.0, 1.0),
                )?;
                let init = InitialData {
                    x0: random_vec(rng, -1.0, 1.0),
                    v0: random_vec(rng, -1.0, 1.0),
                };
                let model = ConstantForceModel::new(params, *spec)?;
                oracle_deviation(&model, &init, 10.0, 1e-3)
            })
            .try_fold(0.0, |acc, r| r.map(|v| nan_max(acc, v)))?,
    };
    Ok(ConfigResult {
        spec: *spec,
        max_residual,
        passed: max_residual <= tol,
        note,
    })
}

/// Largest `‖x_rk4 − x_exact‖ / (1 + ‖x_exact‖)` over a constant-force run
/// on `[0, t_end]`.
pub fn oracle_deviation(
    model: &ConstantForceModel,
    init: &InitialData,
    t_end: f64,
    step: f64,
) -> Result<f64> {
    let cfg = IntegrationConfig::new(0.0, t_end, step).recording_every(10);
    let traj = integrate(
        |s: &CanonicalState| model.eom_rhs(s),
        &model.initial_state(init),
        &cfg,
    )?;
    Ok(traj
        .samples
        .iter()
        .map(|s| {
            let exact = model.analytic_solution(s.t, init);
            norm(&sub(&s.x, &exact)) / (1.0 + norm(&exact))
        })
        .fold(0.0, nan_max))
}
