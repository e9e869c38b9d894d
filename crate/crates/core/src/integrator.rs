//! Fixed-step classical Runge–Kutta integration with trajectory recording.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::CanonicalState;

/// Time derivative of a [`CanonicalState`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateRate {
    pub x_dot: [f64; 3],
    pub p_dot: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    #[default]
    #[serde(rename = "rk4")]
    Rk4,
    /// RK4 at `step` and `step / 2`; records a Richardson error estimate.
    #[serde(rename = "rk4_halved")]
    Rk4Halved,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "rk4_halved" => Ok(Method::Rk4Halved),
            _ => Err(Error::config(format!(
                "unknown method `{s}` (expected rk4 or rk4_halved)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    pub step: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

fn default_record_every() -> usize {
    1
}

impl IntegrationConfig {
    pub fn new(t0: f64, t_end: f64, step: f64) -> Self {
        Self {
            t0,
            t_end,
            step,
            method: Method::Rk4,
            record_every: 1,
        }
    }

    pub fn recording_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_end.is_finite()) {
            return Err(Error::config("integration window must be finite"));
        }
        if !(self.t_end > self.t0) {
            return Err(Error::config(format!(
                "t_end ({}) must exceed t0 ({})",
                self.t_end, self.t0
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::config(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.step > self.t_end - self.t0 {
            return Err(Error::config(format!(
                "step {} is longer than the window {}",
                self.step,
                self.t_end - self.t0
            )));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps, the last of which may be shortened to land on `t_end`.
    pub fn step_count(&self) -> usize {
        let exact = (self.t_end - self.t0) / self.step;
        let n = exact.round();
        if (exact - n).abs() <= 1e-9 * exact.max(1.0) {
            n as usize
        } else {
            exact.ceil() as usize
        }
    }

    fn time_at(&self, k: usize, n: usize) -> f64 {
        if k == n {
            self.t_end
        } else {
            self.t0 + k as f64 * self.step
        }
    }
}

/// Per-sample quantities attached to a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<CanonicalState>,
    pub diagnostics: Vec<Diagnostics>,
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    t: f64,
    x: [f64; 3],
    p: [f64; 3],
    #[serde(flatten)]
    diagnostics: &'a Diagnostics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&CanonicalState> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&CanonicalState> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Fills energy, `f(t)` and effective mass for every sample, keeping any
    /// error estimate already present.
    pub fn annotate<D>(&mut self, diag: D)
    where
        D: Fn(&CanonicalState) -> Diagnostics,
    {
        for (sample, slot) in self.samples.iter().zip(self.diagnostics.iter_mut()) {
            let error_estimate = slot.error_estimate;
            *slot = Diagnostics {
                error_estimate,
                ..diag(sample)
            };
        }
    }

    /// CSV with columns `t,x1,x2,x3,p1,p2,p3,energy,f_t`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x1", "x2", "x3", "p1", "p2", "p3", "energy", "f_t"])?;
        for (s, d) in self.samples.iter().zip(&self.diagnostics) {
            let mut row: Vec<String> = Vec::with_capacity(9);
            row.push(fmt_f64(s.t));
            row.extend(s.x.iter().chain(&s.p).map(|v| fmt_f64(*v)));
            row.push(d.energy.map(fmt_f64).unwrap_or_default());
            row.push(d.f_t.map(fmt_f64).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON array of sample objects.
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        let records: Vec<SampleRecord<'_>> = self
            .samples
            .iter()
            .zip(&self.diagnostics)
            .map(|(s, d)| SampleRecord {
                t: s.t,
                x: s.x,
                p: s.p,
                diagnostics: d,
            })
            .collect();
        serde_json::to_writer_pretty(out, &records)?;
        Ok(())
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn axpy(state: &CanonicalState, dt: f64, rate: &StateRate) -> CanonicalState {
    CanonicalState {
        t: state.t,
        x: std::array::from_fn(|i| state.x[i] + dt * rate.x_dot[i]),
        p: std::array::from_fn(|i| state.p[i] + dt * rate.p_dot[i]),
    }
}

/// One classical RK4 step of length `dt`.
pub fn rk4_step<F>(rhs: &F, state: &CanonicalState, dt: f64) -> CanonicalState
where
    F: Fn(&CanonicalState) -> StateRate + ?Sized,
{
    let t = state.t;
    let half = 0.5 * dt;
    let k1 = rhs(state);
    let mut s2 = axpy(state, half, &k1);
    s2.t = t + half;
    let k2 = rhs(&s2);
    let mut s3 = axpy(state, half, &k2);
    s3.t = t + half;
    let k3 = rhs(&s3);
    let mut s4 = axpy(state, dt, &k3);
    s4.t = t + dt;
    let k4 = rhs(&s4);
    let w = dt / 6.0;
    CanonicalState {
        t: t + dt,
        x: std::array::from_fn(|i| {
            state.x[i] + w * (k1.x_dot[i] + 2.0 * k2.x_dot[i] + 2.0 * k3.x_dot[i] + k4.x_dot[i])
        }),
        p: std::array::from_fn(|i| {
            state.p[i] + w * (k1.p_dot[i] + 2.0 * k2.p_dot[i] + 2.0 * k3.p_dot[i] + k4.p_dot[i])
        }),
    }
}

fn state_distance(a: &CanonicalState, b: &CanonicalState) -> f64 {
    (0..6)
        .map(|i| (a.coord(i) - b.coord(i)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Integrates `rhs` from `cfg.t0` (the initial state's own time is replaced)
/// to exactly `cfg.t_end`.
///
/// Samples are recorded every `record_every` steps, and the final state is
/// always recorded.
pub fn integrate<F>(rhs: F, initial: &CanonicalState, cfg: &IntegrationConfig) -> Result<Trajectory>
where
    F: Fn(&CanonicalState) -> StateRate,
{
    cfg.validate()?;
    let mut state = CanonicalState {
        t: cfg.t0,
        ..*initial
    };
    if !state.is_finite() {
        return Err(Error::BlowUp { t: cfg.t0 });
    }
    let n = cfg.step_count();
    let capacity = n / cfg.record_every + 2;
    let mut traj = Trajectory {
        samples: Vec::with_capacity(capacity),
        diagnostics: Vec::with_capacity(capacity),
    };
    let halved = cfg.method == Method::Rk4Halved;
    let mut coarse = state;
    traj.samples.push(state);
    traj.diagnostics.push(Diagnostics {
        error_estimate: halved.then_some(0.0),
        ..Default::default()
    });

    for k in 1..=n {
        let t_prev = cfg.time_at(k - 1, n);
        let t_next = cfg.time_at(k, n);
        let dt = t_next - t_prev;
        state.t = t_prev;
        if halved {
            coarse.t = t_prev;
            coarse = rk4_step(&rhs, &coarse, dt);
            let mid = rk4_step(&rhs, &state, 0.5 * dt);
            let mut mid = mid;
            mid.t = t_prev + 0.5 * dt;
            state = rk4_step(&rhs, &mid, 0.5 * dt);
        } else {
            state = rk4_step(&rhs, &state, dt);
        }
        state.t = t_next;
        coarse.t = t_next;
        if !state.is_finite() || (halved && !coarse.is_finite()) {
            return Err(Error::BlowUp { t: t_next });
        }
        if k % cfg.record_every == 0 || k == n {
            traj.samples.push(state);
            traj.diagnostics.push(Diagnostics {
                error_estimate: halved.then(|| state_distance(&state, &coarse) / 15.0),
                ..Default::default()
            });
        }
    }
    Ok(traj)
}

/// Empirical convergence order of RK4 on `rhs` over `[initial.t, t_end]`.
///
/// Final states computed with steps `h`, `h/2`, `h/4` are compared with a
/// reference at `h/8` (`h` is a sixteenth of the window). Returns the mean
/// of the two `log₂` error ratios, or `None` when the errors sit at
/// roundoff level and no order can be read off.
pub fn estimate_order<F>(rhs: F, initial: &CanonicalState, t_end: f64) -> Result<Option<f64>>
where
    F: Fn(&CanonicalState) -> StateRate,
{
    let span = t_end - initial.t;
    estimate_order_with_step(rhs, initial, t_end, span / 16.0)
}

pub fn estimate_order_with_step<F>(
    rhs: F,
    initial: &CanonicalState,
    t_end: f64,
    base_step: f64,
) -> Result<Option<f64>>
where
    F: Fn(&CanonicalState) -> StateRate,
{
    let finals = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|div| {
            let cfg = IntegrationConfig {
                t0: initial.t,
                t_end,
                step: base_step / div,
                method: Method::Rk4,
                record_every: usize::MAX,
            };
            integrate(&rhs, initial, &cfg).map(|tr| *tr.last().expect("trajectory has samples"))
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = finals[3];
    let scale = (0..6)
        .map(|i| reference.coord(i).abs())
        .fold(1.0_f64, f64::max);
    let errors: Vec<f64> = finals[..3]
        .iter()
        .map(|s| state_distance(s, &reference))
        .collect();
    if errors.iter().any(|e| *e <= 1e-13 * scale) {
        return Ok(None);
    }
    let r1 = (errors[0] / errors[1]).log2();
    let r2 = (errors[1] / errors[2]).log2();
    Ok(Some(0.5 * (r1 + r2)))
}
