//! Isotropic harmonic oscillator on the deformed space.
//!
//! Substituting the representation map into
//! `H = p̄²/2m + mω² x̄²/2` gives, in canonical variables,
//!
//! ```text
//! H_f = (p₁² + p₂²)/2M_f + mω²(x₁² + x₂²)/2 − f mω² L₃/2 + p₃²/2m + mω² x₃²/2
//! M_f = m / (1 + m²ω² f²/4),    L₃ = x₁p₂ − x₂p₁
//! ```
//!
//! The sign of the `L₃` term is fixed by the substitution itself; with it the
//! canonical equations reproduce the second-order force `H⃗(x, ẋ, t)` used
//! below term by term. See the README for the derivation notes.

use serde::{Deserialize, Serialize};

use crate::constant_force::InitialData;
use crate::deformations::DeformationSpec;
use crate::error::{Error, Result};
use crate::integrator::{Diagnostics, StateRate};
use crate::phase_space::{to_noncommutative, CanonicalState, NoncommutativeCoords};
use crate::vector::{curl_fd, dot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        let p = Self { m, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::config(format!(
                "mass must be positive, got {}",
                self.m
            )));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::config(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Spring constant `mω²`.
    pub fn stiffness(&self) -> f64 {
        self.m * self.omega * self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMassSample {
    pub t: f64,
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "L3")]
    pub l3: f64,
}

pub fn angular_momentum(state: &CanonicalState) -> f64 {
    state.x[0] * state.p[1] - state.x[1] * state.p[0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorModel {
    pub params: OscillatorParams,
    pub spec: DeformationSpec,
}

impl OscillatorModel {
    pub fn new(params: OscillatorParams, spec: DeformationSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, spec })
    }

    /// `M_f(t) ∈ (0, m]`.
    pub fn effective_mass(&self, t: f64) -> f64 {
        let OscillatorParams { m, omega } = self.params;
        let mwf = m * omega * self.spec.f(t);
        m / (1.0 + 0.25 * mwf * mwf)
    }

    pub fn effective_mass_sample(&self, state: &CanonicalState) -> EffectiveMassSample {
        EffectiveMassSample {
            t: state.t,
            mass: self.effective_mass(state.t),
            l3: angular_momentum(state),
        }
    }

    /// `f mω² / 2`, the coefficient of `−L₃` in `H_f`.
    fn rotation_rate(&self, t: f64) -> f64 {
        0.5 * self.params.stiffness() * self.spec.f(t)
    }

    pub fn hamiltonian(&self, state: &CanonicalState) -> f64 {
        let OscillatorParams { m, .. } = self.params;
        let k = self.params.stiffness();
        let mf = self.effective_mass(state.t);
        let [x1, x2, x3] = state.x;
        let [p1, p2, p3] = state.p;
        (p1 * p1 + p2 * p2) / (2.0 * mf) + 0.5 * k * (x1 * x1 + x2 * x2)
            - self.rotation_rate(state.t) * angular_momentum(state)
            + p3 * p3 / (2.0 * m)
            + 0.5 * k * x3 * x3
    }

    /// Oscillator Hamiltonian written in the noncommutative variables.
    pub fn hamiltonian_noncommutative(&self, nc: &NoncommutativeCoords) -> f64 {
        dot(&nc.pbar, &nc.pbar) / (2.0 * self.params.m)
            + 0.5 * self.params.stiffness() * dot(&nc.xbar, &nc.xbar)
    }

    /// Explicit time dependence `∂H_f/∂t` at a frozen phase-space point.
    pub fn hamiltonian_time_partial(&self, state: &CanonicalState) -> f64 {
        let k = self.params.stiffness();
        let (f, f_dot) = (self.spec.f(state.t), self.spec.f_dot(state.t));
        let [p1, p2, _] = state.p;
        // d(1/M_f)/dt = mω² f ḟ / 2
        0.25 * (p1 * p1 + p2 * p2) * k * f * f_dot - 0.5 * k * f_dot * angular_momentum(state)
    }

    pub fn eom_rhs(&self, state: &CanonicalState) -> StateRate {
        let OscillatorParams { m, .. } = self.params;
        let k = self.params.stiffness();
        let mf = self.effective_mass(state.t);
        let b = self.rotation_rate(state.t);
        let [x1, x2, x3] = state.x;
        let [p1, p2, p3] = state.p;
        StateRate {
            x_dot: [p1 / mf + b * x2, p2 / mf - b * x1, p3 / m],
            p_dot: [-k * x1 + b * p2, -k * x2 - b * p1, -k * x3],
        }
    }

    pub fn velocity(&self, state: &CanonicalState) -> [f64; 3] {
        self.eom_rhs(state).x_dot
    }

    /// Canonical state at `t = 0` with position `x0` and velocity `v0`.
    pub fn initial_state(&self, init: &InitialData) -> CanonicalState {
        self.initial_state_at(init, 0.0)
    }

    pub fn initial_state_at(&self, init: &InitialData, t0: f64) -> CanonicalState {
        let mf = self.effective_mass(t0);
        let b = self.rotation_rate(t0);
        let [x1, x2, _] = init.x0;
        let [v1, v2, v3] = init.v0;
        CanonicalState {
            t: t0,
            x: init.x0,
            p: [mf * (v1 - b * x2), mf * (v2 + b * x1), self.params.m * v3],
        }
    }

    /// Second-order force `H⃗(x, ẋ, t) = m ẍ`.
    pub fn force_h(&self, x: &[f64; 3], xdot: &[f64; 3], t: f64) -> [f64; 3] {
        let OscillatorParams { m, omega } = self.params;
        let k = self.params.stiffness();
        let m2w2 = m * m * omega * omega;
        let (f, f_dot) = (self.spec.f(t), self.spec.f_dot(t));
        let mf = self.effective_mass(t);
        let bracket = 1.0 - 0.5 * k * mf * f * f;
        let h1 = 0.5 * m2w2 * f * (f_dot * mf * xdot[0] + 2.0 * xdot[1])
            + 0.5 * m2w2 * f_dot * bracket * x[1]
            - k * x[0];
        let h2 = 0.5 * m2w2 * f * (f_dot * mf * xdot[1] - 2.0 * xdot[0])
            - 0.5 * m2w2 * f_dot * bracket * x[0]
            - k * x[1];
        [h1, h2, -k * x[2]]
    }

    /// `∇ × H⃗` with respect to position at frozen `(ẋ, t)`.
    pub fn curl_h_analytic(&self, t: f64) -> [f64; 3] {
        let OscillatorParams { m, omega } = self.params;
        let k = self.params.stiffness();
        let f = self.spec.f(t);
        let z = m
            * m
            * omega
            * omega
            * self.spec.f_dot(t)
            * (0.5 * k * self.effective_mass(t) * f * f - 1.0);
        [0.0, 0.0, z]
    }

    /// Finite-difference curl of [`Self::force_h`] with absolute step `h`.
    pub fn curl_h_fd(&self, x: &[f64; 3], xdot: &[f64; 3], t: f64, h: f64) -> [f64; 3] {
        curl_fd(|y| self.force_h(y, xdot, t), x, h)
    }

    pub fn diagnostics(&self, state: &CanonicalState) -> Diagnostics {
        Diagnostics {
            energy: Some(self.hamiltonian(state)),
            f_t: Some(self.spec.f(state.t)),
            effective_mass: Some(self.effective_mass(state.t)),
            ..Default::default()
        }
    }
}

/// Whether the oscillator's force term is curl-free for every time.
///
/// The curl is proportional to `ḟ`, so this holds exactly when `f` is
/// constant: the canonical family in the Galilean limit, or `κ = 0`.
pub fn classify_conservative(spec: &DeformationSpec) -> bool {
    spec.is_time_independent()
}

pub fn hamiltonian_via_map(model: &OscillatorModel, state: &CanonicalState) -> f64 {
    model.hamiltonian_noncommutative(&to_noncommutative(state, &model.spec))
}
