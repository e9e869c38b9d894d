//! Particle in a constant external force on the deformed space.
//!
//! In canonical variables the Hamiltonian is
//!
//! ```text
//! H = p²/2m − F·x + f(t) (F₁ p₂ − F₂ p₁) / 2
//! ```
//!
//! and Newton's equation reads `m ẍ = G(t)` with
//! `G = (F₁ − m ḟ F₂/2, F₂ + m ḟ F₁/2, F₃)`. `G` does not depend on position,
//! so it is curl-free for every deformation and derives from
//! `V = −F·x − (m ḟ/2)(F₁ x₂ − F₂ x₁)`.

use serde::{Deserialize, Serialize};

use crate::deformations::DeformationSpec;
use crate::error::{Error, Result};
use crate::integrator::{Diagnostics, StateRate};
use crate::phase_space::{to_noncommutative, CanonicalState, NoncommutativeCoords};
use crate::vector::{curl_fd, dot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantForceParams {
    pub m: f64,
    #[serde(rename = "F")]
    pub force: [f64; 3],
}

impl ConstantForceParams {
    pub fn new(m: f64, force: [f64; 3]) -> Result<Self> {
        let p = Self { m, force };
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
        if !self.force.iter().all(|f| f.is_finite()) {
            return Err(Error::config("force components must be finite"));
        }
        Ok(())
    }
}

/// Initial position and velocity `ẋ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InitialData {
    pub x0: [f64; 3],
    pub v0: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantForceModel {
    pub params: ConstantForceParams,
    pub spec: DeformationSpec,
}

impl ConstantForceModel {
    pub fn new(params: ConstantForceParams, spec: DeformationSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, spec })
    }

    /// Hamiltonian in canonical variables.
    pub fn hamiltonian(&self, state: &CanonicalState) -> f64 {
        let ConstantForceParams {
            m,
            force: [f1, f2, _],
        } = self.params;
        let [p1, p2, _] = state.p;
        let half_f = 0.5 * self.spec.f(state.t);
        dot(&state.p, &state.p) / (2.0 * m) - dot(&self.params.force, &state.x)
            + half_f * (f1 * p2 - f2 * p1)
    }

    /// Hamiltonian written in the noncommutative variables.
    pub fn hamiltonian_noncommutative(&self, nc: &NoncommutativeCoords) -> f64 {
        dot(&nc.pbar, &nc.pbar) / (2.0 * self.params.m) - dot(&self.params.force, &nc.xbar)
    }

    pub fn eom_rhs(&self, state: &CanonicalState) -> StateRate {
        let ConstantForceParams { m, force } = self.params;
        let half_f = 0.5 * self.spec.f(state.t);
        let [p1, p2, p3] = state.p;
        StateRate {
            x_dot: [
                p1 / m - half_f * force[1],
                p2 / m + half_f * force[0],
                p3 / m,
            ],
            p_dot: force,
        }
    }

    /// Velocity `ẋ` at a phase-space point.
    pub fn velocity(&self, state: &CanonicalState) -> [f64; 3] {
        self.eom_rhs(state).x_dot
    }

    /// `G(t)`, the total force in `m ẍ = G`.
    pub fn force_g(&self, t: f64) -> [f64; 3] {
        let ConstantForceParams {
            m,
            force: [f1, f2, f3],
        } = self.params;
        let c = 0.5 * m * self.spec.f_dot(t);
        [f1 - c * f2, f2 + c * f1, f3]
    }

    /// Canonical state at `t = 0` whose velocity is `init.v0`.
    pub fn initial_state(&self, init: &InitialData) -> CanonicalState {
        self.initial_state_at(init, 0.0)
    }

    pub fn initial_state_at(&self, init: &InitialData, t0: f64) -> CanonicalState {
        let m = self.params.m;
        let [f1, f2, _] = self.params.force;
        let half_f = 0.5 * self.spec.f(t0);
        let [v1, v2, v3] = init.v0;
        CanonicalState {
            t: t0,
            x: init.x0,
            p: [m * (v1 + half_f * f2), m * (v2 - half_f * f1), m * v3],
        }
    }

    /// Closed-form position for `x(0) = x0`, `ẋ(0) = v0`.
    ///
    /// The deformation enters through `∫₀ᵗ f − f(0) t`; the `f(0) t` term
    /// vanishes for every family except K1.
    pub fn analytic_solution(&self, t: f64, init: &InitialData) -> [f64; 3] {
        let ConstantForceParams { m, force } = self.params;
        let drift = self.spec.f_integral(t) - self.spec.f(0.0) * t;
        let free: [f64; 3] =
            std::array::from_fn(|i| force[i] * t * t / (2.0 * m) + init.v0[i] * t + init.x0[i]);
        [
            free[0] - 0.5 * force[1] * drift,
            free[1] + 0.5 * force[0] * drift,
            free[2],
        ]
    }

    /// `∇ × G` by central differences in position with absolute step `h`.
    pub fn curl_g(&self, t: f64, at: &[f64; 3], h: f64) -> [f64; 3] {
        curl_fd(|_x| self.force_g(t), at, h)
    }

    /// Potential with `−∇V = G`.
    pub fn potential(&self, x: &[f64; 3], t: f64) -> f64 {
        let ConstantForceParams { m, force } = self.params;
        -dot(&force, x) - 0.5 * m * self.spec.f_dot(t) * (force[0] * x[1] - force[1] * x[0])
    }

    /// `(G − F)/m`, the acceleration added by the deformation.
    pub fn acceleration_offset(&self, t: f64) -> [f64; 3] {
        let g = self.force_g(t);
        std::array::from_fn(|i| (g[i] - self.params.force[i]) / self.params.m)
    }

    pub fn diagnostics(&self, state: &CanonicalState) -> Diagnostics {
        Diagnostics {
            energy: Some(self.hamiltonian(state)),
            f_t: Some(self.spec.f(state.t)),
            ..Default::default()
        }
    }
}

/// Energy function of the force-field Hamiltonian evaluated on the deformed
/// coordinates of `state`.
pub fn hamiltonian_via_map(model: &ConstantForceModel, state: &CanonicalState) -> f64 {
    model.hamiltonian_noncommutative(&to_noncommutative(state, &model.spec))
}
