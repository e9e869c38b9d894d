//! Classical mechanics on twist-deformed acceleration-enlarged Newton-Hooke
//! space-times.
//!
//! Two spatial coordinates fail to commute, `{x̄₁, x̄₂} = f(t)`, with `f`
//! drawn from six deformation families ([`deformations`]). The library
//! realises the deformed phase space on canonical variables
//! ([`phase_space`]), builds the resulting dynamics for a particle in a
//! constant force ([`constant_force`]) and for a harmonic oscillator
//! ([`oscillator`]), and integrates them with fixed-step RK4
//! ([`integrator`]). [`checks`] and [`sweep`] drive the verification suites
//! and parameter scans exposed by the `nhtwist` command-line tool.

pub mod checks;
pub mod constant_force;
pub mod deformations;
pub mod error;
pub mod integrator;
pub mod oscillator;
pub mod phase_space;
pub mod simulate;
pub mod sweep;
pub mod vector;

pub use constant_force::{ConstantForceModel, ConstantForceParams, InitialData};
pub use deformations::{DeformationSpec, Family, Variant};
pub use error::{Error, Result};
pub use integrator::{estimate_order, integrate, IntegrationConfig, Method, StateRate, Trajectory};
pub use oscillator::{classify_conservative, OscillatorModel, OscillatorParams};
pub use phase_space::{
    poisson_bracket, to_noncommutative, BracketReport, CanonicalState, NoncommutativeCoords,
};
pub use simulate::{simulate, Model, ModelKind, RunConfig};
