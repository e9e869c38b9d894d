//! Canonical phase space, the map onto noncommutative coordinates, and
//! finite-difference Poisson brackets.
//!
//! The noncommutative variables are realised on ordinary canonical
//! coordinates by
//!
//! ```text
//! x̄₁ = x₁ − f(t) p₂ / 2,   x̄₂ = x₂ + f(t) p₁ / 2,   x̄₃ = x₃,   p̄ᵢ = pᵢ
//! ```
//!
//! which yields `{x̄₁, x̄₂} = f(t)` with every other bracket classical.
//! Brackets are equal-time: `t` is a parameter, never differentiated.

use serde::{Deserialize, Serialize};

use crate::deformations::DeformationSpec;
use crate::error::{Error, Result};

/// Relative finite-difference step: coordinate `q` is perturbed by
/// `DEFAULT_STEP · (1 + |q|)`.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Step for brackets of brackets. The nested stencil divides roundoff by the
/// step twice, so it has to be coarser than [`DEFAULT_STEP`].
pub const JACOBI_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CanonicalState {
    pub t: f64,
    pub x: [f64; 3],
    pub p: [f64; 3],
}

impl CanonicalState {
    pub fn new(t: f64, x: [f64; 3], p: [f64; 3]) -> Self {
        Self { t, x, p }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(&self.p).all(|v| v.is_finite())
    }

    /// Phase-space coordinate by flat index: `0..3` are positions, `3..6` momenta.
    pub fn coord(&self, i: usize) -> f64 {
        if i < 3 {
            self.x[i]
        } else {
            self.p[i - 3]
        }
    }

    fn coord_mut(&mut self, i: usize) -> &mut f64 {
        if i < 3 {
            &mut self.x[i]
        } else {
            &mut self.p[i - 3]
        }
    }

    pub fn with_coord(mut self, i: usize, value: f64) -> Self {
        *self.coord_mut(i) = value;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoncommutativeCoords {
    pub xbar: [f64; 3],
    pub pbar: [f64; 3],
}

pub fn to_noncommutative(state: &CanonicalState, spec: &DeformationSpec) -> NoncommutativeCoords {
    let half_f = 0.5 * spec.f(state.t);
    let [x1, x2, x3] = state.x;
    let [p1, p2, _] = state.p;
    NoncommutativeCoords {
        xbar: [x1 - half_f * p2, x2 + half_f * p1, x3],
        pbar: state.p,
    }
}

/// Inverse of [`to_noncommutative`] at time `t`.
pub fn from_noncommutative(
    coords: &NoncommutativeCoords,
    t: f64,
    spec: &DeformationSpec,
) -> CanonicalState {
    let half_f = 0.5 * spec.f(t);
    let [xb1, xb2, xb3] = coords.xbar;
    let [p1, p2, _] = coords.pbar;
    CanonicalState {
        t,
        x: [xb1 + half_f * p2, xb2 - half_f * p1, xb3],
        p: coords.pbar,
    }
}

/// One of the six noncommutative phase-space coordinates, viewed as a
/// function on canonical phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcCoord {
    X(usize),
    P(usize),
}

impl NcCoord {
    pub const ALL: [NcCoord; 6] = [
        NcCoord::X(0),
        NcCoord::X(1),
        NcCoord::X(2),
        NcCoord::P(0),
        NcCoord::P(1),
        NcCoord::P(2),
    ];

    pub fn name(self) -> String {
        match self {
            NcCoord::X(i) => format!("xbar{}", i + 1),
            NcCoord::P(i) => format!("pbar{}", i + 1),
        }
    }

    pub fn eval(self, state: &CanonicalState, spec: &DeformationSpec) -> f64 {
        let nc = to_noncommutative(state, spec);
        match self {
            NcCoord::X(i) => nc.xbar[i],
            NcCoord::P(i) => nc.pbar[i],
        }
    }

    /// Value of `{self, other}` implied by the deformed algebra.
    pub fn expected_bracket(self, other: NcCoord, f_t: f64) -> f64 {
        match (self, other) {
            (NcCoord::X(0), NcCoord::X(1)) => f_t,
            (NcCoord::X(1), NcCoord::X(0)) => -f_t,
            (NcCoord::X(i), NcCoord::P(j)) if i == j => 1.0,
            (NcCoord::P(i), NcCoord::X(j)) if i == j => -1.0,
            _ => 0.0,
        }
    }
}

/// Central-difference gradient `(∂A/∂x, ∂A/∂p)`.
fn gradient<A>(a: &A, at: &CanonicalState, h: f64) -> [f64; 6]
where
    A: Fn(&CanonicalState) -> f64 + ?Sized,
{
    std::array::from_fn(|i| {
        let q = at.coord(i);
        let step = h * (1.0 + q.abs());
        let plus = a(&at.with_coord(i, q + step));
        let minus = a(&at.with_coord(i, q - step));
        (plus - minus) / (2.0 * step)
    })
}

/// Bracket without finiteness checks; non-finite input propagates as NaN.
fn bracket_unchecked<A, B>(a: &A, b: &B, at: &CanonicalState, h: f64) -> f64
where
    A: Fn(&CanonicalState) -> f64 + ?Sized,
    B: Fn(&CanonicalState) -> f64 + ?Sized,
{
    let ga = gradient(a, at, h);
    let gb = gradient(b, at, h);
    (0..3).map(|i| ga[i] * gb[i + 3] - ga[i + 3] * gb[i]).sum()
}

/// `{A, B} = Σᵢ ∂A/∂xᵢ ∂B/∂pᵢ − ∂A/∂pᵢ ∂B/∂xᵢ` by central differences.
///
/// `h` is the relative step (see [`DEFAULT_STEP`]).
pub fn poisson_bracket<A, B>(a: A, b: B, at: &CanonicalState, h: f64) -> Result<f64>
where
    A: Fn(&CanonicalState) -> f64,
    B: Fn(&CanonicalState) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::config(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let value = bracket_unchecked(&a, &b, at, h);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObservable { t: at.t })
    }
}

/// Phase-space gradient of an observable, `(∂A/∂x, ∂A/∂p)`.
pub fn phase_space_gradient<A>(a: A, at: &CanonicalState, h: f64) -> ([f64; 3], [f64; 3])
where
    A: Fn(&CanonicalState) -> f64,
{
    let g = gradient(&a, at, h);
    ([g[0], g[1], g[2]], [g[3], g[4], g[5]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketCheck {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub checks: Vec<BracketCheck>,
    pub max_residual: f64,
    pub passed: bool,
}

impl BracketReport {
    fn from_checks(checks: Vec<BracketCheck>, tol: f64) -> Self {
        // NaN residuals must fail the report.
        let max_residual = checks.iter().map(|c| c.residual).fold(0.0_f64, |acc, r| {
            if r.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(r)
            }
        });
        Self {
            passed: max_residual <= tol,
            checks,
            max_residual,
        }
    }
}

/// Checks the 15 independent brackets among `(x̄, p̄)` against the deformed
/// algebra at one state.
///
/// Residuals are `|computed − expected| / (1 + |expected|)`. Difference
/// noise in `x̄` is amplified by `∂x̄/∂p = ±f/2`, so the absolute error of
/// `{x̄₁, x̄₂}` grows like `ε f² / h`; scaling by the expected value keeps the
/// check meaningful when `f` is large.
pub fn verify_deformed_brackets(
    spec: &DeformationSpec,
    at: &CanonicalState,
    tol: f64,
) -> BracketReport {
    let f_t = spec.f(at.t);
    let mut checks = Vec::with_capacity(15);
    for (i, a) in NcCoord::ALL.iter().enumerate() {
        for b in &NcCoord::ALL[i + 1..] {
            let value = bracket_unchecked(
                &|s: &CanonicalState| a.eval(s, spec),
                &|s: &CanonicalState| b.eval(s, spec),
                at,
                DEFAULT_STEP,
            );
            checks.push(BracketCheck {
                name: format!("{{{},{}}}", a.name(), b.name()),
                residual: {
                    let expected = a.expected_bracket(*b, f_t);
                    (value - expected).abs() / (1.0 + expected.abs())
                },
            });
        }
    }
    BracketReport::from_checks(checks, tol)
}

/// Jacobi identity over all 20 triples of distinct noncommutative
/// coordinates, with nested finite-difference brackets.
pub fn verify_jacobi(spec: &DeformationSpec, at: &CanonicalState, tol: f64) -> BracketReport {
    let h = JACOBI_STEP;
    let coords = NcCoord::ALL;
    let obs = |c: NcCoord| move |s: &CanonicalState| c.eval(s, spec);
    let nested = |a: NcCoord, b: NcCoord, c: NcCoord| {
        let inner = |s: &CanonicalState| bracket_unchecked(&obs(b), &obs(c), s, h);
        bracket_unchecked(&obs(a), &inner, at, h)
    };
    let mut checks = Vec::with_capacity(20);
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                let (a, b, c) = (coords[i], coords[j], coords[k]);
                let sum = nested(a, b, c) + nested(b, c, a) + nested(c, a, b);
                checks.push(BracketCheck {
                    name: format!("jacobi({},{},{})", a.name(), b.name(), c.name()),
                    residual: sum.abs(),
                });
            }
        }
    }
    BracketReport::from_checks(checks, tol)
}
