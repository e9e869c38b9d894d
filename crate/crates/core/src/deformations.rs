//! Time-dependent noncommutativity functions `f(t)`.
//!
//! Every deformation family is built from `C = cosh/cos(t/τ)` and
//! `S = sinh/sin(t/τ)` (expanding / oscillating Newton-Hooke variants) and
//! reduces to a polynomial in `t` when `τ → ∞`:
//!
//! | family | Newton-Hooke form        | Galilean limit |
//! |--------|--------------------------|----------------|
//! | K1     | `κ C²`                   | `κ`            |
//! | K2     | `κ τ C S`                | `κ t`          |
//! | K3     | `κ τ² S²`                | `κ t²`         |
//! | K4     | `4 κ τ⁴ (C − 1)²`        | `κ t⁴`         |
//! | K5     | `± κ τ² (C − 1) C`       | `κ t² / 2`     |
//! | K6     | `± κ τ³ (C − 1) S`       | `κ t³ / 2`     |
//!
//! Derivatives and antiderivatives are closed forms. Differences such as
//! `C − 1` or `sinh v − v` are evaluated without cancellation so that a very
//! large `τ` reproduces the Galilean limit to full precision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::K1,
        Family::K2,
        Family::K3,
        Family::K4,
        Family::K5,
        Family::K6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::K1 => "k1",
            Family::K2 => "k2",
            Family::K3 => "k3",
            Family::K4 => "k4",
            Family::K5 => "k5",
            Family::K6 => "k6",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown deformation family `{s}` (expected k1..k6)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Expanding space-time, hyperbolic building blocks.
    #[serde(rename = "nh+")]
    NhPlus,
    /// Oscillating space-time, trigonometric building blocks.
    #[serde(rename = "nh-")]
    NhMinus,
    /// `τ → ∞`, polynomial in `t`.
    #[serde(rename = "limit")]
    GalileanLimit,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::NhPlus, Variant::NhMinus, Variant::GalileanLimit];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::NhPlus => "nh+",
            Variant::NhMinus => "nh-",
            Variant::GalileanLimit => "limit",
        }
    }

    /// `+1` for the hyperbolic variant, `-1` for the trigonometric one.
    fn sign(self) -> Option<f64> {
        match self {
            Variant::NhPlus => Some(1.0),
            Variant::NhMinus => Some(-1.0),
            Variant::GalileanLimit => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nh+" | "nhplus" | "plus" => Ok(Variant::NhPlus),
            "nh-" | "nhminus" | "minus" => Ok(Variant::NhMinus),
            "limit" | "galilean" => Ok(Variant::GalileanLimit),
            _ => Err(Error::config(format!(
                "unknown variant `{s}` (expected nh+, nh- or limit)"
            ))),
        }
    }
}

/// A validated deformation: family, variant, `κ` and (for Newton-Hooke
/// variants) the time scale `τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DeformationSpec {
    family: Family,
    variant: Variant,
    kappa: f64,
    tau: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    variant: Variant,
    kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
}

impl TryFrom<RawSpec> for DeformationSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        DeformationSpec::new(raw.family, raw.variant, raw.kappa, raw.tau)
    }
}

impl From<DeformationSpec> for RawSpec {
    fn from(spec: DeformationSpec) -> Self {
        RawSpec {
            family: spec.family,
            variant: spec.variant,
            kappa: spec.kappa,
            tau: spec.tau(),
        }
    }
}

impl DeformationSpec {
    /// `tau` is required for `NhPlus`/`NhMinus` and ignored for the limit.
    pub fn new(family: Family, variant: Variant, kappa: f64, tau: Option<f64>) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::config(format!("kappa must be finite, got {kappa}")));
        }
        let tau = match variant {
            Variant::GalileanLimit => f64::INFINITY,
            _ => match tau {
                Some(tau) if tau.is_finite() && tau > 0.0 => tau,
                Some(tau) => {
                    return Err(Error::config(format!(
                        "tau must be a positive finite time for {variant}, got {tau}"
                    )))
                }
                None => {
                    return Err(Error::config(format!(
                        "tau is required for variant {variant}"
                    )))
                }
            },
        };
        Ok(Self {
            family,
            variant,
            kappa,
            tau,
        })
    }

    pub fn newton_hooke(family: Family, variant: Variant, kappa: f64, tau: f64) -> Result<Self> {
        Self::new(family, variant, kappa, Some(tau))
    }

    pub fn galilean(family: Family, kappa: f64) -> Self {
        Self {
            family,
            variant: Variant::GalileanLimit,
            kappa,
            tau: f64::INFINITY,
        }
    }

    /// Constant noncommutativity `f = θ`.
    pub fn canonical(theta: f64) -> Self {
        Self::galilean(Family::K1, theta)
    }

    /// No deformation at all.
    pub fn undeformed() -> Self {
        Self::canonical(0.0)
    }

    /// All 18 family × variant combinations sharing `kappa` and `tau`.
    pub fn all_configurations(kappa: f64, tau: f64) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(18);
        for family in Family::ALL {
            for variant in Variant::ALL {
                out.push(Self::new(family, variant, kappa, Some(tau))?);
            }
        }
        Ok(out)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `None` for the Galilean limit.
    pub fn tau(&self) -> Option<f64> {
        (self.variant != Variant::GalileanLimit).then_some(self.tau)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn is_undeformed(&self) -> bool {
        self.kappa == 0.0
    }

    /// `ḟ ≡ 0`: the canonical family in the Galilean limit, or `κ = 0`.
    pub fn is_time_independent(&self) -> bool {
        self.is_undeformed()
            || (self.family == Family::K1 && self.variant == Variant::GalileanLimit)
    }

    /// Same family and `κ` with `τ → ∞`.
    pub fn galilean_limit(&self) -> Result<Self> {
        if self.variant == Variant::GalileanLimit {
            return Err(Error::AlreadyGalileanLimit(self.to_string()));
        }
        Ok(Self::galilean(self.family, self.kappa))
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// `f(t)`.
    pub fn f(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        let Some(sigma) = self.variant.sign() else {
            return k * match self.family {
                Family::K1 => 1.0,
                Family::K2 => t,
                Family::K3 => t * t,
                Family::K4 => t.powi(4),
                Family::K5 => 0.5 * t * t,
                Family::K6 => 0.5 * t.powi(3),
            };
        };
        let tau = self.tau;
        let b = Blocks::at(sigma, t / tau);
        k * match self.family {
            Family::K1 => b.c * b.c,
            Family::K2 => tau * b.c * b.s,
            Family::K3 => tau * tau * b.s * b.s,
            Family::K4 => 4.0 * tau.powi(4) * b.d * b.d,
            Family::K5 => sigma * tau * tau * b.d * b.c,
            Family::K6 => sigma * tau.powi(3) * b.d * b.s,
        }
    }

    /// `ḟ(t)`.
    pub fn f_dot(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        let Some(sigma) = self.variant.sign() else {
            return k * match self.family {
                Family::K1 => 0.0,
                Family::K2 => 1.0,
                Family::K3 => 2.0 * t,
                Family::K4 => 4.0 * t.powi(3),
                Family::K5 => t,
                Family::K6 => 1.5 * t * t,
            };
        };
        let tau = self.tau;
        let u = t / tau;
        let b = Blocks::at(sigma, u);
        k * match self.family {
            Family::K1 => sigma * sine(sigma, 2.0 * u) / tau,
            Family::K2 => cosine(sigma, 2.0 * u),
            Family::K3 => tau * sine(sigma, 2.0 * u),
            Family::K4 => 8.0 * sigma * tau.powi(3) * b.d * b.s,
            Family::K5 => tau * b.s * (b.c + b.d),
            Family::K6 => tau * tau * (b.s * b.s + sigma * b.d * b.c),
        }
    }

    /// `∫₀ᵗ f(t') dt'`.
    pub fn f_integral(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        let Some(sigma) = self.variant.sign() else {
            return k * match self.family {
                Family::K1 => t,
                Family::K2 => 0.5 * t * t,
                Family::K3 => t.powi(3) / 3.0,
                Family::K4 => t.powi(5) / 5.0,
                Family::K5 => t.powi(3) / 6.0,
                Family::K6 => t.powi(4) / 8.0,
            };
        };
        let tau = self.tau;
        let u = t / tau;
        let b = Blocks::at(sigma, u);
        k * match self.family {
            Family::K1 => 0.5 * t + 0.25 * tau * sine(sigma, 2.0 * u),
            Family::K2 => 0.5 * tau * tau * b.s * b.s,
            Family::K3 => 0.25 * sigma * tau.powi(3) * sine_minus_linear(sigma, 2.0 * u),
            Family::K4 => {
                tau.powi(5) * (sine_fifth_order(sigma, 2.0 * u) - 8.0 * sine_fifth_order(sigma, u))
            }
            Family::K5 => {
                sigma
                    * tau.powi(3)
                    * (0.25 * sine_minus_linear(sigma, 2.0 * u) - sine_minus_linear(sigma, u))
            }
            Family::K6 => 0.5 * tau.powi(4) * b.d * b.d,
        }
    }
}

impl fmt::Display for DeformationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tau() {
            Some(tau) => write!(
                f,
                "{}/{} kappa={} tau={}",
                self.family, self.variant, self.kappa, tau
            ),
            None => write!(f, "{}/{} kappa={}", self.family, self.variant, self.kappa),
        }
    }
}

/// `f(t)` for a validated spec.
pub fn eval_f(spec: &DeformationSpec, t: f64) -> f64 {
    spec.f(t)
}

/// `ḟ(t)` for a validated spec.
pub fn eval_f_dot(spec: &DeformationSpec, t: f64) -> f64 {
    spec.f_dot(t)
}

/// `∫₀ᵗ f` for a validated spec.
pub fn eval_f_antiderivative(spec: &DeformationSpec, t: f64) -> f64 {
    spec.f_integral(t)
}

pub fn galilean_limit_of(spec: &DeformationSpec) -> Result<DeformationSpec> {
    spec.galilean_limit()
}

/// `C`, `S` and `D = C − 1` at a single argument.
struct Blocks {
    c: f64,
    s: f64,
    d: f64,
}

impl Blocks {
    fn at(sigma: f64, u: f64) -> Self {
        let half = sine(sigma, 0.5 * u);
        Self {
            c: cosine(sigma, u),
            s: sine(sigma, u),
            // cosh u − 1 = 2 sinh²(u/2), cos u − 1 = −2 sin²(u/2)
            d: sigma * 2.0 * half * half,
        }
    }
}

fn sine(sigma: f64, v: f64) -> f64 {
    if sigma > 0.0 {
        v.sinh()
    } else {
        v.sin()
    }
}

fn cosine(sigma: f64, v: f64) -> f64 {
    if sigma > 0.0 {
        v.cosh()
    } else {
        v.cos()
    }
}

const SERIES_CUTOFF: f64 = 1.0;

/// Sum of the odd Taylor terms of `S(v)` starting at `v^(2·first + 1)`.
fn odd_series_tail(sigma: f64, v: f64, first: u32) -> f64 {
    let v2 = v * v;
    let mut term = v;
    for k in 1..=first {
        term *= sigma * v2 / f64::from((2 * k) * (2 * k + 1));
    }
    let mut sum = 0.0_f64;
    let mut k = first;
    while term.abs() > f64::EPSILON * sum.abs() * 1e-3 && k < first + 30 {
        sum += term;
        k += 1;
        term *= sigma * v2 / f64::from((2 * k) * (2 * k + 1));
    }
    sum
}

/// `S(v) − v`.
fn sine_minus_linear(sigma: f64, v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        odd_series_tail(sigma, v, 1)
    } else {
        sine(sigma, v) - v
    }
}

/// `S(v) − v − σ v³/6`.
fn sine_fifth_order(sigma: f64, v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        odd_series_tail(sigma, v, 2)
    } else {
        sine(sigma, v) - v - sigma * v.powi(3) / 6.0
    }
}
