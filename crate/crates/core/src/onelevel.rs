//! Closed forms for a single degenerate level.
//!
//! The two-qubit state of any two modes of one level with `p` pairs and
//! `q = omega - p` holes does not depend on the pairing strength. Everything
//! here is written out from the closed expressions and deliberately does not
//! call into [`crate::xstate`], so the two can be compared.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::PairType;
use crate::xstate::{CorrelationSet, MeasurementBranch, Source, XState, XStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OneLevelError {
    #[error("one-level degeneracy must be >= 2, got {0}")]
    DegeneracyTooSmall(u64),
    #[error("pair count {p} exceeds degeneracy {omega}")]
    PairCountOutOfRange { p: u64, omega: u64 },
    #[error(transparent)]
    State(#[from] XStateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneLevelParams {
    pub omega: u64,
    pub p: u64,
}

impl OneLevelParams {
    pub fn new(omega: u64, p: u64) -> Result<Self, OneLevelError> {
        if omega < 2 {
            return Err(OneLevelError::DegeneracyTooSmall(omega));
        }
        if p > omega {
            return Err(OneLevelError::PairCountOutOfRange { p, omega });
        }
        Ok(OneLevelParams { omega, p })
    }

    pub fn q(&self) -> u64 {
        self.omega - self.p
    }

    fn floats(&self) -> (f64, f64, f64, f64) {
        let o = self.omega as f64;
        (self.p as f64, self.q() as f64, o, o * (o - 1.0))
    }
}

/// `x log2 y`, zero whenever `x` is zero whatever `y` is.
fn xlog2y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.log2()
    }
}

fn xlog2x(x: f64) -> f64 {
    xlog2y(x, x)
}

pub fn one_level_rho(params: OneLevelParams) -> Result<XState, OneLevelError> {
    let (p, q, _, d) = params.floats();
    Ok(XState::new(
        q * (q - 1.0) / d,
        p * q / d,
        p * q / d,
        p * (p - 1.0) / d,
        p * q / d,
        Some(PairType::SameLower),
        Source::OneLevel,
    )?)
}

pub fn one_level_concurrence(params: OneLevelParams) -> f64 {
    let (p, q, _, d) = params.floats();
    (2.0 / d * (p * q - (p * (p - 1.0) * q * (q - 1.0)).sqrt())).max(0.0)
}

pub fn one_level_mutual_info(params: OneLevelParams) -> f64 {
    let (p, q, o, d) = params.floats();
    xlog2x(p * (p - 1.0) / d) + xlog2x(q * (q - 1.0) / d) + xlog2x(2.0 * p * q / d)
        - 2.0 * xlog2x(p / o)
        - 2.0 * xlog2x(q / o)
}

pub fn one_level_s1(params: OneLevelParams) -> f64 {
    let (p, q, o, d) = params.floats();
    -xlog2y(p * q / d, q / (o - 1.0))
        - xlog2y(p * (p - 1.0) / d, (p - 1.0) / (o - 1.0))
        - xlog2y(p * q / d, p / (o - 1.0))
        - xlog2y(q * (q - 1.0) / d, (q - 1.0) / (o - 1.0))
}

pub fn one_level_theta(params: OneLevelParams) -> f64 {
    let (p, q, o, d) = params.floats();
    (((p - q) * (o - 1.0)).powi(2) + 4.0 * p * p * q * q).sqrt() / d
}

pub fn one_level_s2(params: OneLevelParams) -> f64 {
    let t = one_level_theta(params);
    -xlog2x((1.0 - t) / 2.0) - xlog2x((1.0 + t) / 2.0)
}

/// Classical correlation with the `sigma_x` measurement on `B`.
pub fn one_level_classical(params: OneLevelParams) -> f64 {
    let (p, q, o, _) = params.floats();
    let t = one_level_theta(params);
    xlog2x((1.0 - t) / 2.0) + xlog2x((1.0 + t) / 2.0) - xlog2x(p / o) - xlog2x(q / o)
}

pub fn one_level_discord(params: OneLevelParams) -> f64 {
    let (p, q, o, d) = params.floats();
    let t = one_level_theta(params);
    xlog2x(p * (p - 1.0) / d) + xlog2x(q * (q - 1.0) / d) + xlog2x(2.0 * p * q / d)
        - xlog2x(p / o)
        - xlog2x(q / o)
        - xlog2x((1.0 - t) / 2.0)
        - xlog2x((1.0 + t) / 2.0)
}

/// All closed-form measures. `branch` reports which of `S1`, `S2` is smaller;
/// the closed-form classical correlation always uses `S2`.
pub fn one_level_measures(params: OneLevelParams) -> CorrelationSet {
    let s1 = one_level_s1(params);
    let s2 = one_level_s2(params);
    CorrelationSet {
        concurrence: one_level_concurrence(params),
        mutual_info: one_level_mutual_info(params),
        classical: one_level_classical(params),
        discord: one_level_discord(params),
        s1,
        s2,
        theta: one_level_theta(params),
        branch: if s2 <= s1 {
            MeasurementBranch::S2
        } else {
            MeasurementBranch::S1
        },
    }
}

/// Large-degeneracy limits of the half-filling maxima.
pub const MUTUAL_INFO_LIMIT: f64 = 0.5;

pub fn classical_limit() -> f64 {
    0.75 * 3f64.log2() - 1.0
}

pub fn discord_limit() -> f64 {
    1.5 - 0.75 * 3f64.log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneLevelLimits {
    pub omega: u64,
    pub mutual_info_max: f64,
    pub classical_max: f64,
    pub discord_max: f64,
}

/// Small-`p` asymptotic forms for `omega >> 1`, `p << omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotes {
    pub concurrence: f64,
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
}

/// Maxima at `p = omega/2` from their closed forms. `omega = 2` makes the
/// closed forms singular and is evaluated from the measures at `p = 1`.
pub fn one_level_limits(omega: u64) -> Result<OneLevelLimits, OneLevelError> {
    if omega < 2 {
        return Err(OneLevelError::DegeneracyTooSmall(omega));
    }
    if omega == 2 {
        let m = one_level_measures(OneLevelParams::new(2, 1)?);
        return Ok(OneLevelLimits {
            omega,
            mutual_info_max: m.mutual_info,
            classical_max: m.classical,
            discord_max: m.discord,
        });
    }
    let o = omega as f64;
    let a = (o - 2.0) / (o - 1.0);
    let b = (3.0 * o - 2.0) / (o - 1.0);
    let mutual_info_max = a.log2() + o / (2.0 * (o - 1.0)) * (2.0 * o / (o - 2.0)).log2();
    let classical_max = 0.25 * (a * a.log2() + b * b.log2()) - 1.0;
    let discord_max = 0.25 * (b * ((o - 2.0) / (3.0 * o - 2.0)).log2()
        + 2.0 * o / (o - 1.0) * (2.0 * o / (o - 2.0)).log2())
        + 1.0;
    Ok(OneLevelLimits {
        omega,
        mutual_info_max,
        classical_max,
        discord_max,
    })
}

/// The asymptotic evaluators: `C ~ 1/(omega-1)`, `I ~ 2p/omega`,
/// `Cl ~ -(p/omega) log2(p/omega)`, `D ~ 2p/omega + (p/omega) log2(p/omega)`.
///
/// Only the concurrence and mutual-information forms track the closed forms;
/// the classical and discord forms are reproduced as published and are far
/// off at small `p/omega` (the discord form even goes negative).
pub fn asymptotes(params: OneLevelParams) -> Asymptotes {
    let (p, _, o, _) = params.floats();
    let x = p / o;
    Asymptotes {
        concurrence: 1.0 / (o - 1.0),
        mutual_info: 2.0 * x,
        classical: -xlog2x(x),
        discord: 2.0 * x + xlog2x(x),
    }
}
