//! Two-level pairing model parameters and their validation.
//!
//! A level `i` carries `omega_i` time-reversed pair modes, each of which is a
//! qubit (empty `|0>` or pair-occupied `|1>`). Levels are stored with
//! `eps1 <= eps2`; constructing a model with the levels the other way round
//! swaps every per-level quantity and remembers that it did so, so that
//! [`PairType::SameLower`] and [`PairType::SameUpper`] requests can be mapped
//! back onto the caller's labelling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("pair type {pair_type:?} needs {needed} modes in level {level}, which has {available}")]
    DegeneracyTooSmall {
        pair_type: PairType,
        level: u8,
        needed: u32,
        available: u32,
    },
    #[error("pair count {p} outside [0, {max}]")]
    PairCountOutOfRange { p: u32, max: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// How the configured strength `G_ij` enters the Hamiltonian as the coupling
/// between two individual pair modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthConvention {
    /// Mode coupling equals `G_ij`.
    Raw,
    /// Mode coupling equals `4 G_ij`.
    #[default]
    TimesFour,
}

impl StrengthConvention {
    pub fn factor(self) -> f64 {
        match self {
            StrengthConvention::Raw => 1.0,
            StrengthConvention::TimesFour => 4.0,
        }
    }
}

impl std::str::FromStr for StrengthConvention {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "raw" => Ok(StrengthConvention::Raw),
            "times_four" | "x4" | "4" => Ok(StrengthConvention::TimesFour),
            other => Err(ModelError::InvalidParameter(format!(
                "unknown strength convention '{other}'"
            ))),
        }
    }
}

/// Which two pair modes form the qubits `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairType {
    /// Type 1: both qubits in the lower level.
    SameLower,
    /// Type 2: `A` in the lower level, `B` in the upper level.
    Cross,
    /// Type 3: both qubits in the upper level.
    SameUpper,
}

impl PairType {
    pub const ALL: [PairType; 3] = [PairType::SameLower, PairType::Cross, PairType::SameUpper];

    pub fn number(self) -> u8 {
        match self {
            PairType::SameLower => 1,
            PairType::Cross => 2,
            PairType::SameUpper => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self, ModelError> {
        match n {
            1 => Ok(PairType::SameLower),
            2 => Ok(PairType::Cross),
            3 => Ok(PairType::SameUpper),
            _ => Err(ModelError::InvalidParameter(format!(
                "pair type must be 1, 2 or 3, got {n}"
            ))),
        }
    }

    /// The pair type seen after exchanging the two levels.
    pub fn mirrored(self) -> Self {
        match self {
            PairType::SameLower => PairType::SameUpper,
            PairType::Cross => PairType::Cross,
            PairType::SameUpper => PairType::SameLower,
        }
    }
}

impl std::str::FromStr for PairType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "1" | "same_lower" => Ok(PairType::SameLower),
            "2" | "cross" => Ok(PairType::Cross),
            "3" | "same_upper" => Ok(PairType::SameUpper),
            other => Err(ModelError::InvalidParameter(format!("unknown pair type '{other}'"))),
        }
    }
}

impl std::fmt::Display for PairType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Two degenerate levels with pairing interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingModel {
    pub omega1: u32,
    pub omega2: u32,
    pub eps1: f64,
    pub eps2: f64,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub strength_convention: StrengthConvention,
    /// Set when construction exchanged the caller's levels to order the energies.
    pub levels_swapped: bool,
}

impl PairingModel {
    pub fn new(
        omega1: u32,
        omega2: u32,
        eps1: f64,
        eps2: f64,
        g11: f64,
        g12: f64,
        g22: f64,
        strength_convention: StrengthConvention,
    ) -> Result<Self, ModelError> {
        if omega1 == 0 || omega2 == 0 {
            return Err(ModelError::InvalidParameter(format!(
                "degeneracies must be >= 1 (got {omega1}, {omega2})"
            )));
        }
        for (name, v) in [("eps1", eps1), ("eps2", eps2)] {
            if !v.is_finite() {
                return Err(ModelError::InvalidParameter(format!("{name} is not finite")));
            }
        }
        for (name, v) in [("g11", g11), ("g12", g12), ("g22", g22)] {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidParameter(format!(
                    "{name} must be finite and >= 0 (got {v})"
                )));
            }
        }
        let model = if eps1 <= eps2 {
            PairingModel {
                omega1,
                omega2,
                eps1,
                eps2,
                g11,
                g12,
                g22,
                strength_convention,
                levels_swapped: false,
            }
        } else {
            PairingModel {
                omega1: omega2,
                omega2: omega1,
                eps1: eps2,
                eps2: eps1,
                g11: g22,
                g12,
                g22: g11,
                strength_convention,
                levels_swapped: true,
            }
        };
        Ok(model)
    }

    /// Equal degeneracies, `eps = (0, 1)` and one uniform strength.
    pub fn symmetric(omega: u32, g: f64) -> Result<Self, ModelError> {
        Self::new(omega, omega, 0.0, 1.0, g, g, g, StrengthConvention::default())
    }

    pub fn with_convention(mut self, convention: StrengthConvention) -> Self {
        self.strength_convention = convention;
        self
    }

    /// Replaces all three strengths by `g`.
    pub fn with_uniform_strength(mut self, g: f64) -> Self {
        self.g11 = g;
        self.g12 = g;
        self.g22 = g;
        self
    }

    pub fn max_pairs(&self) -> u32 {
        self.omega1 + self.omega2
    }

    pub fn omega(&self, level: usize) -> u32 {
        [self.omega1, self.omega2][level]
    }

    pub fn eps(&self, level: usize) -> f64 {
        [self.eps1, self.eps2][level]
    }

    /// Mode-to-mode coupling in the Hamiltonian, convention applied.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let g = match (a, b) {
            (0, 0) => self.g11,
            (1, 1) => self.g22,
            _ => self.g12,
        };
        g * self.strength_convention.factor()
    }

    /// The same physical model with the two levels exchanged (no reordering).
    pub fn level_swapped(&self) -> PairingModel {
        PairingModel {
            omega1: self.omega2,
            omega2: self.omega1,
            eps1: self.eps2,
            eps2: self.eps1,
            g11: self.g22,
            g12: self.g12,
            g22: self.g11,
            strength_convention: self.strength_convention,
            levels_swapped: !self.levels_swapped,
        }
    }
}

/// Number of particle pairs; the particle number is `2p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occupancy {
    pub p: u32,
}

impl Occupancy {
    pub fn new(p: u32) -> Self {
        Occupancy { p }
    }

    pub fn particles(&self) -> u32 {
        2 * self.p
    }

    /// Hole pairs left in a single level of degeneracy `omega`.
    pub fn holes(&self, omega: u32) -> Option<u32> {
        omega.checked_sub(self.p)
    }
}

/// Parameters that passed [`validate`]. `pair_type` is expressed in the
/// model's ordered levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked {
    pub model: PairingModel,
    pub occupancy: Occupancy,
    pub pair_type: PairType,
}

impl Checked {
    pub fn p(&self) -> u32 {
        self.occupancy.p
    }
}

pub fn check_pair_type(model: &PairingModel, t: PairType) -> Result<(), ModelError> {
    check_pair_type_degeneracies(model.omega1, model.omega2, t)
}

pub fn check_pair_type_degeneracies(omega1: u32, omega2: u32, t: PairType) -> Result<(), ModelError> {
    let (level, needed, available) = match t {
        PairType::SameLower => (1, 2, omega1),
        PairType::SameUpper => (2, 2, omega2),
        PairType::Cross if omega1 < 1 => (1, 1, omega1),
        PairType::Cross => (2, 1, omega2),
    };
    if available < needed {
        return Err(ModelError::DegeneracyTooSmall {
            pair_type: t,
            level,
            needed,
            available,
        });
    }
    Ok(())
}

pub fn check_occupancy(model: &PairingModel, occ: Occupancy) -> Result<(), ModelError> {
    if occ.p > model.max_pairs() {
        return Err(ModelError::PairCountOutOfRange {
            p: occ.p,
            max: model.max_pairs(),
        });
    }
    Ok(())
}

/// Checks the occupancy and pair type against the model. A pair type given in
/// the caller's level labelling is mirrored when the model swapped levels.
pub fn validate(model: &PairingModel, occ: Occupancy, t: PairType) -> Result<Checked, ModelError> {
    let t = if model.levels_swapped { t.mirrored() } else { t };
    check_pair_type(model, t)?;
    check_occupancy(model, occ)?;
    Ok(Checked {
        model: *model,
        occupancy: occ,
        pair_type: t,
    })
}
