//! Correlation measures for two-qubit X states with `rho14 = 0`.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with the first digit for qubit `A`.
//! The only off-diagonal element is the real coherence `rho23 = <01|rho|10>`.
//! Classical correlation is obtained from projective measurements on `B`,
//! comparing the `sigma_z` outcome entropy `S1` with the `sigma_x` one `S2`.
//! All logarithms are base 2.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{Complex, Matrix4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::PairType;

const POP_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const LOG_FLOOR: f64 = 1e-15;

static CLAMP_EVENTS: AtomicU64 = AtomicU64::new(0);

/// Number of times a slightly negative population or eigenvalue was clamped
/// to zero since process start.
pub fn clamp_events() -> u64 {
    CLAMP_EVENTS.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XStateError {
    #[error("population rho{index}{index} = {value} is negative")]
    NegativePopulation { index: usize, value: f64 },
    #[error("trace {0} differs from 1")]
    NotNormalized(f64),
    #[error("coherence violates positivity: rho23^2 = {coherence_sq} > rho22*rho33 = {bound}")]
    NotPositive { coherence_sq: f64, bound: f64 },
    #[error("matrix is not an X state with rho14 = 0: {0}")]
    NotXForm(String),
    #[error("non-finite matrix element")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Bcs,
    Pbcs,
    Exact,
    OneLevel,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho23: f64,
    pub tag: Option<PairType>,
    pub source: Source,
}

impl XState {
    /// Validated constructor.
    pub fn new(
        rho11: f64,
        rho22: f64,
        rho33: f64,
        rho44: f64,
        rho23: f64,
        tag: Option<PairType>,
        source: Source,
    ) -> Result<Self, XStateError> {
        let s = XState {
            rho11,
            rho22,
            rho33,
            rho44,
            rho23,
            tag,
            source,
        };
        s.check()?;
        Ok(s)
    }

    /// Builds a state from unnormalized non-negative weights, dividing by
    /// their trace.
    pub fn from_unnormalized(
        w: [f64; 4],
        rho23: f64,
        tag: Option<PairType>,
        source: Source,
    ) -> Result<Self, XStateError> {
        let trace: f64 = w.iter().sum();
        if !trace.is_finite() || trace <= 0.0 {
            return Err(XStateError::NotNormalized(trace));
        }
        Self::new(
            w[0] / trace,
            w[1] / trace,
            w[2] / trace,
            w[3] / trace,
            rho23 / trace,
            tag,
            source,
        )
    }

    /// `|00><00|`.
    pub fn vacuum(tag: Option<PairType>, source: Source) -> Self {
        XState {
            rho11: 1.0,
            rho22: 0.0,
            rho33: 0.0,
            rho44: 0.0,
            rho23: 0.0,
            tag,
            source,
        }
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.rho11, self.rho22, self.rho33, self.rho44]
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn check(&self) -> Result<(), XStateError> {
        let all = [self.rho11, self.rho22, self.rho33, self.rho44, self.rho23];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(XStateError::NonFinite);
        }
        for (i, v) in self.populations().into_iter().enumerate() {
            if v < -POP_TOL {
                return Err(XStateError::NegativePopulation { index: i + 1, value: v });
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(XStateError::NotNormalized(tr));
        }
        let coherence_sq = self.rho23 * self.rho23;
        let bound = self.rho22.max(0.0) * self.rho33.max(0.0);
        if coherence_sq > bound + POP_TOL {
            return Err(XStateError::NotPositive { coherence_sq, bound });
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = self.rho11;
        m[(1, 1)] = self.rho22;
        m[(2, 2)] = self.rho33;
        m[(3, 3)] = self.rho44;
        m[(1, 2)] = self.rho23;
        m[(2, 1)] = self.rho23;
        m
    }

    /// Reads an X state out of a real symmetric 4x4 matrix, rejecting any
    /// weight outside the X pattern with `rho14 = 0`.
    pub fn from_matrix(
        m: &Matrix4<f64>,
        tol: f64,
        tag: Option<PairType>,
        source: Source,
    ) -> Result<Self, XStateError> {
        for i in 0..4 {
            for j in 0..4 {
                let allowed = i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
                if !allowed && m[(i, j)].abs() > tol {
                    return Err(XStateError::NotXForm(format!(
                        "element ({}, {}) = {}",
                        i + 1,
                        j + 1,
                        m[(i, j)]
                    )));
                }
            }
        }
        if (m[(1, 2)] - m[(2, 1)]).abs() > tol {
            return Err(XStateError::NotXForm("rho23 != rho32".into()));
        }
        Self::new(
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            m[(3, 3)],
            0.5 * (m[(1, 2)] + m[(2, 1)]),
            tag,
            source,
        )
    }

    /// Exchanges `|0>` and `|1>` on both qubits (occupation to hole picture).
    pub fn ph_conjugate(&self) -> XState {
        XState {
            rho11: self.rho44,
            rho22: self.rho33,
            rho33: self.rho22,
            rho44: self.rho11,
            ..*self
        }
    }

    /// Exchanges the roles of qubits `A` and `B`.
    pub fn swap_qubits(&self) -> XState {
        XState {
            rho22: self.rho33,
            rho33: self.rho22,
            ..*self
        }
    }

    /// Eigenvalues: `rho11`, `rho44` and the two of the central 2x2 block.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mean = 0.5 * (self.rho22 + self.rho33);
        let half_diff = 0.5 * (self.rho22 - self.rho33);
        let r = half_diff.hypot(self.rho23);
        [self.rho11, self.rho44, mean + r, mean - r]
    }

    pub fn marginal_a(&self) -> [f64; 2] {
        [self.rho11 + self.rho22, self.rho33 + self.rho44]
    }

    pub fn marginal_b(&self) -> [f64; 2] {
        [self.rho11 + self.rho33, self.rho22 + self.rho44]
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &XState) -> f64 {
        [
            self.rho11 - other.rho11,
            self.rho22 - other.rho22,
            self.rho33 - other.rho33,
            self.rho44 - other.rho44,
            self.rho23 - other.rho23,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

/// Which projective measurement on `B` attained the minimum conditional entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementBranch {
    S1,
    S2,
}

impl std::fmt::Display for MeasurementBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasurementBranch::S1 => "s1",
            MeasurementBranch::S2 => "s2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    pub concurrence: f64,
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub s1: f64,
    pub s2: f64,
    pub theta: f64,
    pub branch: MeasurementBranch,
}

fn clamp_nonneg(x: f64) -> f64 {
    if x < 0.0 {
        if x < -POP_TOL {
            // callers validate first; anything this negative is a bug upstream
            debug_assert!(false, "population {x} below tolerance");
        }
        CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed);
        0.0
    } else {
        x
    }
}

/// `-x log2 x` with `0 log 0 = 0`.
pub fn neg_xlog2x(x: f64) -> f64 {
    let x = clamp_nonneg(x);
    if x < LOG_FLOOR {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy in bits.
pub fn shannon(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| neg_xlog2x(p)).sum()
}

/// Binary entropy of `(1 - theta)/2, (1 + theta)/2`.
pub fn binary_entropy_theta(theta: f64) -> f64 {
    neg_xlog2x(0.5 * (1.0 - theta)) + neg_xlog2x(0.5 * (1.0 + theta))
}

/// Wootters concurrence of an X state with `rho14 = 0`:
/// `max{0, 2|rho23| - 2 sqrt(rho11 rho44)}`. For the coherence-saturated
/// states produced by the solvers `|rho23| = sqrt(rho22 rho33)`.
pub fn concurrence(rho: &XState) -> f64 {
    let c = 2.0 * rho.rho23.abs() - 2.0 * (clamp_nonneg(rho.rho11) * clamp_nonneg(rho.rho44)).sqrt();
    c.clamp(0.0, 1.0)
}

/// Von Neumann entropy of the full two-qubit state.
pub fn joint_entropy(rho: &XState) -> f64 {
    shannon(&rho.eigenvalues())
}

/// `S(rho_A) + S(rho_B) - S(rho)`.
pub fn mutual_information(rho: &XState) -> f64 {
    shannon(&rho.marginal_a()) + shannon(&rho.marginal_b()) - joint_entropy(rho)
}

/// Conditional entropy of `A` after measuring `B` in the `sigma_z` basis.
pub fn s1(rho: &XState) -> f64 {
    let [b0, b1] = rho.marginal_b();
    neg_xlog2x(rho.rho11) + neg_xlog2x(rho.rho33) - neg_xlog2x(b0)
        + neg_xlog2x(rho.rho22)
        + neg_xlog2x(rho.rho44)
        - neg_xlog2x(b1)
}

/// Bloch-vector length of `A` conditioned on a `sigma_x` outcome of `B`.
pub fn theta(rho: &XState) -> f64 {
    let z = rho.rho11 + rho.rho22 - rho.rho33 - rho.rho44;
    (z * z + 4.0 * rho.rho23 * rho.rho23).sqrt().min(1.0)
}

/// Conditional entropy of `A` after measuring `B` in the `sigma_x` basis.
pub fn s2(rho: &XState) -> f64 {
    binary_entropy_theta(theta(rho))
}

/// Classical correlation `S(rho_A) - min{S1, S2}` and the minimizing branch.
pub fn classical_correlation(rho: &XState) -> (f64, MeasurementBranch) {
    let (a, b) = (s1(rho), s2(rho));
    let (min, branch) = if a <= b {
        (a, MeasurementBranch::S1)
    } else {
        (b, MeasurementBranch::S2)
    };
    (shannon(&rho.marginal_a()) - min, branch)
}

/// All measures with measurement on `B`; `discord = mutual_info - classical`.
pub fn discord(rho: &XState) -> CorrelationSet {
    let mutual_info = mutual_information(rho);
    let (classical, branch) = classical_correlation(rho);
    CorrelationSet {
        concurrence: concurrence(rho),
        mutual_info,
        classical,
        discord: mutual_info - classical,
        s1: s1(rho),
        s2: s2(rho),
        theta: theta(rho),
        branch,
    }
}

/// Same as [`discord`] but measuring qubit `A`.
pub fn discord_a_side(rho: &XState) -> CorrelationSet {
    discord(&rho.swap_qubits())
}

/// Concurrence of an arbitrary two-qubit density matrix from the eigenvalues
/// of `rho (sy x sy) rho* (sy x sy)`.
pub fn spin_flip_concurrence(rho: &Matrix4<Complex<f64>>) -> f64 {
    let zero = Complex::new(0.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let sy = nalgebra::Matrix2::new(zero, -i, i, zero);
    let yy = sy.kronecker(&sy);
    let flipped = yy * rho.conjugate() * yy;
    // rho * flipped shares its spectrum with the Hermitian sqrt(rho) flipped sqrt(rho)
    let eig = nalgebra::SymmetricEigen::new(*rho);
    let sqrt_vals = eig.eigenvalues.map(|l| Complex::new(l.max(0.0).sqrt(), 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let r = sqrt_rho * flipped * sqrt_rho;
    let r = (r + r.adjoint()) * Complex::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = nalgebra::SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0))
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let roots: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0)
}
