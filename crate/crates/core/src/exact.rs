//! Exact ground state in the fully paired collective basis.
//!
//! With `S+(i) = sum_{k in i} a+_k a+_kbar` the Hamiltonian restricted to
//! seniority zero and maximal quasi-spin per level acts on `|n1, n2>` with
//! `n1 + n2 = p`. It is tridiagonal in `n1`:
//!
//! * diagonal `2 eps1 n1 + 2 eps2 n2 - g11 n1(O1-n1+1) - g22 n2(O2-n2+1)`
//! * `<n1+1, n2-1|H|n1, n2> = -g12 sqrt((n1+1)(O1-n1)) sqrt(n2(O2-n2+1))`
//!
//! where `g_ij` are the mode couplings after the strength convention.

use serde::Serialize;
use thiserror::Error;

use crate::model::{check_occupancy, check_pair_type_degeneracies, ModelError, Occupancy, PairType, PairingModel};
use crate::tridiag::{lowest_eigenpair, EigenError};
use crate::xstate::{Source, XState, XStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    State(#[from] XStateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuasiSpinBasis {
    pub omega1: u32,
    pub omega2: u32,
    pub p: u32,
    pub n1_min: u32,
    pub n1_max: u32,
}

impl QuasiSpinBasis {
    pub fn new(model: &PairingModel, occ: Occupancy) -> Result<Self, ModelError> {
        check_occupancy(model, occ)?;
        let p = occ.p;
        Ok(QuasiSpinBasis {
            omega1: model.omega1,
            omega2: model.omega2,
            p,
            n1_min: p.saturating_sub(model.omega2),
            n1_max: p.min(model.omega1),
        })
    }

    pub fn dim(&self) -> usize {
        (self.n1_max - self.n1_min + 1) as usize
    }

    /// `(n1, n2)` in ascending `n1`.
    pub fn states(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (self.n1_min..=self.n1_max).map(move |n1| (n1, self.p - n1))
    }
}

/// Tridiagonal Hamiltonian in the collective basis.
#[derive(Debug, Clone, Serialize)]
pub struct CollectiveHamiltonian {
    pub basis: QuasiSpinBasis,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `<n|S+ S-|n>` for one level of degeneracy `omega` holding `n` pairs.
fn pair_number_term(n: u32, omega: u32) -> f64 {
    f64::from(n) * f64::from(omega - n + 1)
}

/// `sqrt((n1+1)(O1-n1)) sqrt(n2(O2-n2+1))`: `<n1+1, n2-1|S+(1) S-(2)|n1, n2>`.
fn transfer_element(n1: u32, n2: u32, omega1: u32, omega2: u32) -> f64 {
    (f64::from(n1 + 1) * f64::from(omega1 - n1)).sqrt() * (f64::from(n2) * f64::from(omega2 - n2 + 1)).sqrt()
}

pub fn build_hamiltonian(model: &PairingModel, occ: Occupancy) -> Result<CollectiveHamiltonian, ModelError> {
    let basis = QuasiSpinBasis::new(model, occ)?;
    let (g11, g12, g22) = (model.coupling(0, 0), model.coupling(0, 1), model.coupling(1, 1));
    let diag = basis
        .states()
        .map(|(n1, n2)| {
            2.0 * model.eps1 * f64::from(n1) + 2.0 * model.eps2 * f64::from(n2)
                - g11 * pair_number_term(n1, model.omega1)
                - g22 * pair_number_term(n2, model.omega2)
        })
        .collect();
    let off = basis
        .states()
        .take(basis.dim() - 1)
        .map(|(n1, n2)| -g12 * transfer_element(n1, n2, model.omega1, model.omega2))
        .collect();
    Ok(CollectiveHamiltonian { basis, diag, off })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactState {
    pub hamiltonian: CollectiveHamiltonian,
    pub e0: f64,
    /// `c[j]` is the amplitude of `n1 = n1_min + j`.
    pub amplitudes: Vec<f64>,
}

impl ExactState {
    pub fn basis(&self) -> &QuasiSpinBasis {
        &self.hamiltonian.basis
    }

    /// `H c - E0 c` in the max norm.
    pub fn residual(&self) -> f64 {
        let h = &self.hamiltonian;
        let c = &self.amplitudes;
        let n = c.len();
        (0..n)
            .map(|i| {
                let mut hc = h.diag[i] * c[i];
                if i > 0 {
                    hc += h.off[i - 1] * c[i - 1];
                }
                if i + 1 < n {
                    hc += h.off[i] * c[i + 1];
                }
                (hc - self.e0 * c[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `<f(n1, n2)>` over the ground-state weights.
    fn moment(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.basis()
            .states()
            .zip(&self.amplitudes)
            .map(|((n1, n2), c)| c * c * f(f64::from(n1), f64::from(n2)))
            .sum()
    }

    /// `<S+(1) S-(2)>`.
    fn cross_coherence(&self) -> f64 {
        let b = self.basis();
        let c = &self.amplitudes;
        b.states()
            .zip(c.windows(2))
            .map(|((n1, n2), w)| w[1] * w[0] * transfer_element(n1, n2, b.omega1, b.omega2))
            .sum()
    }
}

/// Lowest eigenpair; the sign is fixed so the last non-negligible amplitude
/// (largest `n1`) is positive.
pub fn ground_state(hamiltonian: CollectiveHamiltonian) -> Result<ExactState, EigenError> {
    let (e0, mut c) = lowest_eigenpair(&hamiltonian.diag, &hamiltonian.off)?;
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let anchor = c.iter().rev().find(|x| x.abs() > 1e-14).copied().unwrap_or(1.0);
    let scale = anchor.signum() / norm;
    c.iter_mut().for_each(|x| *x *= scale);
    Ok(ExactState {
        hamiltonian,
        e0,
        amplitudes: c,
    })
}

/// Convenience: build and diagonalize.
pub fn solve_exact(model: &PairingModel, occ: Occupancy) -> Result<ExactState, ExactError> {
    Ok(ground_state(build_hamiltonian(model, occ)?)?)
}

/// Two-qubit reduced density matrix of two distinct modes, `t` in the model's
/// ordered levels.
pub fn exact_rho(state: &ExactState, t: PairType) -> Result<XState, ExactError> {
    let b = *state.basis();
    check_pair_type_degeneracies(b.omega1, b.omega2, t)?;
    let (o1, o2) = (f64::from(b.omega1), f64::from(b.omega2));
    let rho = match t {
        PairType::SameLower => {
            let d = o1 * (o1 - 1.0);
            let mid = state.moment(|n1, _| n1 * (o1 - n1)) / d;
            XState::new(
                state.moment(|n1, _| (o1 - n1) * (o1 - n1 - 1.0)) / d,
                mid,
                mid,
                state.moment(|n1, _| n1 * (n1 - 1.0)) / d,
                mid,
                Some(t),
                Source::Exact,
            )?
        }
        PairType::SameUpper => {
            let d = o2 * (o2 - 1.0);
            let mid = state.moment(|_, n2| n2 * (o2 - n2)) / d;
            XState::new(
                state.moment(|_, n2| (o2 - n2) * (o2 - n2 - 1.0)) / d,
                mid,
                mid,
                state.moment(|_, n2| n2 * (n2 - 1.0)) / d,
                mid,
                Some(t),
                Source::Exact,
            )?
        }
        PairType::Cross => {
            let d = o1 * o2;
            XState::new(
                state.moment(|n1, n2| (o1 - n1) * (o2 - n2)) / d,
                state.moment(|n1, n2| (o1 - n1) * n2) / d,
                state.moment(|n1, n2| n1 * (o2 - n2)) / d,
                state.moment(|n1, n2| n1 * n2) / d,
                state.cross_coherence() / d,
                Some(t),
                Source::Exact,
            )?
        }
    };
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StrengthConvention;
    use approx::assert_abs_diff_eq;

    fn model(o1: u32, o2: u32, g11: f64, g12: f64, g22: f64) -> PairingModel {
        PairingModel::new(o1, o2, 0.0, 1.0, g11, g12, g22, StrengthConvention::Raw).unwrap()
    }

    #[test]
    fn basis_dimension() {
        for (o1, o2, p) in [(3, 2, 0), (3, 2, 2), (3, 2, 4), (3, 2, 5), (20, 20, 20), (7, 5, 9)] {
            let b = QuasiSpinBasis::new(&model(o1, o2, 0.5, 0.5, 0.5), Occupancy::new(p)).unwrap();
            let expect = p.min(o1) as i64 - (p as i64 - o2 as i64).max(0) + 1;
            assert_eq!(b.dim() as i64, expect);
        }
    }

    #[test]
    fn decoupled_levels_give_single_basis_state() {
        let m = model(4, 4, 0.3, 0.0, 0.3);
        let h = build_hamiltonian(&m, Occupancy::new(3)).unwrap();
        assert!(h.off.iter().all(|&x| x == 0.0));
        let s = ground_state(h).unwrap();
        let nonzero: Vec<_> = s.amplitudes.iter().filter(|c| c.abs() > 1e-14).collect();
        assert_eq!(nonzero.len(), 1);
        assert_abs_diff_eq!(*nonzero[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn one_level_limit_energy() {
        // level 2 pushed far away: E0 = 2 eps1 p - g11 p (O1 - p + 1)
        let g = 0.35;
        let m = PairingModel::new(8, 8, 0.0, 1e7, g, g, g, StrengthConvention::Raw).unwrap();
        for p in 0..=8 {
            let s = solve_exact(&m, Occupancy::new(p)).unwrap();
            let pf = f64::from(p);
            assert_abs_diff_eq!(s.e0, -g * pf * (8.0 - pf + 1.0), epsilon = 1e-6);
        }
    }

    #[test]
    fn single_state_space() {
        let m = model(3, 2, 0.6, 0.6, 0.6);
        let s = solve_exact(&m, Occupancy::new(5)).unwrap();
        assert_eq!(s.amplitudes, vec![1.0]);
        assert_eq!(s.e0, s.hamiltonian.diag[0]);
    }

    #[test]
    fn vacuum_rho() {
        let m = model(4, 4, 0.6, 0.6, 0.6);
        let s = solve_exact(&m, Occupancy::new(0)).unwrap();
        for t in PairType::ALL {
            let r = exact_rho(&s, t).unwrap();
            assert_eq!(r.populations(), [1.0, 0.0, 0.0, 0.0]);
            assert_eq!(r.rho23, 0.0);
        }
    }

    #[test]
    fn normalized_eigenvector_with_small_residual() {
        let m = model(7, 5, 2.4, 2.4, 2.4);
        for p in 0..=12 {
            let s = solve_exact(&m, Occupancy::new(p)).unwrap();
            let norm: f64 = s.amplitudes.iter().map(|c| c * c).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            assert!(s.residual() <= 1e-10, "residual {}", s.residual());
            assert!(*s.amplitudes.last().unwrap() > 0.0);
        }
    }

    #[test]
    fn pair_type_checked() {
        let m = model(1, 3, 0.6, 0.6, 0.6);
        let s = solve_exact(&m, Occupancy::new(1)).unwrap();
        assert!(matches!(
            exact_rho(&s, PairType::SameLower),
            Err(ExactError::Model(ModelError::DegeneracyTooSmall { .. }))
        ));
        assert!(exact_rho(&s, PairType::SameUpper).is_ok());
    }
}
