//! Number-projected BCS.
//!
//! The contour integral of the projector is a polynomial coefficient: with
//! `x = v^2`, `y = u^2`, the residue `R_v(e1, e2)` is the coefficient of
//! `z^(p - v)` in `(y1 + z x1)^(O1 - e1) (y2 + z x2)^(O2 - e2)`, where
//! `e_i` whole pair modes have been removed from level `i`. Everything is
//! summed in log space.

use serde::Serialize;
use thiserror::Error;

use crate::bcs::BcsSolution;
use crate::logspace::{ln_binomial, ln_nonneg, ln_pow, log_sum_exp, LogValue};
use crate::model::{check_pair_type, ModelError, PairType, PairingModel};
use crate::xstate::{Source, XState, XStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("cannot exclude {excl} modes from a level with {omega}")]
    IndexOutOfRange { excl: u32, omega: u32 },
    #[error("projected state has zero norm at p = {p}")]
    DegenerateState { p: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    State(#[from] XStateError),
}

/// `ln v^2`, `ln u^2` per level.
#[derive(Debug, Clone, Copy)]
struct LnAmps {
    x: [f64; 2],
    y: [f64; 2],
}

impl LnAmps {
    fn new(sol: &BcsSolution) -> Self {
        let (x1, y1) = sol.occupation(0);
        let (x2, y2) = sol.occupation(1);
        LnAmps {
            x: [ln_nonneg(x1), ln_nonneg(x2)],
            y: [ln_nonneg(y1), ln_nonneg(y2)],
        }
    }

    fn swapped(self) -> Self {
        LnAmps {
            x: [self.x[1], self.x[0]],
            y: [self.y[1], self.y[0]],
        }
    }

    /// `ln(x1^a1 y1^b1 x2^a2 y2^b2)`.
    fn monomial(&self, a1: i64, b1: i64, a2: i64, b2: i64) -> f64 {
        ln_pow(self.x[0], a1) + ln_pow(self.y[0], b1) + ln_pow(self.x[1], a2) + ln_pow(self.y[1], b2)
    }
}

/// Log of the coefficient of `z^k` in `(y1 + z x1)^n1 (y2 + z x2)^n2`.
fn ln_coefficient(a: &LnAmps, n1: i64, n2: i64, k: i64) -> f64 {
    if k < 0 || k > n1 + n2 {
        return f64::NEG_INFINITY;
    }
    let lo = 0.max(k - n2);
    let hi = k.min(n1);
    log_sum_exp((lo..=hi).map(|i| {
        ln_binomial(n1, i) + ln_binomial(n2, k - i) + a.monomial(i, n1 - i, k - i, n2 - k + i)
    }))
}

/// `R_v` with `excl1`, `excl2` modes removed, as a log value. Orders outside
/// the polynomial's degree give zero.
pub fn residue(
    model: &PairingModel,
    sol: &BcsSolution,
    p: u32,
    v: i64,
    excl1: u32,
    excl2: u32,
) -> Result<LogValue, ProjectionError> {
    for (excl, omega) in [(excl1, model.omega1), (excl2, model.omega2)] {
        if excl > omega {
            return Err(ProjectionError::IndexOutOfRange { excl, omega });
        }
    }
    let a = LnAmps::new(sol);
    let ln = ln_coefficient(
        &a,
        i64::from(model.omega1 - excl1),
        i64::from(model.omega2 - excl2),
        i64::from(p) - v,
    );
    Ok(LogValue::from_ln(ln))
}

/// Residues needed for the norm and energy at one `p`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidueTable {
    pub p: u32,
    /// `ln R_0` with nothing excluded.
    pub ln_r0: f64,
    /// `ln R_1` with one mode excluded from level 1, level 2.
    pub ln_r1_single: [f64; 2],
    /// `ln R_1` with two modes excluded from level 1, level 2.
    pub ln_r1_pair_same: [f64; 2],
    /// `ln R_1` with one mode excluded from each level.
    pub ln_r1_pair_cross: f64,
    /// `ln R_2` with two modes excluded from level 1, level 2, and across.
    pub ln_r2_same: [f64; 2],
    pub ln_r2_cross: f64,
}

impl ResidueTable {
    pub fn build(model: &PairingModel, sol: &BcsSolution, p: u32) -> Self {
        let a = LnAmps::new(sol);
        let (o1, o2) = (i64::from(model.omega1), i64::from(model.omega2));
        let k = i64::from(p);
        let c = |e1: i64, e2: i64, v: i64| {
            if e1 > o1 || e2 > o2 {
                f64::NEG_INFINITY
            } else {
                ln_coefficient(&a, o1 - e1, o2 - e2, k - v)
            }
        };
        ResidueTable {
            p,
            ln_r0: c(0, 0, 0),
            ln_r1_single: [c(1, 0, 1), c(0, 1, 1)],
            ln_r1_pair_same: [c(2, 0, 1), c(0, 2, 1)],
            ln_r1_pair_cross: c(1, 1, 1),
            ln_r2_same: [c(2, 0, 2), c(0, 2, 2)],
            ln_r2_cross: c(1, 1, 2),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PbcsState {
    pub source: BcsSolution,
    pub p: u32,
    /// `ln <Psi_N|Psi_N>`, equal to `ln R_0`.
    pub ln_norm: f64,
    pub energy: f64,
}

/// `<Psi_N|H|Psi_N> / <Psi_N|Psi_N>`.
///
/// The pair-density term `G_kk'kk' v^2 v'^2 R_2` carries no coefficient in a
/// pure pairing Hamiltonian, so only the one-body, self-pairing and
/// scattering terms remain.
pub fn pbcs_energy(model: &PairingModel, sol: &BcsSolution, p: u32) -> Result<f64, ProjectionError> {
    let t = ResidueTable::build(model, sol, p);
    if t.ln_r0 == f64::NEG_INFINITY {
        return Err(ProjectionError::DegenerateState { p });
    }
    let rel = |ln: f64| (ln - t.ln_r0).exp();
    let omega = [f64::from(model.omega1), f64::from(model.omega2)];
    let eps = [model.eps1, model.eps2];
    let mut e = 0.0;
    for i in 0..2 {
        let (x, y) = sol.occupation(i);
        let gii = model.coupling(i, i);
        e += omega[i] * (2.0 * eps[i] - gii) * x * rel(t.ln_r1_single[i]);
        if omega[i] >= 2.0 {
            e -= gii * omega[i] * (omega[i] - 1.0) * x * y * rel(t.ln_r1_pair_same[i]);
        }
    }
    let s = |i: usize| {
        let (x, y) = sol.occupation(i);
        (x * y).sqrt()
    };
    e -= 2.0 * model.coupling(0, 1) * omega[0] * omega[1] * s(0) * s(1) * rel(t.ln_r1_pair_cross);
    Ok(e)
}

pub fn pbcs_state(model: &PairingModel, sol: &BcsSolution, p: u32) -> Result<PbcsState, ProjectionError> {
    let energy = pbcs_energy(model, sol, p)?;
    let t = ResidueTable::build(model, sol, p);
    Ok(PbcsState {
        source: *sol,
        p,
        ln_norm: t.ln_r0,
        energy,
    })
}

/// `sum_{i=lo}^{hi} term(i)` in log space; empty ranges give `-inf`.
fn ln_sum(lo: i64, hi: i64, term: impl Fn(i64) -> f64) -> f64 {
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    log_sum_exp((lo..=hi).map(term))
}

/// Both qubits in level 1. Each term is the printed
/// `C (O1-2 choose ..) (v1^2/u1^2)^i (O2 choose p-i) (v2^2/u2^2)^(p-i)`
/// with `C = u1^(2 O1) u2^(2 O2)` multiplied in.
fn ln_same_level(a: &LnAmps, o1: i64, o2: i64, p: i64) -> [f64; 3] {
    let term = |i: i64, shift: i64| {
        ln_binomial(o1 - 2, i - shift)
            + ln_binomial(o2, p - i)
            + a.monomial(i, o1 - i, p - i, o2 - p + i)
    };
    let r11 = ln_sum(0.max(p - o2), p.min(o1 - 2), |i| term(i, 0));
    let r22 = ln_sum(1.max(p - o2), p.min(o1 - 1), |i| term(i, 1));
    let r44 = ln_sum(2.max(p - o2), p.min(o1), |i| term(i, 2));
    [r11, r22, r44]
}

/// One qubit per level.
fn ln_cross(a: &LnAmps, o1: i64, o2: i64, p: i64) -> [f64; 4] {
    let r11 = ln_sum(0.max(p - o2 + 1), p.min(o1 - 1), |i| {
        ln_binomial(o1 - 1, i) + ln_binomial(o2 - 1, p - i) + a.monomial(i, o1 - i, p - i, o2 - p + i)
    });
    let r22 = ln_sum(0.max(p - o2), (p - 1).min(o1 - 1), |i| {
        ln_binomial(o1 - 1, i) + ln_binomial(o2 - 1, p - i - 1) + a.monomial(i, o1 - i, p - i, o2 - p + i)
    });
    let r33 = ln_sum(0.max(p - o1), (p - 1).min(o2 - 1), |i| {
        ln_binomial(o1 - 1, p - i - 1) + ln_binomial(o2 - 1, i) + a.monomial(p - i, o1 - p + i, i, o2 - i)
    });
    let r44 = ln_sum(1.max(p - o2), (p - 1).min(o1), |i| {
        ln_binomial(o1 - 1, i - 1) + ln_binomial(o2 - 1, p - i - 1) + a.monomial(i, o1 - i, p - i, o2 - p + i)
    });
    [r11, r22, r33, r44]
}

/// Normalizes log weights by their sum.
fn normalized(ln_w: [f64; 4], p: u32) -> Result<[f64; 4], ProjectionError> {
    let ln_tr = log_sum_exp(ln_w);
    if !ln_tr.is_finite() {
        return Err(ProjectionError::DegenerateState { p });
    }
    Ok(ln_w.map(|w| (w - ln_tr).exp()))
}

/// Two-mode reduced density matrix of the projected state.
pub fn pbcs_rho(model: &PairingModel, sol: &BcsSolution, p: u32, t: PairType) -> Result<XState, ProjectionError> {
    check_pair_type(model, t)?;
    let a = LnAmps::new(sol);
    let (o1, o2) = (i64::from(model.omega1), i64::from(model.omega2));
    let k = i64::from(p);
    let rho = match t {
        PairType::SameLower | PairType::SameUpper => {
            let [r11, r22, r44] = if t == PairType::SameLower {
                ln_same_level(&a, o1, o2, k)
            } else {
                ln_same_level(&a.swapped(), o2, o1, k)
            };
            let [n11, n22, n33, n44] = normalized([r11, r22, r22, r44], p)?;
            debug_assert_eq!(n22, n33);
            XState::new(n11, n22, n33, n44, n22, Some(t), Source::Pbcs)?
        }
        PairType::Cross => {
            let ln_w = ln_cross(&a, o1, o2, k);
            let ln_tr = log_sum_exp(ln_w);
            if !ln_tr.is_finite() {
                return Err(ProjectionError::DegenerateState { p });
            }
            let [n11, n22, n33, n44] = ln_w.map(|w| (w - ln_tr).exp());
            let n23 = (0.5 * (ln_w[1] + ln_w[2]) - ln_tr).exp();
            XState::new(n11, n22, n33, n44, n23, Some(t), Source::Pbcs)?
        }
    };
    Ok(rho)
}

/// The same matrix built from residues, `rho_ab = w_ab R_m(a, b) / R_0`.
/// Independent route used to cross-check the binomial sums.
pub fn pbcs_rho_from_residues(
    model: &PairingModel,
    sol: &BcsSolution,
    p: u32,
    t: PairType,
) -> Result<XState, ProjectionError> {
    check_pair_type(model, t)?;
    let (la, lb) = crate::bcs::qubit_levels(t);
    let mut excl = [0u32; 2];
    excl[la] += 1;
    excl[lb] += 1;
    let r = |v: i64| residue(model, sol, p, v, excl[0], excl[1]).map(|x| x.ln_mag);
    let (xa, ya) = sol.occupation(la);
    let (xb, yb) = sol.occupation(lb);
    let ln_w = [
        ln_nonneg(ya * yb) + r(0)?,
        ln_nonneg(ya * xb) + r(1)?,
        ln_nonneg(xa * yb) + r(1)?,
        ln_nonneg(xa * xb) + r(2)?,
    ];
    let ln_tr = log_sum_exp(ln_w);
    if !ln_tr.is_finite() {
        return Err(ProjectionError::DegenerateState { p });
    }
    let n = ln_w.map(|w| (w - ln_tr).exp());
    let ln_c = 0.5 * (ln_nonneg(xa * ya) + ln_nonneg(xb * yb)) + r(1)?;
    Ok(XState::new(n[0], n[1], n[2], n[3], (ln_c - ln_tr).exp(), Some(t), Source::Pbcs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::solve_bcs;
    use crate::model::Occupancy;
    use approx::assert_relative_eq;

    fn half(model: &PairingModel) -> BcsSolution {
        let mut s = solve_bcs(model, Occupancy::new(1)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        (s.u1, s.v1, s.u2, s.v2) = (r, r, r, r);
        s
    }

    #[test]
    fn residue_is_binomial_for_equal_amplitudes() {
        let m = PairingModel::symmetric(2, 0.6).unwrap();
        let s = half(&m);
        for p in 0..=4u32 {
            let r = residue(&m, &s, p, 0, 0, 0).unwrap().to_f64();
            let c = [1.0, 4.0, 6.0, 4.0, 1.0][p as usize];
            assert_relative_eq!(r, c / 16.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn residue_out_of_degree_is_zero() {
        let m = PairingModel::symmetric(2, 0.6).unwrap();
        let s = half(&m);
        assert!(residue(&m, &s, 4, 0, 1, 0).unwrap().is_zero());
        assert!(residue(&m, &s, 0, 1, 0, 0).unwrap().is_zero());
        assert!(matches!(
            residue(&m, &s, 1, 0, 3, 0),
            Err(ProjectionError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn constant_term_is_product_of_u2() {
        let m = PairingModel::symmetric(3, 0.6).unwrap();
        let s = solve_bcs(&m, Occupancy::new(2)).unwrap();
        let r = residue(&m, &s, 2, 2, 0, 0).unwrap().to_f64();
        let expect = (s.u1 * s.u1).powi(3) * (s.u2 * s.u2).powi(3);
        assert_relative_eq!(r, expect, max_relative = 1e-13);
    }

    #[test]
    fn literal_sums_match_residue_route() {
        let m = PairingModel::new(7, 5, 0.0, 1.0, 0.7, 0.6, 0.5, Default::default()).unwrap();
        for p in 1..12 {
            let s = solve_bcs(&m, Occupancy::new(p)).unwrap();
            for t in PairType::ALL {
                let a = pbcs_rho(&m, &s, p, t).unwrap();
                let b = pbcs_rho_from_residues(&m, &s, p, t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-13, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn vacuum_at_zero_pairs() {
        let m = PairingModel::symmetric(4, 0.6).unwrap();
        let s = solve_bcs(&m, Occupancy::new(0)).unwrap();
        for t in PairType::ALL {
            let r = pbcs_rho(&m, &s, 0, t).unwrap();
            assert_eq!(r.rho11, 1.0);
            assert_eq!(r.rho23, 0.0);
        }
    }

    #[test]
    fn large_degeneracy_is_finite() {
        let m = PairingModel::symmetric(120, 0.6).unwrap();
        let s = solve_bcs(&m, Occupancy::new(119)).unwrap();
        let r = pbcs_rho(&m, &s, 119, PairType::Cross).unwrap();
        assert!(r.trace().is_finite());
        assert!(pbcs_energy(&m, &s, 119).unwrap().is_finite());
    }
}
