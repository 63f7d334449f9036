//! Brute-force oracle on the full seniority-zero Fock space.
//!
//! Every pair mode is a bit; modes `0..O1` belong to level 1 and
//! `O1..O1+O2` to level 2. Configurations with `p` bits set are ranked in
//! colexicographic order. Pair operators on different modes commute, so no
//! fermionic signs appear.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use thiserror::Error;

use crate::bcs::BcsSolution;
use crate::model::{check_occupancy, check_pair_type, ModelError, Occupancy, PairType, PairingModel};
use crate::tridiag::{lowest_eigenpair, EigenError};
use crate::xstate::{Source, XState, XStateError};

pub const MAX_DIM: usize = 100_000;
/// Above this the dense eigensolver is replaced by Lanczos.
const DENSE_LIMIT: usize = 1_500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("Fock space dimension {dim} exceeds {max}")]
    TooLarge { dim: u128, max: usize },
    #[error("more than 64 pair modes")]
    TooManyModes,
    #[error("Lanczos did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    State(#[from] XStateError),
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Configurations of `p` pairs over `modes` modes.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub omega1: u32,
    pub omega2: u32,
    pub p: u32,
    pub configs: Vec<u64>,
    /// `choose[n][k]` for ranking.
    choose: Vec<Vec<usize>>,
}

impl FockSpace {
    pub fn new(model: &PairingModel, occ: Occupancy) -> Result<Self, FockError> {
        check_occupancy(model, occ)?;
        let modes = model.omega1 + model.omega2;
        if modes > 64 {
            return Err(FockError::TooManyModes);
        }
        let dim = binomial(modes, occ.p);
        if dim > MAX_DIM as u128 {
            return Err(FockError::TooLarge { dim, max: MAX_DIM });
        }
        let p = occ.p;
        let mut configs = Vec::with_capacity(dim as usize);
        if p == 0 {
            configs.push(0);
        } else {
            // Gosper's hack walks colex order
            let mut c: u64 = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
            let limit = if modes == 64 { u64::MAX } else { (1u64 << modes) - 1 };
            loop {
                configs.push(c);
                let low = c & c.wrapping_neg();
                let Some(r) = c.checked_add(low) else { break };
                let next = (((r ^ c) >> 2) / low) | r;
                if next > limit || next < c {
                    break;
                }
                c = next;
            }
        }
        debug_assert_eq!(configs.len() as u128, dim);
        let choose = (0..=modes)
            .map(|n| (0..=p).map(|k| binomial(n, k) as usize).collect())
            .collect();
        Ok(FockSpace {
            omega1: model.omega1,
            omega2: model.omega2,
            p,
            configs,
            choose,
        })
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn modes(&self) -> u32 {
        self.omega1 + self.omega2
    }

    fn level(&self, mode: u32) -> usize {
        usize::from(mode >= self.omega1)
    }

    /// Colex rank of a configuration with `p` bits set.
    pub fn rank(&self, mut c: u64) -> usize {
        let mut r = 0;
        let mut j = 1;
        while c != 0 {
            let pos = c.trailing_zeros();
            r += self.choose[pos as usize].get(j).copied().unwrap_or(0);
            j += 1;
            c &= c - 1;
        }
        r
    }
}

/// `H` acting on the Fock space, applied without storing the matrix.
pub struct FockHamiltonian<'a> {
    space: &'a FockSpace,
    eps: [f64; 2],
    g: [[f64; 2]; 2],
}

impl<'a> FockHamiltonian<'a> {
    pub fn new(space: &'a FockSpace, model: &PairingModel) -> Self {
        FockHamiltonian {
            space,
            eps: [model.eps1, model.eps2],
            g: [
                [model.coupling(0, 0), model.coupling(0, 1)],
                [model.coupling(1, 0), model.coupling(1, 1)],
            ],
        }
    }

    fn diagonal(&self, c: u64) -> f64 {
        let mut d = 0.0;
        let mut m = c;
        while m != 0 {
            let k = m.trailing_zeros();
            let l = self.space.level(k);
            d += 2.0 * self.eps[l] - self.g[l][l];
            m &= m - 1;
        }
        d
    }

    /// Calls `f(j, h_ij)` for each off-diagonal element of row `i`.
    fn for_each_hop(&self, c: u64, mut f: impl FnMut(usize, f64)) {
        let modes = self.space.modes();
        let mut occ = c;
        while occ != 0 {
            let from = occ.trailing_zeros();
            occ &= occ - 1;
            for to in 0..modes {
                if c & (1u64 << to) != 0 {
                    continue;
                }
                let target = (c & !(1u64 << from)) | (1u64 << to);
                let g = self.g[self.space.level(to)][self.space.level(from)];
                f(self.space.rank(target), -g);
            }
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, &c) in self.space.configs.iter().enumerate() {
            let mut acc = self.diagonal(c) * x[i];
            self.for_each_hop(c, |j, h| acc += h * x[j]);
            y[i] = acc;
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.space.dim();
        let mut h = DMatrix::zeros(n, n);
        for (i, &c) in self.space.configs.iter().enumerate() {
            h[(i, i)] = self.diagonal(c);
            self.for_each_hop(c, |j, v| h[(i, j)] += v);
        }
        h
    }

    /// `<x|H|x>`.
    pub fn expectation(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

/// Explicitly restarted Lanczos with full reorthogonalization.
fn lanczos_ground(h: &FockHamiltonian<'_>, tol: f64) -> Result<(f64, Vec<f64>), FockError> {
    let n = h.space.dim();
    let krylov = n.min(60);
    // deterministic start with overlap on every configuration
    let mut start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
    normalize(&mut start);
    let mut w = vec![0.0; n];
    let mut last = f64::INFINITY;
    for _ in 0..200 {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for j in 0..krylov {
            h.apply(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = dot(&w, &w).sqrt();
            if j + 1 == krylov || b < 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let (_, s) = lowest_eigenpair(&alpha, &beta)?;
        let mut ritz = vec![0.0; n];
        for (coef, q) in s.iter().zip(&basis) {
            ritz.iter_mut().zip(q).for_each(|(r, y)| *r += coef * y);
        }
        normalize(&mut ritz);
        h.apply(&ritz, &mut w);
        let e = dot(&ritz, &w);
        let res = w
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - e * b).abs())
            .fold(0.0, f64::max);
        last = res;
        if res < tol {
            return Ok((e, ritz));
        }
        start = ritz;
    }
    Err(FockError::NoConvergence(last))
}

/// Ground state of the full Fock-space Hamiltonian.
#[derive(Debug, Clone)]
pub struct FockGround {
    pub space: FockSpace,
    pub e0: f64,
    pub amplitudes: Vec<f64>,
}

pub fn fock_ground_state(model: &PairingModel, occ: Occupancy) -> Result<FockGround, FockError> {
    let space = FockSpace::new(model, occ)?;
    let h = FockHamiltonian::new(&space, model);
    let (e0, amplitudes) = if space.dim() <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(h.dense());
        let (k, e) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dimension >= 1");
        (e, eig.eigenvectors.column(k).iter().copied().collect())
    } else {
        lanczos_ground(&h, 1e-11)?
    };
    Ok(FockGround {
        space,
        e0,
        amplitudes,
    })
}

/// Two explicit modes standing in for qubits `A` and `B` of type `t`.
pub fn representative_modes(model: &PairingModel, t: PairType) -> (u32, u32) {
    match t {
        PairType::SameLower => (0, 1),
        PairType::Cross => (0, model.omega1),
        PairType::SameUpper => (model.omega1, model.omega1 + 1),
    }
}

/// Reduced density matrix of modes `(a, b)` for an unnormalized real state.
/// Basis index is `2 n_a + n_b`.
pub fn partial_trace(space: &FockSpace, psi: &[f64], a: u32, b: u32) -> Matrix4<f64> {
    let (ma, mb) = (1u64 << a, 1u64 << b);
    let local = |c: u64| 2 * usize::from(c & ma != 0) + usize::from(c & mb != 0);
    let mut rho = Matrix4::zeros();
    for (i, &c) in space.configs.iter().enumerate() {
        let rest = c & !(ma | mb);
        let s = local(c);
        for s2 in 0..4usize {
            let mut c2 = rest;
            if s2 & 2 != 0 {
                c2 |= ma;
            }
            if s2 & 1 != 0 {
                c2 |= mb;
            }
            if c2.count_ones() != space.p {
                continue;
            }
            let j = space.rank(c2);
            rho[(s, s2)] += psi[i] * psi[j];
        }
    }
    rho / dot(psi, psi)
}

/// Exact ground energy and reduced two-mode state.
pub fn fock_oracle(model: &PairingModel, occ: Occupancy, t: PairType) -> Result<(f64, XState, Matrix4<f64>), FockError> {
    check_pair_type(model, t)?;
    let g = fock_ground_state(model, occ)?;
    let (a, b) = representative_modes(model, t);
    let m = partial_trace(&g.space, &g.amplitudes, a, b);
    let x = XState::from_matrix(&m, 1e-10, Some(t), Source::Exact)?;
    Ok((g.e0, x, m))
}

/// Number-projected BCS product state: the amplitude of a configuration is
/// the product of `v` over occupied and `u` over empty modes.
#[derive(Debug, Clone)]
pub struct ProjectedBcs {
    pub space: FockSpace,
    pub amplitudes: Vec<f64>,
    pub norm_sq: f64,
    pub energy: f64,
}

pub fn project_bcs(model: &PairingModel, sol: &BcsSolution, occ: Occupancy) -> Result<ProjectedBcs, FockError> {
    let space = FockSpace::new(model, occ)?;
    let uv = [(sol.u1, sol.v1), (sol.u2, sol.v2)];
    let amplitudes: Vec<f64> = space
        .configs
        .iter()
        .map(|&c| {
            (0..space.modes())
                .map(|k| {
                    let (u, v) = uv[space.level(k)];
                    if c & (1u64 << k) != 0 {
                        v
                    } else {
                        u
                    }
                })
                .product()
        })
        .collect();
    let norm_sq = dot(&amplitudes, &amplitudes);
    let h = FockHamiltonian::new(&space, model);
    let energy = h.expectation(&amplitudes) / norm_sq;
    Ok(ProjectedBcs {
        space,
        amplitudes,
        norm_sq,
        energy,
    })
}

pub fn projected_rho(model: &PairingModel, proj: &ProjectedBcs, t: PairType) -> Result<(XState, Matrix4<f64>), FockError> {
    check_pair_type(model, t)?;
    let (a, b) = representative_modes(model, t);
    let m = partial_trace(&proj.space, &proj.amplitudes, a, b);
    let x = XState::from_matrix(&m, 1e-10, Some(t), Source::Pbcs)?;
    Ok((x, m))
}

/// Dense symmetric eigenvalues, ascending; used to check the tridiagonal solver.
pub fn dense_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
