//! Mean-field BCS with the average pair number fixed by the chemical potential.
//!
//! All modes of a level share one `(u, v)` so the unknowns are the two
//! occupations `x_i = v_i^2` and the two gaps. Each fixed-point sweep solves
//! for `lambda` by bisection so that `sum_i Omega_i x_i = p`, then refreshes
//! the gaps; the update is damped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{check_occupancy, check_pair_type, ModelError, Occupancy, PairType, PairingModel};
use crate::xstate::{Source, XState, XStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BcsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("BCS iteration did not converge after {iterations} iterations (last change {change:e})")]
    ConvergenceFailure { iterations: usize, change: f64 },
    #[error("could not bracket the chemical potential")]
    NoBracket,
    #[error(transparent)]
    State(#[from] XStateError),
}

/// Which root of the occupation quadratic is taken for `v^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapBranch {
    /// `v^2 = (1 - e/E)/2`: levels below `lambda` fill up.
    Minus,
    /// `v^2 = (1 + e/E)/2`.
    Plus,
}

impl std::str::FromStr for GapBranch {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minus" | "-" => Ok(GapBranch::Minus),
            "plus" | "+" => Ok(GapBranch::Plus),
            other => Err(ModelError::InvalidParameter(format!("unknown branch '{other}'"))),
        }
    }
}

/// Whether the density-dependent shift `sum_k' (G + G) v_k'^2` enters `eps~`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanFieldShift {
    #[default]
    Included,
    Omitted,
}

impl std::str::FromStr for MeanFieldShift {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "included" | "on" | "true" => Ok(MeanFieldShift::Included),
            "omitted" | "off" | "false" => Ok(MeanFieldShift::Omitted),
            other => Err(ModelError::InvalidParameter(format!("unknown shift mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcsOptions {
    pub shift: MeanFieldShift,
    /// `None` solves both branches and keeps the lower energy.
    pub branch: Option<GapBranch>,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BcsOptions {
    fn default() -> Self {
        BcsOptions {
            shift: MeanFieldShift::Included,
            branch: None,
            damping: 0.5,
            tolerance: 1e-13,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcsSolution {
    pub model: PairingModel,
    pub p: u32,
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    pub lambda: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub eps_tilde1: f64,
    pub eps_tilde2: f64,
    /// `<BCS|H|BCS>`.
    pub energy: f64,
    /// `<BCS|N|BCS>` in particles, i.e. `2 sum_i Omega_i v_i^2`.
    pub n_expect: f64,
    pub branch: GapBranch,
    pub shift: MeanFieldShift,
    /// No pairing solution: the gaps vanished (or `p` is 0 or full) and the
    /// state is the filled Fermi sea.
    pub normal: bool,
    /// Max change of `(v^2, Delta)` under one undamped update at the solution.
    pub residual: f64,
    pub iterations: usize,
}

impl BcsSolution {
    /// `(v_i^2, u_i^2)` for level `0` or `1`.
    pub fn occupation(&self, level: usize) -> (f64, f64) {
        let (u, v) = [(self.u1, self.v1), (self.u2, self.v2)][level];
        (v * v, u * u)
    }

    pub fn gap(&self, level: usize) -> f64 {
        [self.delta1, self.delta2][level]
    }
}

/// `(x, y) = (v^2, u^2)` without cancellation in the small one.
fn occupations(e: f64, delta: f64, branch: GapBranch) -> (f64, f64) {
    let big_e = e.hypot(delta);
    if big_e == 0.0 {
        return (0.5, 0.5);
    }
    let d2 = delta * delta;
    // minus-branch values
    let (x, y) = if e >= 0.0 {
        (d2 / (2.0 * big_e * (big_e + e)), (big_e + e) / (2.0 * big_e))
    } else {
        ((big_e - e) / (2.0 * big_e), d2 / (2.0 * big_e * (big_e - e)))
    };
    match branch {
        GapBranch::Minus => (x, y),
        GapBranch::Plus => (y, x),
    }
}

/// Per-level quantities that do not depend on `lambda`.
struct Levels {
    omega: [f64; 2],
    eps: [f64; 2],
    g: [[f64; 2]; 2],
}

impl Levels {
    fn new(model: &PairingModel) -> Self {
        Levels {
            omega: [f64::from(model.omega1), f64::from(model.omega2)],
            eps: [model.eps1, model.eps2],
            g: [
                [model.coupling(0, 0), model.coupling(0, 1)],
                [model.coupling(1, 0), model.coupling(1, 1)],
            ],
        }
    }

    fn shifted(&self, x: [f64; 2], shift: MeanFieldShift) -> [f64; 2] {
        let mut e = self.eps;
        if shift == MeanFieldShift::Included {
            for (i, ei) in e.iter_mut().enumerate() {
                *ei += 2.0 * (0..2).map(|j| self.g[i][j] * self.omega[j] * x[j]).sum::<f64>();
            }
        }
        e
    }

    fn gaps(&self, s: [f64; 2]) -> [f64; 2] {
        [0, 1].map(|i| (0..2).map(|j| self.g[i][j] * self.omega[j] * s[j]).sum())
    }

    fn pairs(&self, x: [f64; 2]) -> f64 {
        self.omega[0] * x[0] + self.omega[1] * x[1]
    }

    /// `<H>` for the product state.
    fn energy(&self, x: [f64; 2], s: [f64; 2]) -> f64 {
        let mut e = 0.0;
        for i in 0..2 {
            let o = self.omega[i];
            e += o * (2.0 * self.eps[i] - self.g[i][i]) * x[i];
            e -= self.g[i][i] * o * (o - 1.0) * s[i] * s[i];
        }
        e - 2.0 * self.g[0][1] * self.omega[0] * self.omega[1] * s[0] * s[1]
    }
}

fn occupations_at(e0: [f64; 2], delta: [f64; 2], lambda: f64, branch: GapBranch) -> ([f64; 2], [f64; 2]) {
    let a = occupations(e0[0] - lambda, delta[0], branch);
    let b = occupations(e0[1] - lambda, delta[1], branch);
    ([a.0, b.0], [a.1, b.1])
}

/// Chemical potential giving `sum Omega x = p` for fixed shifted energies and gaps.
fn solve_lambda(lv: &Levels, e0: [f64; 2], delta: [f64; 2], p: f64, branch: GapBranch) -> Result<f64, BcsError> {
    // pair number rises with lambda on the minus branch, falls on the plus branch
    let rising = branch == GapBranch::Minus;
    let excess = |lambda: f64| {
        let (x, _) = occupations_at(e0, delta, lambda, branch);
        let d = lv.pairs(x) - p;
        if rising {
            d
        } else {
            -d
        }
    };
    let scale = 1.0 + e0[0].abs().max(e0[1].abs()) + delta[0].abs().max(delta[1].abs());
    let mid = 0.5 * (e0[0] + e0[1]);
    let mut width = scale;
    let (mut lo, mut hi) = (mid - width, mid + width);
    let mut tries = 0;
    while excess(lo) > 0.0 || excess(hi) < 0.0 {
        width *= 4.0;
        lo = mid - width;
        hi = mid + width;
        tries += 1;
        if tries > 200 || !width.is_finite() {
            return Err(BcsError::NoBracket);
        }
    }
    for _ in 0..2000 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if excess(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    // pick the end closer to the target
    Ok(if excess(lo).abs() <= excess(hi).abs() { lo } else { hi })
}

/// Fermi sea: fill level 1 first.
fn normal_solution(model: &PairingModel, p: u32, branch: GapBranch, shift: MeanFieldShift) -> BcsSolution {
    let lv = Levels::new(model);
    let n1 = p.min(model.omega1);
    let x = [
        f64::from(n1) / lv.omega[0],
        f64::from(p - n1) / lv.omega[1],
    ];
    let y = [1.0 - x[0], 1.0 - x[1]];
    let s = [(x[0] * y[0]).sqrt(), (x[1] * y[1]).sqrt()];
    let et = lv.shifted(x, shift);
    let gaps = lv.gaps(s);
    assemble(model, p, &lv, x, y, gaps, et, f64::NAN, branch, shift, true, 0.0, 0)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    model: &PairingModel,
    p: u32,
    lv: &Levels,
    x: [f64; 2],
    y: [f64; 2],
    gaps: [f64; 2],
    e0: [f64; 2],
    lambda: f64,
    branch: GapBranch,
    shift: MeanFieldShift,
    normal: bool,
    residual: f64,
    iterations: usize,
) -> BcsSolution {
    let s = [(x[0] * y[0]).sqrt(), (x[1] * y[1]).sqrt()];
    let lam = if lambda.is_nan() { 0.0 } else { lambda };
    BcsSolution {
        model: *model,
        p,
        u1: y[0].sqrt(),
        v1: x[0].sqrt(),
        u2: y[1].sqrt(),
        v2: x[1].sqrt(),
        lambda: lam,
        delta1: -gaps[0],
        delta2: -gaps[1],
        eps_tilde1: e0[0] - lam,
        eps_tilde2: e0[1] - lam,
        energy: lv.energy(x, s),
        n_expect: 2.0 * lv.pairs(x),
        branch,
        shift,
        normal,
        residual,
        iterations,
    }
}

/// Solves one branch.
pub fn solve_bcs_branch(
    model: &PairingModel,
    occ: Occupancy,
    branch: GapBranch,
    opts: &BcsOptions,
) -> Result<BcsSolution, BcsError> {
    check_occupancy(model, occ)?;
    let p = occ.p;
    if p == 0 || p == model.max_pairs() {
        return Ok(normal_solution(model, p, branch, opts.shift));
    }
    let lv = Levels::new(model);
    let pf = f64::from(p);
    let seed = pf / (lv.omega[0] + lv.omega[1]);
    let mut x = [seed; 2];
    let g_scale = lv.g[0][0].max(lv.g[0][1]).max(lv.g[1][1]);
    let mut delta = [g_scale * pf.sqrt(); 2];
    let collapse = 1e-12;
    if g_scale == 0.0 {
        return Ok(normal_solution(model, p, branch, opts.shift));
    }

    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let e0 = lv.shifted(x, opts.shift);
        let lambda = solve_lambda(&lv, e0, delta, pf, branch)?;
        let (xn, yn) = occupations_at(e0, delta, lambda, branch);
        let dn = lv.gaps([(xn[0] * yn[0]).sqrt(), (xn[1] * yn[1]).sqrt()]);
        let dscale = 1.0 + delta[0].max(delta[1]);
        change = (0..2)
            .map(|i| (xn[i] - x[i]).abs() + (dn[i] - delta[i]).abs() / dscale)
            .fold(0.0, f64::max);
        let a = opts.damping;
        for i in 0..2 {
            x[i] = a * x[i] + (1.0 - a) * xn[i];
            delta[i] = a * delta[i] + (1.0 - a) * dn[i];
        }
        if delta[0].max(delta[1]) < collapse {
            return Ok(normal_solution(model, p, branch, opts.shift));
        }
        if change < opts.tolerance {
            // one undamped update from the damped iterate
            let e0 = lv.shifted(x, opts.shift);
            let lambda = solve_lambda(&lv, e0, delta, pf, branch)?;
            let (xf, yf) = occupations_at(e0, delta, lambda, branch);
            let sf = [(xf[0] * yf[0]).sqrt(), (xf[1] * yf[1]).sqrt()];
            let df = lv.gaps(sf);
            let ef = lv.shifted(xf, opts.shift);
            let residual = (0..2)
                .map(|i| (xf[i] - x[i]).abs().max((df[i] - delta[i]).abs() / dscale))
                .fold(0.0, f64::max);
            return Ok(assemble(
                model, p, &lv, xf, yf, df, ef, lambda, branch, opts.shift, false, residual, it,
            ));
        }
    }
    Err(BcsError::ConvergenceFailure {
        iterations: opts.max_iterations,
        change,
    })
}

/// Both branches side by side.
#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub minus: Result<BcsSolution, String>,
    pub plus: Result<BcsSolution, String>,
    pub selected: Option<GapBranch>,
}

pub fn branch_report(model: &PairingModel, occ: Occupancy, opts: &BcsOptions) -> BranchReport {
    let minus = solve_bcs_branch(model, occ, GapBranch::Minus, opts);
    let plus = solve_bcs_branch(model, occ, GapBranch::Plus, opts);
    let selected = match (&minus, &plus) {
        (Ok(a), Ok(b)) => Some(if b.energy < a.energy { GapBranch::Plus } else { GapBranch::Minus }),
        (Ok(_), Err(_)) => Some(GapBranch::Minus),
        (Err(_), Ok(_)) => Some(GapBranch::Plus),
        (Err(_), Err(_)) => None,
    };
    BranchReport {
        minus: minus.map_err(|e| e.to_string()),
        plus: plus.map_err(|e| e.to_string()),
        selected,
    }
}

/// Solves with `opts`; without a fixed branch, the lower-energy one wins.
pub fn solve_bcs_with(model: &PairingModel, occ: Occupancy, opts: &BcsOptions) -> Result<BcsSolution, BcsError> {
    if let Some(b) = opts.branch {
        return solve_bcs_branch(model, occ, b, opts);
    }
    let minus = solve_bcs_branch(model, occ, GapBranch::Minus, opts);
    let plus = solve_bcs_branch(model, occ, GapBranch::Plus, opts);
    match (minus, plus) {
        (Ok(a), Ok(b)) => Ok(if b.energy < a.energy { b } else { a }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

pub fn solve_bcs(model: &PairingModel, occ: Occupancy) -> Result<BcsSolution, BcsError> {
    solve_bcs_with(model, occ, &BcsOptions::default())
}

/// Levels of qubits `A` and `B`.
pub fn qubit_levels(t: PairType) -> (usize, usize) {
    match t {
        PairType::SameLower => (0, 0),
        PairType::Cross => (0, 1),
        PairType::SameUpper => (1, 1),
    }
}

/// The BCS state is a product over modes, so any two modes give a product
/// of single-qubit states.
pub fn bcs_two_qubit_state(sol: &BcsSolution, t: PairType) -> Result<XState, BcsError> {
    check_pair_type(&sol.model, t)?;
    let (a, b) = qubit_levels(t);
    let (xa, ya) = sol.occupation(a);
    let (xb, yb) = sol.occupation(b);
    Ok(XState::from_unnormalized(
        [ya * yb, ya * xb, xa * yb, xa * xb],
        0.0,
        Some(t),
        Source::Bcs,
    )?)
}
