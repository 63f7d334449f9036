//! Oracle cross-checks on small models, shared by the `validate` command
//! and the acceptance suite.

use serde::Serialize;

use crate::bcs::solve_bcs;
use crate::exact::{exact_rho, solve_exact};
use crate::fock::{fock_oracle, project_bcs, projected_rho};
use crate::model::{check_pair_type, Occupancy, PairType, PairingModel};
use crate::projection::{pbcs_energy, pbcs_rho, residue};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
}

impl Check {
    fn new(name: String, max_error: f64, tolerance: f64, points: usize) -> Self {
        Check {
            passed: max_error.is_finite() && max_error <= tolerance,
            name,
            max_error,
            tolerance,
            points,
        }
    }
}

#[derive(Debug, Default)]
struct Tally {
    max: f64,
    points: usize,
    failure: Option<String>,
}

impl Tally {
    fn add(&mut self, err: f64) {
        self.max = self.max.max(if err.is_nan() { f64::INFINITY } else { err });
        self.points += 1;
    }

    fn fail(&mut self, msg: String) {
        self.max = f64::INFINITY;
        self.failure.get_or_insert(msg);
    }

    fn finish(self, name: &str, tol: f64) -> Check {
        let name = match self.failure {
            Some(f) => format!("{name} ({f})"),
            None => name.to_string(),
        };
        Check::new(name, self.max, tol, self.points)
    }
}

/// Exact collective-basis results against the Fock-space ground state.
pub fn exact_vs_fock(model: &PairingModel, tol: f64) -> Vec<Check> {
    let mut energy = Tally::default();
    let mut rho = Tally::default();
    for p in 0..=model.max_pairs() {
        let occ = Occupancy::new(p);
        let st = match solve_exact(model, occ) {
            Ok(s) => s,
            Err(e) => {
                energy.fail(e.to_string());
                continue;
            }
        };
        for t in PairType::ALL {
            if check_pair_type(model, t).is_err() {
                continue;
            }
            match (fock_oracle(model, occ, t), exact_rho(&st, t)) {
                (Ok((e0, x, _)), Ok(r)) => {
                    energy.add((e0 - st.e0).abs());
                    rho.add(x.max_abs_diff(&r));
                }
                (Err(e), _) => rho.fail(e.to_string()),
                (_, Err(e)) => rho.fail(e.to_string()),
            }
        }
    }
    let tag = format!("({},{})", model.omega1, model.omega2);
    vec![
        energy.finish(&format!("exact energy vs Fock {tag}"), tol),
        rho.finish(&format!("exact rho vs Fock {tag}"), tol),
    ]
}

/// PBCS closed forms against explicit projection of the BCS product state.
pub fn pbcs_vs_fock(model: &PairingModel, tol: f64) -> Vec<Check> {
    let mut rho = Tally::default();
    let mut norm = Tally::default();
    let mut energy = Tally::default();
    for p in 0..=model.max_pairs() {
        let occ = Occupancy::new(p);
        let sol = match solve_bcs(model, occ) {
            Ok(s) => s,
            Err(e) => {
                rho.fail(e.to_string());
                continue;
            }
        };
        let proj = match project_bcs(model, &sol, occ) {
            Ok(x) => x,
            Err(e) => {
                rho.fail(e.to_string());
                continue;
            }
        };
        match residue(model, &sol, p, 0, 0, 0) {
            Ok(r) => norm.add((r.to_f64() - proj.norm_sq).abs() / proj.norm_sq),
            Err(e) => norm.fail(e.to_string()),
        }
        match pbcs_energy(model, &sol, p) {
            Ok(e) => energy.add((e - proj.energy).abs()),
            Err(e) => energy.fail(e.to_string()),
        }
        for t in PairType::ALL {
            if check_pair_type(model, t).is_err() {
                continue;
            }
            match (projected_rho(model, &proj, t), pbcs_rho(model, &sol, p, t)) {
                (Ok((x, _)), Ok(r)) => rho.add(x.max_abs_diff(&r)),
                (Err(e), _) => rho.fail(e.to_string()),
                (_, Err(e)) => rho.fail(e.to_string()),
            }
        }
    }
    let tag = format!("({},{})", model.omega1, model.omega2);
    vec![
        rho.finish(&format!("PBCS rho vs Fock projection {tag}"), tol),
        norm.finish(&format!("PBCS norm R0 vs Fock projection {tag}"), tol),
        energy.finish(&format!("PBCS energy vs Fock projection {tag}"), tol),
    ]
}

/// Variational ordering `E0 <= E_PBCS` and `E0 <= E_BCS`.
pub fn variational_ordering(model: &PairingModel, tol: f64) -> Check {
    let mut t = Tally::default();
    for p in 0..=model.max_pairs() {
        let occ = Occupancy::new(p);
        match (solve_exact(model, occ), solve_bcs(model, occ)) {
            (Ok(ex), Ok(b)) => match pbcs_energy(model, &b, p) {
                Ok(ep) => t.add((ex.e0 - ep).max(ex.e0 - b.energy).max(0.0)),
                Err(e) => t.fail(e.to_string()),
            },
            (Err(e), _) => t.fail(e.to_string()),
            (_, Err(e)) => t.fail(e.to_string()),
        }
    }
    t.finish(
        &format!("variational ordering ({},{})", model.omega1, model.omega2),
        tol,
    )
}

/// The default battery on the three small systems.
pub fn standard_checks(g: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for (o1, o2) in [(2, 2), (3, 3), (3, 2)] {
        let model = PairingModel::new(o1, o2, 0.0, 1.0, g, g, g, Default::default())
            .expect("small model is valid");
        out.extend(exact_vs_fock(&model, 1e-10));
        out.extend(pbcs_vs_fock(&model, 1e-10));
        out.push(variational_ordering(&model, 1e-9));
    }
    out
}
