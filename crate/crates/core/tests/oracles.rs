use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use pairquant_core::bcs::solve_bcs;
use pairquant_core::crosscheck::{exact_vs_fock, pbcs_vs_fock, variational_ordering};
use pairquant_core::exact::{exact_rho, solve_exact};
use pairquant_core::fock::{dense_eigenvalues, fock_oracle, project_bcs, projected_rho};
use pairquant_core::model::{Occupancy, PairType, PairingModel, StrengthConvention};
use pairquant_core::projection::{pbcs_rho, residue};
use pairquant_core::tridiag::eigh_tridiagonal;
use pairquant_core::XState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact_binomial(n: u32, k: u32) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

fn pow(x: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}

/// Coefficient of `z^k` in `(y1 + z x1)^n1 (y2 + z x2)^n2`, in exact arithmetic.
fn rational_coefficient(x: [f64; 2], y: [f64; 2], n1: u32, n2: u32, k: u32) -> BigRational {
    let [x1, x2] = x.map(|v| BigRational::from_float(v).unwrap());
    let [y1, y2] = y.map(|v| BigRational::from_float(v).unwrap());
    let mut total = BigRational::zero();
    for i in 0..=k.min(n1) {
        let j = k - i;
        if j > n2 {
            continue;
        }
        let b = BigRational::from_integer(exact_binomial(n1, i) * exact_binomial(n2, j));
        total += b * pow(&x1, i) * pow(&y1, n1 - i) * pow(&x2, j) * pow(&y2, n2 - j);
    }
    total
}

#[test]
fn log_space_residues_match_exact_rationals() {
    for (omega1, omega2, g) in [(30, 30, 0.6), (12, 25, 0.9), (30, 7, 0.3)] {
        let m = PairingModel::new(omega1, omega2, 0.0, 1.0, g, g, g, StrengthConvention::TimesFour).unwrap();
        for p in [1, 5, (omega1 + omega2) / 2, omega1 + omega2 - 2] {
            let sol = solve_bcs(&m, Occupancy::new(p)).unwrap();
            let (x1, y1) = sol.occupation(0);
            let (x2, y2) = sol.occupation(1);
            for (v, e1, e2) in [(0, 0, 0), (1, 1, 0), (1, 0, 1), (2, 1, 1), (2, 2, 0)] {
                let k = p as i64 - v;
                if k < 0 {
                    continue;
                }
                let want = rational_coefficient([x1, x2], [y1, y2], omega1 - e1, omega2 - e2, k as u32)
                    .to_f64()
                    .unwrap();
                let got = residue(&m, &sol, p, v, e1, e2).unwrap().to_f64();
                let rel = ((got - want) / want).abs();
                assert!(rel < 1e-12, "({omega1},{omega2}) p={p} v={v} excl=({e1},{e2}): {got} vs {want}");
            }
        }
    }
}

fn occupied_a(r: &XState) -> f64 {
    r.rho33 + r.rho44
}

fn occupied_b(r: &XState) -> f64 {
    r.rho22 + r.rho44
}

#[test]
fn pair_number_sum_rule() {
    let m = PairingModel::new(4, 3, 0.0, 1.0, 0.8, 0.6, 0.5, StrengthConvention::TimesFour).unwrap();
    for p in 0..=m.max_pairs() {
        let occ = Occupancy::new(p);
        let sol = solve_bcs(&m, occ).unwrap();
        let pbcs = pbcs_rho(&m, &sol, p, PairType::Cross).unwrap();
        let exact = exact_rho(&solve_exact(&m, occ).unwrap(), PairType::Cross).unwrap();
        let (_, fock, _) = fock_oracle(&m, occ, PairType::Cross).unwrap();
        for r in [&pbcs, &exact, &fock] {
            let n = 4.0 * occupied_a(r) + 3.0 * occupied_b(r);
            assert!((n - f64::from(p)).abs() < 1e-10, "p={p}: {n}");
        }
        let proj = project_bcs(&m, &sol, occ).unwrap();
        let (pr, _) = projected_rho(&m, &proj, PairType::Cross).unwrap();
        assert!(pr.max_abs_diff(&pbcs) < 1e-10);
    }
}

#[test]
fn oracle_battery_on_uneven_models() {
    for (o1, o2, g11, g12, g22) in [(2, 3, 0.4, 0.9, 0.7), (4, 2, 1.1, 0.3, 0.6), (1, 4, 0.6, 0.6, 0.6)] {
        let m = PairingModel::new(o1, o2, 0.0, 1.0, g11, g12, g22, StrengthConvention::TimesFour).unwrap();
        for c in exact_vs_fock(&m, 1e-10)
            .into_iter()
            .chain(pbcs_vs_fock(&m, 1e-10))
            .chain([variational_ordering(&m, 1e-9)])
        {
            assert!(c.passed, "{}: {:e}", c.name, c.max_error);
        }
    }
}

#[test]
fn raw_convention_and_swapped_levels() {
    let raw = PairingModel::new(3, 3, 0.0, 1.0, 0.6, 0.6, 0.6, StrengthConvention::Raw).unwrap();
    let swapped = PairingModel::new(3, 2, 1.0, 0.0, 0.6, 0.6, 0.6, StrengthConvention::TimesFour).unwrap();
    for m in [raw, swapped] {
        for c in exact_vs_fock(&m, 1e-10).into_iter().chain(pbcs_vs_fock(&m, 1e-10)) {
            assert!(c.passed, "{}: {:e}", c.name, c.max_error);
        }
    }
}

#[test]
fn variational_ordering_at_omega_twenty() {
    let m = PairingModel::symmetric(20, 0.6).unwrap();
    for p in 0..=40 {
        let occ = Occupancy::new(p);
        let e0 = solve_exact(&m, occ).unwrap().e0;
        let sol = solve_bcs(&m, occ).unwrap();
        let ep = pairquant_core::pbcs_energy(&m, &sol, p).unwrap();
        assert!(e0 <= ep + 1e-9, "p={p}: E0 {e0} > E_PBCS {ep}");
        assert!(ep <= sol.energy + 1e-9, "p={p}: E_PBCS {ep} > E_BCS {}", sol.energy);
    }
}

#[test]
fn tridiagonal_solver_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1usize, 2, 3, 10, 57, 121] {
        for _ in 0..5 {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let off: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ours = eigh_tridiagonal(&diag, &off).unwrap();
            let mut dense = dense_eigenvalues(&diag, &off);
            dense.sort_by(f64::total_cmp);
            for (a, b) in ours.values.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
            for (val, vec) in ours.values.iter().zip(&ours.vectors) {
                for i in 0..n {
                    let mut hv = diag[i] * vec[i];
                    if i > 0 {
                        hv += off[i - 1] * vec[i - 1];
                    }
                    if i + 1 < n {
                        hv += off[i] * vec[i + 1];
                    }
                    assert!((hv - val * vec[i]).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn chemical_potential_increases_with_filling() {
    let m = PairingModel::symmetric(20, 0.6).unwrap();
    let lambdas: Vec<f64> = (1..40)
        .map(|p| solve_bcs(&m, Occupancy::new(p)).unwrap().lambda)
        .collect();
    for w in lambdas.windows(2) {
        assert!(w[1] > w[0], "{lambdas:?}");
    }
}

#[test]
fn bcs_number_constraint_holds() {
    let m = PairingModel::new(7, 11, 0.0, 1.0, 0.5, 0.7, 0.9, StrengthConvention::TimesFour).unwrap();
    for p in 1..18 {
        let s = solve_bcs(&m, Occupancy::new(p)).unwrap();
        assert!((s.n_expect - 2.0 * f64::from(p)).abs() < 1e-9, "p={p}: {}", s.n_expect);
    }
}

#[test]
fn exact_ground_state_is_an_eigenvector() {
    let m = PairingModel::symmetric(120, 0.6).unwrap();
    for p in [0, 4, 60, 120, 239, 240] {
        let st = solve_exact(&m, Occupancy::new(p)).unwrap();
        assert!(st.residual() < 1e-8, "p={p}: {}", st.residual());
    }
}
