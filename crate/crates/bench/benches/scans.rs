use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pairquant_bench::{full_scan, uniform};
use pairquant_core::bcs::solve_bcs;
use pairquant_core::model::{Occupancy, PairType};
use pairquant_core::projection::{pbcs_rho, residue};
use pairquant_core::scan::{run_scan_with_threads, Method};

fn scans(c: &mut Criterion) {
    let pbcs = full_scan(Method::Pbcs, 20, PairType::Cross);
    c.bench_function("pbcs scan omega=20", |b| {
        b.iter(|| run_scan_with_threads(black_box(&pbcs), 1).unwrap())
    });
    let exact = full_scan(Method::Exact, 120, PairType::Cross);
    c.bench_function("exact scan omega=120", |b| {
        b.iter(|| run_scan_with_threads(black_box(&exact), 1).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    let m = uniform(120);
    let sol = solve_bcs(&m, Occupancy::new(4)).unwrap();
    c.bench_function("bcs solve omega=120 p=4", |b| {
        b.iter(|| solve_bcs(black_box(&m), Occupancy::new(4)).unwrap())
    });
    c.bench_function("residue omega=120 p=120", |b| {
        b.iter(|| residue(black_box(&m), &sol, 120, 1, 1, 1).unwrap())
    });
    c.bench_function("pbcs rho omega=120 p=4", |b| {
        b.iter(|| pbcs_rho(black_box(&m), &sol, 4, PairType::Cross).unwrap())
    });
}

criterion_group!(benches, scans, kernels);
criterion_main!(benches);
