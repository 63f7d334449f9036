//! Shared fixtures for the criterion benches.

use pairquant_core::model::{PairType, PairingModel};
use pairquant_core::scan::{Method, ScanSpec};

/// Uniform-strength model at `G = 0.6`.
pub fn uniform(omega: u32) -> PairingModel {
    PairingModel::symmetric(omega, 0.6).expect("valid model")
}

/// Full pair-number scan of a symmetric model.
pub fn full_scan(method: Method, omega: u32, t: PairType) -> ScanSpec {
    let m = uniform(omega);
    ScanSpec::new(method, m, 0, m.max_pairs(), t)
}
