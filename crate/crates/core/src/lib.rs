//! Two-level pairing model: mean-field BCS, number-projected BCS and exact
//! diagonalization, with two-qubit correlation measures of pair modes.

pub mod bcs;
pub mod crosscheck;
pub mod exact;
pub mod fock;
pub mod logspace;
pub mod model;
pub mod onelevel;
pub mod projection;
pub mod scan;
pub mod tridiag;
pub mod xstate;

pub use bcs::{bcs_two_qubit_state, solve_bcs, solve_bcs_with, BcsError, BcsOptions, BcsSolution, GapBranch, MeanFieldShift};
pub use exact::{exact_rho, solve_exact, ExactError, ExactState, QuasiSpinBasis};
pub use model::{validate, ModelError, Occupancy, PairType, PairingModel, StrengthConvention};
pub use onelevel::{one_level_limits, one_level_measures, one_level_rho, OneLevelParams};
pub use projection::{pbcs_energy, pbcs_rho, pbcs_state, PbcsState, ProjectionError};
pub use scan::{emit, run_scan, Format, Method, ScanError, ScanRow, ScanSpec, ScanTable};
pub use xstate::{concurrence, discord, CorrelationSet, MeasurementBranch, Source, XState, XStateError};
