//! History-discarding restarts for online algorithms.
//!
//! An α-competitive algorithm that forgets its history once the cost paid in
//! the current phase reaches α(α+ε)·B/ε, where B bounds the distance terms
//! d(x,y) + d(z,x) of the phase, stays (α+ε)-competitive. For MTS the bound
//! is B = 2Δ; for k-server it is B = 2(k−1)D with D maintained online over
//! the phase's set of interest.

mod audit;
mod engine;
mod params;

pub use audit::{audit_condition1, PhaseAudit, PhaseOracle, PhaseRecord};
pub use engine::{
    run_phased, run_phased_kserver, run_phased_mts, KServerStepper, MtsStepper, PhaseStepper, RunOptions, Served,
};
pub use params::{kserver_threshold, mts_threshold, phase_length_bound, PhaseParams};
