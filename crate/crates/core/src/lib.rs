//! Work Function Algorithm for metrical task systems and the k-server
//! problem, with a restart scheme that bounds the history each request has
//! to look at.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below fix the scalar to `f64`, which is what the instance
//! format and the CLI use.

pub mod error;
pub mod kserver;
pub mod metric;
pub mod mts;
pub mod phases;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result};
pub use kserver::{Configuration, KServerInstance};
pub use metric::{MetricError, MetricSpace};
pub use mts::MtsInstance;
pub use phases::{PhaseAudit, PhaseParams, RunOptions};
pub use scalar::Scalar;
pub use trace::{RunTrace, StepRecord};

pub type MetricSpaceF64 = metric::MetricSpace<f64>;
pub type MetricSpaceF32 = metric::MetricSpace<f32>;
pub type MtsInstanceF64 = mts::MtsInstance<f64>;
pub type KServerInstanceF64 = kserver::KServerInstance<f64>;
pub type KServerInstanceF32 = kserver::KServerInstance<f32>;
pub type StateWorkFunctionF64 = mts::StateWorkFunction<f64>;
pub type ConfigWorkFunctionF64 = kserver::ConfigWorkFunction<f64>;
pub type PhaseParamsF64 = phases::PhaseParams<f64>;
pub type MtsTraceF64 = trace::RunTrace<f64, usize>;
pub type KServerTraceF64 = trace::RunTrace<f64, Configuration>;
pub type MtsAuditF64 = phases::PhaseAudit<f64, usize>;
pub type KServerAuditF64 = phases::PhaseAudit<f64, Configuration>;
