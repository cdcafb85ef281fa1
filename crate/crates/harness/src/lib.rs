//! Instance I/O, workload generation, experiment runners and reports for
//! `boundedwfa-core`.

pub mod error;
pub mod experiment;
pub mod generate;
pub mod instance;
pub mod report;
pub mod trace_csv;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Algorithm, Experiment, ExperimentParams, Summary, Trace};
pub use generate::{generate, GenKind, GenSpec};
pub use instance::{load_instance, read_instance, Instance, InstanceDoc};
pub use report::{compare_report, Report};
pub use trace_csv::{read_trace, write_trace, TraceFile, TraceMeta};
