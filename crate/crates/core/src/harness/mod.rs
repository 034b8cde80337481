//! Experiment plumbing: configuration, seeded streams, single runs,
//! parameter sweeps, and the file formats they emit.

pub mod config;
pub mod diagnose;
pub mod io;
pub mod rng;
pub mod run;
pub mod sweep;

pub use config::{BoundInputsConfig, ModelSelection, RunConfig, SweepConfig, ThetaMax};
pub use diagnose::{diagnose, DiagnoseInputs, DiagnoseReport};
pub use run::{resolve_params, run, run_with_model, simulate, Budget, RunOutcome, RunSummary};
pub use sweep::{replication_means, sweep, sweep_with_model, SweepRow};
