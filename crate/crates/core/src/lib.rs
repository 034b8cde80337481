//! Online control of constrained renewal systems.
//!
//! A renewal system runs in frames. At the start of each frame the
//! controller sees a random event, picks an action, and the frame then
//! produces a penalty, a length in slots, and a vector of resource use. The
//! goal is the smallest long-run penalty per slot while every resource stays
//! below its per-slot budget.
//!
//! * [`controller`]: the per-frame drift-plus-penalty rule with virtual
//!   queues and a trimmed pseudo average of the penalty ratio.
//! * [`models`]: the model interface, the file-downloading model and a
//!   table-driven synthetic model.
//! * [`oracle`]: the exact optimum over stationary randomized policies via
//!   a Charnes–Cooper linear program.
//! * [`diagnostics`]: analysis quantities computed from recorded runs.
//! * [`harness`]: configuration, seeded runs, sweeps and output files.
//!
//! ```
//! use renewal_opt::controller::ControllerParams;
//! use renewal_opt::harness::{simulate, Budget};
//! use renewal_opt::models::{FileDownloadModel, FilePenalty};
//!
//! let model = FileDownloadModel::new(FilePenalty::ActiveSlot);
//! let params = ControllerParams::new(100.0, 0.7, 10.0).unwrap();
//! let out = simulate(&model, params, Budget::Frames(10_000), 42, false).unwrap();
//! assert!(out.summary.avg_resource_ratios[0] < 1.1);
//! ```

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod models;
pub mod oracle;

pub use controller::{ControllerParams, ControllerState, FrameRecord, PerformanceTriple};
pub use error::{Error, Result};
pub use models::RenewalModel;
