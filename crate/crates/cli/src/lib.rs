//! Batch front-end for the reaction-diffusion solvers.

// `!(x > 0.0)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod bench;
pub mod config;
pub mod csvio;
pub mod error;
pub mod pipeline;
pub mod summary;

pub use config::{MethodParams, MethodSpec, Pipeline, ProblemSource, RunConfig, XGrid};
pub use error::{exit, CliError, CliResult};
pub use pipeline::{run, solve_field, write_summary, RunOutcome};
