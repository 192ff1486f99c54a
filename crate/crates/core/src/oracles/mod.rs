//! Independent reference solvers and field comparison.
//!
//! The sine series covers homogeneous Dirichlet problems without a source;
//! Crank–Nicolson covers any bounded problem.

mod compare;
mod fd;
mod series;

pub use compare::{compare_fields, Component, ErrorMetrics, GridRule, Region};
pub use fd::{fd_solve, FdConfig, FdSolution};
pub use series::{series_solve, SeriesSolution};
