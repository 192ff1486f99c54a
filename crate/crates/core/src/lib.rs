//! Semi-analytical solvers for the one-dimensional reaction–diffusion problem
//!
//! ```text
//! u_t − a²·u_xx + b·u = f(x, t),   l1 < x < l2, t > 0
//! u(x, 0) = φ(x)
//! α1·u(l1, t) + β1·u_x(l1, t) = g1(t)
//! α2·u(l2, t) + β2·u_x(l2, t) = g2(t)
//! ```
//!
//! The exact solution is assembled in the Laplace domain ([`laplace`]) and
//! inverted numerically ([`inversion`]); for small times the boundary values
//! and fluxes are also available as closed-form expansions ([`short_time`]).
//! Fourier-series and Crank–Nicolson reference solvers live in [`oracles`].

// `!(x > 0.0)` is deliberate throughout: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod field;
pub mod gallery;
pub mod inversion;
pub mod kernels;
pub mod laplace;
pub mod oracles;
pub mod problem;
pub mod quad;
pub mod scalar;
pub mod short_time;

pub use error::{Error, Result};
pub use field::{PointFailure, Provenance, SolutionField};
pub use gallery::{by_id, NamedProblem};
pub use inversion::{invert, invert_grid, InversionMethod, Inverter, Transform};
pub use kernels::{r_boundary_initial, r_field, r_time_derivative, RField};
pub use laplace::{
    det_s, ode_residual, r_of, solve_traces, u_of, u_unbounded, BoundaryTraces, OperationalSolution,
};
pub use oracles::{
    compare_fields, fd_solve, series_solve, ErrorMetrics, FdConfig, Region, SeriesSolution,
};
pub use problem::{
    classify_case, validate, BoundaryCondition, CaseKind, End, EndKind, ProblemSpec,
    SourceFunction, SourceTerm, SpaceExpr, SpaceFunction, TimeExpr, TimeFunction, ValidationReport,
};
pub use short_time::{laplace_consistency_check, ShortTimeConfig, ShortTimeSolver};
