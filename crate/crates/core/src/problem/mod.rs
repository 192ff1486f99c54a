//! Problem data for u_t − a²u_xx + b·u = f on [l1, l2] with
//! α·u + β·u_x = g at each finite end.

mod functions;
mod json;

pub use functions::{
    numerical_laplace, Fn1, Fn2, LaplaceFn, SourceFunction, SourceLaplaceFn, SourceTerm, SpaceExpr,
    SpaceFunction, TimeExpr, TimeFunction, TransformedSource,
};
pub use json::{BoundaryDocument, Endpoint, ProblemDocument, SourceTermDocument, SCHEMA_VERSION};

use crate::error::{Error, Result};
use std::fmt;

/// Relative threshold below which β counts as zero.
pub const BETA_ZERO_TOL: f64 = 1e-12;

/// One of the two ends of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    L1,
    L2,
}

impl End {
    pub fn name(self) -> &'static str {
        match self {
            End::L1 => "l1",
            End::L2 => "l2",
        }
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    /// β = 0
    Dirichlet,
    /// β ≠ 0 (includes pure Neumann)
    Robin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    RobinRobin,
    RobinDirichlet,
    DirichletRobin,
    DirichletDirichlet,
}

impl CaseKind {
    pub fn from_ends(left: EndKind, right: EndKind) -> Self {
        match (left, right) {
            (EndKind::Robin, EndKind::Robin) => CaseKind::RobinRobin,
            (EndKind::Robin, EndKind::Dirichlet) => CaseKind::RobinDirichlet,
            (EndKind::Dirichlet, EndKind::Robin) => CaseKind::DirichletRobin,
            (EndKind::Dirichlet, EndKind::Dirichlet) => CaseKind::DirichletDirichlet,
        }
    }

    pub fn end(self, end: End) -> EndKind {
        let (l, r) = match self {
            CaseKind::RobinRobin => (EndKind::Robin, EndKind::Robin),
            CaseKind::RobinDirichlet => (EndKind::Robin, EndKind::Dirichlet),
            CaseKind::DirichletRobin => (EndKind::Dirichlet, EndKind::Robin),
            CaseKind::DirichletDirichlet => (EndKind::Dirichlet, EndKind::Dirichlet),
        };
        match end {
            End::L1 => l,
            End::L2 => r,
        }
    }
}

/// α·u + β·u_x = g(t) at one end.
#[derive(Debug, Clone)]
pub struct BoundaryCondition {
    pub alpha: f64,
    pub beta: f64,
    pub g: TimeFunction,
}

impl BoundaryCondition {
    pub fn new(alpha: f64, beta: f64, g: TimeFunction) -> Self {
        Self { alpha, beta, g }
    }

    pub fn dirichlet(g: TimeFunction) -> Self {
        Self::new(1.0, 0.0, g)
    }

    pub fn neumann(g: TimeFunction) -> Self {
        Self::new(0.0, 1.0, g)
    }

    pub fn is_beta_zero(&self) -> bool {
        self.beta.abs() <= BETA_ZERO_TOL * self.alpha.abs().max(self.beta.abs())
    }

    pub fn kind(&self) -> EndKind {
        if self.is_beta_zero() {
            EndKind::Dirichlet
        } else {
            EndKind::Robin
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.alpha * self.alpha + self.beta * self.beta <= f64::EPSILON * f64::EPSILON
    }

    /// (α, β, g) → (cα, cβ, cg).
    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.alpha, c * self.beta, self.g.scaled(c))
    }
}

/// The full initial-boundary-value problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// Diffusion coefficient (the equation carries a²).
    pub a: f64,
    /// Reaction rate.
    pub b: f64,
    pub l1: f64,
    pub l2: f64,
    pub horizon: f64,
    pub source: SourceFunction,
    pub phi: SpaceFunction,
    /// Condition at l1; `None` exactly when l1 = −∞.
    pub bc1: Option<BoundaryCondition>,
    /// Condition at l2; `None` exactly when l2 = +∞.
    pub bc2: Option<BoundaryCondition>,
}

impl ProblemSpec {
    /// A bounded problem with zero source and unit horizon.
    pub fn bounded(
        a: f64,
        b: f64,
        l1: f64,
        l2: f64,
        phi: SpaceFunction,
        bc1: BoundaryCondition,
        bc2: BoundaryCondition,
    ) -> Self {
        Self {
            a,
            b,
            l1,
            l2,
            horizon: 1.0,
            source: SourceFunction::zero(),
            phi,
            bc1: Some(bc1),
            bc2: Some(bc2),
        }
    }

    pub fn with_source(mut self, source: SourceFunction) -> Self {
        self.source = source;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    /// The same problem seen from the other end: x ↦ l1 + l2 − x. The
    /// interval is unchanged, the ends swap and u_x changes sign, so each β
    /// flips.
    pub fn mirrored(&self) -> Result<Self> {
        if !self.is_bounded() {
            return Err(Error::Spec("only a bounded problem can be mirrored".into()));
        }
        let c = self.l1 + self.l2;
        let flip = |b: &Option<BoundaryCondition>| {
            b.as_ref()
                .map(|b| BoundaryCondition::new(b.alpha, -b.beta, b.g.clone()))
        };
        Ok(Self {
            a: self.a,
            b: self.b,
            l1: self.l1,
            l2: self.l2,
            horizon: self.horizon,
            source: self.source.reflected(c),
            phi: self.phi.reflected(c),
            bc1: flip(&self.bc2),
            bc2: flip(&self.bc1),
        })
    }

    pub fn length(&self) -> f64 {
        self.l2 - self.l1
    }

    pub fn is_bounded(&self) -> bool {
        self.l1.is_finite() && self.l2.is_finite()
    }

    pub fn endpoint(&self, end: End) -> f64 {
        match end {
            End::L1 => self.l1,
            End::L2 => self.l2,
        }
    }

    pub fn bc(&self, end: End) -> Option<&BoundaryCondition> {
        match end {
            End::L1 => self.bc1.as_ref(),
            End::L2 => self.bc2.as_ref(),
        }
    }

    /// The condition at `end`, or a spec error if none is attached.
    pub fn require_bc(&self, end: End) -> Result<&BoundaryCondition> {
        self.bc(end)
            .ok_or_else(|| Error::Spec(format!("no boundary condition at {end}")))
    }

    /// Breakpoints of φ and f clipped to the interval, both ends included.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .phi
            .breakpoints()
            .iter()
            .copied()
            .chain(self.source.breakpoints())
            .filter(|x| *x > self.l1 && *x < self.l2)
            .collect();
        pts.push(self.l1);
        pts.push(self.l2);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Breakpoints strictly inside (lo, hi).
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        self.phi
            .breakpoints()
            .iter()
            .copied()
            .chain(self.source.breakpoints())
            .filter(move |x| *x > lo && *x < hi)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Returns the problem if it validates, otherwise the violations as an error.
    pub fn validated(self) -> Result<Self> {
        validate(&self).into_result()?;
        Ok(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations joined into a spec error.
    pub fn into_result(self) -> Result<Vec<String>> {
        if self.is_ok() {
            Ok(self.warnings)
        } else {
            Err(Error::Spec(self.violations.join("; ")))
        }
    }
}

pub fn validate(spec: &ProblemSpec) -> ValidationReport {
    let mut r = ValidationReport::default();
    if !(spec.a > 0.0 && spec.a.is_finite()) {
        r.violations
            .push(format!("a must be positive and finite (got {})", spec.a));
    }
    if !(spec.b >= 0.0 && spec.b.is_finite()) {
        r.violations
            .push(format!("b must be nonnegative and finite (got {})", spec.b));
    }
    if !(spec.l1 < spec.l2) || spec.l1 == f64::INFINITY || spec.l2 == f64::NEG_INFINITY {
        r.violations
            .push(format!("empty interval [{}, {}]", spec.l1, spec.l2));
    }
    if !(spec.horizon > 0.0 && spec.horizon.is_finite()) {
        r.violations.push(format!(
            "horizon must be positive and finite (got {})",
            spec.horizon
        ));
    }
    for (end, x, bc) in [(End::L1, spec.l1, &spec.bc1), (End::L2, spec.l2, &spec.bc2)] {
        match (x.is_finite(), bc) {
            (true, None) => r
                .violations
                .push(format!("{} missing at finite end", bc_name(end))),
            (false, Some(_)) => r
                .violations
                .push(format!("{} given at an infinite end", bc_name(end))),
            (false, None) => {}
            (true, Some(bc)) => {
                if !bc.alpha.is_finite() || !bc.beta.is_finite() {
                    r.violations
                        .push(format!("{} has non-finite coefficients", bc_name(end)));
                } else if bc.is_degenerate() {
                    r.violations.push(format!("{} degenerate", bc_name(end)));
                } else if growing_mode(end, bc) {
                    r.warnings.push(format!(
                        "{} has alpha*beta {} 0: the condition feeds energy in, the Laplace-domain \
                         system can be singular at some p > 0 and the solution may grow in time",
                        bc_name(end),
                        if end == End::L1 { ">" } else { "<" }
                    ));
                }
            }
        }
    }
    r
}

fn bc_name(end: End) -> &'static str {
    match end {
        End::L1 => "bc1",
        End::L2 => "bc2",
    }
}

/// Robin conditions whose sign makes the boundary a source rather than a sink.
fn growing_mode(end: End, bc: &BoundaryCondition) -> bool {
    if bc.is_beta_zero() || bc.alpha == 0.0 {
        return false;
    }
    let s = bc.alpha * bc.beta;
    match end {
        End::L1 => s > 0.0,
        End::L2 => s < 0.0,
    }
}

/// Boundary case of a bounded problem.
pub fn classify_case(spec: &ProblemSpec) -> Result<CaseKind> {
    let l = spec.require_bc(End::L1)?.kind();
    let r = spec.require_bc(End::L2)?.kind();
    Ok(CaseKind::from_ends(l, r))
}
