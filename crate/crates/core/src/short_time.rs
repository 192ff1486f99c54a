//! Closed-form approximations valid on a first short time step [0, Δt].
//!
//! Away from the ends u ≈ r. At an end the boundary value and flux are
//! first-order expansions built from the large-p behaviour of the exact
//! transform: a Robin end convolves explicit kernels against g and r(end, ·),
//! a Dirichlet end returns g/α and builds the flux from g(0), g′, r(end, 0)
//! and r′(end, ·).
//!
//! Every Robin kernel is a multiple of
//! `E_ε(p) = p^{-1/2} + ε p^{-1} + (ε² − b/2) p^{-3/2}`
//! with `ε = aα/β` at l1 and `ε = −aα/β` at l2; its inverse is
//! `1/√(πt) + ε + 2(ε² − b/2)√(t/π)`. The truncation error is O(Δt).

use crate::chebyshev::Chebyshev;
use crate::error::{Error, Result};
use crate::field::{Provenance, SolutionField};
use crate::kernels::{KernelTolerances, RField};
use crate::problem::{classify_case, BoundaryCondition, CaseKind, End, EndKind, ProblemSpec};
use crate::quad::{integrate, integrate_points, QuadConfig};
use std::f64::consts::{FRAC_PI_2, PI};

/// `c_half·p^{-1/2} + c_one·p^{-1} + c_three_half·p^{-3/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExpansion {
    pub c_half: f64,
    pub c_one: f64,
    pub c_three_half: f64,
}

impl PExpansion {
    fn scaled_e(c: f64, eps: f64, b: f64) -> Self {
        Self {
            c_half: c,
            c_one: c * eps,
            c_three_half: c * (eps * eps - 0.5 * b),
        }
    }

    /// Inverse transform at t > 0.
    pub fn time(&self, t: f64) -> f64 {
        self.c_half / (PI * t).sqrt() + self.c_one + 2.0 * self.c_three_half * (t / PI).sqrt()
    }

    pub fn laplace(&self, p: f64) -> f64 {
        self.c_half / p.sqrt() + self.c_one / p + self.c_three_half / (p * p.sqrt())
    }
}

/// Kernels of a Robin end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinKernels {
    pub end: End,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Convolved with g in the boundary value.
    pub u1: PExpansion,
    /// Convolved with r(end, ·) in the boundary value.
    pub u2: PExpansion,
    /// Convolved with g in the flux.
    pub ux1: PExpansion,
    /// Convolved with r(end, ·) in the flux.
    pub ux2: PExpansion,
}

impl RobinKernels {
    pub fn new(end: End, a: f64, b: f64, bc: &BoundaryCondition) -> Self {
        let (alpha, beta) = (bc.alpha, bc.beta);
        let sign = match end {
            End::L1 => 1.0,
            End::L2 => -1.0,
        };
        let eps = sign * a * alpha / beta;
        Self {
            end,
            a,
            b,
            alpha,
            beta,
            u1: PExpansion::scaled_e(-sign * a / beta, eps, b),
            u2: PExpansion::scaled_e(2.0 * eps, eps, b),
            ux1: PExpansion::scaled_e(eps / beta, eps, b),
            ux2: PExpansion::scaled_e(-2.0 * alpha * eps / beta, eps, b),
        }
    }

    /// `1/β`, the weight of g in the flux.
    pub fn inv_beta(&self) -> f64 {
        1.0 / self.beta
    }

    /// `−2α/β`, the weight of r in the flux.
    pub fn flux_r_weight(&self) -> f64 {
        -2.0 * self.alpha / self.beta
    }

    fn denominator(&self, p: f64) -> f64 {
        let s = (self.b + p).sqrt();
        match self.end {
            End::L1 => self.beta * s - self.a * self.alpha,
            End::L2 => self.beta * s + self.a * self.alpha,
        }
    }

    /// Exact transforms that the four expansions approximate, written
    /// without cancellation: `[u1, u2, ux1, ux2]`.
    pub fn exact(&self, p: f64) -> [f64; 4] {
        let d = self.denominator(p);
        let (a, al, be) = (self.a, self.alpha, self.beta);
        match self.end {
            End::L1 => [
                -a / d,
                2.0 * a * al / d,
                a * al / (be * d),
                -2.0 * a * al * al / (be * d),
            ],
            End::L2 => [
                a / d,
                -2.0 * a * al / d,
                -a * al / (be * d),
                2.0 * a * al * al / (be * d),
            ],
        }
    }

    pub fn expansions(&self) -> [(&'static str, PExpansion); 4] {
        [
            ("u1", self.u1),
            ("u2", self.u2),
            ("ux1", self.ux1),
            ("ux2", self.ux2),
        ]
    }
}

/// Flux kernel of a Dirichlet end, `(bt + 1)/√(πt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletKernel {
    pub end: End,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

impl DirichletKernel {
    pub fn time(&self, t: f64) -> f64 {
        (self.b * t + 1.0) / (PI * t).sqrt()
    }

    pub fn expansion(&self) -> PExpansion {
        PExpansion {
            c_half: 1.0,
            c_one: 0.0,
            c_three_half: 0.5 * self.b,
        }
    }

    /// `√(b + p)/p`, approximated to O(p^{-5/2}).
    pub fn exact(&self, p: f64) -> f64 {
        (self.b + p).sqrt() / p
    }

    /// `1/a` and `1/α`.
    pub fn prefactors(&self) -> (f64, f64) {
        (1.0 / self.a, 1.0 / self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndKernels {
    Robin(RobinKernels),
    Dirichlet(DirichletKernel),
}

impl EndKernels {
    pub fn new(spec: &ProblemSpec, end: End) -> Result<Self> {
        let bc = spec.require_bc(end)?;
        Ok(match bc.kind() {
            EndKind::Robin => EndKernels::Robin(RobinKernels::new(end, spec.a, spec.b, bc)),
            EndKind::Dirichlet => EndKernels::Dirichlet(DirichletKernel {
                end,
                a: spec.a,
                b: spec.b,
                alpha: bc.alpha,
            }),
        })
    }
}

/// Kernels of both ends of a bounded problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionKernels {
    pub case: CaseKind,
    pub l1: EndKernels,
    pub l2: EndKernels,
}

impl ExpansionKernels {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        Ok(Self {
            case: classify_case(spec)?,
            l1: EndKernels::new(spec, End::L1)?,
            l2: EndKernels::new(spec, End::L2)?,
        })
    }

    pub fn end(&self, end: End) -> &EndKernels {
        match end {
            End::L1 => &self.l1,
            End::L2 => &self.l2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeConfig {
    /// Step length Δt; the expansions are meant for Δt ≤ 1e-2.
    pub dt: f64,
    /// Relative tolerance of each convolution.
    pub conv_tol: f64,
    /// Chebyshev nodes per tabulated boundary history.
    pub table_nodes: usize,
}

impl Default for ShortTimeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            conv_tol: 1e-10,
            table_nodes: 48,
        }
    }
}

impl ShortTimeConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Usage(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.conv_tol > 0.0 && self.conv_tol < 1.0) {
            return Err(Error::Usage(format!(
                "convolution tolerance out of range: {}",
                self.conv_tol
            )));
        }
        if self.table_nodes < 4 {
            return Err(Error::Usage("at least 4 table nodes are needed".into()));
        }
        Ok(())
    }
}

/// `∫_0^t k(t − τ) h(τ) dτ` where k and h may both carry a `^{-1/2}`
/// singularity at zero argument.
///
/// With `τ = t·sin²θ` the measure `2t sinθ cosθ dθ` cancels both
/// singularities and the integrand is smooth on (0, π/2).
pub fn convolve_singular(
    kernel: impl Fn(f64) -> f64,
    h: impl Fn(f64) -> f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("convolution needs t > 0, got {t}")));
    }
    let res = integrate(
        |th: f64| {
            let (s, c) = th.sin_cos();
            kernel(t * c * c) * h(t * s * s) * 2.0 * t * s * c
        },
        0.0,
        FRAC_PI_2,
        QuadConfig::new(tol),
    )
    .map_err(|e| Error::Numeric(format!("convolution failed: {e}")))?;
    Ok(res.value)
}

/// r(end, ·) history on (0, Δt], tabulated in σ = √t.
#[derive(Debug, Clone)]
struct EndTable {
    r0: f64,
    /// r(end, σ²)
    r: Chebyshev,
    /// σ·r′(end, σ²), smooth even when r′ ~ t^{-1/2}
    sigma_rt: Chebyshev,
}

impl EndTable {
    fn r(&self, t: f64) -> f64 {
        self.r.eval(t.sqrt())
    }

    fn rt(&self, t: f64) -> f64 {
        let s = t.sqrt();
        self.sigma_rt.eval(s) / s
    }
}

/// Short-time solver for one bounded problem and one step length.
#[derive(Debug)]
pub struct ShortTimeSolver<'a> {
    spec: &'a ProblemSpec,
    cfg: ShortTimeConfig,
    kernels: ExpansionKernels,
    rfield: RField<'a>,
    /// The problem under x ↦ l1 + l2 − x; the l2 end is evaluated as its l1
    /// end so mirror-symmetric data give mirror-symmetric results exactly.
    mirror: ProblemSpec,
    tables: [EndTable; 2],
}

fn table_tolerances() -> KernelTolerances {
    KernelTolerances {
        phi: QuadConfig::new(1e-13).with_abs(1e-300),
        duhamel: QuadConfig::new(1e-11).with_abs(1e-300),
        duhamel_inner: QuadConfig::new(1e-13).with_abs(1e-300),
    }
}

impl<'a> ShortTimeSolver<'a> {
    pub fn new(spec: &'a ProblemSpec, cfg: ShortTimeConfig) -> Result<Self> {
        cfg.check()?;
        spec.validate().into_result()?;
        let kernels = ExpansionKernels::new(spec)?;
        let rfield = RField::with_tolerances(spec, table_tolerances());
        let mirror = spec.mirrored()?;
        let hi = cfg.dt.sqrt();
        let table = |rfield: RField<'_>| -> Result<EndTable> {
            let x = spec.l1;
            Ok(EndTable {
                r0: rfield.boundary_initial(End::L1),
                r: Chebyshev::try_build(0.0, hi, cfg.table_nodes, |s| rfield.value(x, s * s))?,
                sigma_rt: Chebyshev::try_build(0.0, hi, cfg.table_nodes, |s| {
                    Ok::<_, Error>(s * rfield.time_derivative(x, s * s)?)
                })?,
            })
        };
        let tables = [
            table(rfield)?,
            table(RField::with_tolerances(&mirror, table_tolerances()))?,
        ];
        Ok(Self {
            spec,
            cfg,
            kernels,
            rfield,
            mirror,
            tables,
        })
    }

    pub fn config(&self) -> &ShortTimeConfig {
        &self.cfg
    }

    pub fn kernels(&self) -> &ExpansionKernels {
        &self.kernels
    }

    pub fn case(&self) -> CaseKind {
        self.kernels.case
    }

    fn table(&self, end: End) -> &EndTable {
        &self.tables[match end {
            End::L1 => 0,
            End::L2 => 1,
        }]
    }

    /// r(end, t), evaluated from the end's own side.
    fn boundary_r(&self, end: End, t: f64) -> Result<f64> {
        match end {
            End::L1 => self.rfield.value(self.spec.l1, t),
            End::L2 => {
                RField::with_tolerances(&self.mirror, table_tolerances()).value(self.mirror.l1, t)
            }
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t > 0.0 && t <= self.cfg.dt * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} is outside the step (0, {}]",
                self.cfg.dt
            )))
        }
    }

    fn check_interior(&self, x: f64) -> Result<()> {
        if x > self.spec.l1 && x < self.spec.l2 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} is not strictly inside ({}, {})",
                self.spec.l1, self.spec.l2
            )))
        }
    }

    /// u(x, t) ≈ r(x, t) inside the interval.
    pub fn interior_approx(&self, x: f64, t: f64) -> Result<f64> {
        self.check_interior(x)?;
        self.check_t(t)?;
        self.rfield.value(x, t)
    }

    /// u_x(x, t) ≈ r_x(x, t) inside the interval.
    pub fn interior_flux_approx(&self, x: f64, t: f64) -> Result<f64> {
        self.check_interior(x)?;
        self.check_t(t)?;
        self.rfield.space_derivative(x, t)
    }

    fn conv(&self, kernel: impl Fn(f64) -> f64, h: impl Fn(f64) -> f64, t: f64) -> Result<f64> {
        convolve_singular(kernel, h, t, self.cfg.conv_tol)
    }

    /// u(end, t).
    pub fn boundary_value_approx(&self, end: End, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let bc = self.spec.require_bc(end)?;
        match self.kernels.end(end) {
            EndKernels::Dirichlet(k) => Ok(bc.g.value(t) / k.alpha),
            EndKernels::Robin(k) => {
                let tab = self.table(end);
                let with_g = self.conv(|s| k.u1.time(s), |tau| bc.g.value(tau), t)?;
                let with_r = self.conv(|s| k.u2.time(s), |tau| tab.r(tau), t)?;
                Ok(with_g + with_r + 2.0 * self.boundary_r(end, t)?)
            }
        }
    }

    /// u_x(end, t).
    pub fn boundary_flux_approx(&self, end: End, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let bc = self.spec.require_bc(end)?;
        let tab = self.table(end);
        match self.kernels.end(end) {
            EndKernels::Robin(k) => {
                let with_g = self.conv(|s| k.ux1.time(s), |tau| bc.g.value(tau), t)?;
                let with_r = self.conv(|s| k.ux2.time(s), |tau| tab.r(tau), t)?;
                let r = self.boundary_r(end, t)?;
                Ok(k.inv_beta() * bc.g.value(t) + with_g + with_r + k.flux_r_weight() * r)
            }
            EndKernels::Dirichlet(k) => {
                // l1: (1/a)[(−g/α + 2r)(0)·k(t) + k ∗ (−g′/α + 2r′)]; l2 flips the sign
                let sign = match end {
                    End::L1 => 1.0,
                    End::L2 => -1.0,
                };
                let (inv_a, inv_alpha) = k.prefactors();
                let w0 = -bc.g.value_at_zero() * inv_alpha + 2.0 * tab.r0;
                let history = self.conv(
                    |s| k.time(s),
                    |tau| -bc.g.derivative(tau) * inv_alpha + 2.0 * tab.rt(tau),
                    t,
                )?;
                Ok(sign * inv_a * (w0 * k.time(t) + history))
            }
        }
    }

    /// u and u_x on a grid; points at an end use the boundary expansions.
    pub fn solve_grid(&self, xs: &[f64], ts: &[f64]) -> Result<SolutionField> {
        let mut field = SolutionField::new(xs.to_vec(), ts.to_vec(), Provenance::ShortTime, true);
        for (it, &t) in ts.iter().enumerate() {
            for (ix, &x) in xs.iter().enumerate() {
                let end = if x == self.spec.l1 {
                    Some(End::L1)
                } else if x == self.spec.l2 {
                    Some(End::L2)
                } else {
                    None
                };
                let pair = match end {
                    Some(e) => self
                        .boundary_value_approx(e, t)
                        .and_then(|u| Ok((u, self.boundary_flux_approx(e, t)?))),
                    None => self
                        .interior_approx(x, t)
                        .and_then(|u| Ok((u, self.interior_flux_approx(x, t)?))),
                };
                match pair {
                    Ok((u, ux)) => {
                        let k = field.index(ix, it);
                        field.u[k] = u;
                        if let Some(v) = field.ux.as_mut() {
                            v[k] = ux;
                        }
                    }
                    Err(e) => field.fail(ix, it, e.to_string()),
                }
            }
        }
        Ok(field)
    }
}

pub fn interior_approx(spec: &ProblemSpec, x: f64, t: f64, cfg: ShortTimeConfig) -> Result<f64> {
    ShortTimeSolver::new(spec, cfg)?.interior_approx(x, t)
}

pub fn boundary_value_approx(
    spec: &ProblemSpec,
    end: End,
    t: f64,
    cfg: ShortTimeConfig,
) -> Result<f64> {
    ShortTimeSolver::new(spec, cfg)?.boundary_value_approx(end, t)
}

pub fn boundary_flux_approx(
    spec: &ProblemSpec,
    end: End,
    t: f64,
    cfg: ShortTimeConfig,
) -> Result<f64> {
    ShortTimeSolver::new(spec, cfg)?.boundary_flux_approx(end, t)
}

/// How fast one expansion approaches its exact transform.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConsistency {
    pub name: &'static str,
    /// |L{kernel}(p) − exact(p)| per sample, with the transform of the
    /// time kernel computed by quadrature.
    pub errors: Vec<f64>,
    /// Decay exponents between consecutive samples.
    pub exponents: Vec<f64>,
    /// Exponent the truncation predicts.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub end: End,
    pub p: Vec<f64>,
    pub kernels: Vec<KernelConsistency>,
}

impl ConsistencyReport {
    /// Worst deviation of a measured exponent from the predicted one.
    /// Pairs where the expansion is exact to roundoff are skipped.
    pub fn worst_exponent_gap(&self) -> f64 {
        self.kernels
            .iter()
            .flat_map(|k| {
                k.exponents
                    .iter()
                    .filter(|e| e.is_finite())
                    .map(move |e| (e - k.expected).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// ∫_0^∞ e^{−pt} k(t) dt for kernels with at most a t^{-1/2} singularity.
fn numerical_transform(k: impl Fn(f64) -> f64, p: f64) -> Result<f64> {
    let w = 1.0 / p.sqrt();
    let pts = [0.0, w, 3.0 * w, 8.0 * w, 40.0 * w];
    let r = integrate_points(
        |s: f64| 2.0 * s * k(s * s) * (-p * s * s).exp(),
        &pts,
        QuadConfig::new(1e-14),
    )?;
    Ok(r.value)
}

fn exponents(p: &[f64], err: &[f64]) -> Vec<f64> {
    p.windows(2)
        .zip(err.windows(2))
        .map(|(p, e)| (e[0] / e[1]).ln() / (p[1] / p[0]).ln())
        .collect()
}

/// Measure, for each kernel of `end`, how the transform of the time kernel
/// approaches the exact transform as p grows. Samples should be ≥ 1e3.
pub fn laplace_consistency_check(
    spec: &ProblemSpec,
    end: End,
    p_samples: &[f64],
) -> Result<ConsistencyReport> {
    let p = p_samples.to_vec();
    let mut kernels = Vec::new();
    match EndKernels::new(spec, end)? {
        EndKernels::Robin(k) => {
            for (i, (name, e)) in k.expansions().into_iter().enumerate() {
                let errors = p
                    .iter()
                    .map(|&p| Ok((numerical_transform(|t| e.time(t), p)? - k.exact(p)[i]).abs()))
                    .collect::<Result<Vec<_>>>()?;
                kernels.push(KernelConsistency {
                    name,
                    exponents: exponents(&p, &errors),
                    errors,
                    expected: 2.0,
                });
            }
        }
        EndKernels::Dirichlet(k) => {
            let errors = p
                .iter()
                .map(|&p| Ok((numerical_transform(|t| k.time(t), p)? - k.exact(p)).abs()))
                .collect::<Result<Vec<_>>>()?;
            kernels.push(KernelConsistency {
                name: "ux",
                exponents: exponents(&p, &errors),
                errors,
                expected: 2.5,
            });
        }
    }
    Ok(ConsistencyReport { end, p, kernels })
}
