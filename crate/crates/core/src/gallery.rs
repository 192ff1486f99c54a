//! Canned problems with closed-form references.
//!
//! The closed forms are written out independently of the general solvers so
//! they can serve as oracles for them.

use crate::error::{Error, Result};
use crate::problem::{BoundaryCondition, ProblemSpec, SourceFunction, SpaceFunction, TimeFunction};
use libm::erf;
use std::f64::consts::PI;

/// Triangle initial data on [0, 10] with zero Dirichlet ends, a² = 1/4:
/// `φ(x) = x/2` on [0, 5], `5 − x/2` on [5, 10].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleExample {
    pub l: f64,
    pub u0: f64,
    pub a: f64,
}

impl TriangleExample {
    pub fn phi(&self, x: f64) -> f64 {
        if x <= self.l / 2.0 {
            x / self.l * self.u0
        } else {
            (self.l - x) / self.l * self.u0
        }
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        if x < self.l / 2.0 {
            self.u0 / self.l
        } else {
            -self.u0 / self.l
        }
    }

    fn mode(&self, k: usize) -> (f64, f64, f64) {
        let m = (2 * k - 1) as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let c = 4.0 * self.u0 / (PI * PI) * sign / (m * m);
        let w = m * PI / self.l;
        (c, w, self.a * self.a * w * w)
    }

    /// Partial sum of the first `k` odd sine modes.
    pub fn series(&self, x: f64, t: f64, k: usize) -> f64 {
        (1..=k)
            .map(|j| {
                let (c, w, lam) = self.mode(j);
                c * (-lam * t).exp() * (w * x).sin()
            })
            .sum()
    }

    pub fn series_x(&self, x: f64, t: f64, k: usize) -> f64 {
        (1..=k)
            .map(|j| {
                let (c, w, lam) = self.mode(j);
                c * w * (-lam * t).exp() * (w * x).cos()
            })
            .sum()
    }

    /// U_x(0, p); U_x(10, p) is its negative. Valid for the printed
    /// parameters l = 10, u0 = 5, a = 1/2.
    pub fn ux0_laplace(&self, p: f64) -> f64 {
        let q = p.sqrt();
        let (e10, e20) = ((-10.0 * q).exp(), (-20.0 * q).exp());
        -0.5 * (-e20 + 2.0 * e10 - 1.0) / ((e20 + 1.0) * p)
    }

    /// Transform of the free-space part r.
    pub fn r_laplace(&self, x: f64, p: f64) -> f64 {
        let q = p.sqrt();
        let tails = -(-2.0 * x * q).exp() - (2.0 * (x - 10.0) * q).exp();
        let body = if x <= 5.0 {
            -4.0 * x * q + 2.0 * (2.0 * (x - 5.0) * q).exp()
        } else {
            4.0 * x * q - 40.0 * q + 2.0 * (-2.0 * (x - 5.0) * q).exp()
        };
        -(body + tails) / (8.0 * p * q)
    }

    pub fn u_laplace(&self, x: f64, p: f64) -> f64 {
        let q = p.sqrt();
        let ux0 = self.ux0_laplace(p);
        let ux10 = -ux0;
        (ux10 * (-2.0 * (10.0 - x) * q).exp() - ux0 * (-2.0 * x * q).exp()) / (4.0 * q)
            + self.r_laplace(x, p)
    }

    /// Short-time interior approximation r(x, t) in closed form.
    pub fn short_time_u(&self, x: f64, t: f64) -> f64 {
        let s = t.sqrt();
        0.25 * ((x - 10.0) * erf((x - 10.0) / s)
            + (10.0 - 2.0 * x) * erf((x - 5.0) / s)
            + x * erf(x / s))
            + s / (4.0 * PI.sqrt())
                * (-2.0 * (-(x - 5.0).powi(2) / t).exp()
                    + (-(x - 10.0).powi(2) / t).exp()
                    + (-x * x / t).exp())
    }

    /// Short-time flux at x = 0; the flux at x = 10 is its negative.
    pub fn short_time_flux_l1(&self, t: f64) -> f64 {
        -0.5 * erf(10.0 / t.sqrt()) + erf(5.0 / t.sqrt())
    }

    pub fn short_time_flux_l2(&self, t: f64) -> f64 {
        -self.short_time_flux_l1(t)
    }

    /// lim_{t→0⁺} of the two boundary fluxes, equal to φ′ at the ends.
    pub fn flux_limits(&self) -> (f64, f64) {
        (self.phi_prime(0.0), self.phi_prime(self.l))
    }
}

/// Constant initial temperature on [0, ∞), fixed boundary temperature and a
/// uniform heat source `w/(cγ)`, with b = 0.
///
/// The textbook form of this problem writes the diffusivity as `a`; here the
/// PDE coefficient is `a²`, so the textbook solution is recovered with
/// `a ↦ √a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteExample {
    pub t0: f64,
    pub ta: f64,
    pub w: f64,
    pub c: f64,
    pub gamma: f64,
    pub a: f64,
}

impl SemiInfiniteExample {
    fn q(&self) -> f64 {
        self.w / (self.c * self.gamma)
    }

    pub fn u0_laplace(&self, p: f64) -> f64 {
        self.ta / p
    }

    pub fn r_laplace(&self, x: f64, p: f64) -> f64 {
        let e = (-x * p.sqrt() / self.a).exp();
        self.t0 / p + self.q() / (p * p) - self.t0 / (2.0 * p) * e - self.q() / (2.0 * p * p) * e
    }

    pub fn ux0_laplace(&self, p: f64) -> f64 {
        2.0 * p.sqrt() / self.a * self.r_laplace(0.0, p) - self.ta / (self.a * p.sqrt())
    }

    pub fn u_laplace(&self, x: f64, p: f64) -> f64 {
        let e = (-x * p.sqrt() / self.a).exp();
        self.t0 / p + self.q() / (p * p) + (self.ta - self.t0) / p * e - self.q() / (p * p) * e
    }
}

/// First Dirichlet eigenmode `sin(πx/L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenmode {
    pub a: f64,
    pub b: f64,
    pub l: f64,
}

impl Eigenmode {
    fn rate(&self) -> f64 {
        self.a * self.a * PI * PI / (self.l * self.l) + self.b
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        (-self.rate() * t).exp() * (PI * x / self.l).sin()
    }

    pub fn ux(&self, x: f64, t: f64) -> f64 {
        PI / self.l * (-self.rate() * t).exp() * (PI * x / self.l).cos()
    }

    pub fn u_laplace(&self, x: f64, p: f64) -> f64 {
        (PI * x / self.l).sin() / (p + self.rate())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Triangle(TriangleExample),
    SemiInfinite(SemiInfiniteExample),
    Eigenmode(Eigenmode),
    Zero,
}

#[derive(Debug, Clone)]
pub struct NamedProblem {
    pub id: &'static str,
    pub title: &'static str,
    pub spec: ProblemSpec,
    pub reference: Reference,
}

pub const IDS: [&str; 4] = ["example_6_1", "luikov", "eigenmode", "zero"];

pub fn example_6_1() -> NamedProblem {
    let r = TriangleExample {
        l: 10.0,
        u0: 5.0,
        a: 0.5,
    };
    let phi = SpaceFunction::piecewise_linear(vec![[0.0, 0.0], [5.0, 2.5], [10.0, 0.0]])
        .expect("valid triangle");
    for x in [0.0, 1.3, 5.0, 7.7, 10.0] {
        debug_assert!((phi.value(x) - r.phi(x)).abs() < 1e-15);
    }
    let spec = ProblemSpec::bounded(
        r.a,
        0.0,
        0.0,
        r.l,
        phi,
        BoundaryCondition::dirichlet(TimeFunction::zero()),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
    )
    .with_horizon(0.01);
    NamedProblem {
        id: "example_6_1",
        title: "triangle initial data, zero Dirichlet ends, l = 10, a^2 = 1/4",
        spec,
        reference: Reference::Triangle(r),
    }
}

pub fn luikov_semi_infinite(
    t0: f64,
    ta: f64,
    w: f64,
    c: f64,
    gamma: f64,
    a: f64,
) -> Result<NamedProblem> {
    if c * gamma == 0.0 || !(c * gamma).is_finite() {
        return Err(Error::Spec(format!(
            "c*gamma must be finite and nonzero (got {})",
            c * gamma
        )));
    }
    let r = SemiInfiniteExample {
        t0,
        ta,
        w,
        c,
        gamma,
        a,
    };
    let mut spec = ProblemSpec::bounded(
        a,
        0.0,
        0.0,
        1.0,
        SpaceFunction::constant(t0),
        BoundaryCondition::dirichlet(TimeFunction::constant(ta)),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
    )
    .with_source(SourceFunction::uniform(TimeFunction::constant(
        w / (c * gamma),
    )));
    spec.l2 = f64::INFINITY;
    spec.bc2 = None;
    Ok(NamedProblem {
        id: "luikov",
        title: "semi-infinite rod, constant initial and boundary temperature, uniform source",
        spec: spec.validated()?,
        reference: Reference::SemiInfinite(r),
    })
}

pub fn eigenmode(a: f64, b: f64, l: f64) -> NamedProblem {
    let r = Eigenmode { a, b, l };
    let spec = ProblemSpec::bounded(
        a,
        b,
        0.0,
        l,
        SpaceFunction::sine(1.0, PI / l, 0.0),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
    );
    NamedProblem {
        id: "eigenmode",
        title: "first Dirichlet eigenmode",
        spec,
        reference: Reference::Eigenmode(r),
    }
}

pub fn zero() -> NamedProblem {
    let spec = ProblemSpec::bounded(
        1.0,
        0.0,
        0.0,
        1.0,
        SpaceFunction::zero(),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
        BoundaryCondition::dirichlet(TimeFunction::zero()),
    );
    NamedProblem {
        id: "zero",
        title: "zero data",
        spec,
        reference: Reference::Zero,
    }
}

/// Gallery problem by id, with default parameters.
pub fn by_id(id: &str) -> Result<NamedProblem> {
    match id {
        "example_6_1" => Ok(example_6_1()),
        "luikov" => luikov_semi_infinite(1.0, 3.0, 2.0, 1.0, 0.5, 0.8),
        "eigenmode" => Ok(eigenmode(0.5, 0.1, 2.0)),
        "zero" => Ok(zero()),
        other => Err(Error::Usage(format!(
            "unknown gallery problem {other:?}; known: {}",
            IDS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RField;
    use crate::laplace::OperationalSolution;
    use crate::oracles::SeriesSolution;
    use crate::problem::End;
    use crate::short_time::{ShortTimeConfig, ShortTimeSolver};

    fn triangle() -> TriangleExample {
        match example_6_1().reference {
            Reference::Triangle(r) => r,
            _ => unreachable!(),
        }
    }

    #[test]
    fn triangle_data() {
        let g = example_6_1();
        assert_eq!(g.spec.phi.value(5.0), 2.5);
        assert_eq!(g.spec.phi.value(0.0), 0.0);
        assert_eq!(g.spec.phi.value(10.0), 0.0);
        assert_eq!(triangle().flux_limits(), (0.5, -0.5));
    }

    #[test]
    fn triangle_closed_forms_agree_with_general_machinery() {
        let g = example_6_1();
        let r = triangle();
        let op = OperationalSolution::new(&g.spec);
        for p in [1.0, 10.0, 100.0] {
            let at = op.at(p).unwrap();
            let tr = at.traces().unwrap();
            assert!((tr.ux_l1 - r.ux0_laplace(p)).abs() <= 1e-12 * r.ux0_laplace(p).abs());
            assert!((tr.ux_l2 + r.ux0_laplace(p)).abs() <= 1e-12 * r.ux0_laplace(p).abs());
            for x in [0.5, 2.0, 5.0, 7.0, 9.9] {
                let u: f64 = at.u(x).unwrap();
                assert!(
                    (u - r.u_laplace(x, p)).abs() <= 1e-11 * r.u_laplace(x, p).abs(),
                    "x={x} p={p}"
                );
            }
        }
        let rf = RField::new(&g.spec);
        for x in [0.3, 2.0, 4.99, 5.0, 8.0] {
            let v = rf.value(x, 0.01).unwrap();
            assert!((v - r.short_time_u(x, 0.01)).abs() < 1e-9, "x={x}");
        }
        assert!((r.short_time_u(5.0, 0.01) - 2.471791).abs() < 1e-6);
        let st = ShortTimeSolver::new(&g.spec, ShortTimeConfig::default()).unwrap();
        for t in [1e-4, 1e-2] {
            assert!(
                (st.boundary_flux_approx(End::L1, t).unwrap() - r.short_time_flux_l1(t)).abs()
                    < 1e-12
            );
            assert!(
                (st.boundary_flux_approx(End::L2, t).unwrap() - r.short_time_flux_l2(t)).abs()
                    < 1e-12
            );
        }
        let s = SeriesSolution::new(&g.spec, 20).unwrap();
        for x in [1.0, 5.0, 8.5] {
            assert!((s.value(x, 0.01) - r.series(x, 0.01, 20)).abs() < 1e-12);
            assert!((s.derivative(x, 0.01) - r.series_x(x, 0.01, 20)).abs() < 1e-12);
        }
    }

    #[test]
    fn semi_infinite_closed_forms() {
        let g = by_id("luikov").unwrap();
        let Reference::SemiInfinite(r) = g.reference else {
            unreachable!()
        };
        let op = OperationalSolution::new(&g.spec);
        for p in [0.5, 3.0, 40.0] {
            let (u0, ux0): (f64, f64) = op.at(p).unwrap().end_trace(End::L1).unwrap();
            assert!((u0 - r.u0_laplace(p)).abs() <= 1e-13 * u0.abs());
            assert!((ux0 - r.ux0_laplace(p)).abs() <= 1e-9 * r.ux0_laplace(p).abs());
            for x in [0.0, 0.4, 3.0] {
                assert!(
                    (op.r_of(x, p).unwrap() - r.r_laplace(x, p)).abs()
                        <= 1e-10 * r.r_laplace(x, p).abs()
                );
            }
        }
        assert!(luikov_semi_infinite(1.0, 2.0, 1.0, 0.0, 1.0, 1.0).is_err());
        // no forcing and no boundary jump: equilibrium
        let eq = SemiInfiniteExample {
            t0: 2.0,
            ta: 2.0,
            w: 0.0,
            c: 1.0,
            gamma: 1.0,
            a: 1.0,
        };
        assert!((eq.u_laplace(1.7, 3.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eigenmode_reference() {
        let g = by_id("eigenmode").unwrap();
        let Reference::Eigenmode(e) = g.reference else {
            unreachable!()
        };
        let op = OperationalSolution::new(&g.spec);
        for (x, p) in [(0.3, 1.0), (1.0, 7.0)] {
            let u: f64 = op.u_of(x, p).unwrap();
            assert!((u - e.u_laplace(x, p)).abs() < 1e-10 * e.u_laplace(x, p).abs());
        }
        assert!(by_id("nope").is_err());
        for id in IDS {
            assert_eq!(by_id(id).unwrap().id, id);
        }
    }
}
