//! The damped Gaussian kernel and the free-space field r(x, t) it generates
//! from the initial data and the source.
//!
//! With ξ = x + 2a√t·z the initial-data term becomes
//! `e^{−bt}/√π ∫ φ(x + 2a√t z) e^{−z²} dz`, and with θ = t − s² the Duhamel
//! term becomes `2/√π ∫₀^{√t} s e^{−bs²} ∫ f(x + 2as z, t − s²) e^{−z²} dz ds`.
//! Both integrands are smooth; z is truncated to |z| ≤ 6√2.

use crate::error::{Error, Result};
use crate::problem::{End, ProblemSpec};
use crate::quad::{integrate, integrate_points, QuadConfig};
use std::f64::consts::PI;

/// Half-width of the z window (|ξ − x| ≤ 12a√(2t)).
pub const Z_WINDOW: f64 = 6.0 * std::f64::consts::SQRT_2;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_6;

/// G(x, ξ, t) = e^{−bt} e^{−(ξ−x)²/(4a²t)} / (2a√(πt)).
pub fn gauss_kernel(x: f64, xi: f64, t: f64, a: f64, b: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel needs t > 0, got {t}")));
    }
    let d = xi - x;
    Ok((-b * t - d * d / (4.0 * a * a * t)).exp() / (2.0 * a * (PI * t).sqrt()))
}

/// Γ(t) = η e^{−bt − η²/(4a²t)} / (2a√π t^{3/2}), the inverse transform of
/// exp(−η√(b+p)/a).
pub fn gamma_inverse_chi(eta: f64, t: f64, a: f64, b: f64) -> Result<f64> {
    if !(eta > 0.0) || !(t > 0.0) {
        return Err(Error::Domain(format!(
            "needs eta > 0 and t > 0, got eta={eta}, t={t}"
        )));
    }
    Ok(eta * (-b * t - eta * eta / (4.0 * a * a * t)).exp() / (2.0 * a * PI.sqrt() * t.powf(1.5)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTolerances {
    /// Single integral over the initial data.
    pub phi: QuadConfig,
    /// Outer integral of the Duhamel term.
    pub duhamel: QuadConfig,
    /// Inner (space) integral of the Duhamel term.
    pub duhamel_inner: QuadConfig,
}

impl Default for KernelTolerances {
    fn default() -> Self {
        Self {
            phi: QuadConfig::new(1e-10).with_abs(1e-300),
            duhamel: QuadConfig::new(1e-8).with_abs(1e-300),
            duhamel_inner: QuadConfig::new(1e-10).with_abs(1e-300),
        }
    }
}

#[derive(Clone, Copy)]
enum Weight {
    Value,
    SpaceDerivative,
    TimeDerivative,
}

/// Evaluator of r(x, t) and its derivatives for one problem.
#[derive(Debug, Clone, Copy)]
pub struct RField<'a> {
    spec: &'a ProblemSpec,
    tol: KernelTolerances,
}

impl<'a> RField<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Self {
        Self::with_tolerances(spec, KernelTolerances::default())
    }

    pub fn with_tolerances(spec: &'a ProblemSpec, tol: KernelTolerances) -> Self {
        Self { spec, tol }
    }

    pub fn spec(&self) -> &'a ProblemSpec {
        self.spec
    }

    fn check(&self, x: f64, t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "r(x, t) needs finite t > 0, got {t}"
            )));
        }
        if !(x >= self.spec.l1 && x <= self.spec.l2) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.spec.l1, self.spec.l2
            )));
        }
        Ok(())
    }

    /// z-interval and interior z-breakpoints for scale h = 2a·(√t or s).
    fn z_points(&self, x: f64, h: f64) -> Vec<f64> {
        let lo = ((self.spec.l1 - x) / h).max(-Z_WINDOW);
        let hi = ((self.spec.l2 - x) / h).min(Z_WINDOW);
        if !(hi > lo) {
            return Vec::new();
        }
        let mut pts = vec![lo, hi];
        pts.extend(
            self.spec
                .breakpoints_in(x + lo * h, x + hi * h)
                .map(|p| (p - x) / h)
                .filter(|z| *z > lo && *z < hi),
        );
        if lo < 0.0 && hi > 0.0 {
            pts.push(0.0);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// e^{−bt}/√π ∫ profile(x + 2a√t z) e^{−z²} w(z) dz.
    fn gauss_average(
        &self,
        x: f64,
        t: f64,
        weight: Weight,
        profile: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        let a = self.spec.a;
        let st = t.sqrt();
        let h = 2.0 * a * st;
        let pts = self.z_points(x, h);
        if pts.is_empty() {
            return Ok(0.0);
        }
        let b = self.spec.b;
        let r = integrate_points(
            |z: f64| {
                let w = match weight {
                    Weight::Value => 1.0,
                    Weight::SpaceDerivative => z / (a * st),
                    Weight::TimeDerivative => (z * z - 0.5) / t - b,
                };
                profile(x + h * z) * (-z * z).exp() * w
            },
            &pts,
            self.tol.phi,
        )?;
        Ok((-b * t).exp() * FRAC_1_SQRT_PI * r.value)
    }

    /// Duhamel term (or its derivative) with the source replaced by `src`.
    fn duhamel(
        &self,
        x: f64,
        t: f64,
        weight: Weight,
        src: impl Fn(f64, f64) -> f64,
    ) -> Result<f64> {
        let (a, b) = (self.spec.a, self.spec.b);
        let mut failure = None;
        let outer = integrate(
            |s: f64| {
                if failure.is_some() || s <= 0.0 {
                    return 0.0;
                }
                let h = 2.0 * a * s;
                let pts = self.z_points(x, h);
                if pts.is_empty() {
                    return 0.0;
                }
                let theta = t - s * s;
                let inner = integrate_points(
                    |z: f64| {
                        let w = match weight {
                            Weight::SpaceDerivative => z,
                            _ => 1.0,
                        };
                        src(x + h * z, theta) * (-z * z).exp() * w
                    },
                    &pts,
                    self.tol.duhamel_inner,
                );
                match inner {
                    Ok(v) => {
                        let factor = match weight {
                            Weight::SpaceDerivative => 1.0 / a,
                            _ => s,
                        };
                        factor * (-b * s * s).exp() * v.value
                    }
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            t.sqrt(),
            self.tol.duhamel,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(2.0 * FRAC_1_SQRT_PI * outer?.value)
    }

    /// r(x, t).
    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        let phi = &self.spec.phi;
        let mut v = self.gauss_average(x, t, Weight::Value, |xi| phi.value(xi))?;
        if !self.spec.source.is_zero() {
            let f = &self.spec.source;
            v += self.duhamel(x, t, Weight::Value, |xi, th| f.value(xi, th))?;
        }
        Ok(v)
    }

    /// ∂r/∂t, differentiating the kernel under the integral sign.
    pub fn time_derivative(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        let phi = &self.spec.phi;
        let mut v = self.gauss_average(x, t, Weight::TimeDerivative, |xi| phi.value(xi))?;
        if !self.spec.source.is_zero() {
            let f = &self.spec.source;
            v += self.gauss_average(x, t, Weight::Value, |xi| f.value(xi, 0.0))?;
            v += self.duhamel(x, t, Weight::TimeDerivative, |xi, th| {
                f.time_derivative(xi, th)
            })?;
        }
        Ok(v)
    }

    /// ∂r/∂x.
    pub fn space_derivative(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        let phi = &self.spec.phi;
        let mut v = self.gauss_average(x, t, Weight::SpaceDerivative, |xi| phi.value(xi))?;
        if !self.spec.source.is_zero() {
            let f = &self.spec.source;
            v += self.duhamel(x, t, Weight::SpaceDerivative, |xi, th| f.value(xi, th))?;
        }
        Ok(v)
    }

    /// lim_{t→0⁺} r(end, t): half of the one-sided value of φ at the end.
    pub fn boundary_initial(&self, end: End) -> f64 {
        match end {
            End::L1 => 0.5 * self.spec.phi.value_right(self.spec.l1),
            End::L2 => 0.5 * self.spec.phi.value_left(self.spec.l2),
        }
    }
}

pub fn r_field(spec: &ProblemSpec, x: f64, t: f64) -> Result<f64> {
    RField::new(spec).value(x, t)
}

pub fn r_time_derivative(spec: &ProblemSpec, end: End, t: f64) -> Result<f64> {
    RField::new(spec).time_derivative(spec.endpoint(end), t)
}

pub fn r_boundary_initial(spec: &ProblemSpec, end: End) -> f64 {
    RField::new(spec).boundary_initial(end)
}
