//! Numerical inversion of Laplace transforms.
//!
//! Gaver–Stehfest samples F on the real axis:
//! `f(t) ≈ (ln 2/t) Σ_{k=1}^{N} V_k F(k ln 2/t)`.
//! Fixed Talbot samples F on the contour s(θ) = rθ(cot θ + i), r = 2M/(5t).

use crate::error::{Error, Result};
use crate::field::{Provenance, SolutionField};
use crate::laplace::OperationalSolution;
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InversionMethod {
    /// Even N with 4 ≤ N ≤ 20.
    GaverStehfest { n: usize },
    /// M ≥ 8 contour nodes.
    FixedTalbot { m: usize },
}

impl Default for InversionMethod {
    fn default() -> Self {
        InversionMethod::GaverStehfest { n: 14 }
    }
}

impl fmt::Display for InversionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InversionMethod::GaverStehfest { n } => write!(f, "gaver-stehfest(N={n})"),
            InversionMethod::FixedTalbot { m } => write!(f, "fixed-talbot(M={m})"),
        }
    }
}

impl InversionMethod {
    pub fn check(&self) -> Result<()> {
        match *self {
            InversionMethod::GaverStehfest { n } if n % 2 != 0 || !(4..=20).contains(&n) => {
                Err(Error::Usage(format!(
                    "Gaver-Stehfest needs an even N in [4, 20], got {n}"
                )))
            }
            InversionMethod::FixedTalbot { m } if m < 8 => {
                Err(Error::Usage(format!("fixed Talbot needs M >= 8, got {m}")))
            }
            _ => Ok(()),
        }
    }
}

/// Something that can be sampled in the Laplace domain.
pub trait Transform: Sync {
    fn at_real(&self, p: f64) -> Result<f64>;

    fn at_complex(&self, _p: Complex64) -> Result<Complex64> {
        Err(Error::Spec(
            "transform cannot be evaluated at complex p".into(),
        ))
    }
}

/// A transform given by a pair of closures.
pub struct FnTransform<R, C> {
    real: R,
    complex: C,
}

impl<R, C> FnTransform<R, C>
where
    R: Fn(f64) -> Result<f64> + Sync,
    C: Fn(Complex64) -> Result<Complex64> + Sync,
{
    pub fn new(real: R, complex: C) -> Self {
        Self { real, complex }
    }
}

impl<R, C> Transform for FnTransform<R, C>
where
    R: Fn(f64) -> Result<f64> + Sync,
    C: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn at_real(&self, p: f64) -> Result<f64> {
        (self.real)(p)
    }

    fn at_complex(&self, p: Complex64) -> Result<Complex64> {
        (self.complex)(p)
    }
}

/// A real-axis-only transform.
pub fn real_transform(f: impl Fn(f64) -> Result<f64> + Sync) -> impl Transform {
    FnTransform::new(f, |_| {
        Err(Error::Spec(
            "transform cannot be evaluated at complex p".into(),
        ))
    })
}

/// A family of transforms indexed by x, sampled all at once per p.
pub trait FieldTransform: Sync {
    fn real_at(&self, xs: &[f64], p: f64) -> Result<Vec<f64>>;
    fn complex_at(&self, xs: &[f64], p: Complex64) -> Result<Vec<Complex64>>;
}

/// U(x, p) of a problem.
pub struct OperationalU<'s, 'a>(pub &'s OperationalSolution<'a>);
/// U_x(x, p) of a problem.
pub struct OperationalUx<'s, 'a>(pub &'s OperationalSolution<'a>);

impl FieldTransform for OperationalU<'_, '_> {
    fn real_at(&self, xs: &[f64], p: f64) -> Result<Vec<f64>> {
        let at = self.0.at(p)?;
        xs.iter().map(|&x| at.u(x)).collect()
    }
    fn complex_at(&self, xs: &[f64], p: Complex64) -> Result<Vec<Complex64>> {
        let at = self.0.at(p)?;
        xs.iter().map(|&x| at.u(x)).collect()
    }
}

impl FieldTransform for OperationalUx<'_, '_> {
    fn real_at(&self, xs: &[f64], p: f64) -> Result<Vec<f64>> {
        let at = self.0.at(p)?;
        xs.iter().map(|&x| at.ux(x)).collect()
    }
    fn complex_at(&self, xs: &[f64], p: Complex64) -> Result<Vec<Complex64>> {
        let at = self.0.at(p)?;
        xs.iter().map(|&x| at.ux(x)).collect()
    }
}

/// A method with its node weights precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Inverter {
    method: InversionMethod,
    weights: Vec<f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Stehfest weights V_1..V_N.
pub fn stehfest_weights(n: usize) -> Vec<f64> {
    let h = n / 2;
    (1..=n)
        .map(|k| {
            let mut sum = 0.0;
            for j in k.div_ceil(2)..=k.min(h) {
                sum += (j as f64).powi(h as i32) * factorial(2 * j)
                    / (factorial(h - j)
                        * factorial(j)
                        * factorial(j - 1)
                        * factorial(k - j)
                        * factorial(2 * j - k));
            }
            if (k + h) % 2 == 0 {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

impl Inverter {
    pub fn new(method: InversionMethod) -> Result<Self> {
        method.check()?;
        let weights = match method {
            InversionMethod::GaverStehfest { n } => stehfest_weights(n),
            InversionMethod::FixedTalbot { .. } => Vec::new(),
        };
        Ok(Self { method, weights })
    }

    pub fn method(&self) -> InversionMethod {
        self.method
    }

    fn check_t(t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "inversion needs finite t > 0, got {t}"
            )))
        }
    }

    fn finish(v: f64, t: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!(
                "inversion sum is not finite at t = {t}"
            )))
        }
    }

    /// f(t) from its transform.
    pub fn invert(&self, f: &(impl Transform + ?Sized), t: f64) -> Result<f64> {
        Self::check_t(t)?;
        match self.method {
            InversionMethod::GaverStehfest { .. } => {
                let q = LN_2 / t;
                let mut acc = 0.0;
                for (k, w) in self.weights.iter().enumerate() {
                    acc += w * f.at_real((k + 1) as f64 * q)?;
                }
                Self::finish(acc * q, t)
            }
            InversionMethod::FixedTalbot { m } => {
                let r = 2.0 * m as f64 / (5.0 * t);
                let mut acc = 0.5 * f.at_real(r)? * (r * t).exp();
                for k in 1..m {
                    let (s, dz) = talbot_node(k, m, r);
                    acc += ((s * t).exp() * f.at_complex(s)? * dz).re;
                }
                Self::finish(acc * r / m as f64, t)
            }
        }
    }

    /// Inversion plus the Gaver–Stehfest stabilisation estimate
    /// |f_N − f_{N−2}| (absent for Talbot).
    pub fn invert_with_estimate(
        &self,
        f: &(impl Transform + ?Sized),
        t: f64,
    ) -> Result<InversionEstimate> {
        let value = self.invert(f, t)?;
        let estimate = match self.method {
            InversionMethod::GaverStehfest { n } if n >= 6 => {
                let lower =
                    Inverter::new(InversionMethod::GaverStehfest { n: n - 2 })?.invert(f, t)?;
                Some((value - lower).abs())
            }
            _ => None,
        };
        let flagged = estimate.is_some_and(|e| e > 1e-3 * value.abs());
        Ok(InversionEstimate {
            value,
            estimate,
            flagged,
        })
    }

    /// Invert a family at all `xs` for one t.
    pub fn invert_column(
        &self,
        family: &(impl FieldTransform + ?Sized),
        xs: &[f64],
        t: f64,
    ) -> Result<Vec<f64>> {
        Self::check_t(t)?;
        let mut acc = vec![0.0; xs.len()];
        match self.method {
            InversionMethod::GaverStehfest { .. } => {
                let q = LN_2 / t;
                for (k, w) in self.weights.iter().enumerate() {
                    let v = family.real_at(xs, (k + 1) as f64 * q)?;
                    for (a, v) in acc.iter_mut().zip(v) {
                        *a += w * v;
                    }
                }
                acc.iter_mut().for_each(|a| *a *= q);
            }
            InversionMethod::FixedTalbot { m } => {
                let r = 2.0 * m as f64 / (5.0 * t);
                let e0 = 0.5 * (r * t).exp();
                for (a, v) in acc.iter_mut().zip(family.real_at(xs, r)?) {
                    *a += e0 * v;
                }
                for k in 1..m {
                    let (s, dz) = talbot_node(k, m, r);
                    let w = (s * t).exp() * dz;
                    for (a, v) in acc.iter_mut().zip(family.complex_at(xs, s)?) {
                        *a += (w * v).re;
                    }
                }
                acc.iter_mut().for_each(|a| *a *= r / m as f64);
            }
        }
        acc.into_iter().map(|v| Self::finish(v, t)).collect()
    }
}

/// Node s_k and the factor (1 + iσ_k) of the fixed Talbot rule.
fn talbot_node(k: usize, m: usize, r: f64) -> (Complex64, Complex64) {
    let theta = k as f64 * PI / m as f64;
    let cot = 1.0 / theta.tan();
    let s = Complex64::new(r * theta * cot, r * theta);
    let sigma = theta + (theta * cot - 1.0) * cot;
    (s, Complex64::new(1.0, sigma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionEstimate {
    pub value: f64,
    pub estimate: Option<f64>,
    /// Estimate exceeds 1e-3 of the value.
    pub flagged: bool,
}

pub fn invert(f: &(impl Transform + ?Sized), t: f64, method: InversionMethod) -> Result<f64> {
    Inverter::new(method)?.invert(f, t)
}

/// Pointwise inversion over a grid; failing columns are recorded, not fatal.
pub fn invert_grid(
    family: &(impl FieldTransform + ?Sized),
    xs: &[f64],
    ts: &[f64],
    method: InversionMethod,
) -> Result<SolutionField> {
    let inv = Inverter::new(method)?;
    let mut field = SolutionField::new(xs.to_vec(), ts.to_vec(), Provenance::Operational, false);
    for (it, &t) in ts.iter().enumerate() {
        match inv.invert_column(family, xs, t) {
            Ok(col) => {
                let nx = xs.len();
                field.u[it * nx..(it + 1) * nx].copy_from_slice(&col);
            }
            Err(e) => {
                for ix in 0..xs.len() {
                    field.fail(ix, it, e.to_string());
                }
            }
        }
    }
    Ok(field)
}
