//! User-supplied data: initial profiles, boundary data and sources.

use crate::error::{Error, Result};
use crate::quad::{integrate_points, QuadConfig};
use crate::scalar::Scalar;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Laplace transform of a time function, evaluated anywhere in Re p > 0.
pub type LaplaceFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
/// Laplace transform (in time) of a source, at position x.
pub type SourceLaplaceFn = Arc<dyn Fn(f64, Complex64) -> Complex64 + Send + Sync>;

fn check_table(points: &[[f64; 2]]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Spec("piecewise-linear table is empty".into()));
    }
    if points
        .iter()
        .any(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::Spec(
            "piecewise-linear table has non-finite entries".into(),
        ));
    }
    for w in points.windows(3) {
        if w[0][0] == w[2][0] {
            return Err(Error::Spec(format!(
                "piecewise-linear table repeats abscissa {} more than twice",
                w[0][0]
            )));
        }
    }
    if points.windows(2).any(|w| w[1][0] < w[0][0]) {
        return Err(Error::Spec(
            "piecewise-linear abscissae must be nondecreasing".into(),
        ));
    }
    Ok(())
}

fn lerp(p: [f64; 2], q: [f64; 2], x: f64) -> f64 {
    if x == q[0] {
        return q[1];
    }
    p[1] + (q[1] - p[1]) * (x - p[0]) / (q[0] - p[0])
}

/// Right-continuous evaluation of a table extended by constants.
fn table_right(points: &[[f64; 2]], x: f64) -> f64 {
    let i = points.partition_point(|p| p[0] <= x);
    match i {
        0 => points[0][1],
        i if i == points.len() => points[i - 1][1],
        i => lerp(points[i - 1], points[i], x),
    }
}

fn table_left(points: &[[f64; 2]], x: f64) -> f64 {
    let i = points.partition_point(|p| p[0] < x);
    match i {
        0 => points[0][1],
        i if i == points.len() => points[i - 1][1],
        i => lerp(points[i - 1], points[i], x),
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
}

/// Closed-form spatial profiles accepted in problem documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceExpr {
    Constant {
        value: f64,
    },
    /// `Σ coeffs[k]·x^k`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// Linear interpolation between `[x, y]` points, constant outside.
    /// An abscissa listed twice encodes a jump (left value first).
    PiecewiseLinear {
        points: Vec<[f64; 2]>,
    },
    /// `amplitude·sin(wavenumber·x + phase)`
    Sine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl SpaceExpr {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            SpaceExpr::Constant { value } => *value,
            SpaceExpr::Polynomial { coeffs } => horner(coeffs, x),
            SpaceExpr::PiecewiseLinear { points } => table_right(points, x),
            SpaceExpr::Sine {
                amplitude,
                wavenumber,
                phase,
            } => amplitude * (wavenumber * x + phase).sin(),
        }
    }

    fn value_left(&self, x: f64) -> f64 {
        match self {
            SpaceExpr::PiecewiseLinear { points } => table_left(points, x),
            other => other.value(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            SpaceExpr::PiecewiseLinear { points } => {
                let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
                xs.dedup();
                xs
            }
            _ => Vec::new(),
        }
    }

    fn check(&self) -> Result<()> {
        let finite = match self {
            SpaceExpr::Constant { value } => value.is_finite(),
            SpaceExpr::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            SpaceExpr::PiecewiseLinear { points } => return check_table(points),
            SpaceExpr::Sine {
                amplitude,
                wavenumber,
                phase,
            } => amplitude.is_finite() && wavenumber.is_finite() && phase.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Spec(
                "space expression has non-finite parameters".into(),
            ))
        }
    }

    /// x ↦ self(c − x).
    fn reflected(&self, c: f64) -> SpaceExpr {
        match self {
            SpaceExpr::Constant { .. } => self.clone(),
            SpaceExpr::Polynomial { coeffs } => {
                // Σ a_k (c − x)^k = Σ_j x^j (−1)^j Σ_{k≥j} C(k, j) c^{k−j} a_k
                let n = coeffs.len();
                let mut out = vec![0.0; n];
                for (k, a) in coeffs.iter().enumerate() {
                    let mut binom = 1.0;
                    for (j, o) in out.iter_mut().enumerate().take(k + 1) {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        *o += sign * binom * c.powi((k - j) as i32) * a;
                        binom = binom * (k - j) as f64 / (j + 1) as f64;
                    }
                }
                SpaceExpr::Polynomial { coeffs: out }
            }
            SpaceExpr::PiecewiseLinear { points } => SpaceExpr::PiecewiseLinear {
                points: points.iter().rev().map(|p| [c - p[0], p[1]]).collect(),
            },
            SpaceExpr::Sine {
                amplitude,
                wavenumber,
                phase,
            } => SpaceExpr::Sine {
                amplitude: *amplitude,
                wavenumber: -wavenumber,
                phase: wavenumber * c + phase,
            },
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            SpaceExpr::Constant { value } => *value == 0.0,
            SpaceExpr::Polynomial { coeffs } => coeffs.iter().all(|c| *c == 0.0),
            SpaceExpr::PiecewiseLinear { points } => points.iter().all(|p| p[1] == 0.0),
            SpaceExpr::Sine { amplitude, .. } => *amplitude == 0.0,
        }
    }
}

#[derive(Clone)]
enum SpaceRepr {
    Expr(SpaceExpr),
    Custom(Fn1),
}

/// A piecewise-continuous function of position with declared breakpoints.
#[derive(Clone)]
pub struct SpaceFunction {
    repr: SpaceRepr,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for SpaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            SpaceRepr::Expr(e) => write!(f, "SpaceFunction({e:?})"),
            SpaceRepr::Custom(_) => write!(
                f,
                "SpaceFunction(custom, breakpoints={:?})",
                self.breakpoints
            ),
        }
    }
}

impl SpaceFunction {
    pub fn from_expr(expr: SpaceExpr) -> Result<Self> {
        expr.check()?;
        let breakpoints = expr.breakpoints();
        Ok(Self {
            repr: SpaceRepr::Expr(expr),
            breakpoints,
        })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            repr: SpaceRepr::Expr(SpaceExpr::Constant { value }),
            breakpoints: Vec::new(),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self {
            repr: SpaceRepr::Expr(SpaceExpr::Polynomial { coeffs }),
            breakpoints: Vec::new(),
        }
    }

    pub fn piecewise_linear(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::from_expr(SpaceExpr::PiecewiseLinear { points })
    }

    pub fn sine(amplitude: f64, wavenumber: f64, phase: f64) -> Self {
        Self {
            repr: SpaceRepr::Expr(SpaceExpr::Sine {
                amplitude,
                wavenumber,
                phase,
            }),
            breakpoints: Vec::new(),
        }
    }

    /// An arbitrary closure. `breakpoints` must list every kink or jump.
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mut breakpoints: Vec<f64>,
    ) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self {
            repr: SpaceRepr::Custom(Arc::new(f)),
            breakpoints,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.repr {
            SpaceRepr::Expr(e) => e.value(x),
            SpaceRepr::Custom(f) => f(x),
        }
    }

    fn one_sided_step(x: f64) -> f64 {
        1e-9 * x.abs().max(1.0)
    }

    /// Limit from the right.
    pub fn value_right(&self, x: f64) -> f64 {
        match &self.repr {
            SpaceRepr::Expr(e) => e.value(x),
            SpaceRepr::Custom(f) => {
                if self.breakpoints.contains(&x) {
                    f(x + Self::one_sided_step(x))
                } else {
                    f(x)
                }
            }
        }
    }

    /// Limit from the left.
    pub fn value_left(&self, x: f64) -> f64 {
        match &self.repr {
            SpaceRepr::Expr(e) => e.value_left(x),
            SpaceRepr::Custom(f) => {
                if self.breakpoints.contains(&x) {
                    f(x - Self::one_sided_step(x))
                } else {
                    f(x)
                }
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn expr(&self) -> Option<&SpaceExpr> {
        match &self.repr {
            SpaceRepr::Expr(e) => Some(e),
            SpaceRepr::Custom(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, SpaceRepr::Expr(e) if e.is_zero())
    }

    /// The mirror image x ↦ self(c − x). Tables with exactly representable
    /// c − xᵢ map onto themselves bit for bit when symmetric.
    pub fn reflected(&self, c: f64) -> Self {
        let mut breakpoints: Vec<f64> = self.breakpoints.iter().rev().map(|b| c - b).collect();
        breakpoints.dedup();
        let repr = match &self.repr {
            SpaceRepr::Expr(e) => SpaceRepr::Expr(e.reflected(c)),
            SpaceRepr::Custom(f) => {
                let f = f.clone();
                SpaceRepr::Custom(Arc::new(move |x| f(c - x)))
            }
        };
        Self { repr, breakpoints }
    }
}

/// Closed-form time signals accepted in problem documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeExpr {
    Constant {
        value: f64,
    },
    /// `Σ coeffs[k]·t^k`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `amplitude·exp(rate·t)`
    Exponential {
        amplitude: f64,
        rate: f64,
    },
    /// Linear interpolation between `[t, y]` points, constant outside.
    PiecewiseLinear {
        points: Vec<[f64; 2]>,
    },
}

impl TimeExpr {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeExpr::Constant { value } => *value,
            TimeExpr::Polynomial { coeffs } => horner(coeffs, t),
            TimeExpr::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
            TimeExpr::PiecewiseLinear { points } => table_right(points, t),
        }
    }

    /// Right derivative.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TimeExpr::Constant { .. } => 0.0,
            TimeExpr::Polynomial { coeffs } => horner_derivative(coeffs, t),
            TimeExpr::Exponential { amplitude, rate } => amplitude * rate * (rate * t).exp(),
            TimeExpr::PiecewiseLinear { points } => {
                let i = points.partition_point(|p| p[0] <= t);
                if i == 0 || i == points.len() {
                    0.0
                } else {
                    let (p, q) = (points[i - 1], points[i]);
                    (q[1] - p[1]) / (q[0] - p[0])
                }
            }
        }
    }

    pub fn laplace<S: Scalar>(&self, p: S) -> S {
        match self {
            TimeExpr::Constant { value } => S::from_f64(*value) / p,
            TimeExpr::Polynomial { coeffs } => {
                let mut fact = 1.0;
                let mut pk = p;
                let mut acc = S::zero();
                for (k, c) in coeffs.iter().enumerate() {
                    if k > 0 {
                        fact *= k as f64;
                        pk = pk * p;
                    }
                    acc += S::from_f64(c * fact) / pk;
                }
                acc
            }
            TimeExpr::Exponential { amplitude, rate } => S::from_f64(*amplitude) / (p - *rate),
            TimeExpr::PiecewiseLinear { points } => {
                let mut knots: Vec<f64> =
                    points.iter().map(|q| q[0]).filter(|t| *t > 0.0).collect();
                knots.insert(0, 0.0);
                knots.dedup();
                let e = |t: f64| (p * (-t)).exp();
                let mut acc = S::zero();
                for w in knots.windows(2) {
                    let (t0, t1) = (w[0], w[1]);
                    let y0 = table_right(points, t0);
                    let y1 = table_left(points, t1);
                    let m = (y1 - y0) / (t1 - t0);
                    let (e0, e1) = (e(t0), e(t1));
                    acc += (e0 - e1) * y0 / p + ((e0 - e1) / (p * p) - e1 * (t1 - t0) / p) * m;
                }
                let last = *knots.last().expect("knots start with 0");
                acc + e(last) * table_right(points, last) / p
            }
        }
    }

    fn check(&self) -> Result<()> {
        let finite = match self {
            TimeExpr::Constant { value } => value.is_finite(),
            TimeExpr::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            TimeExpr::Exponential { amplitude, rate } => amplitude.is_finite() && rate.is_finite(),
            TimeExpr::PiecewiseLinear { points } => return check_table(points),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Spec(
                "time expression has non-finite parameters".into(),
            ))
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            TimeExpr::Constant { value } => *value == 0.0,
            TimeExpr::Polynomial { coeffs } => coeffs.iter().all(|c| *c == 0.0),
            TimeExpr::Exponential { amplitude, .. } => *amplitude == 0.0,
            TimeExpr::PiecewiseLinear { points } => points.iter().all(|p| p[1] == 0.0),
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match self {
            TimeExpr::Constant { value } => TimeExpr::Constant { value: c * value },
            TimeExpr::Polynomial { coeffs } => TimeExpr::Polynomial {
                coeffs: coeffs.iter().map(|k| c * k).collect(),
            },
            TimeExpr::Exponential { amplitude, rate } => TimeExpr::Exponential {
                amplitude: c * amplitude,
                rate: *rate,
            },
            TimeExpr::PiecewiseLinear { points } => TimeExpr::PiecewiseLinear {
                points: points.iter().map(|p| [p[0], c * p[1]]).collect(),
            },
        }
    }
}

#[derive(Clone)]
enum TimeRepr {
    Expr(TimeExpr),
    Custom {
        value: Fn1,
        derivative: Fn1,
        laplace: Option<LaplaceFn>,
    },
}

/// A boundary signal g(t) with explicit derivative and Laplace transform.
#[derive(Clone)]
pub struct TimeFunction {
    repr: TimeRepr,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            TimeRepr::Expr(e) => write!(f, "TimeFunction({e:?})"),
            TimeRepr::Custom { laplace, .. } => {
                write!(f, "TimeFunction(custom, laplace={})", laplace.is_some())
            }
        }
    }
}

impl TimeFunction {
    pub fn from_expr(expr: TimeExpr) -> Result<Self> {
        expr.check()?;
        Ok(Self {
            repr: TimeRepr::Expr(expr),
        })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            repr: TimeRepr::Expr(TimeExpr::Constant { value }),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self {
            repr: TimeRepr::Expr(TimeExpr::Polynomial { coeffs }),
        }
    }

    pub fn exponential(amplitude: f64, rate: f64) -> Self {
        Self {
            repr: TimeRepr::Expr(TimeExpr::Exponential { amplitude, rate }),
        }
    }

    pub fn piecewise_linear(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::from_expr(TimeExpr::PiecewiseLinear { points })
    }

    /// An arbitrary signal. Without `laplace`, transforms are computed by
    /// numerical quadrature on the real axis only.
    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        laplace: Option<LaplaceFn>,
    ) -> Self {
        Self {
            repr: TimeRepr::Custom {
                value: Arc::new(value),
                derivative: Arc::new(derivative),
                laplace,
            },
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            TimeRepr::Expr(e) => e.value(t),
            TimeRepr::Custom { value, .. } => value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.repr {
            TimeRepr::Expr(e) => e.derivative(t),
            TimeRepr::Custom { derivative, .. } => derivative(t),
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value(0.0)
    }

    pub fn laplace<S: Scalar>(&self, p: S) -> Result<S> {
        match &self.repr {
            TimeRepr::Expr(e) => Ok(e.laplace(p)),
            TimeRepr::Custom {
                laplace: Some(l), ..
            } => Ok(S::from_complex(l(p.to_complex()))),
            TimeRepr::Custom { value, .. } => match p.as_real() {
                Some(pr) => Ok(S::from_f64(numerical_laplace(|t| value(t), pr)?)),
                None => Err(Error::Spec(
                    "complex Laplace argument needs an analytic transform of the boundary data"
                        .into(),
                )),
            },
        }
    }

    pub fn expr(&self) -> Option<&TimeExpr> {
        match &self.repr {
            TimeRepr::Expr(e) => Some(e),
            TimeRepr::Custom { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, TimeRepr::Expr(e) if e.is_zero())
    }

    pub fn scaled(&self, c: f64) -> Self {
        match &self.repr {
            TimeRepr::Expr(e) => Self {
                repr: TimeRepr::Expr(e.scaled(c)),
            },
            TimeRepr::Custom {
                value,
                derivative,
                laplace,
            } => {
                let (v, d) = (value.clone(), derivative.clone());
                let l = laplace
                    .clone()
                    .map(|l| -> LaplaceFn { Arc::new(move |p| l(p) * c) });
                Self::custom(move |t| c * v(t), move |t| c * d(t), l)
            }
        }
    }
}

/// ∫₀^∞ g(t)e^{−pt} dt for real p > 0 by quadrature in u = p·t.
pub fn numerical_laplace(g: impl Fn(f64) -> f64, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!(
            "numerical Laplace transform needs p > 0, got {p}"
        )));
    }
    let knots = [0.0, 0.5, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0];
    let r = integrate_points(
        |u: f64| g(u / p) * (-u).exp(),
        &knots,
        QuadConfig::new(1e-12).with_abs(1e-300),
    )?;
    Ok(r.value / p)
}

/// One separable contribution `space(x)·time(t)` to a source.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub space: SpaceFunction,
    pub time: TimeFunction,
}

#[derive(Clone)]
enum SourceRepr {
    Zero,
    Separable(Vec<SourceTerm>),
    Custom {
        value: Fn2,
        time_derivative: Fn2,
        laplace: Option<SourceLaplaceFn>,
        breakpoints: Vec<f64>,
    },
}

/// The inhomogeneity f(x, t).
#[derive(Clone)]
pub struct SourceFunction {
    repr: SourceRepr,
}

impl fmt::Debug for SourceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            SourceRepr::Zero => write!(f, "SourceFunction(zero)"),
            SourceRepr::Separable(terms) => write!(f, "SourceFunction({terms:?})"),
            SourceRepr::Custom { laplace, .. } => {
                write!(f, "SourceFunction(custom, laplace={})", laplace.is_some())
            }
        }
    }
}

impl Default for SourceFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl SourceFunction {
    pub fn zero() -> Self {
        Self {
            repr: SourceRepr::Zero,
        }
    }

    pub fn separable(terms: Vec<SourceTerm>) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        Self {
            repr: SourceRepr::Separable(terms),
        }
    }

    /// A spatially uniform source c·h(t).
    pub fn uniform(time: TimeFunction) -> Self {
        Self::separable(vec![SourceTerm {
            space: SpaceFunction::constant(1.0),
            time,
        }])
    }

    /// An arbitrary source with its time derivative. Without `laplace`,
    /// transforms fall back to numerical time quadrature (real p only).
    pub fn custom(
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        time_derivative: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        laplace: Option<SourceLaplaceFn>,
        breakpoints: Vec<f64>,
    ) -> Self {
        Self {
            repr: SourceRepr::Custom {
                value: Arc::new(value),
                time_derivative: Arc::new(time_derivative),
                laplace,
                breakpoints,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            SourceRepr::Zero => true,
            SourceRepr::Separable(terms) => {
                terms.iter().all(|t| t.space.is_zero() || t.time.is_zero())
            }
            SourceRepr::Custom { .. } => false,
        }
    }

    /// The mirror image (x, t) ↦ self(c − x, t).
    pub fn reflected(&self, c: f64) -> Self {
        let repr = match &self.repr {
            SourceRepr::Zero => SourceRepr::Zero,
            SourceRepr::Separable(terms) => SourceRepr::Separable(
                terms
                    .iter()
                    .map(|k| SourceTerm {
                        space: k.space.reflected(c),
                        time: k.time.clone(),
                    })
                    .collect(),
            ),
            SourceRepr::Custom {
                value,
                time_derivative,
                laplace,
                breakpoints,
            } => {
                let (v, d) = (value.clone(), time_derivative.clone());
                SourceRepr::Custom {
                    value: Arc::new(move |x, t| v(c - x, t)),
                    time_derivative: Arc::new(move |x, t| d(c - x, t)),
                    laplace: laplace
                        .clone()
                        .map(|l| -> SourceLaplaceFn { Arc::new(move |x, p| l(c - x, p)) }),
                    breakpoints: breakpoints.iter().rev().map(|b| c - b).collect(),
                }
            }
        };
        Self { repr }
    }

    pub fn terms(&self) -> Option<&[SourceTerm]> {
        match &self.repr {
            SourceRepr::Zero => Some(&[]),
            SourceRepr::Separable(t) => Some(t),
            SourceRepr::Custom { .. } => None,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match &self.repr {
            SourceRepr::Zero => 0.0,
            SourceRepr::Separable(terms) => terms
                .iter()
                .map(|k| k.space.value(x) * k.time.value(t))
                .sum(),
            SourceRepr::Custom { value, .. } => value(x, t),
        }
    }

    pub fn time_derivative(&self, x: f64, t: f64) -> f64 {
        match &self.repr {
            SourceRepr::Zero => 0.0,
            SourceRepr::Separable(terms) => terms
                .iter()
                .map(|k| k.space.value(x) * k.time.derivative(t))
                .sum(),
            SourceRepr::Custom {
                time_derivative, ..
            } => time_derivative(x, t),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.repr {
            SourceRepr::Zero => Vec::new(),
            SourceRepr::Separable(terms) => terms
                .iter()
                .flat_map(|k| k.space.breakpoints().to_vec())
                .collect(),
            SourceRepr::Custom { breakpoints, .. } => breakpoints.clone(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Prepare x ↦ F(x, p) for repeated evaluation at one p.
    pub fn transformed<S: Scalar>(&self, p: S) -> Result<TransformedSource<'_, S>> {
        Ok(match &self.repr {
            SourceRepr::Zero => TransformedSource::Zero,
            SourceRepr::Separable(terms) => TransformedSource::Terms(
                terms
                    .iter()
                    .map(|k| Ok((&k.space, k.time.laplace(p)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            SourceRepr::Custom {
                laplace: Some(l), ..
            } => TransformedSource::Analytic(l.clone(), p),
            SourceRepr::Custom { value, .. } => match p.as_real() {
                Some(pr) => TransformedSource::Numerical(value.clone(), pr),
                None => {
                    return Err(Error::Spec(
                        "complex Laplace argument needs an analytic transform of the source".into(),
                    ))
                }
            },
        })
    }
}

/// A source transformed to the Laplace domain at a fixed p.
pub enum TransformedSource<'a, S> {
    Zero,
    Terms(Vec<(&'a SpaceFunction, S)>),
    Analytic(SourceLaplaceFn, S),
    Numerical(Fn2, f64),
}

impl<S: Scalar> TransformedSource<'_, S> {
    pub fn is_zero(&self) -> bool {
        matches!(self, TransformedSource::Zero)
    }

    pub fn eval(&self, x: f64) -> Result<S> {
        match self {
            TransformedSource::Zero => Ok(S::zero()),
            TransformedSource::Terms(terms) => Ok(terms.iter().map(|(s, c)| *c * s.value(x)).sum()),
            TransformedSource::Analytic(l, p) => Ok(S::from_complex(l(x, p.to_complex()))),
            TransformedSource::Numerical(f, p) => {
                Ok(S::from_f64(numerical_laplace(|t| f(x, t), *p)?))
            }
        }
    }
}
