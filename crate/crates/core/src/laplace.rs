//! Exact solution in the Laplace domain.
//!
//! With s = √(b+p), A = a/(2s) and χ(x) = e^{−x·s/a}, the transform U(x, p)
//! of the solution is
//!
//! ```text
//! U(x) = A[U_x(l2)χ(l2−x) − U_x(l1)χ(x−l1)] + ½[U(l2)χ(l2−x) + U(l1)χ(x−l1)] + R(x)
//! R(x) = 1/(2a·s) ∫ (φ(ξ) + F(ξ, p)) χ(|ξ−x|) dξ
//! ```
//!
//! and the four boundary traces solve
//!
//! ```text
//! | α1   β1    0     0    | |U(l1)  |   |G1   |
//! | 0    0     α2    β2   | |U_x(l1)| = |G2   |
//! | 1/2  A    −c/2  −A·c  | |U(l2)  |   |R(l1)|
//! | −c/2 A·c   1/2  −A    | |U_x(l2)|   |R(l2)|
//! ```
//!
//! where c = χ(l2 − l1). On unbounded domains the rows of the missing end
//! drop out.

use crate::error::{Error, Result};
use crate::problem::{BoundaryCondition, End, ProblemSpec};
use crate::quad::{integrate_points, QuadConfig};
use crate::scalar::Scalar;

/// Exponents below this flush χ to exactly zero.
pub const CHI_UNDERFLOW: f64 = -745.0;

/// χ(x, p) = exp(−x√(b+p)/a), principal branch.
pub fn chi<S: Scalar>(x: f64, p: S, a: f64, b: f64) -> S {
    let e = (p + b).sqrt() * (-x / a);
    if e.re() < CHI_UNDERFLOW {
        S::zero()
    } else {
        e.exp()
    }
}

fn chi_s<S: Scalar>(x: f64, s: S, a: f64) -> S {
    let e = s * (-x / a);
    if e.re() < CHI_UNDERFLOW {
        S::zero()
    } else {
        e.exp()
    }
}

/// Small dense linear algebra for the trace system.
pub mod linalg {
    use crate::scalar::Scalar;

    /// Gaussian elimination with partial pivoting. Returns the solution and
    /// the determinant, or `None` for an exactly singular matrix.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_pivoted<S: Scalar, const N: usize>(
        mut m: [[S; N]; N],
        mut rhs: [S; N],
    ) -> Option<([S; N], S)> {
        let mut det = S::one();
        for col in 0..N {
            let piv = (col..N)
                .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
                .expect("nonempty range");
            if m[piv][col].norm() == 0.0 {
                return None;
            }
            if piv != col {
                m.swap(piv, col);
                rhs.swap(piv, col);
                det = -det;
            }
            let d = m[col][col];
            det = det * d;
            for row in col + 1..N {
                let f = m[row][col] / d;
                if f.norm() == 0.0 {
                    continue;
                }
                for k in col..N {
                    let v = m[col][k];
                    m[row][k] -= f * v;
                }
                let v = rhs[col];
                rhs[row] -= f * v;
            }
        }
        let mut x = [S::zero(); N];
        for row in (0..N).rev() {
            let mut acc = rhs[row];
            for k in row + 1..N {
                acc -= m[row][k] * x[k];
            }
            x[row] = acc / m[row][row];
        }
        Some((x, det))
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det_cofactor<S: Scalar>(m: &[Vec<S>]) -> S {
        let n = m.len();
        match n {
            0 => S::one(),
            1 => m[0][0],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                let mut acc = S::zero();
                for j in 0..n {
                    let minor: Vec<Vec<S>> = m[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|(k, _)| *k != j)
                                .map(|(_, v)| *v)
                                .collect()
                        })
                        .collect();
                    let term = m[0][j] * det_cofactor(&minor);
                    if j % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
        }
    }

    /// Cramer's rule with cofactor determinants.
    pub fn solve_cramer<S: Scalar, const N: usize>(m: [[S; N]; N], rhs: [S; N]) -> [S; N] {
        let rows = |mm: &[[S; N]; N]| mm.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        let det = det_cofactor(&rows(&m));
        let mut x = [S::zero(); N];
        for (j, xj) in x.iter_mut().enumerate() {
            let mut mj = m;
            for i in 0..N {
                mj[i][j] = rhs[i];
            }
            *xj = det_cofactor(&rows(&mj)) / det;
        }
        x
    }
}

/// U(l1), U_x(l1), U(l2), U_x(l2) at one p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTraces<S> {
    pub u_l1: S,
    pub ux_l1: S,
    pub u_l2: S,
    pub ux_l2: S,
}

fn sqrt_b_plus_p<S: Scalar>(p: S, b: f64) -> Result<S> {
    let z = (p + b).to_complex();
    if !z.is_finite() || (z.im == 0.0 && z.re <= 0.0) {
        return Err(Error::Domain(format!(
            "b + p must avoid (−∞, 0], got b + p = {z}"
        )));
    }
    Ok((p + b).sqrt())
}

/// The operational solution of one problem.
#[derive(Debug, Clone, Copy)]
pub struct OperationalSolution<'a> {
    spec: &'a ProblemSpec,
    quad: QuadConfig,
}

/// Everything at a fixed p needed to evaluate U and U_x at many x.
#[derive(Debug, Clone, Copy)]
pub struct OperationalAt<'s, 'a, S> {
    op: &'s OperationalSolution<'a>,
    p: S,
    s: S,
    left: Option<(S, S)>,
    right: Option<(S, S)>,
}

impl<'a> OperationalSolution<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Self {
        Self::with_quadrature(spec, QuadConfig::new(1e-13).with_abs(1e-300))
    }

    pub fn with_quadrature(spec: &'a ProblemSpec, quad: QuadConfig) -> Self {
        Self { spec, quad }
    }

    pub fn spec(&self) -> &'a ProblemSpec {
        self.spec
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if x >= self.spec.l1 && x <= self.spec.l2 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.spec.l1, self.spec.l2
            )))
        }
    }

    /// ∫ (φ + F) χ(|ξ−x|) w(ξ) dξ over the domain with w = 1 or sgn(ξ−x).
    fn chi_integral<S: Scalar>(&self, x: f64, p: S, s: S, signed: bool) -> Result<S> {
        let spec = self.spec;
        let a = spec.a;
        let kappa = s.re() / a;
        let reach = 40.0 / kappa;
        let lo = spec.l1.max(x - reach);
        let hi = spec.l2.min(x + reach);
        let mut pts = vec![lo, hi, x];
        for k in [1.0, 4.0, 12.0] {
            pts.push(x - k / kappa);
            pts.push(x + k / kappa);
        }
        pts.extend(spec.breakpoints_in(lo, hi));
        pts.retain(|v| *v >= lo && *v <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let source = spec.source.transformed(p)?;
        let mut failure = None;
        let r = integrate_points(
            |xi: f64| {
                let mut v = S::from_f64(spec.phi.value(xi));
                if !source.is_zero() {
                    match source.eval(xi) {
                        Ok(f) => v += f,
                        Err(e) => {
                            failure.get_or_insert(e);
                        }
                    }
                }
                let w = chi_s((xi - x).abs(), s, a) * v;
                if signed && xi < x {
                    -w
                } else {
                    w
                }
            },
            &pts,
            self.quad,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r?.value)
    }

    /// R(x, p), the transform of r(x, t).
    pub fn r_of<S: Scalar>(&self, x: f64, p: S) -> Result<S> {
        self.check_x(x)?;
        let s = sqrt_b_plus_p(p, self.spec.b)?;
        Ok(self.chi_integral(x, p, s, false)? / (s * (2.0 * self.spec.a)))
    }

    /// ∂R/∂x (x, p).
    pub fn rx_of<S: Scalar>(&self, x: f64, p: S) -> Result<S> {
        self.check_x(x)?;
        let s = sqrt_b_plus_p(p, self.spec.b)?;
        Ok(self.chi_integral(x, p, s, true)? / (2.0 * self.spec.a * self.spec.a))
    }

    /// The trace-system matrix and right-hand side of a bounded problem.
    pub fn system<S: Scalar>(&self, p: S) -> Result<([[S; 4]; 4], [S; 4])> {
        let spec = self.spec;
        if !spec.is_bounded() {
            return Err(Error::Spec(
                "the four-trace system needs a bounded interval".into(),
            ));
        }
        let bc1 = spec.require_bc(End::L1)?;
        let bc2 = spec.require_bc(End::L2)?;
        let s = sqrt_b_plus_p(p, spec.b)?;
        let big_a = S::from_f64(0.5 * spec.a) / s;
        let c = chi_s(spec.length(), s, spec.a);
        let (z, h) = (S::zero(), S::from_f64(0.5));
        let f = S::from_f64;
        let m = [
            [f(bc1.alpha), f(bc1.beta), z, z],
            [z, z, f(bc2.alpha), f(bc2.beta)],
            [h, big_a, -(c * 0.5), -(big_a * c)],
            [-(c * 0.5), big_a * c, h, -big_a],
        ];
        let rhs = [
            bc1.g.laplace(p)?,
            bc2.g.laplace(p)?,
            self.r_of(spec.l1, p)?,
            self.r_of(spec.l2, p)?,
        ];
        Ok((m, rhs))
    }

    /// Closed-form determinant of the trace matrix:
    /// `α1α2A²(1−c²) + (α1β2 − α2β1)(A/2)(1+c²) − (β1β2/4)(1−c²)`.
    pub fn det_s<S: Scalar>(&self, p: S) -> Result<S> {
        let spec = self.spec;
        let bc1 = spec.require_bc(End::L1)?;
        let bc2 = spec.require_bc(End::L2)?;
        let s = sqrt_b_plus_p(p, spec.b)?;
        Ok(det_formula(
            bc1,
            bc2,
            S::from_f64(0.5 * spec.a) / s,
            chi_s(spec.length(), s, spec.a),
        ))
    }

    /// Solve the trace system. Each boundary row is eliminated first by
    /// expressing whichever of U, U_x it weighs more heavily (on the scale
    /// U_x ~ |s|/a·U), so Dirichlet data come back exactly; the two
    /// remaining rows are solved with partial pivoting.
    pub fn solve_traces<S: Scalar>(&self, p: S) -> Result<BoundaryTraces<S>> {
        let (m, rhs) = self.system(p)?;
        let s = sqrt_b_plus_p(p, self.spec.b)?;
        let k = s.norm() / self.spec.a;
        // (U, U_x) = offset + slope·y for each end.
        let param = |alpha: S, beta: S, g: S| -> ((S, S), (S, S)) {
            if alpha.norm() >= beta.norm() * k {
                ((g / alpha, S::zero()), (-(beta / alpha), S::one()))
            } else {
                ((S::zero(), g / beta), (S::one(), -(alpha / beta)))
            }
        };
        let (o1, d1) = param(m[0][0], m[0][1], rhs[0]);
        let (o2, d2) = param(m[1][2], m[1][3], rhs[1]);
        let mut red = [[S::zero(); 2]; 2];
        let mut rr = [S::zero(); 2];
        for (i, row) in [2usize, 3].into_iter().enumerate() {
            let r = m[row];
            red[i][0] = r[0] * d1.0 + r[1] * d1.1;
            red[i][1] = r[2] * d2.0 + r[3] * d2.1;
            rr[i] = rhs[row] - (r[0] * o1.0 + r[1] * o1.1 + r[2] * o2.0 + r[3] * o2.1);
        }
        let (y, det) = linalg::solve_pivoted(red, rr)
            .ok_or_else(|| Error::Numeric(format!("singular trace system at p = {p:?}")))?;
        if det.norm() < 1e-300 || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric(format!(
                "ill-conditioned trace system at p = {p:?} (reduced det = {det:?})"
            )));
        }
        let pick = |o: S, d: S, y: S| if d == S::zero() { o } else { o + d * y };
        Ok(BoundaryTraces {
            u_l1: pick(o1.0, d1.0, y[0]),
            ux_l1: pick(o1.1, d1.1, y[0]),
            u_l2: pick(o2.0, d2.0, y[1]),
            ux_l2: pick(o2.1, d2.1, y[1]),
        })
    }

    /// The same traces from dense pivoted elimination of the full 4×4 system.
    pub fn solve_traces_dense<S: Scalar>(&self, p: S) -> Result<BoundaryTraces<S>> {
        let (m, rhs) = self.system(p)?;
        let (x, det) = linalg::solve_pivoted(m, rhs)
            .ok_or_else(|| Error::Numeric(format!("singular trace system at p = {p:?}")))?;
        if det.norm() < 1e-300 || !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric(format!(
                "ill-conditioned trace system at p = {p:?} (det = {det:?})"
            )));
        }
        Ok(BoundaryTraces {
            u_l1: x[0],
            ux_l1: x[1],
            u_l2: x[2],
            ux_l2: x[3],
        })
    }

    /// Row residuals of the trace system relative to each row's scale.
    pub fn trace_residuals<S: Scalar>(&self, p: S, tr: &BoundaryTraces<S>) -> Result<[f64; 4]> {
        let (m, rhs) = self.system(p)?;
        let x = [tr.u_l1, tr.ux_l1, tr.u_l2, tr.ux_l2];
        let mut out = [0.0; 4];
        for i in 0..4 {
            let mut acc = -rhs[i];
            let mut scale = rhs[i].norm();
            for j in 0..4 {
                acc += m[i][j] * x[j];
                scale += (m[i][j] * x[j]).norm();
            }
            out[i] = if scale == 0.0 {
                0.0
            } else {
                acc.norm() / scale
            };
        }
        Ok(out)
    }

    /// Prepare evaluation at one p for any domain type.
    pub fn at<S: Scalar>(&self, p: S) -> Result<OperationalAt<'_, 'a, S>> {
        let spec = self.spec;
        let s = sqrt_b_plus_p(p, spec.b)?;
        let big_a = S::from_f64(0.5 * spec.a) / s;
        let (left, right) = match (spec.l1.is_finite(), spec.l2.is_finite()) {
            (true, true) => {
                let tr = self.solve_traces(p)?;
                (Some((tr.u_l1, tr.ux_l1)), Some((tr.u_l2, tr.ux_l2)))
            }
            (false, false) => (None, None),
            (true, false) => {
                let bc = spec.require_bc(End::L1)?;
                let (g, r) = (bc.g.laplace(p)?, self.r_of(spec.l1, p)?);
                let det = big_a * bc.alpha - bc.beta * 0.5;
                check_det(det, p)?;
                (
                    Some((
                        (g * big_a - r * bc.beta) / det,
                        (r * bc.alpha - g * 0.5) / det,
                    )),
                    None,
                )
            }
            (false, true) => {
                let bc = spec.require_bc(End::L2)?;
                let (g, r) = (bc.g.laplace(p)?, self.r_of(spec.l2, p)?);
                let det = -(big_a * bc.alpha) - bc.beta * 0.5;
                check_det(det, p)?;
                (
                    None,
                    Some((
                        (-(g * big_a) - r * bc.beta) / det,
                        (r * bc.alpha - g * 0.5) / det,
                    )),
                )
            }
        };
        Ok(OperationalAt {
            op: self,
            p,
            s,
            left,
            right,
        })
    }

    /// U(x, p) on any domain type.
    pub fn u_of<S: Scalar>(&self, x: f64, p: S) -> Result<S> {
        self.at(p)?.u(x)
    }

    /// U(x, p) for a problem with at least one infinite end.
    pub fn u_unbounded<S: Scalar>(&self, x: f64, p: S) -> Result<S> {
        if self.spec.is_bounded() {
            return Err(Error::Spec("u_unbounded needs an infinite endpoint".into()));
        }
        for end in [End::L1, End::L2] {
            if !self.spec.endpoint(end).is_finite() && self.spec.bc(end).is_some() {
                return Err(Error::Spec(format!(
                    "boundary condition given at the infinite end {end}"
                )));
            }
        }
        self.u_of(x, p)
    }

    /// |−a²·D²_h U + (b+p)U − F − φ| at an interior x.
    pub fn ode_residual(&self, x: f64, p: f64, h: f64) -> Result<f64> {
        let spec = self.spec;
        if !(h > 0.0) || x - h < spec.l1 || x + h > spec.l2 {
            return Err(Error::Domain(format!(
                "stencil x ± h = {x} ± {h} leaves the domain"
            )));
        }
        let at = self.at(p)?;
        let (um, u0, up) = (at.u(x - h)?, at.u(x)?, at.u(x + h)?);
        let d2 = (up - 2.0 * u0 + um) / (h * h);
        let f = spec.source.transformed(p)?.eval(x)?;
        Ok((-spec.a * spec.a * d2 + (spec.b + p) * u0 - f - spec.phi.value(x)).abs())
    }
}

fn check_det<S: Scalar>(det: S, p: S) -> Result<()> {
    if det.norm() < 1e-300 {
        Err(Error::Numeric(format!(
            "singular boundary relation at p = {p:?}"
        )))
    } else {
        Ok(())
    }
}

fn det_formula<S: Scalar>(bc1: &BoundaryCondition, bc2: &BoundaryCondition, big_a: S, c: S) -> S {
    let (a1, b1, a2, b2) = (bc1.alpha, bc1.beta, bc2.alpha, bc2.beta);
    let c2 = c * c;
    let one_m = S::one() - c2;
    let one_p = S::one() + c2;
    big_a * big_a * one_m * (a1 * a2) + big_a * one_p * (0.5 * (a1 * b2 - a2 * b1))
        - one_m * (0.25 * b1 * b2)
}

impl<S: Scalar> OperationalAt<'_, '_, S> {
    pub fn p(&self) -> S {
        self.p
    }

    /// Traces of a bounded problem.
    pub fn traces(&self) -> Option<BoundaryTraces<S>> {
        match (self.left, self.right) {
            (Some((u_l1, ux_l1)), Some((u_l2, ux_l2))) => Some(BoundaryTraces {
                u_l1,
                ux_l1,
                u_l2,
                ux_l2,
            }),
            _ => None,
        }
    }

    /// (U, U_x) at the finite end of a semi-infinite problem, or at l1/l2
    /// of a bounded one.
    pub fn end_trace(&self, end: End) -> Option<(S, S)> {
        match end {
            End::L1 => self.left,
            End::L2 => self.right,
        }
    }

    pub fn u(&self, x: f64) -> Result<S> {
        let spec = self.op.spec;
        let big_a = S::from_f64(0.5 * spec.a) / self.s;
        let mut v = self.op.r_of(x, self.p)?;
        if let Some((u1, ux1)) = self.left {
            let e = chi_s(x - spec.l1, self.s, spec.a);
            v += (u1 * 0.5 - big_a * ux1) * e;
        }
        if let Some((u2, ux2)) = self.right {
            let e = chi_s(spec.l2 - x, self.s, spec.a);
            v += (u2 * 0.5 + big_a * ux2) * e;
        }
        Ok(v)
    }

    pub fn ux(&self, x: f64) -> Result<S> {
        let spec = self.op.spec;
        let k = self.s / (2.0 * spec.a);
        let mut v = self.op.rx_of(x, self.p)?;
        if let Some((u1, ux1)) = self.left {
            let e = chi_s(x - spec.l1, self.s, spec.a);
            v += (ux1 * 0.5 - k * u1) * e;
        }
        if let Some((u2, ux2)) = self.right {
            let e = chi_s(spec.l2 - x, self.s, spec.a);
            v += (ux2 * 0.5 + k * u2) * e;
        }
        Ok(v)
    }
}

pub fn r_of<S: Scalar>(spec: &ProblemSpec, x: f64, p: S) -> Result<S> {
    OperationalSolution::new(spec).r_of(x, p)
}

pub fn det_s<S: Scalar>(spec: &ProblemSpec, p: S) -> Result<S> {
    OperationalSolution::new(spec).det_s(p)
}

pub fn solve_traces<S: Scalar>(spec: &ProblemSpec, p: S) -> Result<BoundaryTraces<S>> {
    OperationalSolution::new(spec).solve_traces(p)
}

pub fn u_of<S: Scalar>(spec: &ProblemSpec, x: f64, p: S) -> Result<S> {
    OperationalSolution::new(spec).u_of(x, p)
}

pub fn u_unbounded<S: Scalar>(spec: &ProblemSpec, x: f64, p: S) -> Result<S> {
    OperationalSolution::new(spec).u_unbounded(x, p)
}

pub fn ode_residual(spec: &ProblemSpec, x: f64, p: f64, h: f64) -> Result<f64> {
    OperationalSolution::new(spec).ode_residual(x, p, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{BoundaryCondition, SourceFunction, SpaceFunction, TimeFunction};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn spec(phi: SpaceFunction, bc1: BoundaryCondition, bc2: BoundaryCondition) -> ProblemSpec {
        ProblemSpec::bounded(0.5, 0.0, 0.0, 10.0, phi, bc1, bc2)
    }

    fn triangle() -> ProblemSpec {
        spec(
            SpaceFunction::piecewise_linear(vec![[0.0, 0.0], [5.0, 2.5], [10.0, 0.0]]).unwrap(),
            BoundaryCondition::dirichlet(TimeFunction::zero()),
            BoundaryCondition::dirichlet(TimeFunction::zero()),
        )
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(0.0, 3.0, 1.0, 0.0), 1.0);
        assert_eq!(
            chi(0.0, Complex64::new(1.0, 5.0), 1.0, 0.0),
            Complex64::new(1.0, 0.0)
        );
        assert!((chi(10.0, 1.0, 0.5, 0.0) - (-20.0f64).exp()).abs() < 1e-23);
        assert_eq!(chi(1.0, 1e8, 1e-2, 0.0), 0.0);
        for n in 1..6 {
            let p: f64 = 1e6;
            assert!(p.powi(n) * chi(1.0, p, 1.0, 0.0) < 1e-300);
        }
    }

    #[test]
    fn triangle_transform_piecewise_closed_form() {
        let s = triangle();
        let op = OperationalSolution::new(&s);
        for p in [0.5, 2.0, 9.0] {
            for x in [0.0, 1.5, 3.0, 5.0] {
                let q: f64 = p;
                let sp = q.sqrt();
                let exact = -(1.0 / 8.0)
                    * (-4.0 * x * sp + 2.0 * (2.0 * (x - 5.0) * sp).exp()
                        - (-2.0 * x * sp).exp()
                        - (2.0 * (x - 10.0) * sp).exp())
                    / q.powf(1.5);
                let r: f64 = op.r_of(x, p).unwrap();
                assert!(
                    (r - exact).abs() <= 1e-13 * exact.abs().max(1e-3),
                    "x={x} p={p}: {r} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn r_of_uniform_free_space() {
        let mut s = triangle();
        s.phi = SpaceFunction::constant(1.0);
        s.b = 0.3;
        s.l1 = f64::NEG_INFINITY;
        s.l2 = f64::INFINITY;
        s.bc1 = None;
        s.bc2 = None;
        for p in [0.1, 1.0, 50.0] {
            let r: f64 = r_of(&s, 0.7, p).unwrap();
            assert!((r - 1.0 / (0.3 + p)).abs() < 1e-13 / (0.3 + p));
            let u: f64 = u_unbounded(&s, 0.7, p).unwrap();
            assert_eq!(u, r);
        }
    }

    #[test]
    fn zero_problem_zero_everywhere() {
        let s = spec(
            SpaceFunction::zero(),
            BoundaryCondition::new(1.0, -0.5, TimeFunction::zero()),
            BoundaryCondition::dirichlet(TimeFunction::zero()),
        );
        let tr = solve_traces(&s, 3.0).unwrap();
        assert_eq!([tr.u_l1, tr.ux_l1, tr.u_l2, tr.ux_l2], [0.0; 4]);
        assert_eq!(u_of(&s, 4.0, 3.0).unwrap(), 0.0);
        assert_eq!(ode_residual(&s, 4.0, 3.0, 1e-2).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_traces_recover_data() {
        let s = spec(
            SpaceFunction::polynomial(vec![1.0, 0.2]),
            BoundaryCondition::new(2.0, 0.0, TimeFunction::constant(3.0)),
            BoundaryCondition::new(0.5, 0.0, TimeFunction::exponential(1.0, -1.0)),
        );
        for p in [0.3, 4.0, 200.0] {
            let tr = solve_traces(&s, p).unwrap();
            assert_eq!(tr.u_l1, 3.0 / p / 2.0);
            assert_eq!(tr.u_l2, 1.0 / (p + 1.0) / 0.5);
        }
    }

    #[test]
    fn closed_form_determinant_special_cases() {
        let dd = triangle();
        let nn = spec(
            SpaceFunction::zero(),
            BoundaryCondition::neumann(TimeFunction::zero()),
            BoundaryCondition::neumann(TimeFunction::zero()),
        );
        for p in [0.01, 1.0, 30.0] {
            let c2 = chi(20.0, p, 0.5, 0.0);
            let d: f64 = det_s(&dd, p).unwrap();
            assert!((d - 0.25 * 0.25 * (1.0 - c2) / p).abs() < 1e-15 * d.abs());
            let n: f64 = det_s(&nn, p).unwrap();
            assert!((n - 0.25 * (c2 - 1.0)).abs() < 1e-15);
        }
    }

    fn robin_spec(a1: f64, b1: f64, a2: f64, b2: f64, a: f64, b: f64, l: f64) -> ProblemSpec {
        let mut s = spec(
            SpaceFunction::polynomial(vec![1.0, -0.3, 0.05]),
            BoundaryCondition::new(a1, b1, TimeFunction::constant(0.7)),
            BoundaryCondition::new(a2, b2, TimeFunction::polynomial(vec![0.0, 1.0])),
        );
        s.a = a;
        s.b = b;
        s.l2 = l;
        s
    }

    proptest! {
        #[test]
        fn closed_form_determinant_matches_cofactor(
            a1 in -3.0f64..3.0, b1 in -3.0f64..3.0, a2 in -3.0f64..3.0, b2 in -3.0f64..3.0,
            a in 0.1f64..3.0, b in 0.0f64..2.0, l in 0.1f64..5.0, p in 0.01f64..100.0,
        ) {
            let s = robin_spec(a1, b1, a2, b2, a, b, l);
            let op = OperationalSolution::new(&s);
            let (m, _) = op.system(p).unwrap();
            let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
            let cof = linalg::det_cofactor(&rows);
            let closed: f64 = op.det_s(p).unwrap();
            let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max).powi(4);
            prop_assert!((cof - closed).abs() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn pivoted_equals_cramer(
            a1 in -3.0f64..3.0, b1 in 0.1f64..3.0, a2 in -3.0f64..3.0, b2 in 0.1f64..3.0,
            p in 0.1f64..50.0,
        ) {
            let s = robin_spec(a1, -b1, a2, b2, 0.8, 0.2, 2.0);
            let op = OperationalSolution::new(&s);
            let (m, rhs) = op.system(p).unwrap();
            let (x, _) = linalg::solve_pivoted(m, rhs).unwrap();
            let y = linalg::solve_cramer(m, rhs);
            let tr = op.solve_traces(p).unwrap();
            let z = [tr.u_l1, tr.ux_l1, tr.u_l2, tr.ux_l2];
            for k in 0..4 {
                prop_assert!((x[k] - y[k]).abs() <= 1e-9 * x[k].abs().max(1e-6));
                prop_assert!((x[k] - z[k]).abs() <= 1e-12 * x[k].abs().max(1e-6));
            }
        }

        #[test]
        fn trace_residuals_small(
            a1 in -3.0f64..3.0, b1 in -3.0f64..3.0, a2 in -3.0f64..3.0, b2 in -3.0f64..3.0,
            p in 0.01f64..1e4,
        ) {
            prop_assume!(a1.abs() + b1.abs() > 0.1 && a2.abs() + b2.abs() > 0.1);
            prop_assume!(a1 * b1 <= 0.0 && a2 * b2 >= 0.0);
            let s = robin_spec(a1, b1, a2, b2, 0.6, 0.1, 3.0);
            let op = OperationalSolution::new(&s);
            let tr = op.solve_traces(p).unwrap();
            for r in op.trace_residuals(p, &tr).unwrap() {
                prop_assert!(r <= 1e-12);
            }
        }
    }

    #[test]
    fn complex_traces_residual() {
        let s = robin_spec(1.0, -0.5, 2.0, 1.0, 0.6, 0.1, 3.0);
        let op = OperationalSolution::new(&s);
        let p = Complex64::new(-3.0, 7.0);
        let tr = op.solve_traces(p).unwrap();
        for r in op.trace_residuals(p, &tr).unwrap() {
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn boundary_consistency_after_solve() {
        let s = robin_spec(1.0, -0.5, 2.0, 1.0, 0.6, 0.1, 3.0);
        let op = OperationalSolution::new(&s);
        for p in [0.5, 5.0, 50.0] {
            let at = op.at(p).unwrap();
            let g1: f64 = s.bc1.as_ref().unwrap().g.laplace(p).unwrap();
            let lhs = 1.0 * at.u(0.0).unwrap() - 0.5 * at.ux(0.0).unwrap();
            assert!((lhs - g1).abs() <= 1e-10 * g1.abs());
            let g2: f64 = s.bc2.as_ref().unwrap().g.laplace(p).unwrap();
            let lhs = 2.0 * at.u(3.0).unwrap() + at.ux(3.0).unwrap();
            assert!((lhs - g2).abs() <= 1e-10 * g2.abs());
        }
    }

    #[test]
    fn ux_matches_difference_of_u() {
        let s = robin_spec(1.0, -0.5, 2.0, 1.0, 0.6, 0.1, 3.0);
        let op = OperationalSolution::new(&s);
        let at = op.at(2.0).unwrap();
        let h = 1e-5;
        for x in [0.5, 1.7, 2.9] {
            let fd = (at.u(x + h).unwrap() - at.u(x - h).unwrap()) / (2.0 * h);
            assert!((at.ux(x).unwrap() - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_small_for_sourced_problem() {
        let s = robin_spec(1.0, -0.5, 2.0, 1.0, 0.6, 0.1, 3.0).with_source(
            SourceFunction::uniform(TimeFunction::exponential(1.0, -2.0)),
        );
        let op = OperationalSolution::new(&s);
        let r1 = op.ode_residual(1.3, 1.0, 1e-2).unwrap();
        let r2 = op.ode_residual(1.3, 1.0, 5e-3).unwrap();
        assert!(r1 < 1e-4);
        assert!((r1 / r2 - 4.0).abs() < 0.2, "{r1} {r2}");
    }

    #[test]
    fn semi_infinite_mirror_symmetry() {
        // [0, ∞) with data φ(x) mirrors (−∞, 0] with φ(−x).
        let mut right = triangle();
        right.l2 = f64::INFINITY;
        right.bc2 = None;
        right.phi = SpaceFunction::polynomial(vec![1.0, 0.5]);
        right.bc1 = Some(BoundaryCondition::new(
            1.0,
            -0.4,
            TimeFunction::constant(2.0),
        ));
        let mut left = right.clone();
        left.l1 = f64::NEG_INFINITY;
        left.l2 = 0.0;
        left.bc1 = None;
        left.bc2 = Some(BoundaryCondition::new(
            1.0,
            0.4,
            TimeFunction::constant(2.0),
        ));
        left.phi = SpaceFunction::polynomial(vec![1.0, -0.5]);
        for (x, p) in [(0.0, 1.0), (0.8, 3.0), (2.5, 0.2)] {
            let a: f64 = u_unbounded(&right, x, p).unwrap();
            let b: f64 = u_unbounded(&left, -x, p).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs());
        }
        assert!(u_unbounded(&triangle(), 1.0, 1.0f64).is_err());
    }
}
