//! Solution values on a tensor (x, t) grid.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which solver produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Operational,
    ShortTime,
    Series,
    Fd,
    ClosedForm,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Operational => "operational",
            Provenance::ShortTime => "short-time",
            Provenance::Series => "series",
            Provenance::Fd => "fd",
            Provenance::ClosedForm => "closed-form",
            Provenance::External => "external",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub x: f64,
    pub t: f64,
    pub message: String,
}

/// Values `u[it·nx + ix]` at `(xs[ix], ts[it])`, optionally with u_x.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Option<Vec<f64>>,
    pub provenance: Provenance,
    /// Grid points whose value could not be computed (stored as NaN).
    pub failures: Vec<PointFailure>,
}

impl SolutionField {
    pub fn new(xs: Vec<f64>, ts: Vec<f64>, provenance: Provenance, with_ux: bool) -> Self {
        let n = xs.len() * ts.len();
        Self {
            xs,
            ts,
            u: vec![f64::NAN; n],
            ux: with_ux.then(|| vec![f64::NAN; n]),
            provenance,
            failures: Vec::new(),
        }
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, ix: usize, it: usize) -> usize {
        it * self.xs.len() + ix
    }

    pub fn u_at(&self, ix: usize, it: usize) -> f64 {
        self.u[self.index(ix, it)]
    }

    pub fn ux_at(&self, ix: usize, it: usize) -> Option<f64> {
        self.ux.as_ref().map(|v| v[self.index(ix, it)])
    }

    /// The profile `u(·, ts[it])`.
    pub fn profile(&self, it: usize) -> &[f64] {
        let nx = self.xs.len();
        &self.u[it * nx..(it + 1) * nx]
    }

    pub fn ux_profile(&self, it: usize) -> Option<&[f64]> {
        let nx = self.xs.len();
        self.ux.as_ref().map(|v| &v[it * nx..(it + 1) * nx])
    }

    /// Record a failed point, leaving NaN in place.
    pub fn fail(&mut self, ix: usize, it: usize, message: impl Into<String>) {
        let k = self.index(ix, it);
        self.u[k] = f64::NAN;
        if let Some(ux) = self.ux.as_mut() {
            ux[k] = f64::NAN;
        }
        self.failures.push(PointFailure {
            x: self.xs[ix],
            t: self.ts[it],
            message: message.into(),
        });
    }

    /// Replace u_x by centered differences of u (one-sided second order
    /// at the ends of the x grid).
    pub fn with_difference_ux(mut self) -> Self {
        let nx = self.xs.len();
        let mut ux = vec![f64::NAN; self.u.len()];
        if nx >= 3 {
            for it in 0..self.ts.len() {
                let u = self.profile(it);
                let x = &self.xs;
                for ix in 0..nx {
                    let (i0, i1, i2) = match ix {
                        0 => (0, 1, 2),
                        i if i == nx - 1 => (nx - 3, nx - 2, nx - 1),
                        i => (i - 1, i, i + 1),
                    };
                    ux[it * nx + ix] =
                        lagrange_slope([x[i0], x[i1], x[i2]], [u[i0], u[i1], u[i2]], x[ix]);
                }
            }
        }
        self.ux = Some(ux);
        self
    }
}

/// Derivative at `x` of the parabola through three points.
fn lagrange_slope(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let d0 = (2.0 * at - x[1] - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let d1 = (2.0 * at - x[0] - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let d2 = (2.0 * at - x[0] - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    y[0] * d0 + y[1] * d1 + y[2] * d2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_failures() {
        let mut f = SolutionField::new(
            vec![0.0, 1.0, 2.0],
            vec![0.1, 0.2],
            Provenance::Series,
            false,
        );
        let k = f.index(2, 1);
        f.u[k] = 5.0;
        assert_eq!(f.u_at(2, 1), 5.0);
        assert_eq!(f.profile(1)[2], 5.0);
        f.fail(2, 1, "boom");
        assert!(f.u_at(2, 1).is_nan());
        assert_eq!(f.failures[0].t, 0.2);
    }

    #[test]
    fn difference_derivative_exact_on_quadratics() {
        let xs = vec![0.0, 0.3, 0.5, 1.0, 1.7];
        let mut f = SolutionField::new(xs.clone(), vec![1.0], Provenance::Fd, false);
        f.u = xs.iter().map(|x| 2.0 * x * x - x + 3.0).collect();
        let f = f.with_difference_ux();
        for (ix, x) in xs.iter().enumerate() {
            assert!((f.ux_at(ix, 0).unwrap() - (4.0 * x - 1.0)).abs() < 1e-12);
        }
    }
}
