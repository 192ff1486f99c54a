use crate::error::{Error, Result};
use crate::field::{Provenance, SolutionField};
use crate::problem::{End, ProblemSpec};
use crate::quad::{breakpoints_within, integrate_points, QuadConfig};
use std::f64::consts::PI;

/// Sine-series solution `Σ c_n e^{−λ_n t} sin(nπ(x − l1)/L)`,
/// `λ_n = a²(nπ/L)² + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub l1: f64,
    pub length: f64,
    /// Mode numbers n of the retained terms.
    pub modes: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub rates: Vec<f64>,
}

/// Coefficients below this fraction of max|φ| count as zero.
const ZERO_COEFF: f64 = 1e-13;

impl SeriesSolution {
    /// The first `k` nonzero modes of φ (modes that vanish by symmetry do
    /// not count toward `k`).
    pub fn new(spec: &ProblemSpec, k: usize) -> Result<Self> {
        spec.validate().into_result()?;
        if k == 0 {
            return Err(Error::Usage("series needs at least one term".into()));
        }
        if !spec.is_bounded() {
            return Err(Error::Spec(
                "series solution needs a bounded interval".into(),
            ));
        }
        for end in [End::L1, End::L2] {
            let bc = spec.require_bc(end)?;
            if !bc.is_beta_zero() || !bc.g.is_zero() {
                return Err(Error::Spec(format!(
                    "series solution needs homogeneous Dirichlet data, {end} is not"
                )));
            }
        }
        if !spec.source.is_zero() {
            return Err(Error::Spec("series solution needs a zero source".into()));
        }
        let (l1, len) = (spec.l1, spec.length());
        let bps = spec.phi.breakpoints().to_vec();
        let scale = (0..=200)
            .map(|i| l1 + len * i as f64 / 200.0)
            .chain(bps.iter().copied())
            .map(|x| spec.phi.value(x).abs())
            .fold(0.0, f64::max);
        let mut out = Self {
            l1,
            length: len,
            modes: Vec::new(),
            coefficients: Vec::new(),
            rates: Vec::new(),
        };
        if scale == 0.0 {
            return Ok(out);
        }
        let max_mode = 4 * k + 8;
        for n in 1..=max_mode {
            let w = n as f64 * PI / len;
            let half_periods = (0..=n).map(|j| l1 + len * j as f64 / n as f64);
            let pts = breakpoints_within(spec.l1, spec.l2, bps.iter().copied().chain(half_periods));
            let c = 2.0 / len
                * integrate_points(
                    |x: f64| spec.phi.value(x) * (w * (x - l1)).sin(),
                    &pts,
                    QuadConfig::new(1e-13).with_abs(1e-16 * scale * len),
                )?
                .value;
            if c.abs() > ZERO_COEFF * scale {
                out.modes.push(n);
                out.coefficients.push(c);
                out.rates.push(spec.a * spec.a * w * w + spec.b);
                if out.modes.len() == k {
                    break;
                }
            }
        }
        Ok(out)
    }

    pub fn terms(&self) -> usize {
        self.modes.len()
    }

    fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.length
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.modes
            .iter()
            .zip(&self.coefficients)
            .zip(&self.rates)
            .map(|((&n, c), r)| c * (-r * t).exp() * (self.wavenumber(n) * (x - self.l1)).sin())
            .sum()
    }

    pub fn derivative(&self, x: f64, t: f64) -> f64 {
        self.modes
            .iter()
            .zip(&self.coefficients)
            .zip(&self.rates)
            .map(|((&n, c), r)| {
                let w = self.wavenumber(n);
                c * w * (-r * t).exp() * (w * (x - self.l1)).cos()
            })
            .sum()
    }

    pub fn field(&self, xs: &[f64], ts: &[f64]) -> SolutionField {
        let mut f = SolutionField::new(xs.to_vec(), ts.to_vec(), Provenance::Series, true);
        for (it, &t) in ts.iter().enumerate() {
            for (ix, &x) in xs.iter().enumerate() {
                let k = f.index(ix, it);
                f.u[k] = self.value(x, t);
                f.ux.as_mut().expect("allocated")[k] = self.derivative(x, t);
            }
        }
        f
    }
}

/// K-term partial sum at one point.
pub fn series_solve(spec: &ProblemSpec, k: usize, x: f64, t: f64) -> Result<f64> {
    Ok(SeriesSolution::new(spec, k)?.value(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{BoundaryCondition, SpaceFunction, TimeFunction};

    fn dirichlet(a: f64, b: f64, l: f64, phi: SpaceFunction) -> ProblemSpec {
        ProblemSpec::bounded(
            a,
            b,
            0.0,
            l,
            phi,
            BoundaryCondition::dirichlet(TimeFunction::zero()),
            BoundaryCondition::dirichlet(TimeFunction::zero()),
        )
    }

    fn triangle() -> ProblemSpec {
        dirichlet(
            0.5,
            0.0,
            10.0,
            SpaceFunction::piecewise_linear(vec![[0.0, 0.0], [5.0, 2.5], [10.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn triangle_coefficients_are_the_odd_inverse_squares() {
        let s = SeriesSolution::new(&triangle(), 20).unwrap();
        assert_eq!(s.terms(), 20);
        for (k, (&n, c)) in s.modes.iter().zip(&s.coefficients).enumerate() {
            let m = 2 * k + 1;
            assert_eq!(n, m);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let exact = 20.0 / (PI * PI) * sign / (m * m) as f64;
            assert!((c - exact).abs() < 1e-13, "mode {m}: {c} vs {exact}");
            assert!((s.rates[k] - (m * m) as f64 * PI * PI / 400.0).abs() < 1e-14);
        }
    }

    #[test]
    fn peak_partial_sum_tail() {
        let v = series_solve(&triangle(), 20, 5.0, 0.0).unwrap();
        // Σ 1/(2k−1)² = π²/8, so the shortfall is exactly the tail
        let head: f64 = (1..=20).map(|k| 1.0 / ((2 * k - 1) as f64).powi(2)).sum();
        let tail = 20.0 / (PI * PI) * (PI * PI / 8.0 - head);
        assert!(((2.5 - v) - tail).abs() < 1e-12, "{v} tail {tail}");
    }

    #[test]
    fn single_mode_is_exact() {
        let (a, b, l) = (0.8, 0.3, 2.0);
        let spec = dirichlet(a, b, l, SpaceFunction::sine(1.0, PI / l, 0.0));
        let s = SeriesSolution::new(&spec, 1).unwrap();
        assert_eq!(s.modes, vec![1]);
        for (x, t) in [(0.3, 0.1), (1.0, 1.0), (1.7, 0.02)] {
            let exact = (-(a * a * PI * PI / (l * l) + b) * t).exp() * (PI * x / l).sin();
            assert!((s.value(x, t) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn converges_to_phi_at_t0() {
        let spec = triangle();
        let err = |k| (series_solve(&spec, k, 2.0, 0.0).unwrap() - 1.0).abs();
        assert!(err(80) < err(20) && err(20) < err(5));
    }

    #[test]
    fn rejects_unsupported() {
        let mut spec = triangle();
        spec.bc1 = Some(BoundaryCondition::neumann(TimeFunction::zero()));
        assert!(matches!(SeriesSolution::new(&spec, 5), Err(Error::Spec(_))));
        let spec = triangle().with_source(crate::problem::SourceFunction::uniform(
            TimeFunction::constant(1.0),
        ));
        assert!(matches!(SeriesSolution::new(&spec, 5), Err(Error::Spec(_))));
        assert!(SeriesSolution::new(&triangle(), 0).is_err());
    }

    #[test]
    fn zero_data() {
        let s = SeriesSolution::new(&dirichlet(1.0, 0.0, 1.0, SpaceFunction::zero()), 10).unwrap();
        assert_eq!(s.terms(), 0);
        assert_eq!(s.value(0.5, 0.1), 0.0);
    }
}
