//! Chebyshev interpolation on first-kind nodes with barycentric evaluation.

#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl Chebyshev {
    /// First-kind Chebyshev nodes on `[lo, hi]` (endpoints excluded).
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| {
                let theta = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64;
                0.5 * (lo + hi) + 0.5 * (hi - lo) * theta.cos()
            })
            .collect()
    }

    /// Interpolant from values sampled at `Chebyshev::nodes(lo, hi, values.len())`.
    pub fn from_values(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        let nodes = Self::nodes(lo, hi, n);
        let weights = (0..n)
            .map(|j| {
                let theta = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64;
                let s = theta.sin();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Self {
            lo,
            hi,
            nodes,
            weights,
            values,
        }
    }

    pub fn try_build<E>(
        lo: f64,
        hi: f64,
        n: usize,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let values = Self::nodes(lo, hi, n)
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>, E>>()?;
        Ok(Self::from_values(lo, hi, values))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xj, wj), fj) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let d = x - xj;
            if d == 0.0 {
                return *fj;
            }
            let c = wj / d;
            num += c * fj;
            den += c;
        }
        num / den
    }
}
