use crate::error::{Error, Result};
use crate::field::{Provenance, SolutionField};
use crate::problem::{End, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub dx: f64,
    pub dt: f64,
    /// Initial Crank–Nicolson steps replaced by two backward-Euler half
    /// steps each, to damp the response to rough initial data.
    pub startup_steps: usize,
}

impl FdConfig {
    pub fn new(dx: f64, dt: f64) -> Self {
        Self {
            dx,
            dt,
            startup_steps: 2,
        }
    }
}

/// Crank–Nicolson solution on the uniform nodes `x_i = l1 + i·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub dx: f64,
    pub dt: f64,
    /// Field on the grid nodes; u_x by centered differences.
    pub field: SolutionField,
}

struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Dirichlet value rows
    fixed: [Option<f64>; 2],
    robin: [Option<(f64, f64)>; 2],
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], work: &mut [f64]) {
    let n = diag.len();
    work[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * work[i - 1];
        if i < n - 1 {
            work[i] = upper[i] / m;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= work[i] * rhs[i + 1];
    }
}

struct Stepper<'a> {
    spec: &'a ProblemSpec,
    xs: Vec<f64>,
    h: f64,
    op: Operator,
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
    rhs: Vec<f64>,
    work: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a ProblemSpec, n: usize) -> Result<Self> {
        let h = spec.length() / n as f64;
        let xs: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    spec.l2
                } else {
                    spec.l1 + i as f64 * h
                }
            })
            .collect();
        let (a2, b) = (spec.a * spec.a, spec.b);
        let m = n + 1;
        let mut lower = vec![a2 / (h * h); m];
        let mut upper = vec![a2 / (h * h); m];
        let mut diag = vec![-2.0 * a2 / (h * h) - b; m];
        lower[0] = 0.0;
        upper[n] = 0.0;
        let mut fixed = [None, None];
        let mut robin = [None, None];
        for (k, end) in [End::L1, End::L2].into_iter().enumerate() {
            let bc = spec.require_bc(end)?;
            let i = if k == 0 { 0 } else { n };
            if bc.is_beta_zero() {
                fixed[k] = Some(bc.alpha);
                lower[i] = 0.0;
                upper[i] = 0.0;
                diag[i] = 0.0;
            } else {
                // ghost node eliminated through the centered Robin relation
                let sign = if k == 0 { 1.0 } else { -1.0 };
                diag[i] += sign * 2.0 * a2 * bc.alpha / (bc.beta * h);
                if k == 0 {
                    upper[0] = 2.0 * a2 / (h * h);
                } else {
                    lower[n] = 2.0 * a2 / (h * h);
                }
                robin[k] = Some((-sign * 2.0 * a2 / (bc.beta * h), bc.alpha));
            }
        }
        Ok(Self {
            spec,
            xs,
            h,
            op: Operator {
                lower,
                diag,
                upper,
                fixed,
                robin,
            },
            lo: vec![0.0; m],
            di: vec![0.0; m],
            up: vec![0.0; m],
            rhs: vec![0.0; m],
            work: vec![0.0; m],
        })
    }

    /// Inhomogeneous part c(t) of u_t = A·u + c(t).
    fn forcing(&self, t: f64, i: usize) -> f64 {
        let n = self.xs.len() - 1;
        let mut c = if self.spec.source.is_zero() {
            0.0
        } else {
            self.spec.source.value(self.xs[i], t)
        };
        let k = if i == 0 {
            Some(0)
        } else if i == n {
            Some(1)
        } else {
            None
        };
        if let Some(k) = k {
            if let Some((w, _)) = self.op.robin[k] {
                let end = if k == 0 { End::L1 } else { End::L2 };
                c += w * self.spec.require_bc(end).expect("checked").g.value(t);
            }
        }
        c
    }

    fn apply(&self, u: &[f64], i: usize) -> f64 {
        let mut v = self.op.diag[i] * u[i];
        if i > 0 {
            v += self.op.lower[i] * u[i - 1];
        }
        if i + 1 < u.len() {
            v += self.op.upper[i] * u[i + 1];
        }
        v
    }

    /// One θ-step from t to t + k.
    fn step(&mut self, u: &mut [f64], t: f64, k: f64, theta: f64) {
        let n = u.len() - 1;
        for i in 0..=n {
            let explicit = u[i] + (1.0 - theta) * k * self.apply(u, i);
            self.rhs[i] = explicit
                + k * (theta * self.forcing(t + k, i) + (1.0 - theta) * self.forcing(t, i));
            self.lo[i] = -theta * k * self.op.lower[i];
            self.up[i] = -theta * k * self.op.upper[i];
            self.di[i] = 1.0 - theta * k * self.op.diag[i];
        }
        for (k_end, i, end) in [(0, 0, End::L1), (1, n, End::L2)] {
            if let Some(alpha) = self.op.fixed[k_end] {
                self.lo[i] = 0.0;
                self.up[i] = 0.0;
                self.di[i] = 1.0;
                self.rhs[i] = self.spec.require_bc(end).expect("checked").g.value(t + k) / alpha;
            }
        }
        thomas(&self.lo, &self.di, &self.up, &mut self.rhs, &mut self.work);
        u.copy_from_slice(&self.rhs);
    }
}

impl FdSolution {
    /// Index of the node at `x`, if `x` is a node to within roundoff.
    fn node(&self, x: f64) -> Option<usize> {
        let l1 = self.field.xs[0];
        let r = (x - l1) / self.dx;
        let i = r.round();
        ((r - i).abs() < 1e-6 && i >= 0.0 && (i as usize) < self.field.xs.len())
            .then_some(i as usize)
    }

    /// Values at arbitrary `xs` for stored time `it`: nodes are returned
    /// exactly, other points by linear interpolation.
    pub fn sample(&self, xs: &[f64], it: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let nodes = &self.field.xs;
        let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
        let u = self.field.profile(it);
        let ux = self.field.ux_profile(it).expect("fd fields carry u_x");
        let mut out_u = Vec::with_capacity(xs.len());
        let mut out_ux = Vec::with_capacity(xs.len());
        for &x in xs {
            if !(x >= lo - 1e-12 * (hi - lo) && x <= hi + 1e-12 * (hi - lo)) {
                return Err(Error::Domain(format!(
                    "x = {x} outside the fd grid [{lo}, {hi}]"
                )));
            }
            if let Some(i) = self.node(x) {
                out_u.push(u[i]);
                out_ux.push(ux[i]);
            } else {
                let i = (((x - lo) / self.dx).floor() as usize).min(nodes.len() - 2);
                let w = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
                out_u.push((1.0 - w) * u[i] + w * u[i + 1]);
                out_ux.push((1.0 - w) * ux[i] + w * ux[i + 1]);
            }
        }
        Ok((out_u, out_ux))
    }

    /// The field resampled onto `xs`.
    pub fn resample(&self, xs: &[f64]) -> Result<SolutionField> {
        let mut f = SolutionField::new(xs.to_vec(), self.field.ts.clone(), Provenance::Fd, true);
        for it in 0..self.field.ts.len() {
            let (u, ux) = self.sample(xs, it)?;
            let nx = xs.len();
            f.u[it * nx..(it + 1) * nx].copy_from_slice(&u);
            f.ux.as_mut().expect("allocated")[it * nx..(it + 1) * nx].copy_from_slice(&ux);
        }
        Ok(f)
    }
}

/// March from t = 0 through the sorted output times `ts`. Between outputs
/// the step is shrunk so every output time is hit exactly.
pub fn fd_solve(spec: &ProblemSpec, cfg: FdConfig, ts: &[f64]) -> Result<FdSolution> {
    spec.validate().into_result()?;
    if !spec.is_bounded() {
        return Err(Error::Domain(
            "finite differences need a bounded interval".into(),
        ));
    }
    if !(cfg.dx > 0.0 && cfg.dt > 0.0) {
        return Err(Error::Usage(format!(
            "dx and dt must be positive (got {}, {})",
            cfg.dx, cfg.dt
        )));
    }
    if ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Usage(
            "output times must be finite, nonnegative and sorted".into(),
        ));
    }
    let n = (spec.length() / cfg.dx).round().max(2.0) as usize;
    let mut st = Stepper::new(spec, n)?;
    let nodes = st.xs.clone();
    let last = nodes.len() - 1;
    let mut u: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| match i {
            0 => spec.phi.value_right(x),
            i if i == last => spec.phi.value_left(x),
            _ => 0.5 * (spec.phi.value_left(x) + spec.phi.value_right(x)),
        })
        .collect();
    let mut field = SolutionField::new(nodes, ts.to_vec(), Provenance::Fd, false);
    let mut t = 0.0;
    let mut steps_done = 0usize;
    for (it, &target) in ts.iter().enumerate() {
        let span = target - t;
        if span > 0.0 {
            let m = (span / cfg.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let k = span / m as f64;
            for j in 0..m {
                let t0 = t + j as f64 * k;
                if steps_done < cfg.startup_steps {
                    st.step(&mut u, t0, 0.5 * k, 1.0);
                    st.step(&mut u, t0 + 0.5 * k, 0.5 * k, 1.0);
                } else {
                    st.step(&mut u, t0, k, 0.5);
                }
                steps_done += 1;
            }
            t = target;
        }
        let nx = u.len();
        field.u[it * nx..(it + 1) * nx].copy_from_slice(&u);
    }
    let h = st.h;
    Ok(FdSolution {
        dx: h,
        dt: cfg.dt,
        field: field.with_difference_ux(),
    })
}
