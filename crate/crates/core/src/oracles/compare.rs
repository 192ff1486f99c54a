use crate::error::{Error, Result};
use crate::field::SolutionField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    U,
    Ux,
}

/// How two fields are matched in x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridRule {
    /// Grids must agree point for point.
    Exact,
    /// The second field is interpolated linearly onto the first one's x.
    InterpolateSecond,
}

/// Points taking part in a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    /// Points with |x − center| < radius are left out.
    pub exclude: Option<(f64, f64)>,
}

impl Region {
    pub fn all() -> Self {
        Self {
            x_min: f64::NEG_INFINITY,
            x_max: f64::INFINITY,
            exclude: None,
        }
    }

    pub fn between(x_min: f64, x_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            exclude: None,
        }
    }

    pub fn excluding(mut self, center: f64, radius: f64) -> Self {
        self.exclude = Some((center, radius));
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max && self.exclude.map_or(true, |(c, r)| (x - c).abs() >= r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub max_abs: f64,
    /// Root mean square over the compared points.
    pub l2: f64,
    /// (x, t) of the largest deviation.
    pub argmax: (f64, f64),
    pub points: usize,
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    if xs.len() == 1 {
        return (xs[0] == x).then_some(ys[0]);
    }
    if x < xs[0] || x > xs[xs.len() - 1] {
        return None;
    }
    let i = xs.partition_point(|v| *v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    if x == x0 {
        return Some(ys[i - 1]);
    }
    let w = (x - x0) / (x1 - x0);
    Some((1.0 - w) * ys[i - 1] + w * ys[i])
}

/// Deviation of `fb` from `fa` over `region`; NaN points are skipped.
pub fn compare_fields(
    fa: &SolutionField,
    fb: &SolutionField,
    region: Region,
    component: Component,
    rule: GridRule,
) -> Result<ErrorMetrics> {
    if fa.ts.len() != fb.ts.len()
        || fa
            .ts
            .iter()
            .zip(&fb.ts)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::Usage("fields have different time grids".into()));
    }
    if rule == GridRule::Exact
        && (fa.xs.len() != fb.xs.len()
            || fa
                .xs
                .iter()
                .zip(&fb.xs)
                .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0)))
    {
        return Err(Error::Usage(
            "fields have different x grids and no interpolation was requested".into(),
        ));
    }
    let pick = |f: &SolutionField, it: usize| -> Result<Vec<f64>> {
        match component {
            Component::U => Ok(f.profile(it).to_vec()),
            Component::Ux => f
                .ux_profile(it)
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Usage(format!("{} field has no u_x", f.provenance))),
        }
    };
    let mut m = ErrorMetrics {
        max_abs: 0.0,
        l2: 0.0,
        argmax: (f64::NAN, f64::NAN),
        points: 0,
    };
    let mut sq = 0.0;
    for (it, &t) in fa.ts.iter().enumerate() {
        let (va, vb) = (pick(fa, it)?, pick(fb, it)?);
        for (ix, &x) in fa.xs.iter().enumerate() {
            if !region.contains(x) {
                continue;
            }
            let b = match rule {
                GridRule::Exact => Some(vb[ix]),
                GridRule::InterpolateSecond => interp(&fb.xs, &vb, x),
            };
            let Some(b) = b else { continue };
            let d = (va[ix] - b).abs();
            if d.is_nan() {
                continue;
            }
            m.points += 1;
            sq += d * d;
            if d > m.max_abs || m.argmax.0.is_nan() {
                m.max_abs = m.max_abs.max(d);
                m.argmax = (x, t);
            }
        }
    }
    if m.points > 0 {
        m.l2 = (sq / m.points as f64).sqrt();
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Provenance;

    fn field(xs: Vec<f64>, u: Vec<f64>) -> SolutionField {
        let mut f = SolutionField::new(xs, vec![1.0], Provenance::External, false);
        f.u = u;
        f
    }

    #[test]
    fn identical_fields() {
        let f = field(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]);
        let m =
            compare_fields(&f, &f.clone(), Region::all(), Component::U, GridRule::Exact).unwrap();
        assert_eq!(m.max_abs, 0.0);
        assert_eq!(m.l2, 0.0);
        assert_eq!(m.points, 3);
    }

    #[test]
    fn region_and_argmax() {
        let a = field(vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 4]);
        let b = field(vec![0.0, 1.0, 2.0, 3.0], vec![0.1, 5.0, 0.3, 0.2]);
        let m = compare_fields(
            &a,
            &b,
            Region::all().excluding(1.0, 0.5),
            Component::U,
            GridRule::Exact,
        )
        .unwrap();
        assert_eq!(m.max_abs, 0.3);
        assert_eq!(m.argmax, (2.0, 1.0));
        assert_eq!(m.points, 3);
        let m = compare_fields(
            &a,
            &b,
            Region::between(0.5, 1.5),
            Component::U,
            GridRule::Exact,
        )
        .unwrap();
        assert_eq!(m.max_abs, 5.0);
    }

    #[test]
    fn grid_mismatch_needs_interpolation() {
        let a = field(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]);
        let b = field(vec![0.0, 1.0], vec![0.0, 1.0]);
        assert!(matches!(
            compare_fields(&a, &b, Region::all(), Component::U, GridRule::Exact),
            Err(Error::Usage(_))
        ));
        let m = compare_fields(
            &a,
            &b,
            Region::all(),
            Component::U,
            GridRule::InterpolateSecond,
        )
        .unwrap();
        assert!(m.max_abs < 1e-15);
        assert!(compare_fields(
            &a,
            &b,
            Region::all(),
            Component::Ux,
            GridRule::InterpolateSecond
        )
        .is_err());
    }
}
