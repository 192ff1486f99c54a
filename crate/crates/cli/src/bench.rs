//! Wall-clock comparison of the short-time and series pipelines.
//!
//! Both sides evaluate the Example 6.1 flux u_x(0, t) on the same t grid.
//! The short-time side includes building its boundary tables, since a
//! caller pays for that once per problem.

use crate::error::{CliError, CliResult};
use reacdiff_core::gallery::example_6_1;
use reacdiff_core::oracles::{fd_solve, FdConfig, SeriesSolution};
use reacdiff_core::{End, ShortTimeConfig, ShortTimeSolver};
use serde::Serialize;
use std::hint::black_box;
use std::time::Instant;

/// Factor quoted in the literature for this comparison. Context only.
pub const QUOTED_FACTOR: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub points: usize,
    pub repeats: usize,
    pub warmup: usize,
    pub terms: usize,
    pub dt: f64,
    /// fd step counts to time; the spatial step is fixed.
    pub fd_steps: [usize; 2],
    pub fd_dx: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            points: 1000,
            repeats: 7,
            warmup: 2,
            terms: 20,
            dt: 1e-2,
            fd_steps: [500, 1000],
            fd_dx: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub pipeline: String,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FdTiming {
    pub steps: usize,
    pub median_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub points: usize,
    pub repeats: usize,
    pub short_time: Timing,
    /// Evaluation only, with the boundary tables already built.
    pub short_time_prebuilt: Timing,
    pub series: Timing,
    /// series median over short-time median.
    pub ratio: f64,
    pub ratio_prebuilt: f64,
    pub low_confidence: bool,
    pub quoted_factor: f64,
    pub fd: Vec<FdTiming>,
    /// Ratio of fd times divided by the ratio of step counts; ≈ 1 when linear.
    pub fd_linearity: f64,
    /// Largest flux difference between the two pipelines, as a sanity check.
    pub max_flux_difference: f64,
}

fn time_it(
    name: &str,
    repeats: usize,
    warmup: usize,
    mut f: impl FnMut() -> CliResult<()>,
) -> CliResult<Timing> {
    for _ in 0..warmup {
        f()?;
    }
    let mut ms = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        f()?;
        ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    ms.sort_by(f64::total_cmp);
    Ok(Timing {
        pipeline: name.to_string(),
        median_ms: ms[ms.len() / 2],
        min_ms: ms[0],
        max_ms: ms[ms.len() - 1],
        samples: repeats,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> CliResult<BenchReport> {
    if cfg.points == 0 || cfg.repeats == 0 {
        return Err(CliError::Usage(
            "bench needs at least one point and one repeat".into(),
        ));
    }
    let problem = example_6_1();
    let spec = &problem.spec;
    let ts: Vec<f64> = (1..=cfg.points)
        .map(|i| cfg.dt * i as f64 / cfg.points as f64)
        .collect();
    let st_cfg = ShortTimeConfig::with_dt(cfg.dt);

    let flux_st = |out: &mut Vec<f64>| -> CliResult<()> {
        let st = ShortTimeSolver::new(spec, st_cfg)?;
        out.clear();
        for &t in &ts {
            out.push(st.boundary_flux_approx(End::L1, t)?);
        }
        Ok(())
    };
    let flux_series = |out: &mut Vec<f64>| -> CliResult<()> {
        let s = SeriesSolution::new(spec, cfg.terms)?;
        out.clear();
        out.extend(ts.iter().map(|&t| s.derivative(spec.l1, t)));
        Ok(())
    };

    let (mut a, mut b) = (Vec::new(), Vec::new());
    let short_time = time_it("short-time", cfg.repeats, cfg.warmup, || {
        flux_st(&mut a)?;
        black_box(&a);
        Ok(())
    })?;
    let prebuilt = ShortTimeSolver::new(spec, st_cfg)?;
    let mut c = Vec::with_capacity(ts.len());
    let short_time_prebuilt = time_it(
        "short-time (tables prebuilt)",
        cfg.repeats,
        cfg.warmup,
        || {
            c.clear();
            for &t in &ts {
                c.push(prebuilt.boundary_flux_approx(End::L1, t)?);
            }
            black_box(&c);
            Ok(())
        },
    )?;
    let series = time_it(
        &format!("series:K={}", cfg.terms),
        cfg.repeats,
        cfg.warmup,
        || {
            flux_series(&mut b)?;
            black_box(&b);
            Ok(())
        },
    )?;
    let max_flux_difference = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut fd = Vec::new();
    for &steps in &cfg.fd_steps {
        let dt = spec.horizon / steps as f64;
        let t = time_it("fd", cfg.repeats.min(3), 1, || {
            black_box(fd_solve(
                spec,
                FdConfig::new(cfg.fd_dx, dt),
                &[spec.horizon],
            )?);
            Ok(())
        })?;
        fd.push(FdTiming {
            steps,
            median_ms: t.median_ms,
        });
    }
    let fd_linearity =
        (fd[1].median_ms / fd[0].median_ms) / (fd[1].steps as f64 / fd[0].steps as f64);

    Ok(BenchReport {
        points: cfg.points,
        repeats: cfg.repeats,
        ratio: series.median_ms / short_time.median_ms,
        ratio_prebuilt: series.median_ms / short_time_prebuilt.median_ms,
        low_confidence: cfg.points < 100 || cfg.repeats < 5,
        short_time,
        short_time_prebuilt,
        series,
        quoted_factor: QUOTED_FACTOR,
        fd,
        fd_linearity,
        max_flux_difference,
    })
}

impl BenchReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for t in [&self.short_time, &self.short_time_prebuilt, &self.series] {
            s.push_str(&format!(
                "{:<28} median {:>10.3} ms  (min {:.3}, max {:.3}, n={})\n",
                t.pipeline, t.median_ms, t.min_ms, t.max_ms, t.samples
            ));
        }
        s.push_str(&format!(
            "ratio series/short-time = {:.2}, {:.2} with tables prebuilt{} (quoted elsewhere: about {}x, not asserted)\n",
            self.ratio,
            self.ratio_prebuilt,
            if self.low_confidence { " [low confidence]" } else { "" },
            self.quoted_factor
        ));
        for f in &self.fd {
            s.push_str(&format!(
                "fd {:>6} steps  median {:>10.3} ms\n",
                f.steps, f.median_ms
            ));
        }
        s.push_str(&format!(
            "fd time ratio / step ratio = {:.2}\n",
            self.fd_linearity
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_low_confidence() {
        let r = run_bench(&BenchConfig {
            points: 1,
            repeats: 1,
            warmup: 0,
            fd_steps: [10, 20],
            fd_dx: 0.1,
            ..BenchConfig::default()
        })
        .unwrap();
        assert!(r.low_confidence);
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert!(r.short_time.median_ms > 0.0 && r.series.median_ms > 0.0);
        assert_eq!(r.fd.len(), 2);
        assert!(r.render().contains("ratio"));
    }

    #[test]
    fn rejects_empty() {
        let c = BenchConfig {
            points: 0,
            ..BenchConfig::default()
        };
        assert!(run_bench(&c).is_err());
    }
}
