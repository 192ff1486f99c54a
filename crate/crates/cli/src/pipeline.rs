//! The solve / compare / residual / invert pipelines.

use crate::config::{MethodSpec, Pipeline, RegionSpec, RunConfig};
use crate::csvio::{fmt_num, write_field};
use crate::error::{exit, CliError, CliResult};
use crate::summary::{
    ComparisonReport, FailureReport, InversionReport, MethodReport, ResidualReport, Summary,
};
use num_complex::Complex64;
use rayon::prelude::*;
use reacdiff_core::inversion::{
    FnTransform, InversionMethod, Inverter, OperationalU, OperationalUx,
};
use reacdiff_core::kernels::gamma_inverse_chi;
use reacdiff_core::laplace::chi;
use reacdiff_core::oracles::{
    compare_fields, fd_solve, Component, FdConfig, GridRule, Region, SeriesSolution,
};
use reacdiff_core::{classify_case, Error, OperationalSolution, ProblemSpec, Provenance};
use reacdiff_core::{ShortTimeConfig, ShortTimeSolver, SolutionField};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One time column: u, optional u_x and point failures, or the error that stopped it.
type Column = Result<(Vec<f64>, Option<Vec<f64>>, Vec<(usize, String)>), Error>;

fn assemble(xs: &[f64], ts: &[f64], provenance: Provenance, columns: Vec<Column>) -> SolutionField {
    let with_ux = columns.iter().any(|c| matches!(c, Ok((_, Some(_), _))));
    let mut f = SolutionField::new(xs.to_vec(), ts.to_vec(), provenance, with_ux);
    let nx = xs.len();
    for (it, col) in columns.into_iter().enumerate() {
        match col {
            Ok((u, ux, failures)) => {
                f.u[it * nx..(it + 1) * nx].copy_from_slice(&u);
                if let (Some(dst), Some(src)) = (f.ux.as_mut(), ux) {
                    dst[it * nx..(it + 1) * nx].copy_from_slice(&src);
                }
                for (ix, msg) in failures {
                    f.fail(ix, it, msg);
                }
            }
            Err(e) => {
                for ix in 0..nx {
                    f.fail(ix, it, e.to_string());
                }
            }
        }
    }
    f
}

/// Evaluate one method on the grid. Columns in t run on the worker pool.
pub fn solve_field(
    spec: &ProblemSpec,
    method: &MethodSpec,
    xs: &[f64],
    ts: &[f64],
) -> CliResult<SolutionField> {
    match *method {
        MethodSpec::ShortTime { dt, conv_tol } => {
            let cfg = ShortTimeConfig {
                conv_tol,
                ..ShortTimeConfig::with_dt(dt)
            };
            let st = ShortTimeSolver::new(spec, cfg)?;
            let cols: Vec<Column> = ts
                .par_iter()
                .map(|&t| {
                    let col = st.solve_grid(xs, &[t])?;
                    let failures = col
                        .failures
                        .iter()
                        .filter_map(|f| {
                            xs.iter()
                                .position(|&x| x == f.x)
                                .map(|ix| (ix, f.message.clone()))
                        })
                        .collect();
                    Ok((col.u, col.ux, failures))
                })
                .collect();
            Ok(assemble(xs, ts, Provenance::ShortTime, cols))
        }
        MethodSpec::Operational { inversion } => {
            let op = OperationalSolution::new(spec);
            let inv = Inverter::new(inversion)?;
            let cols: Vec<Column> = ts
                .par_iter()
                .map(|&t| {
                    let u = inv.invert_column(&OperationalU(&op), xs, t)?;
                    let ux = inv.invert_column(&OperationalUx(&op), xs, t)?;
                    Ok((u, Some(ux), Vec::new()))
                })
                .collect();
            Ok(assemble(xs, ts, Provenance::Operational, cols))
        }
        MethodSpec::Series { terms } => Ok(SeriesSolution::new(spec, terms)?.field(xs, ts)),
        MethodSpec::Fd { dx, dt } => Ok(fd_solve(spec, FdConfig::new(dx, dt), ts)?.resample(xs)?),
    }
}

fn needs_positive_t(m: &MethodSpec) -> bool {
    matches!(
        m,
        MethodSpec::ShortTime { .. } | MethodSpec::Operational { .. }
    )
}

/// Where the CSV goes.
enum Sink {
    Stdout,
    File(PathBuf),
}

fn open(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| CliError::io(path, e))?,
    ))
}

fn emit_field(field: &SolutionField, sink: &Sink) -> CliResult<Option<String>> {
    match sink {
        Sink::Stdout => {
            write_field(field, std::io::stdout().lock())?;
            Ok(None)
        }
        Sink::File(p) => {
            write_field(field, open(p)?)?;
            Ok(Some(p.display().to_string()))
        }
    }
}

fn record_failures(summary: &mut Summary, label: &str, field: &SolutionField) {
    summary
        .failures
        .extend(field.failures.iter().map(|f| FailureReport {
            method: label.to_string(),
            x: f.x,
            t: f.t,
            message: f.message.clone(),
        }));
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    pub exit_code: i32,
    /// Fields in method order (solve and compare only).
    pub fields: Vec<SolutionField>,
}

fn finish(mut summary: Summary, fields: Vec<SolutionField>) -> RunOutcome {
    let exit_code = if summary.failures.is_empty() {
        summary.status = "ok".into();
        exit::OK
    } else {
        summary.status = "completed-with-warnings".into();
        exit::WARNINGS
    };
    RunOutcome {
        summary,
        exit_code,
        fields,
    }
}

fn region_label(r: &RegionSpec) -> String {
    let mut s = String::new();
    if let Some((a, b)) = r.window {
        s.push_str(&format!("{a}<=x<={b}"));
    }
    if let Some((c, rad)) = r.exclude {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(&format!("|x-{c}|>={rad}"));
    }
    s
}

fn to_region(r: &RegionSpec) -> Region {
    let mut region = match r.window {
        Some((a, b)) => Region::between(a, b),
        None => Region::all(),
    };
    if let Some((c, rad)) = r.exclude {
        region = region.excluding(c, rad);
    }
    region
}

pub fn run(cfg: &RunConfig) -> CliResult<RunOutcome> {
    match &cfg.pipeline {
        Pipeline::InvertPair { pair, inversion } => run_invert_pair(cfg, pair, *inversion),
        _ => {
            let source = cfg
                .problem
                .as_ref()
                .ok_or_else(|| CliError::Usage("--problem is required".into()))?;
            let (spec, _) = source.load()?;
            let warnings = spec.validate().into_result()?;
            let mut summary = Summary::new(match cfg.pipeline {
                Pipeline::Solve(_) => "solve",
                Pipeline::Compare { .. } => "compare",
                Pipeline::Residual { .. } => "residual",
                Pipeline::InvertPair { .. } => unreachable!(),
            });
            summary.problem = Some(source.to_string());
            summary.case = classify_case(&spec).ok().map(|c| format!("{c:?}"));
            summary.warnings = warnings;
            match &cfg.pipeline {
                Pipeline::Solve(m) => run_solve(cfg, &spec, m, summary),
                Pipeline::Compare { methods, region } => {
                    run_compare(cfg, &spec, methods, region.as_ref(), summary)
                }
                Pipeline::Residual { ps, hs } => run_residual(cfg, &spec, ps, hs, summary),
                Pipeline::InvertPair { .. } => unreachable!(),
            }
        }
    }
}

fn times(cfg: &RunConfig, spec: &ProblemSpec, positive: bool) -> CliResult<Vec<f64>> {
    let ts = if cfg.ts.is_empty() {
        vec![spec.horizon]
    } else {
        cfg.ts.clone()
    };
    cfg.check_times(&ts, positive)?;
    Ok(ts)
}

fn timed_field(
    spec: &ProblemSpec,
    m: &MethodSpec,
    xs: &[f64],
    ts: &[f64],
) -> CliResult<(SolutionField, MethodReport)> {
    let start = Instant::now();
    let field = solve_field(spec, m, xs, ts)?;
    let report = MethodReport {
        method: m.to_string(),
        provenance: field.provenance.to_string(),
        parameters: m.parameters(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        points: field.u.len(),
        artifact: None,
    };
    Ok((field, report))
}

fn run_solve(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    m: &MethodSpec,
    mut summary: Summary,
) -> CliResult<RunOutcome> {
    let xs = cfg.xs.resolve(spec)?;
    let ts = times(cfg, spec, needs_positive_t(m))?;
    let (field, mut report) = timed_field(spec, m, &xs, &ts)?;
    let sink = cfg.out.clone().map_or(Sink::Stdout, Sink::File);
    report.artifact = emit_field(&field, &sink)?;
    record_failures(&mut summary, &report.method, &field);
    summary.methods.push(report);
    Ok(finish(summary, vec![field]))
}

fn run_compare(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    methods: &[MethodSpec],
    region: Option<&RegionSpec>,
    mut summary: Summary,
) -> CliResult<RunOutcome> {
    let xs = cfg.xs.resolve(spec)?;
    let ts = times(cfg, spec, methods.iter().any(needs_positive_t))?;
    let mut fields = Vec::new();
    for m in methods {
        let (field, mut report) = timed_field(spec, m, &xs, &ts)?;
        if let Some(dir) = &cfg.out {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            report.artifact =
                emit_field(&field, &Sink::File(dir.join(format!("{}.csv", m.slug()))))?;
        }
        record_failures(&mut summary, &report.method, &field);
        summary.methods.push(report);
        fields.push(field);
    }
    let mut regions = vec![("all".to_string(), Region::all())];
    if let Some(r) = region {
        regions.push((region_label(r), to_region(r)));
    }
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            for component in [Component::U, Component::Ux] {
                if component == Component::Ux && (fields[i].ux.is_none() || fields[j].ux.is_none())
                {
                    continue;
                }
                for (label, region) in &regions {
                    let m = compare_fields(
                        &fields[i],
                        &fields[j],
                        *region,
                        component,
                        GridRule::Exact,
                    )?;
                    summary.comparisons.push(ComparisonReport {
                        a: methods[i].to_string(),
                        b: methods[j].to_string(),
                        component: match component {
                            Component::U => "u".into(),
                            Component::Ux => "ux".into(),
                        },
                        region: label.clone(),
                        max_abs: m.max_abs,
                        l2: m.l2,
                        argmax_x: m.argmax.0,
                        argmax_t: m.argmax.1,
                        points: m.points,
                    });
                }
            }
        }
    }
    if cfg.out.is_none() {
        // no directory: the fields are not written, only the table
        let mut out = std::io::stdout().lock();
        for c in &summary.comparisons {
            writeln!(
                out,
                "{:<32} {:<32} {:<3} {:<20} max_abs={} l2={}",
                c.a,
                c.b,
                c.component,
                c.region,
                fmt_num(c.max_abs),
                fmt_num(c.l2)
            )
            .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(finish(summary, fields))
}

fn run_residual(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    ps: &[f64],
    hs: &[f64],
    mut summary: Summary,
) -> CliResult<RunOutcome> {
    if ps.is_empty() || hs.is_empty() {
        return Err(CliError::Usage("residual needs --p and --h values".into()));
    }
    if let Some(p) = ps.iter().find(|p| !(**p > 0.0)) {
        return Err(CliError::Usage(format!("p = {p} must be positive")));
    }
    let xs = cfg.xs.resolve(spec)?;
    let start = Instant::now();
    let op = OperationalSolution::new(spec);
    let mut rows = Vec::new();
    for &p in ps {
        for &x in &xs {
            let res = hs
                .iter()
                .map(|&h| op.ode_residual(x, p, h))
                .collect::<Result<Vec<_>, _>>()?;
            let order = res
                .windows(2)
                .zip(hs.windows(2))
                .map(|(r, h)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
                .collect();
            rows.push(ResidualReport {
                x,
                p,
                h: hs.to_vec(),
                residual: res,
                observed_order: order,
            });
        }
    }
    summary.methods.push(MethodReport {
        method: "operational-residual".into(),
        provenance: Provenance::Operational.to_string(),
        parameters: serde_json::json!({"p": ps, "h": hs}),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        points: rows.len() * hs.len(),
        artifact: cfg.out.as_ref().map(|p| p.display().to_string()),
    });
    let write = |w: &mut dyn Write| -> CliResult<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["x", "p", "h", "residual"])?;
        for r in &rows {
            for (h, v) in r.h.iter().zip(&r.residual) {
                c.write_record([fmt_num(r.x), fmt_num(r.p), fmt_num(*h), fmt_num(*v)])?;
            }
        }
        c.flush().map_err(|e| CliError::io("<csv>", e))?;
        Ok(())
    };
    match &cfg.out {
        Some(p) => write(&mut open(p)?)?,
        None => write(&mut std::io::stdout().lock())?,
    }
    summary.residuals = rows;
    Ok(finish(summary, Vec::new()))
}

/// A transform with a known inverse, for checking the inversion methods.
pub struct KnownPair {
    pub name: String,
    pub transform: Box<dyn reacdiff_core::Transform>,
    pub exact: Box<dyn Fn(f64) -> f64 + Sync>,
}

/// `one` (1/p), `ramp` (1/p²), `decay:B` (1/(p+B)), `chi:ETA:A:B` (χ ↦ Γ).
pub fn known_pair(name: &str) -> CliResult<KnownPair> {
    let parts: Vec<&str> = name.split(':').collect();
    let arg = |i: usize| -> CliResult<f64> {
        parts
            .get(i)
            .ok_or_else(|| CliError::Usage(format!("pair {name:?} is missing argument {i}")))?
            .parse()
            .map_err(|_| CliError::Usage(format!("bad number in pair {name:?}")))
    };
    let pair = match parts[0] {
        "one" => KnownPair {
            name: name.into(),
            transform: Box::new(FnTransform::new(
                |p: f64| Ok(1.0 / p),
                |p: Complex64| Ok(1.0 / p),
            )),
            exact: Box::new(|_| 1.0),
        },
        "ramp" => KnownPair {
            name: name.into(),
            transform: Box::new(FnTransform::new(
                |p: f64| Ok(1.0 / (p * p)),
                |p: Complex64| Ok(1.0 / (p * p)),
            )),
            exact: Box::new(|t| t),
        },
        "decay" => {
            let b = arg(1)?;
            KnownPair {
                name: name.into(),
                transform: Box::new(FnTransform::new(
                    move |p: f64| Ok(1.0 / (p + b)),
                    move |p: Complex64| Ok(1.0 / (p + b)),
                )),
                exact: Box::new(move |t| (-b * t).exp()),
            }
        }
        "chi" => {
            let (eta, a, b) = (arg(1)?, arg(2)?, arg(3)?);
            if !(eta > 0.0 && a > 0.0 && b >= 0.0) {
                return Err(CliError::Usage("chi needs eta > 0, a > 0, b >= 0".into()));
            }
            KnownPair {
                name: name.into(),
                transform: Box::new(FnTransform::new(
                    move |p: f64| Ok(chi(eta, p, a, b)),
                    move |p: Complex64| Ok(chi(eta, p, a, b)),
                )),
                exact: Box::new(move |t| gamma_inverse_chi(eta, t, a, b).unwrap_or(f64::NAN)),
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown pair {other:?} (one, ramp, decay:B, chi:ETA:A:B)"
            )))
        }
    };
    Ok(pair)
}

fn run_invert_pair(
    cfg: &RunConfig,
    pair: &str,
    inversion: InversionMethod,
) -> CliResult<RunOutcome> {
    let kp = known_pair(pair)?;
    if cfg.ts.is_empty() {
        return Err(CliError::Usage("invert needs --t values".into()));
    }
    cfg.check_times(&cfg.ts, true)?;
    let inv = Inverter::new(inversion)?;
    let start = Instant::now();
    let values: Vec<Result<f64, Error>> = cfg
        .ts
        .par_iter()
        .map(|&t| inv.invert(kp.transform.as_ref(), t))
        .collect();
    let mut summary = Summary::new("invert");
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (&t, v) in cfg.ts.iter().zip(values) {
        let exact = (kp.exact)(t);
        match v {
            Ok(v) => {
                let rel = ((v - exact) / exact).abs();
                worst = worst.max(rel);
                rows.push([t, v, exact, rel]);
            }
            Err(e) => summary.failures.push(FailureReport {
                method: inversion.to_string(),
                x: f64::NAN,
                t,
                message: e.to_string(),
            }),
        }
    }
    summary.methods.push(MethodReport {
        method: inversion.to_string(),
        provenance: Provenance::Operational.to_string(),
        parameters: serde_json::json!({"pair": pair}),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        points: cfg.ts.len(),
        artifact: cfg.out.as_ref().map(|p| p.display().to_string()),
    });
    summary.inversion = Some(InversionReport {
        pair: kp.name.clone(),
        method: inversion.to_string(),
        max_rel_error: worst,
    });
    let write = |w: &mut dyn Write| -> CliResult<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["t", "value", "exact", "rel_error"])?;
        for r in &rows {
            c.write_record(r.map(fmt_num))?;
        }
        c.flush().map_err(|e| CliError::io("<csv>", e))?;
        Ok(())
    };
    match &cfg.out {
        Some(p) => write(&mut open(p)?)?,
        None => write(&mut std::io::stdout().lock())?,
    }
    Ok(finish(summary, Vec::new()))
}

/// Write the summary next to the output, to the given path, or to stderr.
pub fn write_summary(cfg: &RunConfig, summary: &Summary) -> CliResult<()> {
    let text = serde_json::to_string_pretty(summary)?;
    let path = cfg.summary.clone().or_else(|| {
        cfg.out.as_ref().map(|o| {
            if o.extension().is_some() {
                o.with_extension("json")
            } else {
                o.join("summary.json")
            }
        })
    });
    match path {
        Some(p) => {
            let mut w = open(&p)?;
            writeln!(w, "{text}").map_err(|e| CliError::io(&p, e))
        }
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}
