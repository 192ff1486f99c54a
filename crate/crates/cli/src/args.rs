//! Command-line syntax, mapped onto [`RunConfig`].

use crate::bench::BenchConfig;
use crate::config::{
    parse_inversion, parse_methods, MethodParams, MethodSpec, Pipeline, ProblemSource, RegionSpec,
    RunConfig, XGrid,
};
use crate::error::{CliError, CliResult};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "reacdiff",
    version,
    about = "Solve 1-D reaction-diffusion problems and compare the solvers"
)]
pub struct Cli {
    /// Worker threads for grid evaluation (0 = all cores).
    #[arg(long, global = true, env = "REACDIFF_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one method on an x-t grid and write x,t,u,ux.
    Solve(SolveArgs),
    /// Run several methods on the same grid and tabulate their differences.
    Compare(CompareArgs),
    /// Invert a transform with a known original.
    Invert(InvertArgs),
    /// Finite-difference residual of the transformed ODE.
    Residual(ResidualArgs),
    /// Time the short-time and series pipelines on Example 6.1.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Gallery id (example_6_1, luikov, eigenmode, zero) or JSON file.
    #[arg(long)]
    pub problem: String,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Comma-separated x values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "nx"
    )]
    pub x: Option<Vec<f64>>,
    /// Number of equally spaced x points including both ends.
    #[arg(long, default_value_t = 101)]
    pub nx: usize,
    /// Comma-separated output times; defaults to the problem horizon.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
}

impl GridArgs {
    fn xs(&self) -> XGrid {
        match &self.x {
            Some(v) => XGrid::List(v.clone()),
            None => XGrid::Uniform(self.nx),
        }
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Short-time step length.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Short-time convolution tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Series terms K.
    #[arg(long)]
    pub terms: Option<usize>,
    /// `gs[:N]` or `talbot[:M]`.
    #[arg(long)]
    pub inversion: Option<String>,
    /// Finite-difference spatial step.
    #[arg(long)]
    pub dx: Option<f64>,
    /// Finite-difference time step.
    #[arg(long = "dt-fd")]
    pub dt_fd: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> CliResult<MethodParams> {
        let d = MethodParams::default();
        Ok(MethodParams {
            dt: self.dt.unwrap_or(d.dt),
            conv_tol: self.tol.unwrap_or(d.conv_tol),
            terms: self.terms.unwrap_or(d.terms),
            inversion: self
                .inversion
                .as_deref()
                .map(parse_inversion)
                .transpose()?
                .unwrap_or(d.inversion),
            dx: self.dx.unwrap_or(d.dx),
            dt_fd: self.dt_fd.unwrap_or(d.dt_fd),
        })
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (solve) or directory (compare); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path; defaults next to --out, else stderr.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// short-time, operational, series or fd, with optional :key=value parameters.
    #[arg(long, default_value = "short-time")]
    pub method: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated method list.
    #[arg(long, default_value = "short-time,series,fd")]
    pub methods: String,
    /// Extra comparison window LO,HI.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Exclude |x - C| < R from the extra window: C,R.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub exclude: Option<Vec<f64>>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// one, ramp, decay:B or chi:ETA:A:B.
    #[arg(long)]
    pub pair: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value = "gs")]
    pub inversion: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3])]
    pub h: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "nx"
    )]
    pub x: Option<Vec<f64>>,
    #[arg(long, default_value_t = 11)]
    pub nx: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// t points per run.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 7)]
    pub repeats: usize,
    #[arg(long, default_value_t = 2)]
    pub warmup: usize,
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
    /// Write the report as JSON to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl BenchArgs {
    pub fn config(&self) -> BenchConfig {
        BenchConfig {
            points: self.points,
            repeats: self.repeats,
            warmup: self.warmup,
            terms: self.terms,
            ..BenchConfig::default()
        }
    }
}

fn pair(flag: &str, v: &Option<Vec<f64>>) -> CliResult<Option<(f64, f64)>> {
    match v.as_deref() {
        None => Ok(None),
        Some([a, b]) => Ok(Some((*a, *b))),
        Some(_) => Err(CliError::Usage(format!(
            "--{flag} takes exactly two values"
        ))),
    }
}

/// The run configuration for every command but `bench`.
pub fn run_config(cmd: &Command) -> CliResult<Option<RunConfig>> {
    let cfg = match cmd {
        Command::Solve(a) => RunConfig {
            problem: Some(ProblemSource::parse(&a.problem.problem)),
            pipeline: Pipeline::Solve(MethodSpec::parse(&a.method, &a.params.params()?)?),
            xs: a.grid.xs(),
            ts: a.grid.t.clone(),
            out: a.output.out.clone(),
            summary: a.output.summary.clone(),
        },
        Command::Compare(a) => {
            let region = RegionSpec {
                window: pair("window", &a.window)?,
                exclude: pair("exclude", &a.exclude)?,
            };
            let region = (region.window.is_some() || region.exclude.is_some()).then_some(region);
            RunConfig {
                problem: Some(ProblemSource::parse(&a.problem.problem)),
                pipeline: Pipeline::Compare {
                    methods: parse_methods(&a.methods, &a.params.params()?)?,
                    region,
                },
                xs: a.grid.xs(),
                ts: a.grid.t.clone(),
                out: a.output.out.clone(),
                summary: a.output.summary.clone(),
            }
        }
        Command::Invert(a) => RunConfig {
            problem: None,
            pipeline: Pipeline::InvertPair {
                pair: a.pair.clone(),
                inversion: parse_inversion(&a.inversion)?,
            },
            xs: XGrid::Uniform(2),
            ts: a.t.clone(),
            out: a.output.out.clone(),
            summary: a.output.summary.clone(),
        },
        Command::Residual(a) => RunConfig {
            problem: Some(ProblemSource::parse(&a.problem.problem)),
            pipeline: Pipeline::Residual {
                ps: a.p.clone(),
                hs: a.h.clone(),
            },
            xs: a.x.clone().map_or(XGrid::Uniform(a.nx), XGrid::List),
            ts: Vec::new(),
            out: a.output.out.clone(),
            summary: a.output.summary.clone(),
        },
        Command::Bench(_) => return Ok(None),
    };
    if matches!(cfg.xs, XGrid::List(ref v) if v.is_empty()) {
        return Err(CliError::Usage("--x is empty".into()));
    }
    Ok(Some(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("reacdiff").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn compare_command() {
        let cli = parse(&[
            "compare",
            "--problem",
            "example_6_1",
            "--t",
            "0.01",
            "--methods",
            "short-time,series:K=20,fd",
            "--window",
            "1,9",
        ]);
        let cfg = run_config(&cli.command).unwrap().unwrap();
        match cfg.pipeline {
            Pipeline::Compare { methods, region } => {
                assert_eq!(methods.len(), 3);
                assert_eq!(methods[1], MethodSpec::Series { terms: 20 });
                assert_eq!(region.unwrap().window, Some((1.0, 9.0)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.ts, vec![0.01]);
        assert_eq!(cfg.xs, XGrid::Uniform(101));
    }

    #[test]
    fn flags_reach_method_defaults() {
        let cli = parse(&[
            "solve",
            "--problem",
            "zero",
            "--method",
            "series",
            "--terms",
            "5",
            "--x",
            "0,1",
        ]);
        let cfg = run_config(&cli.command).unwrap().unwrap();
        assert_eq!(
            cfg.pipeline,
            Pipeline::Solve(MethodSpec::Series { terms: 5 })
        );
        assert_eq!(cfg.xs, XGrid::List(vec![0.0, 1.0]));
    }

    #[test]
    fn residual_defaults() {
        let cli = parse(&[
            "residual",
            "--problem",
            "example_6_1",
            "--p",
            "1,10,100",
            "--x",
            "2,3,7",
        ]);
        let cfg = run_config(&cli.command).unwrap().unwrap();
        assert_eq!(
            cfg.pipeline,
            Pipeline::Residual {
                ps: vec![1.0, 10.0, 100.0],
                hs: vec![1e-2, 5e-3, 2.5e-3]
            }
        );
    }

    #[test]
    fn bad_method_is_usage() {
        let cli = parse(&["solve", "--problem", "zero", "--method", "euler"]);
        assert_eq!(
            run_config(&cli.command).unwrap_err().exit_code(),
            crate::error::exit::USAGE
        );
    }
}
