//! Run configuration, independent of the command-line syntax.

use crate::error::{CliError, CliResult};
use reacdiff_core::gallery;
use reacdiff_core::inversion::InversionMethod;
use reacdiff_core::{NamedProblem, ProblemSpec};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Gallery(String),
    File(PathBuf),
}

impl ProblemSource {
    /// A gallery id when it names one, otherwise a path.
    pub fn parse(s: &str) -> Self {
        if gallery::IDS.contains(&s) {
            ProblemSource::Gallery(s.to_string())
        } else {
            ProblemSource::File(PathBuf::from(s))
        }
    }

    pub fn load(&self) -> CliResult<(ProblemSpec, Option<NamedProblem>)> {
        match self {
            ProblemSource::Gallery(id) => {
                let g = gallery::by_id(id)?;
                Ok((g.spec.clone(), Some(g)))
            }
            ProblemSource::File(path) => {
                if !path.exists() {
                    return Err(CliError::Usage(format!(
                        "{} is neither a gallery id ({}) nor an existing file",
                        path.display(),
                        gallery::IDS.join(", ")
                    )));
                }
                Ok((ProblemSpec::from_json_file(path)?, None))
            }
        }
    }
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSource::Gallery(id) => f.write_str(id),
            ProblemSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Defaults for method parameters not given inline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodParams {
    pub dt: f64,
    pub conv_tol: f64,
    pub terms: usize,
    pub inversion: InversionMethod,
    pub dx: f64,
    pub dt_fd: f64,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            conv_tol: 1e-10,
            terms: 20,
            inversion: InversionMethod::default(),
            dx: 1e-3,
            dt_fd: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    ShortTime { dt: f64, conv_tol: f64 },
    Operational { inversion: InversionMethod },
    Series { terms: usize },
    Fd { dx: f64, dt: f64 },
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("bad value {v:?} for {key}")))
}

/// `gs`, `gs:16`, `talbot`, `talbot:32`.
pub fn parse_inversion(s: &str) -> CliResult<InversionMethod> {
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let m = match name {
        "gs" | "stehfest" => InversionMethod::GaverStehfest {
            n: arg.map(|v| num("gs", v)).transpose()?.unwrap_or(14),
        },
        "talbot" => InversionMethod::FixedTalbot {
            m: arg.map(|v| num("talbot", v)).transpose()?.unwrap_or(24),
        },
        _ => {
            return Err(CliError::Usage(format!(
                "unknown inversion {s:?} (gs[:N] or talbot[:M])"
            )))
        }
    };
    m.check()?;
    Ok(m)
}

impl MethodSpec {
    /// `name[:key=value]...`, e.g. `series:K=20` or `fd:dx=1e-3:dt=1e-5`.
    pub fn parse(s: &str, defaults: &MethodParams) -> CliResult<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut m = match name {
            "short-time" => MethodSpec::ShortTime {
                dt: defaults.dt,
                conv_tol: defaults.conv_tol,
            },
            "operational" => MethodSpec::Operational {
                inversion: defaults.inversion,
            },
            "series" => MethodSpec::Series {
                terms: defaults.terms,
            },
            "fd" => MethodSpec::Fd {
                dx: defaults.dx,
                dt: defaults.dt_fd,
            },
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown method {name:?} (short-time, operational, series, fd)"
                )))
            }
        };
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("method parameter {kv:?} is not key=value"))
            })?;
            match (&mut m, k) {
                (MethodSpec::ShortTime { dt, .. }, "dt") => *dt = num(k, v)?,
                (MethodSpec::ShortTime { conv_tol, .. }, "tol") => *conv_tol = num(k, v)?,
                (MethodSpec::Operational { inversion }, "N" | "gs") => {
                    *inversion = parse_inversion(&format!("gs:{v}"))?
                }
                (MethodSpec::Operational { inversion }, "M" | "talbot") => {
                    *inversion = parse_inversion(&format!("talbot:{v}"))?
                }
                (MethodSpec::Series { terms }, "K") => *terms = num(k, v)?,
                (MethodSpec::Fd { dx, .. }, "dx") => *dx = num(k, v)?,
                (MethodSpec::Fd { dt, .. }, "dt") => *dt = num(k, v)?,
                _ => {
                    return Err(CliError::Usage(format!(
                        "method {name} has no parameter {k:?}"
                    )))
                }
            }
        }
        Ok(m)
    }

    /// Stable name used for artifact files.
    pub fn slug(&self) -> &'static str {
        match self {
            MethodSpec::ShortTime { .. } => "short-time",
            MethodSpec::Operational { .. } => "operational",
            MethodSpec::Series { .. } => "series",
            MethodSpec::Fd { .. } => "fd",
        }
    }

    pub fn parameters(&self) -> serde_json::Value {
        match *self {
            MethodSpec::ShortTime { dt, conv_tol } => {
                serde_json::json!({"dt": dt, "conv_tol": conv_tol})
            }
            MethodSpec::Operational { inversion } => {
                serde_json::json!({"inversion": inversion.to_string()})
            }
            MethodSpec::Series { terms } => serde_json::json!({"K": terms}),
            MethodSpec::Fd { dx, dt } => serde_json::json!({"dx": dx, "dt": dt}),
        }
    }
}

/// The shorter of the plain and exponent renderings; both parse back exactly.
fn short(x: f64) -> String {
    let (a, b) = (format!("{x}"), format!("{x:e}"));
    if b.len() < a.len() {
        b
    } else {
        a
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::ShortTime { dt, conv_tol } => {
                write!(f, "short-time:dt={}:tol={}", short(*dt), short(*conv_tol))
            }
            MethodSpec::Operational { inversion } => match inversion {
                InversionMethod::GaverStehfest { n } => write!(f, "operational:N={n}"),
                InversionMethod::FixedTalbot { m } => write!(f, "operational:M={m}"),
            },
            MethodSpec::Series { terms } => write!(f, "series:K={terms}"),
            MethodSpec::Fd { dx, dt } => write!(f, "fd:dx={}:dt={}", short(*dx), short(*dt)),
        }
    }
}

/// Split a method list on commas.
pub fn parse_methods(s: &str, defaults: &MethodParams) -> CliResult<Vec<MethodSpec>> {
    let list = s
        .split(',')
        .filter(|m| !m.trim().is_empty())
        .map(|m| MethodSpec::parse(m.trim(), defaults))
        .collect::<CliResult<Vec<_>>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    Ok(list)
}

#[derive(Debug, Clone, PartialEq)]
pub enum XGrid {
    List(Vec<f64>),
    /// n equally spaced points including both ends.
    Uniform(usize),
}

impl XGrid {
    pub fn resolve(&self, spec: &ProblemSpec) -> CliResult<Vec<f64>> {
        let xs = match self {
            XGrid::List(v) => v.clone(),
            XGrid::Uniform(n) => {
                if !spec.is_bounded() {
                    return Err(CliError::Usage(
                        "an unbounded problem needs an explicit --x list".into(),
                    ));
                }
                if *n < 2 {
                    return Err(CliError::Usage("--nx must be at least 2".into()));
                }
                let h = spec.length() / (*n - 1) as f64;
                (0..*n)
                    .map(|i| {
                        if i == n - 1 {
                            spec.l2
                        } else {
                            spec.l1 + i as f64 * h
                        }
                    })
                    .collect()
            }
        };
        if xs.is_empty() {
            return Err(CliError::Usage("x grid is empty".into()));
        }
        if let Some(x) = xs
            .iter()
            .find(|x| !(**x >= spec.l1 && **x <= spec.l2) || !x.is_finite())
        {
            return Err(CliError::Usage(format!(
                "x = {x} lies outside [{}, {}]",
                spec.l1, spec.l2
            )));
        }
        Ok(xs)
    }
}

/// Region used for an additional row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub window: Option<(f64, f64)>,
    pub exclude: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pipeline {
    Solve(MethodSpec),
    Compare {
        methods: Vec<MethodSpec>,
        region: Option<RegionSpec>,
    },
    Residual {
        ps: Vec<f64>,
        hs: Vec<f64>,
    },
    InvertPair {
        pair: String,
        inversion: InversionMethod,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Option<ProblemSource>,
    pub pipeline: Pipeline,
    pub xs: XGrid,
    /// Empty means the problem's horizon.
    pub ts: Vec<f64>,
    /// CSV destination (a directory for comparisons); stdout when absent.
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

impl RunConfig {
    pub fn check_times(&self, ts: &[f64], strictly_positive: bool) -> CliResult<()> {
        if ts.is_empty() {
            return Err(CliError::Usage("t grid is empty".into()));
        }
        if let Some(t) = ts
            .iter()
            .find(|t| !t.is_finite() || **t < 0.0 || (strictly_positive && **t == 0.0))
        {
            return Err(CliError::Usage(format!(
                "t = {t} is not allowed here (times must be finite and {})",
                if strictly_positive {
                    "positive"
                } else {
                    "nonnegative"
                }
            )));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("t values must be increasing".into()));
        }
        Ok(())
    }
}
