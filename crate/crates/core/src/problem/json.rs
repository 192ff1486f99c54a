//! Versioned JSON problem documents.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "a": 0.5, "b": 0.0, "l1": 0.0, "l2": 10.0, "horizon": 0.01,
//!   "phi": {"type": "piecewise_linear", "points": [[0, 0], [5, 2.5], [10, 0]]},
//!   "source": [{"space": {"type": "constant", "value": 1}, "time": {"type": "exponential", "amplitude": 1, "rate": -1}}],
//!   "bc1": {"alpha": 1, "beta": 0, "g": {"type": "constant", "value": 0}},
//!   "bc2": {"alpha": 1, "beta": 0}
//! }
//! ```
//!
//! Infinite endpoints are written as the strings `"-inf"` / `"inf"`, with the
//! matching boundary condition omitted or `null`.

use super::{
    BoundaryCondition, ProblemSpec, SourceFunction, SourceTerm, SpaceExpr, SpaceFunction, TimeExpr,
    TimeFunction,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Finite(f64),
    Named(NamedEndpoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NamedEndpoint {
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "inf", alias = "+inf")]
    PosInf,
}

impl Endpoint {
    fn value(self) -> f64 {
        match self {
            Endpoint::Finite(x) => x,
            Endpoint::Named(NamedEndpoint::NegInf) => f64::NEG_INFINITY,
            Endpoint::Named(NamedEndpoint::PosInf) => f64::INFINITY,
        }
    }

    fn from_value(x: f64) -> Self {
        if x == f64::INFINITY {
            Endpoint::Named(NamedEndpoint::PosInf)
        } else if x == f64::NEG_INFINITY {
            Endpoint::Named(NamedEndpoint::NegInf)
        } else {
            Endpoint::Finite(x)
        }
    }
}

fn zero_time() -> TimeExpr {
    TimeExpr::Constant { value: 0.0 }
}

fn unit_horizon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryDocument {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "zero_time")]
    pub g: TimeExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTermDocument {
    pub space: SpaceExpr,
    pub time: TimeExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub schema: u32,
    pub a: f64,
    pub b: f64,
    pub l1: Endpoint,
    pub l2: Endpoint,
    #[serde(default = "unit_horizon")]
    pub horizon: f64,
    pub phi: SpaceExpr,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub source: Vec<SourceTermDocument>,
    #[serde(default)]
    pub bc1: Option<BoundaryDocument>,
    #[serde(default)]
    pub bc2: Option<BoundaryDocument>,
}

impl ProblemDocument {
    pub fn into_spec(self) -> Result<ProblemSpec> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let bc = |d: Option<BoundaryDocument>| -> Result<Option<BoundaryCondition>> {
            d.map(|d| {
                Ok(BoundaryCondition::new(
                    d.alpha,
                    d.beta,
                    TimeFunction::from_expr(d.g)?,
                ))
            })
            .transpose()
        };
        let terms = self
            .source
            .into_iter()
            .map(|t| {
                Ok(SourceTerm {
                    space: SpaceFunction::from_expr(t.space)?,
                    time: TimeFunction::from_expr(t.time)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemSpec {
            a: self.a,
            b: self.b,
            l1: self.l1.value(),
            l2: self.l2.value(),
            horizon: self.horizon,
            source: SourceFunction::separable(terms),
            phi: SpaceFunction::from_expr(self.phi)?,
            bc1: bc(self.bc1)?,
            bc2: bc(self.bc2)?,
        })
    }

    /// Document for a spec built from expressions only.
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        let custom =
            |what: &str| Error::Spec(format!("{what} is a closure and cannot be serialized"));
        let bc = |b: &Option<BoundaryCondition>, name: &str| -> Result<Option<BoundaryDocument>> {
            b.as_ref()
                .map(|b| {
                    Ok(BoundaryDocument {
                        alpha: b.alpha,
                        beta: b.beta,
                        g: b.g.expr().cloned().ok_or_else(|| custom(name))?,
                    })
                })
                .transpose()
        };
        let source = spec
            .source
            .terms()
            .ok_or_else(|| custom("source"))?
            .iter()
            .map(|t| {
                Ok(SourceTermDocument {
                    space: t.space.expr().cloned().ok_or_else(|| custom("source"))?,
                    time: t.time.expr().cloned().ok_or_else(|| custom("source"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema: SCHEMA_VERSION,
            a: spec.a,
            b: spec.b,
            l1: Endpoint::from_value(spec.l1),
            l2: Endpoint::from_value(spec.l2),
            horizon: spec.horizon,
            phi: spec.phi.expr().cloned().ok_or_else(|| custom("phi"))?,
            source,
            bc1: bc(&spec.bc1, "bc1 g")?,
            bc2: bc(&spec.bc2, "bc2 g")?,
        })
    }
}

impl ProblemSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str::<ProblemDocument>(text)?.into_spec()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProblemDocument::from_spec(
            self,
        )?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "schema": 1, "a": 0.5, "b": 0.0, "l1": 0, "l2": 10, "horizon": 0.01,
        "phi": {"type": "piecewise_linear", "points": [[0, 0], [5, 2.5], [10, 0]]},
        "bc1": {"alpha": 1, "beta": 0},
        "bc2": {"alpha": 1, "beta": 0, "g": {"type": "constant", "value": 0}}
    }"#;

    #[test]
    fn parses_document() {
        let s = ProblemSpec::from_json_str(DOC).unwrap();
        assert_eq!(s.phi.value(5.0), 2.5);
        assert_eq!(s.phi.breakpoints(), &[0.0, 5.0, 10.0]);
        assert!(s.validate().is_ok());
        assert!(s.source.is_zero());
    }

    #[test]
    fn round_trip() {
        let s = ProblemSpec::from_json_str(DOC).unwrap();
        let text = s.to_json_string().unwrap();
        let back = ProblemSpec::from_json_str(&text).unwrap();
        assert_eq!(
            ProblemDocument::from_spec(&s).unwrap(),
            ProblemDocument::from_spec(&back).unwrap()
        );
    }

    #[test]
    fn infinite_endpoints() {
        let s = ProblemSpec::from_json_str(
            r#"{"schema": 1, "a": 1, "b": 0, "l1": 0, "l2": "inf",
                "phi": {"type": "constant", "value": 3},
                "source": [{"space": {"type": "constant", "value": 1}, "time": {"type": "constant", "value": 2}}],
                "bc1": {"alpha": 1, "beta": 0, "g": {"type": "constant", "value": 7}}, "bc2": null}"#,
        )
        .unwrap();
        assert_eq!(s.l2, f64::INFINITY);
        assert!(s.validate().is_ok());
        assert_eq!(s.source.value(1.0, 0.0), 2.0);
        let text = s.to_json_string().unwrap();
        assert!(text.contains("\"inf\""));
    }

    #[test]
    fn rejects_wrong_schema_and_fields() {
        assert!(matches!(
            ProblemSpec::from_json_str(&DOC.replace("\"schema\": 1", "\"schema\": 2")),
            Err(Error::Parse(_))
        ));
        assert!(ProblemSpec::from_json_str(&DOC.replace("\"horizon\"", "\"horizn\"")).is_err());
    }
}
