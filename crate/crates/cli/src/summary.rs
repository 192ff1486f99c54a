//! JSON run summary.

use serde::Serialize;

pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: String,
    pub provenance: String,
    pub parameters: serde_json::Value,
    pub elapsed_ms: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub a: String,
    pub b: String,
    pub component: String,
    pub region: String,
    pub max_abs: f64,
    pub l2: f64,
    pub argmax_x: f64,
    pub argmax_t: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub method: String,
    pub x: f64,
    pub t: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub x: f64,
    pub p: f64,
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
    /// log2 ratios of consecutive residuals divided by log2 of the h ratio.
    pub observed_order: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub pair: String,
    pub method: String,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub warnings: Vec<String>,
    pub methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<ComparisonReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionReport>,
    pub failures: Vec<FailureReport>,
    pub status: String,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SUMMARY_SCHEMA,
            command: command.to_string(),
            problem: None,
            case: None,
            warnings: Vec::new(),
            methods: Vec::new(),
            comparisons: Vec::new(),
            residuals: Vec::new(),
            inversion: None,
            failures: Vec::new(),
            status: String::new(),
        }
    }
}
