//! Shared fixtures for the benchmarks.

use reacdiff_core::gallery::example_6_1;
use reacdiff_core::ProblemSpec;

/// The triangle problem on [0, 10].
pub fn triangle() -> ProblemSpec {
    example_6_1().spec
}

/// n equally spaced times in (0, dt].
pub fn times(n: usize, dt: f64) -> Vec<f64> {
    (1..=n).map(|i| dt * i as f64 / n as f64).collect()
}

/// n equally spaced interior points of (l1, l2).
pub fn interior(spec: &ProblemSpec, n: usize) -> Vec<f64> {
    let h = spec.length() / (n + 1) as f64;
    (1..=n).map(|i| spec.l1 + h * i as f64).collect()
}
