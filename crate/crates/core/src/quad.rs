//! Globally adaptive 21-point Gauss–Kronrod quadrature over a chain of
//! intervals, generic over real and complex integrands.

// Nodes and weights are quoted to the published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_368_390,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadConfig {
    pub const fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }

    pub const fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub const fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::new(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<S> {
    pub value: S,
    pub error: f64,
    pub intervals: usize,
}

struct Segment<S> {
    a: f64,
    b: f64,
    value: S,
    error: f64,
    floor: f64,
}

impl<S> PartialEq for Segment<S> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<S> Eq for Segment<S> {}
impl<S> PartialOrd for Segment<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S> Ord for Segment<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<S: Scalar, F: FnMut(f64) -> S>(f: &mut F, a: f64, b: f64) -> Result<Segment<S>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = S::zero();
    let mut resabs = WGK[10] * fc.norm();
    let mut pairs = [(S::zero(), S::zero()); 10];
    for (j, pair) in pairs.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        resk += (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
        *pair = (f1, f2);
    }
    if !resk.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite integrand on [{a:e}, {b:e}]"
        )));
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for (j, (f1, f2)) in pairs.iter().enumerate() {
        resasc += WGK[j] * ((*f1 - mean).norm() + (*f2 - mean).norm());
    }
    let h_abs = h.abs();
    resabs *= h_abs;
    resasc *= h_abs;
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    err = err.max(floor);
    Ok(Segment {
        a,
        b,
        value: resk * h,
        error: err,
        floor,
    })
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<S, F>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult<S>>
where
    S: Scalar,
    F: FnMut(f64) -> S,
{
    integrate_points(f, &[a, b], cfg)
}

/// Integrate `f` over `[points[0], points[last]]`, seeding the subdivision
/// with the given (sorted) interior points. Duplicate points are ignored.
pub fn integrate_points<S, F>(mut f: F, points: &[f64], cfg: QuadConfig) -> Result<QuadResult<S>>
where
    S: Scalar,
    F: FnMut(f64) -> S,
{
    if points.len() < 2 {
        return Ok(QuadResult {
            value: S::zero(),
            error: 0.0,
            intervals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment<S>> = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&mut f, w[0], w[1])?);
        }
    }
    let mut count = heap.len();
    loop {
        let (value, error, floor) = heap
            .iter()
            .chain(done.iter())
            .fold((S::zero(), 0.0, 0.0), |(v, e, fl), s| {
                (v + s.value, e + s.error, fl + s.floor)
            });
        // Intervals that can no longer be split contribute irreducible error.
        let floor = floor + done.iter().map(|s| s.error - s.floor).sum::<f64>();
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.norm());
        if error <= tol || error <= 2.0 * floor || heap.is_empty() {
            return Ok(QuadResult {
                value,
                error,
                intervals: count,
            });
        }
        if count >= cfg.max_intervals {
            return Err(Error::Quadrature {
                estimate: value.re(),
                error,
                intervals: count,
            });
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        let local = worst.a.abs().max(worst.b.abs()).max(1e-280);
        if (worst.b - worst.a) <= 64.0 * f64::EPSILON * local || mid <= worst.a || mid >= worst.b {
            done.push(worst);
            continue;
        }
        heap.push(gk21(&mut f, worst.a, mid)?);
        heap.push(gk21(&mut f, mid, worst.b)?);
        count += 1;
    }
}

/// Sorted, deduplicated breakpoints inside `[a, b]`, including both ends.
pub fn breakpoints_within(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.into_iter().filter(|p| *p > a && *p < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
