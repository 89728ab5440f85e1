//! Globally adaptive Gauss-Kronrod (10/21) quadrature on finite intervals.
//!
//! The integrator starts from a caller-supplied partition (so kinks and
//! discontinuities sit on segment boundaries), repeatedly bisects the
//! segment with the largest error estimate, and stops once the summed
//! estimate drops below the requested absolute tolerance or below the
//! round-off floor of the integral.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Default evaluation budget per integral.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One application of the 21-point Kronrod rule with its embedded 10-point
/// Gauss rule.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    /// Integral of |f| over the segment.
    pub abs_value: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

pub fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let fc = checked(f, center)?;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut res_g = 0.0;

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_k - res_g) * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    Ok(Segment { a, b, value: res_k * half, error: rescale_error(err, res_abs, res_asc), abs_value: res_abs })
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    /// Final partition, sorted by left endpoint.
    pub segments: Vec<Segment>,
}

struct ByError(Segment);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points
/// used as the initial partition. Points must be sorted and finite.
///
/// Succeeds once the summed error estimate is at most `tol`, or at most the
/// round-off floor `100·ε·∫|f|` when `tol` is below what double precision
/// can resolve for this integral.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64, budget: usize) -> Result<Quadrature> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if points.len() < 2 {
        return Err(Error::Domain("need at least two integration limits".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    let mut evals = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(Error::Domain(format!("bad integration interval [{a}, {b}]")));
        }
        if b == a {
            continue;
        }
        if evals + 21 > budget {
            return Err(Error::Budget { budget, error: f64::INFINITY, target: tol });
        }
        heap.push(ByError(kronrod21(f, a, b)?));
        evals += 21;
    }

    let sums = |heap: &BinaryHeap<ByError>, done: &[Segment]| {
        heap.iter()
            .map(|s| &s.0)
            .chain(done.iter())
            .fold((0.0, 0.0), |(e, m), s: &Segment| (e + s.error, m + s.abs_value))
    };
    let (mut total_err, mut total_abs) = sums(&heap, &done);
    let mut iterations = 0usize;
    loop {
        let floor = 100.0 * f64::EPSILON * total_abs;
        if total_err <= tol.max(floor) || heap.is_empty() {
            (total_err, total_abs) = sums(&heap, &done);
            if total_err <= tol.max(100.0 * f64::EPSILON * total_abs) || heap.is_empty() {
                break;
            }
        }
        if evals + 42 > budget {
            return Err(Error::Budget { budget, error: total_err, target: tol });
        }
        let ByError(worst) = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment can no longer be split in floating point.
            done.push(worst);
            continue;
        }
        let left = kronrod21(f, worst.a, mid)?;
        let right = kronrod21(f, mid, worst.b)?;
        evals += 42;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(ByError(left));
        heap.push(ByError(right));
        iterations += 1;
        if iterations.is_multiple_of(128) {
            (total_err, total_abs) = sums(&heap, &done);
        }
    }

    let mut segments: Vec<Segment> = heap.into_iter().map(|s| s.0).chain(done).collect();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    // Sum smallest-first to limit cancellation in the total.
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&i, &j| segments[i].value.abs().total_cmp(&segments[j].value.abs()));
    let value = order.iter().map(|&i| segments[i].value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Quadrature { value, error, evals, segments })
}

/// Re-integrates over the final partition of `q` with every segment halved,
/// i.e. with twice the node density.
pub fn refine_halves<F: Fn(f64) -> f64>(f: &F, q: &Quadrature) -> Result<f64> {
    let mut parts = Vec::with_capacity(2 * q.segments.len());
    for s in &q.segments {
        let mid = 0.5 * (s.a + s.b);
        parts.push(kronrod21(f, s.a, mid)?.value);
        parts.push(kronrod21(f, mid, s.b)?.value);
    }
    parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(parts.iter().sum())
}

/// Sorted, deduplicated partition of `[lo, hi]` containing the given interior
/// points that fall strictly inside.
pub fn partition(lo: f64, hi: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = interior.into_iter().filter(|p| p.is_finite() && *p > lo && *p < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_on_one_segment() {
        let q = integrate(&|x: f64| x.powi(6) - 3.0 * x, &[0.0, 2.0], 1e-14, DEFAULT_BUDGET).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
        assert_eq!(q.evals, 21);
    }

    #[test]
    fn kink_on_partition_point_converges_fast() {
        let f = |x: f64| (x - 0.3).abs();
        let q = integrate(&f, &[0.0, 0.3, 1.0], 1e-14, DEFAULT_BUDGET).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(q.segments.len(), 2);
    }

    #[test]
    fn jump_without_breakpoint_still_converges() {
        let f = |x: f64| if x < 0.123 { 1.0 } else { 0.0 };
        let q = integrate(&f, &[0.0, 1.0], 1e-10, DEFAULT_BUDGET).unwrap();
        assert!((q.value - 0.123).abs() < 1e-10);
    }

    #[test]
    fn budget_is_enforced() {
        let f = |x: f64| (1.0 / x).sin();
        let err = integrate(&f, &[1e-12, 1.0], 1e-15, 2000).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn non_finite_values_are_reported() {
        let f = |x: f64| if x > 0.5 { f64::NAN } else { x };
        let err = integrate(&f, &[0.0, 1.0], 1e-8, 10_000).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn doubled_density_agrees_within_estimate() {
        let f = |x: f64| (-x * x).exp() * (3.0 * x).cos();
        let q = integrate(&f, &[-6.0, 6.0], 1e-12, DEFAULT_BUDGET).unwrap();
        let fine = refine_halves(&f, &q).unwrap();
        assert!((fine - q.value).abs() <= q.error);
    }
}
