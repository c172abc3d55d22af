//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error meets `max(rel_tol·|I|, abs_tol)`. Ties between equal error
//! estimates are broken by position so the refinement order (and therefore
//! the result) is a pure function of the inputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Radial integrals stop where the squared form factor has fallen to
    /// this fraction of its peak.
    pub radial_cutoff_factor: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-9,
            abs_tol: 1e-30,
            max_subdivisions: 1000,
            radial_cutoff_factor: 1e-18,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.rel_tol, "rel_tol")?;
        ensure_positive(self.abs_tol, "abs_tol")?;
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        ensure_positive(self.radial_cutoff_factor, "radial_cutoff_factor")?;
        if self.radial_cutoff_factor >= 1.0 {
            return Err(Error::invalid("radial_cutoff_factor", "must be < 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_323_391_432,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let x = half * XGK[jtwm1];
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let scale = half.abs();
    let value = resk * half;
    resabs *= scale;
    resasc *= scale;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    // fixed order: sort by position before summing
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = CompensatedSum::default();
    let mut error = CompensatedSum::default();
    for s in segs {
        value.add(s.value);
        error.add(s.error);
    }
    (value.value(), error.value())
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Returns [`Error::NonConvergence`] carrying the best estimate when the
/// subdivision budget runs out before the tolerance is met.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult> {
    settings.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("integration bounds".into()));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let first = gauss_kronrod_21(&f, a, b);
    if !first.value.is_finite() {
        return Err(Error::NonFinite("integrand".into()));
    }
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    let (mut value, mut error) = (first.value, first.error);
    loop {
        let tolerance = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= tolerance {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::NonConvergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval no longer divisible in floating point
            heap.push(worst);
            return Err(Error::NonConvergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let left = gauss_kronrod_21(&f, worst.a, mid);
        let right = gauss_kronrod_21(&f, mid, worst.b);
        if !left.value.is_finite() || !right.value.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        (value, error) = totals(&heap);
    }
}

/// Integrates an oscillatory `f` over `[a, b]` panel by panel, each panel
/// `panel` wide (typically a half period), and sums the panels with
/// compensation.
///
/// A cheap first pass estimates the integral's scale so every panel gets an
/// absolute tolerance share of `rel_tol·scale / n_panels`.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panel: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult> {
    settings.validate()?;
    ensure_positive(panel, "panel width")?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::invalid("integration bounds", format!("[{a}, {b}]")));
    }
    let n_panels = ((b - a) / panel).ceil().max(1.0);
    if n_panels > 5e6 {
        return Err(Error::invalid(
            "panel width",
            format!("{n_panels:e} panels requested"),
        ));
    }
    let n = n_panels as usize;
    let edge = |i: usize| if i == n { b } else { a + panel * i as f64 };

    let mut scale = CompensatedSum::default();
    for i in 0..n {
        scale.add(gauss_kronrod_21(&f, edge(i), edge(i + 1)).value.abs());
    }
    let panel_settings = QuadratureSettings {
        abs_tol: settings
            .abs_tol
            .max(settings.rel_tol * scale.value() / n as f64),
        ..*settings
    };

    let mut value = CompensatedSum::default();
    let mut error = CompensatedSum::default();
    let mut subdivisions = 0;
    for i in 0..n {
        match integrate_adaptive(&f, edge(i), edge(i + 1), &panel_settings) {
            Ok(r) => {
                value.add(r.value);
                error.add(r.error_estimate);
                subdivisions += r.subdivisions;
            }
            Err(Error::NonConvergence {
                value: v,
                error_estimate: e,
                subdivisions: s,
            }) => {
                // report the whole-integral best estimate, not just this panel
                value.add(v);
                error.add(e);
                for j in i + 1..n {
                    value.add(gauss_kronrod_21(&f, edge(j), edge(j + 1)).value);
                }
                return Err(Error::NonConvergence {
                    value: value.value(),
                    error_estimate: error.value(),
                    subdivisions: subdivisions + s,
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(QuadratureResult {
        value: value.value(),
        error_estimate: error.value(),
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureSettings {
        QuadratureSettings {
            rel_tol: 1e-13,
            ..Default::default()
        }
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate_adaptive(f64::sin, 0.0, PI, &tight()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial() {
        let r = integrate_adaptive(|x| x * x, 0.0, 1.0, &Default::default()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        let r =
            integrate_adaptive(|x| x.powi(7) - 3.0 * x, -1.0, 2.0, &Default::default()).unwrap();
        assert!((r.value - (255.0 / 8.0 - 4.5)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_radial_moment_with_cutoff() {
        // ∫_0^∞ q e^{-a²q²/2} dq = 1/a²
        let a: f64 = 25e-9;
        let s = QuadratureSettings::default();
        let q_max = (2.0 * (1.0 / s.radial_cutoff_factor).ln()).sqrt() / a;
        let r = integrate_adaptive(|q| q * (-0.5 * a * a * q * q).exp(), 0.0, q_max, &s).unwrap();
        assert!(((r.value * a * a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_family() {
        for omega in [1.0, 10.0, 100.0, 1000.0] {
            // ∫_0^1 sin(ωx) dx = (1 - cos ω)/ω
            let want = (1.0 - f64::cos(omega)) / omega;
            // the answer is O(1/ω) with O(1) cancellation, so bound absolutely
            let s = QuadratureSettings {
                rel_tol: 1e-11,
                abs_tol: 1e-13,
                ..Default::default()
            };
            let r = integrate_adaptive(|x| (omega * x).sin(), 0.0, 1.0, &s).unwrap();
            assert!((r.value - want).abs() < 1e-12, "ω={omega}");
            let p = integrate_panels(|x| (omega * x).sin(), 0.0, 1.0, PI / omega, &s).unwrap();
            assert!((p.value - want).abs() < 1e-12, "ω={omega}");
        }
    }

    #[test]
    fn panels_match_plain_for_smooth_integrands() {
        let f = |x: f64| (-x).exp() * (3.0 * x).sin().powi(2);
        let want = integrate_adaptive(f, 0.0, 40.0, &tight()).unwrap().value;
        let got = integrate_panels(f, 0.0, 40.0, PI / 3.0, &tight())
            .unwrap()
            .value;
        assert!(((got - want) / want).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = QuadratureSettings {
            max_subdivisions: 1,
            ..Default::default()
        };
        let err = integrate_adaptive(|x| (50.0 * x).sin().powi(2), 0.0, 10.0, &s).unwrap_err();
        match err {
            Error::NonConvergence { value, .. } => assert!(value.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * x).cos() / (1.0 + x);
        let a = integrate_adaptive(f, 0.0, 30.0, &tight()).unwrap();
        let b = integrate_adaptive(f, 0.0, 30.0, &tight()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn empty_interval_and_bad_settings() {
        assert_eq!(
            integrate_adaptive(f64::exp, 1.0, 1.0, &Default::default())
                .unwrap()
                .value,
            0.0
        );
        let bad = QuadratureSettings {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate_adaptive(f64::exp, 0.0, 1.0, &bad).is_err());
        assert!(integrate_adaptive(f64::exp, 0.0, f64::INFINITY, &Default::default()).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-13).abs() < 1e-25);
    }
}
