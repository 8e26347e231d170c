use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::C64;

// 21-point Gauss-Kronrod rule (QUADPACK qk21): Kronrod nodes on [0, 1], odd
// entries are the 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_600_525_452_184,
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

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 20_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub abs_err: f64,
    pub evals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk21<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = C64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Globally adaptive Gauss-Kronrod quadrature of a complex integrand over
/// [a, b] split at the given interior breakpoints.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in pts.windows(2) {
        let (value, err) = gk21(&mut f, w[0], w[1]);
        evals += 21;
        heap.push(Segment { a: w[0], b: w[1], value, err });
    }
    loop {
        let total: C64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target || err == 0.0 {
            return Ok(QuadResult { value: total, abs_err: err, evals });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { rel_err: err / total.norm(), evals });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature { rel_err: err / total.norm(), evals });
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evals += 42;
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
    }
}

pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|x| C64::new(f(x), 0.0), a, b, &[], opts)?;
    Ok((r.value.re, r.abs_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        // Kronrod rule exact to degree 31, Gauss part to degree 19
        for deg in 0..=30 {
            let (v, _) = gk21(&mut |x: f64| C64::new(x.powi(deg), 0.0), -1.0, 1.0);
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((v.re - exact).abs() < 1e-14, "deg {deg}: {} vs {exact}", v.re);
        }
        let gsum: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((gsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_gaussian() {
        let tau = 1.0;
        let om = 4.0;
        let r = integrate(|t| C64::new(0.0, om * t).exp() * (-t * t / (tau * tau)).exp(), -8.0, 8.0, &[0.0], QuadOptions::default()).unwrap();
        let exact = tau * std::f64::consts::PI.sqrt() * (-om * om * tau * tau / 4.0).exp();
        assert!((r.value.re - exact).abs() < 1e-10 * exact.max(1e-300) + 1e-16, "{} {}", r.value.re, exact);
    }

    #[test]
    fn reports_nonconvergence() {
        let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 0.0, max_intervals: 4 };
        let r = integrate(|t| C64::new((1.0 / t.abs().max(1e-300)).sin(), 0.0), -1.0, 1.0, &[], opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
