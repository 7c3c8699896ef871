//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature on finite intervals.

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the Gauss nodes.
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

pub const DEFAULT_MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, err }
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate is at most `max(abs_tol, rel_tol * |I|)`.
///
/// Panels are summed in left-to-right order so repeated calls give
/// bit-identical results.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_ref(&f, a, b, abs_tol, rel_tol, max_panels)
}

fn integrate_ref<F>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("integration limits must be finite: [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_err: 0.0,
            panels: 0,
        });
    }
    if a > b {
        let r = integrate_ref(f, b, a, abs_tol, rel_tol, max_panels)?;
        return Ok(Integral { value: -r.value, ..r });
    }
    let mut panels = vec![gk21(f, a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if !total.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error: err,
                panels: panels.len(),
            });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral {
                value: sum_ordered(&mut panels),
                abs_err: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error: err,
                panels: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error: err,
                panels: panels.len() + 1,
            });
        }
        panels.push(gk21(f, p.a, mid));
        panels.push(gk21(f, mid, p.b));
    }
}

fn sum_ordered(panels: &mut [Panel]) -> f64 {
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().map(|p| p.value).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 0.0, 10).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
        assert_eq!(r.panels, 1);
    }

    #[test]
    fn arctan_integral() {
        let r = integrate(|x| 2.0 / (1.0 + x * x), 0.0, 1.0, 1e-13, 1e-13, 100).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-13, DEFAULT_MAX_PANELS).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_change_sign() {
        let r = integrate(|x| x.exp(), 1.0, 0.0, 1e-13, 1e-13, 100).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn failure_is_reported() {
        let err = integrate(|x| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-15, 0.0, 8).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { panels: 8, .. }));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * 7.0).sin().exp();
        let a = integrate(f, 0.0, 10.0, 1e-13, 1e-13, 1000).unwrap();
        let b = integrate(f, 0.0, 10.0, 1e-13, 1e-13, 1000).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
