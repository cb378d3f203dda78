//! Globally adaptive 21-point Gauss-Kronrod quadrature.
//!
//! Intervals are bisected in order of largest local error until the summed
//! error estimate satisfies `err <= max(abs_tol, rel_tol * |I|)`. The local
//! error uses the QUADPACK rescaling of `|K21 - G10|`.

use alloc::vec::Vec;
use core::convert::Infallible;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, QuadratureConfig, Result};

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
    0.123_491_976_262_065_851_077_208_064_330_160,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn kronrod21<F, E>(f: &mut F, a: f64, b: f64) -> core::result::Result<Panel, E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_k = WGK[10] * fc.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_value = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }

    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Integrates a fallible integrand over `[a, b]`.
///
/// Errors returned by `f` abort the integration and are propagated unchanged;
/// this is what nested integrals use.
pub fn integrate_fallible<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "bounds must be finite"));
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(cfg.max_subdiv + 1);
    panels.push(kronrod21(&mut f, a, b)?);
    let mut evaluations = 21;
    let mut subdivisions = 0usize;

    loop {
        let (value, error, abs_value) = panels.iter().fold((0.0, 0.0, 0.0), |acc, p| {
            (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_value)
        });
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        // Error at the rounding floor cannot be reduced further by bisection.
        let floor = 50.0 * f64::EPSILON * abs_value;
        if error <= target || error <= floor {
            return Ok(Estimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if subdivisions >= cfg.max_subdiv {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                subdivisions,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if mid <= panel.a || mid >= panel.b {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                subdivisions,
            });
        }
        panels.push(kronrod21(&mut f, panel.a, mid)?);
        panels.push(kronrod21(&mut f, mid, panel.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    integrate_fallible(|x| Ok(f(x)), a, b, cfg)
}

/// One fixed 21-point Kronrod panel, useful when no error control is wanted.
pub fn kronrod21_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mut g = |x: f64| Ok::<f64, Infallible>(f(x));
    match kronrod21(&mut g, a, b) {
        Ok(panel) => panel.value,
        Err(never) => match never {},
    }
}
