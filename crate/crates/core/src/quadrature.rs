//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed error
//! satisfies `error <= max(abs_tol, rel_tol * |value|)`.
#![allow(clippy::excessive_precision)]
use alloc::vec::Vec;

use crate::{Error, Result};

/// Identifier of the nested rule, recorded in run reports.
pub const RULE_ID: &str = "gauss-kronrod-7-15-adaptive-bisection";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-7, max_subdivisions: 2000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::InvalidArgument(alloc::format!(
                "quadrature config must have positive tolerances and at least one subdivision: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

// Kronrod abscissae on [0, 1); odd indices are the Gauss 7-point nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]`.
pub fn adaptive_quadrature<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    adaptive_quadrature_with_breaks(f, a, b, &[], cfg)
}

/// Like [`adaptive_quadrature`], but starts from panels split at `breaks` (points
/// outside `(a, b)` are ignored). Use it to put known kinks on panel boundaries.
pub fn adaptive_quadrature_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(alloc::format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, subdivisions: 0 });
    }

    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    let mut lo = a;
    for hi in cuts.into_iter().chain(core::iter::once(b)) {
        panels.push(gk15(&mut f, lo, hi));
        lo = hi;
    }

    let mut subdivisions = 0;
    loop {
        let (value, error) = panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Domain(alloc::format!("integrand is not finite on [{a}, {b}]")));
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, subdivisions });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence { estimate: value, error, subdivisions });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval cannot be split further in floating point
            return Err(Error::QuadratureNonConvergence { estimate: value, error, subdivisions });
        }
        panels.push(gk15(&mut f, p.a, mid));
        panels.push(gk15(&mut f, mid, p.b));
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn square() {
        let r = adaptive_quadrature(|x| x * x, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn three_halves_power() {
        let cfg = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_subdivisions: 2000 };
        let r = adaptive_quadrature(|x| libm::pow(1.0 - x * x, 1.5), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 3.0 * PI / 16.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn kink_with_break() {
        let cfg = QuadratureConfig::default();
        let r = adaptive_quadrature_with_breaks(|x| (x - 0.3).abs(), 0.0, 1.0, &[0.3], &cfg).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(r.subdivisions, 0);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-15, max_subdivisions: 3 };
        match adaptive_quadrature(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, &cfg) {
            Err(Error::QuadratureNonConvergence { estimate, subdivisions, .. }) => {
                assert_eq!(subdivisions, 3);
                assert!(estimate > 1.0 && estimate < 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_config_and_interval() {
        let bad = QuadratureConfig { abs_tol: 0.0, ..Default::default() };
        assert!(adaptive_quadrature(|x| x, 0.0, 1.0, &bad).is_err());
        assert!(adaptive_quadrature(|x| x, 1.0, 0.0, &QuadratureConfig::default()).is_err());
        let r = adaptive_quadrature(|x| x, 2.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
