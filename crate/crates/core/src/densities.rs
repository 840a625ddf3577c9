//! Analytic densities.
//!
//! The central object is the unnormalized angle density
//!
//! ```text
//! g*(theta) = int_0^1 int_0^1 (1/pi) g1*(rho_ab, rho_cd, theta) 1{ sqrt(1 - rho_ab^2) |sin theta| >= |rho_ab cos theta + rho_cd| } d rho_ab d rho_cd
//! g1*(rho_ab, rho_cd, theta) = (8/pi)^2 sqrt(1 - rho_ab^2) sqrt(1 - rho_cd^2) [1 - (rho_ab^2 + rho_cd^2 + 2 rho_ab rho_cd cos theta) / sin^2 theta]^2
//! ```
//!
//! and `g = g* / c` with `c = int_0^pi g*`. The bracket is `1 - |z|^2`, where `z` is the
//! crossing point of two chord lines whose foot angles differ by `pi - theta`.
//!
//! The global constant of `g*` is four times what the joint law of the chord frames
//! yields: `c` evaluates to `4/3 - 35 / (9 pi^2) ~ 0.9393065`, four times the crossing
//! probability of the two segments. The shape `g` is unaffected since `c` cancels it.
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::ChordFrame;
use crate::quadrature::{adaptive_quadrature, adaptive_quadrature_with_breaks, QuadratureConfig};
use crate::{Error, Result};

/// `(8/pi)^2`.
pub const G1_PREFACTOR: f64 = 64.0 / (PI * PI);

/// Normalizing constant of the chord-distance law, `16 / (3 pi)`.
pub const F_L_CONSTANT: f64 = 16.0 / (3.0 * PI);

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(alloc::format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

fn check_open_angle(theta: f64) -> Result<f64> {
    let s = libm::sin(theta);
    if !(theta > 0.0 && theta < PI) || s == 0.0 {
        return Err(Error::Domain(alloc::format!("theta = {theta} is outside (0, pi)")));
    }
    Ok(s)
}

pub fn g1_star(rho_ab: f64, rho_cd: f64, theta: f64) -> Result<f64> {
    check_unit("rho_ab", rho_ab)?;
    check_unit("rho_cd", rho_cd)?;
    let s = check_open_angle(theta)?;
    let ratio = (rho_ab * rho_ab + rho_cd * rho_cd + 2.0 * rho_ab * rho_cd * libm::cos(theta)) / (s * s);
    let bracket = 1.0 - ratio;
    // product of the roots first so the result is exactly symmetric in the radii
    let roots = libm::sqrt(1.0 - rho_ab * rho_ab) * libm::sqrt(1.0 - rho_cd * rho_cd);
    Ok(G1_PREFACTOR * roots * bracket * bracket)
}

/// Admissible range of `rho_cd` for fixed `(rho_ab, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoInterval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl RhoInterval {
    pub fn contains(&self, rho_cd: f64) -> bool {
        !self.empty && rho_cd >= self.lo && rho_cd <= self.hi
    }

    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }
}

/// Solves `sqrt(1 - rho_ab^2) |sin theta| >= |rho_ab cos theta + rho_cd|` for `rho_cd in [0, 1]`.
pub fn indicator_interval(rho_ab: f64, theta: f64) -> RhoInterval {
    let half_width = libm::sqrt((1.0 - rho_ab * rho_ab).max(0.0)) * libm::sin(theta).abs();
    let center = -rho_ab * libm::cos(theta);
    let lo = (center - half_width).max(0.0);
    let hi = (center + half_width).min(1.0);
    if hi < lo {
        RhoInterval { lo: 0.0, hi: 0.0, empty: true }
    } else {
        RhoInterval { lo, hi, empty: false }
    }
}

/// How the inner `rho_cd` integral of `g*` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum InnerMethod {
    /// Adaptive quadrature of `g1*` over the admissible interval.
    #[default]
    Quadrature,
    /// Exact antiderivative of a quartic times `sqrt(1 - rho_cd^2)`. Loses relative
    /// accuracy as `sin theta -> 0` through cancellation.
    ClosedForm,
}

/// `int_0^x b^k sqrt(1 - b^2) db` for `k = 0..=4`.
fn sqrt_moments(x: f64) -> [f64; 5] {
    let w = libm::sqrt((1.0 - x * x).max(0.0));
    let w3 = w * w * w;
    let mut m = [0.0; 5];
    m[0] = 0.5 * (x * w + libm::asin(x));
    m[1] = (1.0 - w3) / 3.0;
    let mut xp = x; // x^(k-1)
    for k in 2..5 {
        m[k] = ((k as f64 - 1.0) * m[k - 2] - xp * w3) / (k as f64 + 2.0);
        xp *= x;
    }
    m
}

/// `int (1/pi) g1*(rho_ab, rho_cd, theta) d rho_cd` over the admissible interval.
pub fn inner_integral(rho_ab: f64, theta: f64, method: InnerMethod, cfg: &QuadratureConfig) -> Result<f64> {
    check_unit("rho_ab", rho_ab)?;
    let s = check_open_angle(theta)?;
    let iv = indicator_interval(rho_ab, theta);
    if iv.empty || iv.hi <= iv.lo {
        return Ok(0.0);
    }
    match method {
        InnerMethod::Quadrature => {
            let inner_cfg = QuadratureConfig {
                abs_tol: cfg.abs_tol * 1e-3,
                rel_tol: cfg.rel_tol * 1e-3,
                max_subdivisions: cfg.max_subdivisions,
            };
            let mut failure = None;
            let r = adaptive_quadrature(
                |b| match g1_star(rho_ab, b, theta) {
                    Ok(v) => v / PI,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                iv.lo,
                iv.hi,
                &inner_cfg,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(r.value),
            }
        }
        InnerMethod::ClosedForm => {
            // (s^2 - |z|^2 s^2)^2 with |z|^2 s^2 = a^2 + b^2 + 2 a b cos(theta):
            // P(b) = p0 + p1 b - b^2
            let a = rho_ab;
            let p0 = s * s - a * a;
            let p1 = -2.0 * a * libm::cos(theta);
            let q = [p0 * p0, 2.0 * p0 * p1, p1 * p1 - 2.0 * p0, -2.0 * p1, 1.0];
            let (m_hi, m_lo) = (sqrt_moments(iv.hi), sqrt_moments(iv.lo));
            let poly: f64 = (0..5).map(|k| q[k] * (m_hi[k] - m_lo[k])).sum();
            let s4 = s * s * s * s;
            Ok(G1_PREFACTOR / PI * libm::sqrt(1.0 - a * a) * poly / s4)
        }
    }
}

/// Unnormalized angle density, `0` at `theta in {0, pi}`.
pub fn g_star(theta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    g_star_with(theta, cfg, InnerMethod::default())
}

pub fn g_star_with(theta: f64, cfg: &QuadratureConfig, method: InnerMethod) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(alloc::format!("theta = {theta} is outside [0, pi]")));
    }
    if theta == 0.0 || theta == PI || libm::sin(theta) == 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    // the admissible interval changes form at rho_ab = sin(theta)
    let kink = libm::sin(theta);
    let r = adaptive_quadrature_with_breaks(
        |a| match inner_integral(a, theta, method, cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        &[kink],
        cfg,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// `c = int_0^pi g*(theta) d theta`.
pub fn normalization_c(cfg: &QuadratureConfig) -> Result<f64> {
    integrate_g_star(0.0, PI, cfg).map(|(v, _)| v)
}

fn integrate_g_star(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let mut failure = None;
    let r = adaptive_quadrature_with_breaks(
        |t| match g_star(t, cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        &[PI / 2.0],
        cfg,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok((r.value, r.error)),
    }
}

/// The normalized angle density `g` with its constant `c` computed once.
#[derive(Debug, Clone)]
pub struct AngleDensity {
    cfg: QuadratureConfig,
    c: f64,
    c_error: f64,
}

impl AngleDensity {
    pub fn new(cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let (c, c_error) = integrate_g_star(0.0, PI, &cfg)?;
        if !(c > 0.0) {
            return Err(Error::Domain(alloc::format!("normalization constant {c} is not positive")));
        }
        Ok(Self { cfg, c, c_error })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Error estimate of `c` reported by the quadrature.
    pub fn c_error(&self) -> f64 {
        self.c_error
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    pub fn g(&self, theta: f64) -> Result<f64> {
        Ok(g_star(theta, &self.cfg)? / self.c)
    }

    /// `int_0^theta g`.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(alloc::format!("theta = {theta} is outside [0, pi]")));
        }
        Ok(integrate_g_star(0.0, theta, &self.cfg)?.0 / self.c)
    }

    /// `int_lo^hi g`, used for binned comparisons.
    pub fn mass(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(integrate_g_star(lo.max(0.0), hi.min(PI), &self.cfg)?.0 / self.c)
    }

    /// Sequential tabulation on a uniform grid of `[0, pi]`.
    pub fn density_table(&self, grid_n: usize) -> Result<DensityTable> {
        let thetas = theta_grid(grid_n)?;
        let values = thetas.iter().map(|&t| self.g(t)).collect::<Result<Vec<_>>>()?;
        DensityTable::new(thetas, values, self.c)
    }
}

/// `grid_n` equally spaced nodes from `0` to `pi`, both included.
pub fn theta_grid(grid_n: usize) -> Result<Vec<f64>> {
    uniform_grid(0.0, PI, grid_n)
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(alloc::format!("grid needs at least 2 nodes, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect())
}

/// Tabulated `g` on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityTable {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub c: f64,
}

impl DensityTable {
    /// Checks the table invariants: matching lengths, strictly increasing nodes in
    /// `[0, pi]`, non-negative values and, for full tables of at least 200 nodes, a
    /// trapezoid integral within `5e-3` of one.
    pub fn new(thetas: Vec<f64>, values: Vec<f64>, c: f64) -> Result<Self> {
        if thetas.len() != values.len() || thetas.is_empty() {
            return Err(Error::InvalidArgument("thetas and values must be non-empty and of equal length".into()));
        }
        if thetas.windows(2).any(|w| !(w[0] < w[1])) || thetas[0] < 0.0 || thetas[thetas.len() - 1] > PI {
            return Err(Error::InvalidArgument("thetas must increase strictly within [0, pi]".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidArgument("density values must be non-negative".into()));
        }
        let table = Self { thetas, values, c };
        if table.thetas.len() >= 200 && table.thetas[0] == 0.0 && table.thetas[table.thetas.len() - 1] == PI {
            let mass = table.trapezoid_integral();
            if (mass - 1.0).abs() > 5e-3 {
                return Err(Error::Domain(alloc::format!("table integrates to {mass}, not 1")));
            }
        }
        Ok(table)
    }

    pub fn trapezoid_integral(&self) -> f64 {
        self.thetas.windows(2).zip(self.values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
    }

    pub fn argmax(&self) -> usize {
        self.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0)
    }
}

/// Joint density of `(rho, gamma, t_a, t_b)`: `|t_a - t_b| / pi^2` on its support.
pub fn chord_frame_density(cf: &ChordFrame) -> f64 {
    chord_frame_density_at(cf.rho(), cf.gamma(), cf.t_a(), cf.t_b())
}

/// [`chord_frame_density`] on raw coordinates, zero off the support.
pub fn chord_frame_density_at(rho: f64, gamma: f64, t_a: f64, t_b: f64) -> f64 {
    if !(0.0..=1.0).contains(&rho) || !(0.0..=2.0 * PI).contains(&gamma) {
        return 0.0;
    }
    let half = libm::sqrt(1.0 - rho * rho);
    if t_a.abs() > half || t_b.abs() > half {
        return 0.0;
    }
    (t_a - t_b).abs() / (PI * PI)
}

/// Density of the distance from the center to the line through two uniform disk points.
pub fn f_l(l: f64) -> f64 {
    f_l_with_constant(l, F_L_CONSTANT)
}

/// `constant * (1 - l^2)^(3/2)` on `[0, 1]`.
pub fn f_l_with_constant(l: f64, constant: f64) -> f64 {
    if !(0.0..=1.0).contains(&l) {
        return 0.0;
    }
    let w = 1.0 - l * l;
    constant * w * libm::sqrt(w)
}

/// Density of the distance between two uniform disk points, arccos form.
pub fn f_d(d: f64) -> f64 {
    if !(0.0..=2.0).contains(&d) {
        return 0.0;
    }
    let phi = libm::acos(d / 2.0);
    2.0 * d / PI * (2.0 * phi - libm::sin(2.0 * phi))
}

/// The same density through the arccot integrand obtained from the `(t_a, t_b)` marginal.
pub fn f_d_alt(d: f64) -> f64 {
    if !(0.0..=2.0).contains(&d) || d == 2.0 {
        return 0.0;
    }
    let root = libm::sqrt((2.0 - d) * (2.0 + d));
    let num = -4.0 * d + d * d * d + 8.0 * root * arccot((2.0 + d) / root);
    d / PI * num / root
}

/// `arccot(x) = atan(1 / x)` for `x > 0`.
fn arccot(x: f64) -> f64 {
    libm::atan(1.0 / x)
}

/// Triangular density of the difference of two independent `Uniform[0, 2pi]` angles.
pub fn h_gamma(gamma: f64) -> f64 {
    let two_pi = 2.0 * PI;
    if !(-two_pi..=two_pi).contains(&gamma) {
        return 0.0;
    }
    1.0 / two_pi - gamma.abs() / (two_pi * two_pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::z_norm_sq;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn g1_star_examples() {
        let v = g1_star(0.0, 0.0, PI / 2.0).unwrap();
        assert!(close(v, 64.0 / (PI * PI), 1e-14));
        assert!(close(v, 6.484_555_7, 1e-7));
        // 2 rho^2 (1 + cos theta) = sin^2 theta  <=>  rho^2 = (1 - cos theta) / 2
        let theta = 1.1;
        let rho = libm::sqrt((1.0 - libm::cos(theta)) / 2.0);
        assert!(g1_star(rho, rho, theta).unwrap().abs() < 1e-12);
    }

    #[test]
    fn g1_star_domain_errors() {
        assert!(matches!(g1_star(0.1, 0.2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(g1_star(0.1, 0.2, PI), Err(Error::Domain(_))));
        assert!(matches!(g1_star(1.1, 0.2, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g1_star_matches_z_norm_route() {
        // theta = pi - (gamma1 - gamma2)
        for &(a, b, theta) in &[(0.1, 0.3, 1.2), (0.5, 0.2, 2.0), (0.05, 0.7, 0.8), (0.4, 0.4, 1.6)] {
            let z2 = z_norm_sq(a, b, PI - theta, 0.0).unwrap();
            let route = (2.0 / PI).powi(4)
                * (2.0 * PI).powi(2)
                * libm::sqrt(1.0 - a * a)
                * libm::sqrt(1.0 - b * b)
                * (1.0 - z2)
                * (1.0 - z2);
            assert!(close(g1_star(a, b, theta).unwrap(), route, 1e-12));
        }
    }

    #[test]
    fn interval_examples() {
        let iv = indicator_interval(0.6, PI / 2.0);
        assert!(!iv.empty && close(iv.lo, 0.0, 1e-15) && close(iv.hi, 0.8, 1e-15));
        assert!(indicator_interval(1.0, PI / 3.0).empty);
    }

    #[test]
    fn g_star_endpoints_and_domain() {
        let cfg = QuadratureConfig::default();
        assert_eq!(g_star(0.0, &cfg).unwrap(), 0.0);
        assert_eq!(g_star(PI, &cfg).unwrap(), 0.0);
        assert!(g_star(-0.1, &cfg).is_err());
        assert!(g_star(1.0, &cfg).unwrap() > 0.0);
    }

    #[test]
    fn sqrt_moments_against_quadrature() {
        let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-13, max_subdivisions: 500 };
        for &x in &[0.0, 0.3, 0.77, 1.0] {
            let m = sqrt_moments(x);
            for (k, mk) in m.iter().enumerate() {
                let q = adaptive_quadrature(|b| libm::pow(b, k as f64) * libm::sqrt(1.0 - b * b), 0.0, x, &cfg)
                    .unwrap()
                    .value;
                assert!(close(*mk, q, 1e-12), "k={k} x={x}: {mk} vs {q}");
            }
        }
    }

    #[test]
    fn f_l_examples() {
        assert_eq!(f_l(1.0), 0.0);
        assert!(close(f_l(0.0), 16.0 / (3.0 * PI), 1e-15));
        assert!(close(f_l(0.0), 1.69765, 1e-5));
        assert_eq!(f_l(1.5), 0.0);
        let cfg = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_subdivisions: 2000 };
        let total = adaptive_quadrature(f_l, 0.0, 1.0, &cfg).unwrap().value;
        assert!(close(total, 1.0, 1e-9));
    }

    #[test]
    fn f_d_examples() {
        assert_eq!(f_d(0.0), 0.0);
        assert!(f_d(2.0).abs() < 1e-15);
        assert_eq!(f_d_alt(0.0), 0.0);
        assert_eq!(f_d_alt(2.0), 0.0);
        assert!(close(f_d(1.0), f_d_alt(1.0), 1e-10));
        assert_eq!(f_d(-0.1), 0.0);
        assert_eq!(f_d_alt(2.1), 0.0);
    }

    #[test]
    fn h_gamma_examples() {
        assert!(close(h_gamma(0.0), 1.0 / (2.0 * PI), 1e-16));
        assert_eq!(h_gamma(2.0 * PI), 0.0);
        assert_eq!(h_gamma(-2.0 * PI), 0.0);
        assert_eq!(h_gamma(7.0), 0.0);
        // exact: triangle of height 1/(2 pi) on a base of width 4 pi
        let area = 0.5 * (4.0 * PI) * h_gamma(0.0);
        assert!(close(area, 1.0, 1e-12));
    }

    #[test]
    fn chord_density_examples() {
        let cf = ChordFrame::new(0.5, 0.3, 0.3, -0.2).unwrap();
        assert!(close(chord_frame_density(&cf), 0.5 / (PI * PI), 1e-16));
        assert!(close(chord_frame_density(&cf), 0.050660, 1e-6));
        assert_eq!(chord_frame_density_at(0.5, 0.3, 0.9, -0.2), 0.0);
    }

    #[test]
    fn table_invariants() {
        assert!(DensityTable::new(alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0], 1.0).is_err());
        assert!(DensityTable::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, -1.0], 1.0).is_err());
        assert!(DensityTable::new(alloc::vec![0.0, 1.0], alloc::vec![0.0], 1.0).is_err());
        let t = DensityTable::new(alloc::vec![0.0, 1.0, 2.0], alloc::vec![0.0, 1.0, 0.0], 1.0).unwrap();
        assert_eq!(t.argmax(), 1);
        assert!(close(t.trapezoid_integral(), 1.0, 1e-15));
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
        assert_eq!(theta_grid(3).unwrap()[2], PI);
    }
}
