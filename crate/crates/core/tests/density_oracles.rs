use std::f64::consts::PI;

use proptest::prelude::*;
use segangle_core::densities::{
    chord_frame_density_at, f_d, f_d_alt, g1_star, g_star, g_star_with, h_gamma, indicator_interval, inner_integral,
    normalization_c, AngleDensity, InnerMethod,
};
use segangle_core::geometry::z_norm_sq;
use segangle_core::quadrature::{adaptive_quadrature, QuadratureConfig};
use segangle_core::validation::grid_integral_g_star;

/// 4/3 - 35 / (9 pi^2): four times the crossing probability of two random segments.
fn c_closed_form() -> f64 {
    4.0 / 3.0 - 35.0 / (9.0 * PI * PI)
}

#[test]
fn normalization_matches_reference_value() {
    let c = normalization_c(&QuadratureConfig::default()).unwrap();
    assert!((c - 0.9393598).abs() <= 5e-4, "c = {c}");
    assert!(c > 0.0 && c < 1.0);
    assert!((c - c_closed_form()).abs() < 1e-7, "c = {c}");
}

#[test]
fn adaptive_matches_grid_at_right_angle() {
    let cfg = QuadratureConfig::default();
    let adaptive = g_star(PI / 2.0, &cfg).unwrap();
    let grid = grid_integral_g_star(PI / 2.0, 2000).unwrap();
    assert!((adaptive - grid).abs() / grid < 1e-5, "{adaptive} vs {grid}");
}

#[test]
fn grid_refinement_converges() {
    let theta = 1.2;
    let g = |n| grid_integral_g_star(theta, n).unwrap();
    assert!((g(2000) - g(4000)).abs() < (g(500) - g(1000)).abs());
}

#[test]
fn inner_closed_form_matches_quadrature() {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let theta = 0.2 + (PI - 0.4) * i as f64 / 40.0;
        for j in 0..=50 {
            let a = j as f64 / 50.0;
            let q = inner_integral(a, theta, InnerMethod::Quadrature, &cfg).unwrap();
            let c = inner_integral(a, theta, InnerMethod::ClosedForm, &cfg).unwrap();
            worst = worst.max((q - c).abs());
        }
    }
    assert!(worst < 1e-9, "worst gap {worst}");
}

#[test]
fn g_star_inner_methods_agree() {
    let cfg = QuadratureConfig::default();
    for &theta in &[0.4, 1.0, PI / 2.0, 2.2, 2.8] {
        let q = g_star_with(theta, &cfg, InnerMethod::Quadrature).unwrap();
        let c = g_star_with(theta, &cfg, InnerMethod::ClosedForm).unwrap();
        assert!((q - c).abs() < 1e-8, "theta {theta}: {q} vs {c}");
    }
}

#[test]
fn normalized_density_properties() {
    let dens = AngleDensity::new(QuadratureConfig::default()).unwrap();
    assert_eq!(dens.g(0.0).unwrap(), 0.0);
    assert_eq!(dens.g(PI).unwrap(), 0.0);
    assert!(dens.cdf(0.0).unwrap().abs() < 1e-6);
    assert!((dens.cdf(PI).unwrap() - 1.0).abs() < 1e-6);
    let mut prev = 0.0;
    for i in 0..512 {
        let theta = PI * i as f64 / 511.0;
        let f = dens.cdf(theta).unwrap();
        assert!(f >= prev - 1e-12, "cdf decreased at {theta}");
        prev = f;
    }
}

#[test]
fn density_table_shape() {
    let dens = AngleDensity::new(QuadratureConfig::default()).unwrap();
    let table = dens.density_table(201).unwrap();
    assert_eq!(table.thetas.len(), 201);
    assert_eq!(table.values[0], 0.0);
    assert_eq!(table.values[200], 0.0);
    let mass = table.trapezoid_integral();
    assert!((0.995..=1.005).contains(&mass), "{mass}");
    let peak = table.argmax();
    assert!(peak > 0 && peak < 200);
    assert!(table.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn f_d_forms_agree_on_grid() {
    for i in 0..1000 {
        let d = 2.0 * i as f64 / 999.0;
        assert!((f_d(d) - f_d_alt(d)).abs() < 1e-8, "d = {d}");
    }
}

#[test]
fn f_d_integrates_to_one() {
    let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-11, max_subdivisions: 2000 };
    let total = adaptive_quadrature(f_d, 0.0, 2.0, &cfg).unwrap().value;
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn chord_frame_density_integrates_to_one_on_grid() {
    // midpoint grid over rho in [0, 1], gamma in [0, 2pi], t_a, t_b in [-1, 1]
    let n = 40;
    let (hr, hg, ht) = (1.0 / n as f64, 2.0 * PI / n as f64, 2.0 / n as f64);
    let mut total = 0.0;
    for i in 0..n {
        let rho = (i as f64 + 0.5) * hr;
        for j in 0..n {
            let gamma = (j as f64 + 0.5) * hg;
            for k in 0..n {
                let t_a = -1.0 + (k as f64 + 0.5) * ht;
                for l in 0..n {
                    let t_b = -1.0 + (l as f64 + 0.5) * ht;
                    total += chord_frame_density_at(rho, gamma, t_a, t_b);
                }
            }
        }
    }
    total *= hr * hg * ht * ht;
    assert!((total - 1.0).abs() < 2e-2, "{total}");
}

#[test]
fn h_gamma_fold_is_uniform() {
    for i in 0..=1000 {
        let beta = PI * i as f64 / 1000.0;
        let folded = h_gamma(PI - beta) + h_gamma(PI + beta);
        assert!((folded - 1.0 / (2.0 * PI)).abs() <= 4.0 * f64::EPSILON, "beta {beta}");
    }
}

proptest! {
    #[test]
    fn g1_star_is_symmetric(a in 0.0f64..=1.0, b in 0.0f64..=1.0, theta in 0.01f64..3.13) {
        prop_assert_eq!(g1_star(a, b, theta).unwrap(), g1_star(b, a, theta).unwrap());
    }

    #[test]
    fn g1_star_through_z_norm(a in 0.0f64..1.0, b in 0.0f64..1.0, theta in 0.05f64..3.09) {
        let z2 = z_norm_sq(a, b, PI - theta, 0.0).unwrap();
        let via_z = (8.0 / PI).powi(2) * (1.0 - a * a).sqrt() * (1.0 - b * b).sqrt() * (1.0 - z2).powi(2);
        let direct = g1_star(a, b, theta).unwrap();
        prop_assert!((via_z - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{} vs {}", via_z, direct);
    }

    #[test]
    fn indicator_matches_inequality(a in 0.0f64..=1.0, theta in 0.001f64..(PI - 0.001), b in 0.0f64..=1.0) {
        let iv = indicator_interval(a, theta);
        let lhs = a * a + b * b + 2.0 * a * b * theta.cos();
        let rhs = theta.sin().powi(2);
        // skip probes within float noise of the boundary
        prop_assume!((lhs - rhs).abs() > 1e-12);
        prop_assert_eq!(iv.contains(b), lhs <= rhs);
        let z2 = z_norm_sq(a, b, PI - theta, 0.0).unwrap();
        prop_assume!((z2 - 1.0).abs() > 1e-9);
        prop_assert_eq!(iv.contains(b), z2 <= 1.0);
    }
}
