use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use vortex_core::numerics::{
    bessel_j, heron_area, integrate_q_substituted, integrate_q_substituted_on, solve_system, QuadratureSpec,
    RootFindSpec,
};
use vortex_testkit::{bessel_reference, cluster_cells, sign_change_cells, tanh_sinh};

#[test]
fn bessel_matches_reference_on_a_grid() {
    let mut worst = (0.0f64, 0, 0.0);
    for m in 0..=50u32 {
        for i in 0..=400 {
            let x = 0.25 * i as f64;
            let err = (bessel_j(m, x).unwrap() - bessel_reference(m, x)).abs();
            if err > worst.0 {
                worst = (err, m, x);
            }
        }
    }
    assert!(worst.0 <= 1e-10, "worst deviation {worst:?}");
}

#[test]
fn bessel_recurrence_holds() {
    for m in 1..50u32 {
        for i in 1..=200 {
            let x = 0.5 * i as f64;
            let (a, b, c) = (bessel_j(m - 1, x).unwrap(), bessel_j(m, x).unwrap(), bessel_j(m + 1, x).unwrap());
            let lhs = a + c;
            let rhs = 2.0 * m as f64 / x * b;
            let scale = a.abs().max(c.abs()).max(rhs.abs());
            assert!((lhs - rhs).abs() <= 1e-10 * scale, "m={m} x={x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn heron_exact_cases() {
    for (a, b, c, area) in
        [(3.0, 4.0, 5.0, 6.0), (5.0, 12.0, 13.0, 30.0), (8.0, 15.0, 17.0, 60.0), (20.0, 21.0, 29.0, 210.0)]
    {
        assert_eq!(heron_area(a, b, c).unwrap(), area);
    }
    assert_eq!(heron_area(1.0, 2.0, 3.0).unwrap(), 0.0);
    assert_eq!(heron_area(2.0, 2.0, 0.0).unwrap(), 0.0);
}

#[test]
fn q_integral_matches_tanh_sinh_reference() {
    let (theta, kappa) = (0.2f64, 1.0f64);
    let spec = QuadratureSpec { rel_tol: 1e-12, ..QuadratureSpec::default() };
    let st = theta.sin();
    let ours = integrate_q_substituted(|xi| 1.0 / (st * st - xi.sin().powi(2)).sqrt(), kappa, theta, &spec).unwrap();
    let reference = tanh_sinh(|_, from_a, to_b| kappa / (from_a * to_b).sqrt(), -kappa * st, kappa * st, 1e-14);
    assert!((ours - reference).abs() <= 1e-8 * reference, "{ours} vs {reference}");
    assert!((ours - PI * kappa).abs() <= 1e-10);
}

#[test]
fn root_solver_agrees_with_grid_scan_on_circle_intersections() {
    let spec = RootFindSpec::default();
    for &(r1, r2, d) in &[(1.0, 1.0, 1.0), (1.0, 0.7, 1.5), (0.5, 2.0, 1.2), (1.0, 1.0, 2.5)] {
        let f = |a: &[f64; 2]| [(r1 * a[0].cos() - r2 * a[1].cos() - d) / r1, (r1 * a[0].sin() - r2 * a[1].sin()) / r1];
        let roots = solve_system(f, &spec).unwrap();
        let clusters = cluster_cells(&sign_change_cells(f, 180), 180);
        assert_eq!(roots.len(), clusters.len(), "r1={r1} r2={r2} d={d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn heron_is_permutation_invariant(a in 0.01f64..10.0, b in 0.01f64..10.0, t in 0.0f64..1.0) {
        let c = (a - b).abs() + t * (a + b - (a - b).abs());
        let v = heron_area(a, b, c).unwrap();
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert_eq!(heron_area(x, y, z).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn even_integrand_is_twice_the_half_interval(theta in 0.05f64..1.4, kappa in 0.1f64..5.0, k in 0.0f64..3.0) {
        let spec = QuadratureSpec { rel_tol: 1e-10, ..QuadratureSpec::default() };
        let g = |xi: f64| (k * xi).cos() + xi * xi;
        let full = integrate_q_substituted(g, kappa, theta, &spec).unwrap();
        let half = integrate_q_substituted_on(g, kappa, theta, (0.0, FRAC_PI_2), &spec).unwrap();
        prop_assert!((full - 2.0 * half).abs() <= 1e-9 * full.abs().max(1e-300));
    }

    #[test]
    fn denser_start_grid_never_loses_roots(r2 in 0.2f64..2.0, d in 0.1f64..3.0) {
        let f = |a: &[f64; 2]| [a[0].cos() - r2 * a[1].cos() - d, a[0].sin() - r2 * a[1].sin()];
        let coarse = solve_system(f, &RootFindSpec { start_grid_density: 4, ..RootFindSpec::default() }).unwrap();
        let fine = solve_system(f, &RootFindSpec { start_grid_density: 16, ..RootFindSpec::default() }).unwrap();
        prop_assert!(fine.len() >= coarse.len());
    }

    #[test]
    fn negative_orders_follow_parity(m in 0i32..40, x in 0.0f64..80.0) {
        use vortex_core::numerics::bessel_j_signed;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(bessel_j_signed(-m, x).unwrap(), sign * bessel_j_signed(m, x).unwrap());
    }
}
