use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortex_core::amplitudes::{reduced_triple_amplitude, AmplitudeModel};
use vortex_core::kinematics::CollisionGeometry;
use vortex_core::numerics::RootFindSpec;
use vortex_core::oracle::{oracle_amplitude, OracleOptions};
use vortex_testkit::{cluster_cells, simplex_zero_cells, supported_configuration};

fn sample(rng: &mut ChaCha8Rng) -> (CollisionGeometry, i32, i32, i32) {
    let (theta, q, kappa, k1, k2) = supported_configuration(rng);
    let geom = CollisionGeometry::new(theta, q, kappa, k1, k2).unwrap();
    (geom, rng.gen_range(-8..=8), rng.gen_range(-8..=8), rng.gen_range(-8..=8))
}

fn closed(geom: &CollisionGeometry, m: i32, m1: i32, m2: i32) -> Complex64 {
    reduced_triple_amplitude(geom, m, m1, m2, &AmplitudeModel::default()).unwrap().value
}

fn close(a: Complex64, b: Complex64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale
}

/// Typical size of the amplitude at this geometry, so near-zero cosines do not blow up
/// relative comparisons.
fn typical(geom: &CollisionGeometry) -> f64 {
    closed(geom, 0, 0, 0).norm().max(1e-300)
}

#[test]
fn oracle_matches_closed_form_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let options = OracleOptions::default();
    for _ in 0..200 {
        let (geom, m, m1, m2) = sample(&mut rng);
        let oracle = oracle_amplitude(&geom, m, m1, m2, &options).unwrap();
        assert_eq!(oracle.solutions.len(), 4, "{geom:?}");
        let expected = closed(&geom, m, m1, m2);
        assert!(
            close(oracle.amplitude, expected, typical(&geom), 1e-8),
            "{geom:?} m={m} m1={m1} m2={m2}: {} vs {expected}",
            oracle.amplitude
        );
    }
}

#[test]
fn oracle_matches_closed_form_after_swapping_the_final_particles() {
    // the swap maps one valid configuration onto another; both sides must still agree
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let options = OracleOptions::default();
    for _ in 0..50 {
        let (geom, m, m1, m2) = sample(&mut rng);
        let swapped = CollisionGeometry { q: -geom.q, kappa1: geom.kappa2, kappa2: geom.kappa1, ..geom };
        let oracle = oracle_amplitude(&swapped, m, m2, m1, &options).unwrap();
        assert!(close(oracle.amplitude, closed(&swapped, m, m2, m1), typical(&swapped), 1e-8));
    }
}

#[test]
fn oracle_is_invariant_under_event_rotation_paraxial_scale_and_start_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let (geom, m, m1, m2) = sample(&mut rng);
        let base = oracle_amplitude(&geom, m, m1, m2, &OracleOptions::default()).unwrap().amplitude;
        let scale = typical(&geom);
        let variants = [
            OracleOptions { event_rotation: rng.gen_range(0.0..std::f64::consts::TAU), ..OracleOptions::default() },
            OracleOptions {
                paraxial_scale: Some(200.0 * geom.kappa.max(geom.kappa1).max(geom.kappa2)),
                ..OracleOptions::default()
            },
            OracleOptions {
                roots: RootFindSpec { start_grid_density: 16, ..RootFindSpec::default() },
                ..OracleOptions::default()
            },
        ];
        for options in &variants {
            let other = oracle_amplitude(&geom, m, m1, m2, options).unwrap().amplitude;
            assert!(close(base, other, scale, 1e-10), "{options:?}: {base} vs {other}");
        }
    }
}

/// Roots of the residual by scanning alone. The final transverse momenta are perpendicular
/// to `z'`, so the `z'` component depends on `phi` only: scan it in one dimension, bisect each
/// sign change, then locate zeros of the two remaining components over `(phi1, phi2)`.
fn scanned_roots(geom: &CollisionGeometry) -> Vec<[f64; 3]> {
    let k = 100.0 * geom.kappa.max(geom.kappa1).max(geom.kappa2);
    let frame = vortex_core::kinematics::Frame::tilted(geom.theta);
    let project = |r: [f64; 3], axis: vortex_core::Vec3| (r[0] * axis.x + r[1] * axis.y + r[2] * axis.z) / geom.kappa;
    let along_z = |phi: f64| project(vortex_core::oracle::conservation_residual(geom, k, phi, 0.0, 0.0), frame.z);

    let n = 4096;
    let h = std::f64::consts::TAU / n as f64;
    let mut azimuths = Vec::new();
    for i in 0..n {
        let (mut a, mut b) = ((i as f64 + 0.5) * h, (i as f64 + 1.5) * h);
        let (mut fa, fb) = (along_z(a), along_z(b));
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            let fm = along_z(mid);
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        azimuths.push(0.5 * (a + b));
    }

    let cells = 360;
    let step = std::f64::consts::TAU / cells as f64;
    let mut roots = Vec::new();
    for phi in azimuths {
        let transverse = |a: &[f64; 2]| {
            let r = vortex_core::oracle::conservation_residual(geom, k, phi, a[0], a[1]);
            [project(r, frame.x), project(r, frame.y)]
        };
        for cluster in cluster_cells(&simplex_zero_cells(transverse, cells), cells) {
            let c = cluster[0];
            roots.push([phi, (c[0] as f64 + 0.5) * step, (c[1] as f64 + 0.5) * step]);
        }
    }
    roots
}

#[test]
fn solution_count_matches_dense_grid_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let geom = if i % 10 == 9 {
            // outside the stripe
            CollisionGeometry::new(0.3, 0.0, 1.0, 0.2, rng.gen_range(0.1..0.5)).unwrap()
        } else {
            sample(&mut rng).0
        };
        let scanned = scanned_roots(&geom);
        let solved = oracle_amplitude(&geom, 0, 0, 0, &OracleOptions::default()).unwrap().solutions;
        assert_eq!(solved.len(), scanned.len(), "{geom:?}");
        for s in &solved {
            let near = scanned.iter().any(|r| {
                [s.phi, s.phi1, s.phi2]
                    .iter()
                    .zip(r)
                    .all(|(a, b)| vortex_core::numerics::angle_difference(*a, *b).abs() < 0.05)
            });
            assert!(near, "root {s:?} not found by the scan: {scanned:?}");
        }
    }
}

#[test]
fn phases_cancel_for_odd_m_at_xi_zero() {
    let geom = CollisionGeometry::new(0.2, 0.0, 1.0, 0.9, 0.7).unwrap();
    let r = oracle_amplitude(&geom, 1, 0, 0, &OracleOptions::default()).unwrap();
    assert!(r.amplitude.norm() < 1e-10 * typical(&geom));
}
