//! Brute-force evaluation of the triple-twisted matrix element.
//!
//! Each Bessel state is a ring of plane waves, so the matrix element is a triple azimuthal
//! integral over `(phi, phi1, phi2)` against a three-dimensional momentum delta. This
//! module eliminates the delta by finding every root of the conservation residual with
//! Newton's method and weighting each root by its inverse finite-difference Jacobian.
//! Nothing from the closed form (no `xi`, `phi*`, triangle area or inner angles) is used.
//!
//! Particle 2 moves along `-z'`; its azimuth is measured in its own helicity frame
//! `(x', -y', -z')`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitudes::{fourier_weight, AmplitudeModel};
use crate::kinematics::{CollisionGeometry, Frame, TwistedState};
use crate::numerics::{solve_system, RootFindSpec};
use crate::{Error, Result, Vec3};

/// Identifies the normalization shared with the closed form: the overall
/// `i delta(E_f - E_i) / sqrt(2 pi)` is dropped and the remaining `2 pi` factors are kept.
pub const NORMALIZATION_TAG: &str = "reduced:delta-energy-dropped";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Sum of the final longitudinal momenta, `K`. `None` picks `100 max(kappa_i)`.
    pub paraxial_scale: Option<f64>,
    /// Rigid rotation of the whole event about the lab `z` axis.
    pub event_rotation: f64,
    pub roots: RootFindSpec,
    pub model: AmplitudeModel,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            paraxial_scale: None,
            event_rotation: 0.0,
            roots: RootFindSpec::default(),
            model: AmplitudeModel::default(),
        }
    }
}

impl OracleOptions {
    fn scale_for(&self, geom: &CollisionGeometry) -> f64 {
        self.paraxial_scale.unwrap_or_else(|| 100.0 * geom.kappa.max(geom.kappa1).max(geom.kappa2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSolution {
    /// Initial azimuth about the lab `z` axis.
    pub phi: f64,
    /// Azimuth of particle 1 in `(x', y', z')`.
    pub phi1: f64,
    /// Azimuth of particle 2 in `(x', -y', -z')`.
    pub phi2: f64,
    /// `|det dR/d(phi, phi1, phi2)|` in momentum units cubed.
    pub jacobian_det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solutions: Vec<ConstraintSolution>,
    pub amplitude: Complex64,
    pub normalization_tag: &'static str,
}

struct Setup {
    initial: Frame,
    final1: Frame,
    final2: Frame,
    kappa: f64,
    kappa1: f64,
    kappa2: f64,
    /// Angle-independent longitudinal part `k_z z + p - k1_long z' - k2_long (-z')`, summed
    /// once so that the O(K) terms cancel before the O(kappa) transverse parts are added.
    longitudinal: Vec3,
}

impl Setup {
    fn new(geom: &CollisionGeometry, paraxial_scale: f64, rotation: f64) -> Self {
        let tilted = Frame::tilted(geom.theta).rotated_about_lab_z(rotation);
        let initial = Frame::lab().rotated_about_lab_z(rotation);
        let final2 = tilted.reversed();
        let k_z = 0.5 * paraxial_scale;
        let p = -initial.z * k_z;
        let k1_long = 0.5 * (paraxial_scale + geom.q);
        let k2_long = 0.5 * (paraxial_scale - geom.q);
        Self {
            initial,
            final1: tilted,
            final2,
            kappa: geom.kappa,
            kappa1: geom.kappa1,
            kappa2: geom.kappa2,
            longitudinal: (initial.z * k_z + p) - (tilted.z * k1_long + final2.z * k2_long),
        }
    }

    fn residual(&self, phi: f64, phi1: f64, phi2: f64) -> Vec3 {
        let k = self.initial.cone_momentum(self.kappa, 0.0, phi);
        let k1 = self.final1.cone_momentum(self.kappa1, 0.0, phi1);
        let k2 = self.final2.cone_momentum(self.kappa2, 0.0, phi2);
        (k - k1 - k2) + self.longitudinal
    }
}

/// `k(phi) + p - k1(phi1) - k2(phi2)` in the lab frame, with `p = (0, 0, -k_z)`,
/// `k_z = K/2`, and final longitudinal momenta `(K + q)/2` along `z'` and `(K - q)/2`
/// along `-z'`.
pub fn conservation_residual(
    geom: &CollisionGeometry,
    paraxial_scale: f64,
    phi: f64,
    phi1: f64,
    phi2: f64,
) -> [f64; 3] {
    let r = Setup::new(geom, paraxial_scale, 0.0).residual(phi, phi1, phi2);
    [r.x, r.y, r.z]
}

/// Solves the conservation constraints and sums the plane-wave weights over all roots.
///
/// `amplitude = M0 sqrt(2 pi) / (2 pi)^2 * sum a(phi) conj(a1(phi1)) conj(a2(phi2))
/// kappa kappa1 kappa2 / |det J|`, where `a` are the smooth Fourier weights. Outside the
/// support the solver finds no roots and the amplitude is zero.
pub fn oracle_amplitude(
    geom: &CollisionGeometry,
    m: i32,
    m1: i32,
    m2: i32,
    options: &OracleOptions,
) -> Result<OracleResult> {
    let scale = options.scale_for(geom);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter("paraxial scale must be positive"));
    }
    let setup = Setup::new(geom, scale, options.event_rotation);
    let inv = 1.0 / geom.kappa;
    let roots = solve_system(
        |a: &[f64; 3]| {
            let r = setup.residual(a[0], a[1], a[2]) * inv;
            [r.x, r.y, r.z]
        },
        &options.roots,
    )?;

    let unit_cubed = geom.kappa.powi(3);
    let mut solutions = Vec::with_capacity(roots.len());
    let mut sum = Complex64::new(0.0, 0.0);
    for root in &roots {
        let det = root.jacobian_det * unit_cubed;
        if root.degenerate {
            return Err(Error::DegenerateJacobian { det });
        }
        let [phi, phi1, phi2] = root.angles;
        let a = fourier_weight(geom.kappa, m, geom.kappa, phi).phase;
        let a1 = fourier_weight(geom.kappa1, m1, geom.kappa1, phi1).phase;
        let a2 = fourier_weight(geom.kappa2, m2, geom.kappa2, phi2).phase;
        sum += a * a1.conj() * a2.conj() / det;
        solutions.push(ConstraintSolution { phi, phi1, phi2, jacobian_det: det });
    }
    let amplitude = sum * options.model.m0 * (geom.kappa * geom.kappa1 * geom.kappa2) * TAU.sqrt() / (TAU * TAU);
    Ok(OracleResult { solutions, amplitude, normalization_tag: NORMALIZATION_TAG })
}

/// Azimuth pairs `(phi1, phi12)` with `kappa e(phi12) = k1 e(phi1) + k2 e(phi2)`, found by
/// Newton iteration on the two-torus.
pub fn single_twisted_azimuths(
    kappa: f64,
    k1_mod: f64,
    k2_mod: f64,
    phi2: f64,
    spec: &RootFindSpec,
) -> Result<Vec<(f64, f64)>> {
    let (s2, c2) = phi2.sin_cos();
    let roots = solve_system(
        |a: &[f64; 2]| {
            let (s1, c1) = a[0].sin_cos();
            let (s12, c12) = a[1].sin_cos();
            [(kappa * c12 - k1_mod * c1 - k2_mod * c2) / kappa, (kappa * s12 - k1_mod * s1 - k2_mod * s2) / kappa]
        },
        spec,
    )?;
    Ok(roots.iter().map(|r| (r.angles[0], r.angles[1])).collect())
}

/// The single-twisted element for plane-wave finals `k1`, `k2` (transverse parts), as the
/// coefficient of `delta(kappa - |k1 + k2|)`, with `M0 = 1`.
///
/// The transverse delta selects the cone azimuth parallel to `k1 + k2`; that azimuth is
/// found by Newton iteration. Returns zero off the radial support and at `k1 = -k2`.
pub fn single_twisted_oracle(state: &TwistedState, k1: [f64; 2], k2: [f64; 2]) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let sum = [k1[0] + k2[0], k1[1] + k2[1]];
    let modulus = sum[0].hypot(sum[1]);
    if modulus == 0.0 || (modulus - state.kappa).abs() > 1e-12 * state.kappa {
        return zero;
    }
    let (ux, uy) = (sum[0] / modulus, sum[1] / modulus);
    let roots = solve_system(
        |a: &[f64; 1]| {
            let (s, c) = a[0].sin_cos();
            [c * uy - s * ux]
        },
        &RootFindSpec::default(),
    );
    let Ok(roots) = roots else { return zero };
    roots
        .iter()
        .map(|r| r.angles[0])
        .find(|phi| {
            let (s, c) = phi.sin_cos();
            c * ux + s * uy > 0.0
        })
        .map_or(zero, |phi| fourier_weight(state.kappa, state.m, modulus, phi).phase / (TAU * TAU))
}
