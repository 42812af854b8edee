//! Closed-form scattering matrix elements.
//!
//! Every amplitude here assumes a constant dynamical amplitude `M0` over the momentum
//! cones. The triple-twisted element is reported without the overall factor
//! `i * delta(E_f - E_i) / sqrt(2 pi)`; the oracle drops the same factor.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::kinematics::{angles, stripe_contains, CollisionGeometry, TriangleGeometry, TwistedState};
use crate::numerics::{heron_area, GaussLegendre, QuadratureSpec};
use crate::{Error, Result};

/// Inside the stripe, a triangle area below `DEGENERACY_FLOOR * kappa~^2` is rejected
/// instead of producing a huge `1/area`.
pub const DEGENERACY_FLOOR: f64 = 1e-9;

/// Relative tolerance for "this momentum lies on the cone".
pub const CONE_TOLERANCE: f64 = 1e-12;

/// The factored dynamical amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeModel {
    pub m0: Complex64,
}

impl Default for AmplitudeModel {
    fn default() -> Self {
        Self { m0: Complex64::new(1.0, 0.0) }
    }
}

/// `i^n` without rounding noise.
pub fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Smooth factor of the plane-wave weight of a Bessel state,
/// `(-i)^m e^{i m phi_k} sqrt(2 pi) / sqrt(kappa)`, and whether `|k_perp|` sits on the cone.
/// The radial `delta(|k| - kappa)` itself is left to the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierWeight {
    pub phase: Complex64,
    pub on_cone: bool,
}

pub fn fourier_weight(kappa: f64, m: i32, k_perp_modulus: f64, k_azimuth: f64) -> FourierWeight {
    let phase = i_pow(-m) * Complex64::cis(m as f64 * k_azimuth) * (TAU / kappa).sqrt();
    FourierWeight { phase, on_cone: (k_perp_modulus - kappa).abs() <= CONE_TOLERANCE * kappa }
}

/// One branch of the single-twisted geometry; `sign` is the common sign of both `±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTwistedSolution {
    pub phi1: f64,
    pub phi12: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleTwistedSolutions {
    Pair([SingleTwistedSolution; 2]),
    /// The circles touch: both branches coincide.
    Tangent(SingleTwistedSolution),
}

impl SingleTwistedSolutions {
    pub fn as_slice(&self) -> &[SingleTwistedSolution] {
        match self {
            Self::Pair(p) => p,
            Self::Tangent(s) => core::slice::from_ref(s),
        }
    }
}

/// With particle 2 projected on the plane wave `k2`, the momentum of particle 1 runs over
/// a circle of radius `kappa` around `-k2`. For a given `|k1|` the azimuths are
/// `phi1 = phi2 ± arccos((kappa^2 - k1^2 - k2^2) / (2 k1 k2))` and
/// `phi12 = phi2 ± arccos((kappa^2 + k2^2 - k1^2) / (2 kappa k2))` with the same sign.
/// Both openings are evaluated as `atan2(4 area, ..)` of the `(kappa, k1, k2)` triangle.
pub fn single_twisted_solutions(kappa: f64, k1_mod: f64, k2_mod: f64, phi2: f64) -> Result<SingleTwistedSolutions> {
    if !(kappa > 0.0 && k1_mod > 0.0 && k2_mod > 0.0) {
        return Err(Error::InvalidParameter("moduli must be positive"));
    }
    let cos1 = (kappa * kappa - k1_mod * k1_mod - k2_mod * k2_mod) / (2.0 * k1_mod * k2_mod);
    let cos12 = (kappa * kappa + k2_mod * k2_mod - k1_mod * k1_mod) / (2.0 * kappa * k2_mod);
    let slack = 8.0 * f64::EPSILON;
    if cos1.abs() > 1.0 + slack || cos12.abs() > 1.0 + slack {
        return Err(Error::EmptySupport);
    }
    // atan2 against the stable Heron area keeps full accuracy near tangency, where arccos
    // loses digits
    let four_area = 4.0 * heron_area(kappa, k1_mod, k2_mod).unwrap_or(0.0);
    let (k, a, b) = (kappa * kappa, k1_mod * k1_mod, k2_mod * k2_mod);
    let (open1, open12) = if four_area > 0.0 {
        (four_area.atan2(k - a - b), four_area.atan2(k + b - a))
    } else {
        (cos1.clamp(-1.0, 1.0).acos(), cos12.clamp(-1.0, 1.0).acos())
    };
    let branch = |sign: i8| {
        let s = sign as f64;
        let solution = SingleTwistedSolution { phi1: phi2 + s * open1, phi12: phi2 + s * open12, sign };
        debug_assert!({
            let (a, b) = (Complex64::cis(solution.phi1) * k1_mod, Complex64::cis(phi2) * k2_mod);
            ((a + b) - Complex64::cis(solution.phi12) * kappa).norm() <= 1e-9 * kappa
        });
        solution
    };
    if cos1.abs() >= 1.0 - slack {
        return Ok(SingleTwistedSolutions::Tangent(branch(1)));
    }
    Ok(SingleTwistedSolutions::Pair([branch(1), branch(-1)]))
}

/// The single-twisted element with the radial delta kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTwistedAmplitude {
    /// Coefficient of `delta(kappa - |k1 + k2|)`; exactly zero off the support.
    pub value: Complex64,
    pub on_support: bool,
}

/// `(-i)^m e^{i m phi12} M0 / ((2 pi)^{3/2} sqrt(kappa))` when `|k1 + k2| = kappa`.
///
/// At `k1 = -k2` the transverse sum vanishes and so does the amplitude, for every `m`:
/// the vortex line of the outgoing wave.
pub fn single_twisted_amplitude(
    state: &TwistedState,
    k12_mod: f64,
    phi12: f64,
    model: &AmplitudeModel,
) -> SingleTwistedAmplitude {
    let on_support = (k12_mod - state.kappa).abs() <= CONE_TOLERANCE * state.kappa;
    let value = if on_support {
        i_pow(-state.m) * Complex64::cis(state.m as f64 * phi12) * model.m0 / (TAU.powf(1.5) * state.kappa.sqrt())
    } else {
        Complex64::new(0.0, 0.0)
    };
    SingleTwistedAmplitude { value, on_support }
}

/// The reduced triple-twisted element for initial helicity `m` and final helicities
/// `(m1, m2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedAmplitude {
    pub value: Complex64,
    /// Exponent of the overall `i^(m1 + m2 - m)`; `value / i^phase_power` is real.
    pub phase_power: i32,
    pub in_support: bool,
}

impl ReducedAmplitude {
    /// `value * i^(-phase_power)`, real up to rounding.
    pub fn real_part(&self) -> Complex64 {
        self.value * i_pow(-self.phase_power)
    }
}

/// `i^(m1+m2-m) (2/area) sqrt(kappa1 kappa2 / kappa) cos[m phi* - (m1-m2) phi~*]
/// cos[m1 delta1 + m2 delta2] / sqrt(sin^2 theta - sin^2 xi) * M0`, or zero with
/// `in_support = false` outside `|xi| < theta` or outside the stripe.
pub fn reduced_triple_amplitude(
    geom: &CollisionGeometry,
    m: i32,
    m1: i32,
    m2: i32,
    model: &AmplitudeModel,
) -> Result<ReducedAmplitude> {
    let phase_power = m1 + m2 - m;
    let Some((area_times_value, t)) = area_weighted(geom, m, m1, m2, model)? else {
        return Ok(ReducedAmplitude { value: Complex64::new(0.0, 0.0), phase_power, in_support: false });
    };
    let floor = DEGENERACY_FLOOR * t.kappa_tilde * t.kappa_tilde;
    if t.area < floor {
        return Err(Error::DegenerateTriangle { area: t.area, floor });
    }
    Ok(ReducedAmplitude { value: area_times_value / t.area, phase_power, in_support: true })
}

/// `area * S` together with the triangle, or `None` off the support. Finite up to the
/// stripe edge, where callers that integrate across it divide by the area themselves.
fn area_weighted(
    geom: &CollisionGeometry,
    m: i32,
    m1: i32,
    m2: i32,
    model: &AmplitudeModel,
) -> Result<Option<(Complex64, TriangleGeometry)>> {
    let Ok(a) = angles(geom.kappa, geom.theta, geom.q) else {
        return Ok(None);
    };
    let kappa_tilde = geom.kappa * a.xi.cos();
    if !stripe_contains(kappa_tilde, geom.kappa1, geom.kappa2) {
        return Ok(None);
    }
    let t = TriangleGeometry::from_sides(kappa_tilde, geom.kappa1, geom.kappa2)?;
    let phase = i_pow(m1 + m2 - m);
    let (m, m1, m2) = (m as f64, m1 as f64, m2 as f64);
    let azimuthal = (m * a.phi_star - (m1 - m2) * a.phi_tilde_star).cos();
    let opening = (m1 * t.delta1 + m2 * t.delta2).cos();
    // sin^2 theta - sin^2 xi without cancellation: sin(theta - xi) sin(theta + xi)
    let longitudinal = ((geom.theta - a.xi).sin() * (geom.theta + a.xi).sin()).sqrt();
    let magnitude = 2.0 * (geom.kappa1 * geom.kappa2 / geom.kappa).sqrt() * azimuthal * opening / longitudinal;
    Ok(Some((phase * model.m0 * magnitude, t)))
}

/// One `kappa2 = epsilon * kappa~` point of [`plane_wave_limit_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    pub epsilon: f64,
    pub value: Complex64,
    pub abs_error: f64,
    /// `abs_error / |limit|`; infinite when the limit vanishes but the value does not.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveLimitReport {
    pub limit: Complex64,
    pub samples: Vec<LimitSample>,
    /// Errors never grow as `epsilon` decreases through the samples with `epsilon <= 0.1`.
    pub monotone: bool,
}

impl PlaneWaveLimitReport {
    pub fn final_rel_error(&self) -> Option<f64> {
        self.samples.last().map(|s| s.rel_error)
    }

    pub fn passes(&self, rel_tol: f64) -> bool {
        self.monotone && self.final_rel_error().is_some_and(|e| e <= rel_tol)
    }
}

/// Shrinks particle 2 to a plane wave and checks the limit of the triple-twisted element.
///
/// With `m2 = 0` and `kappa2 = epsilon * kappa~`, evaluates
/// `I(epsilon) = int dkappa1 w(kappa1) sqrt(2 pi / kappa2) S(kappa1, kappa2)` and compares it
/// with the value obtained by replacing `1/area` by `4 pi delta(kappa~^2 - kappa1^2)`:
/// `4 pi sqrt(2 pi) w(kappa~) / sqrt(kappa~ kappa) cos[m phi* - m1 phi~*] / sqrt(sin^2 theta - sin^2 xi) M0`
/// times `i^(m1 - m)`. The `kappa1` and `kappa2` fields of `geom` are ignored.
pub fn plane_wave_limit_check<W: Fn(f64) -> f64>(
    geom: &CollisionGeometry,
    m: i32,
    m1: i32,
    test_weight: W,
    epsilons: &[f64],
    quad: &QuadratureSpec,
    model: &AmplitudeModel,
) -> Result<PlaneWaveLimitReport> {
    quad.validate()?;
    if epsilons.is_empty()
        || epsilons.windows(2).any(|w| !(w[1] < w[0]))
        || epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0))
    {
        return Err(Error::InvalidParameter("epsilons must be strictly decreasing in (0, 1)"));
    }
    let a = angles(geom.kappa, geom.theta, geom.q)?;
    let kappa_tilde = geom.kappa * a.xi.cos();
    let longitudinal = ((geom.theta - a.xi).sin() * (geom.theta + a.xi).sin()).sqrt();
    let azimuthal = (m as f64 * a.phi_star - m1 as f64 * a.phi_tilde_star).cos();
    let limit = i_pow(m1 - m) * model.m0 * 4.0 * PI * TAU.sqrt() * test_weight(kappa_tilde)
        / (kappa_tilde * geom.kappa).sqrt()
        * azimuthal
        / longitudinal;

    let mut samples = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        let kappa2 = epsilon * kappa_tilde;
        let value = limit_integral(geom, m, m1, kappa_tilde, kappa2, &test_weight, quad, model)?;
        let abs_error = (value - limit).norm();
        let rel_error = if limit.norm() > 0.0 {
            abs_error / limit.norm()
        } else if abs_error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        samples.push(LimitSample { epsilon, value, abs_error, rel_error });
    }
    let tail: Vec<&LimitSample> = samples.iter().filter(|s| s.epsilon <= 0.1).collect();
    let monotone = tail.windows(2).all(|w| w[1].abs_error <= w[0].abs_error);
    Ok(PlaneWaveLimitReport { limit, samples, monotone })
}

#[allow(clippy::too_many_arguments)]
fn limit_integral<W: Fn(f64) -> f64>(
    geom: &CollisionGeometry,
    m: i32,
    m1: i32,
    kappa_tilde: f64,
    kappa2: f64,
    test_weight: &W,
    quad: &QuadratureSpec,
    model: &AmplitudeModel,
) -> Result<Complex64> {
    // kappa1 = centre + half_width cos(t) sends both stripe edges to t = 0, pi, where
    // dkappa1 / area stays finite
    let lo = (kappa_tilde - kappa2).abs();
    let hi = kappa_tilde + kappa2;
    let (centre, half_width) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let scale = (TAU / kappa2).sqrt();
    let evaluate = |n: usize| -> Result<Complex64> {
        let rule = GaussLegendre::new(n);
        let mut sum = Complex64::new(0.0, 0.0);
        for (t, w) in rule.on(0.0, PI) {
            let kappa1 = centre + half_width * t.cos();
            let g = CollisionGeometry { kappa1, kappa2, ..*geom };
            // nodes near t = 0, pi sit arbitrarily close to the stripe edge, where
            // sin(t) / area stays finite
            let Some((weighted, tri)) = area_weighted(&g, m, m1, 0, model)? else {
                continue;
            };
            if tri.area == 0.0 {
                continue;
            }
            sum += weighted * (w * half_width * t.sin() / tri.area * test_weight(kappa1) * scale);
        }
        Ok(sum)
    };
    let mut n = quad.node_count;
    let mut previous = evaluate(n)?;
    for _ in 0..quad.max_refinements {
        n *= 2;
        let estimate = evaluate(n)?;
        if (estimate - previous).norm() <= quad.tolerance(estimate.norm()) {
            return Ok(estimate);
        }
        previous = estimate;
    }
    Err(Error::NoConvergence { estimate: previous.norm(), previous: evaluate(n / 2)?.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn powers_of_i() {
        assert_eq!(i_pow(0), Complex64::new(1.0, 0.0));
        assert_eq!(i_pow(-1), Complex64::new(0.0, -1.0));
        assert_eq!(i_pow(6), Complex64::new(-1.0, 0.0));
        assert_eq!(i_pow(-7), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn fourier_weight_examples() {
        let root = TAU.sqrt();
        let w = fourier_weight(1.0, 0, 1.0, 2.7);
        assert_abs_diff_eq!((w.phase - root).norm(), 0.0, epsilon = 1e-15);
        assert!(w.on_cone);
        let w = fourier_weight(1.0, 1, 1.0, FRAC_PI_2);
        assert_abs_diff_eq!((w.phase - root).norm(), 0.0, epsilon = 1e-15);
        let w = fourier_weight(1.0, 4, 0.5, PI / 4.0);
        assert_abs_diff_eq!((w.phase + root).norm(), 0.0, epsilon = 1e-14);
        assert!(!w.on_cone);
    }

    #[test]
    fn single_twisted_examples() {
        let SingleTwistedSolutions::Pair(p) = single_twisted_solutions(5.0, 4.0, 3.0, 0.0).unwrap() else {
            panic!("expected two branches");
        };
        assert_relative_eq!(p[0].phi1, FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(p[1].phi1, -FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(p[0].phi12, 0.6f64.acos(), max_relative = 1e-15);
        assert_relative_eq!(p[1].phi12, -(0.6f64.acos()), max_relative = 1e-15);

        let t = single_twisted_solutions(2.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(t, SingleTwistedSolutions::Tangent(s) if s.phi1 == 0.0));
        assert_eq!(single_twisted_solutions(1.0, 5.0, 1.0, 0.0), Err(Error::EmptySupport));
    }

    #[test]
    fn single_twisted_amplitude_examples() {
        let model = AmplitudeModel::default();
        let base = 1.0 / (TAU.powf(1.5) * 2f64.sqrt());
        let s = TwistedState::massless(2.0, 0, 10.0).unwrap();
        let a = single_twisted_amplitude(&s, 2.0, 0.0, &model);
        assert!(a.on_support);
        assert_abs_diff_eq!((a.value - base).norm(), 0.0, epsilon = 1e-16);

        let a = single_twisted_amplitude(&s, 0.0, 0.0, &model);
        assert!(!a.on_support);
        assert_eq!(a.value, Complex64::new(0.0, 0.0));

        let s2 = TwistedState { m: 2, ..s };
        let a = single_twisted_amplitude(&s2, 2.0, FRAC_PI_2, &model);
        assert_abs_diff_eq!((a.value - base).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn reduced_amplitude_zeros() {
        let model = AmplitudeModel::default();
        let g = CollisionGeometry::new(0.2, 0.0, 1.0, 0.9, 0.7).unwrap();
        let a = reduced_triple_amplitude(&g, 1, 0, 0, &model).unwrap();
        assert!(a.in_support);
        assert!(a.value.norm() < 1e-12);

        let off = CollisionGeometry { kappa1: 0.1, kappa2: 0.2, ..g };
        let a = reduced_triple_amplitude(&off, 5, 6, 1, &model).unwrap();
        assert!(!a.in_support);
        assert_eq!(a.value, Complex64::new(0.0, 0.0));

        let outside_q = CollisionGeometry { q: 0.5, ..g };
        assert!(!reduced_triple_amplitude(&outside_q, 5, 6, 1, &model).unwrap().in_support);
    }

    #[test]
    fn degeneracy_floor() {
        let model = AmplitudeModel::default();
        // needle: strictly inside the stripe, area ~ 5e-11
        let g = CollisionGeometry::new(0.2, 0.0, 1.0, 1.0, 1e-10).unwrap();
        assert!(matches!(reduced_triple_amplitude(&g, 0, 0, 0, &model), Err(Error::DegenerateTriangle { .. })));
        let g = CollisionGeometry::new(0.2, 0.0, 1.0, 1.0, 1e-6).unwrap();
        assert!(reduced_triple_amplitude(&g, 0, 0, 0, &model).unwrap().in_support);
    }

    #[test]
    fn zero_test_weight_gives_zero() {
        let g = CollisionGeometry::new(0.2, 0.05, 1.0, 1.0, 1.0).unwrap();
        let report = plane_wave_limit_check(
            &g,
            0,
            0,
            |_| 0.0,
            &[0.1, 0.01],
            &QuadratureSpec::default(),
            &AmplitudeModel::default(),
        )
        .unwrap();
        assert_eq!(report.limit, Complex64::new(0.0, 0.0));
        assert!(report.samples.iter().all(|s| s.value == Complex64::new(0.0, 0.0) && s.rel_error == 0.0));
    }
}
