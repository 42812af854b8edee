//! Momentum cones, frames and the purely kinematic quantities of the triple-twisted
//! configuration.
//!
//! Conventions: the initial Bessel state is quantized along the lab `z` axis and the
//! counterpropagating plane wave carries `p = (0, 0, -k_z)`, so the average initial
//! momentum vanishes (c.m.s.). The final states share the axis `z'`, tilted by `theta` in
//! the `x`–`z` plane. Particle 1 moves along `+z'`; particle 2 moves along `-z'` and its
//! azimuth is measured in its own helicity frame `(x', -y', -z')`, so that `m2` is an
//! orbital helicity (projection on its own direction of motion).

use core::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{bessel_j_signed, heron_area};
use crate::{Error, Result, Vec3};

/// A Bessel mode `|kappa, m>` with frequency `omega` and longitudinal momentum `k_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedState {
    pub kappa: f64,
    pub m: i32,
    pub k_z: f64,
    pub omega: f64,
}

impl TwistedState {
    pub fn new(kappa: f64, m: i32, k_z: f64, omega: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter("kappa must be positive and finite"));
        }
        if !(omega > 0.0 && omega.is_finite()) || !k_z.is_finite() {
            return Err(Error::InvalidParameter("omega must be positive; k_z finite"));
        }
        let state = Self { kappa, m, k_z, omega };
        let scale = omega * omega;
        if state.mass_squared() < -1e-12 * scale {
            return Err(Error::InvalidParameter("omega^2 must be at least kappa^2 + k_z^2"));
        }
        Ok(state)
    }

    /// Massless state, `omega = sqrt(kappa^2 + k_z^2)`.
    pub fn massless(kappa: f64, m: i32, k_z: f64) -> Result<Self> {
        Self::new(kappa, m, k_z, kappa.hypot(k_z))
    }

    /// Monochromatic member of a packet: fixed energy and mass, `k_z = sqrt(omega^2 - kappa^2 - mass^2)`.
    pub fn monochromatic(omega: f64, mass: f64, kappa: f64, m: i32) -> Result<Self> {
        let k_z_squared = omega * omega - kappa * kappa - mass * mass;
        if k_z_squared < 0.0 {
            return Err(Error::InvalidParameter("kappa exceeds the available momentum"));
        }
        Self::new(kappa, m, k_z_squared.sqrt(), omega)
    }

    pub fn mass_squared(&self) -> f64 {
        self.omega * self.omega - self.kappa * self.kappa - self.k_z * self.k_z
    }

    /// `kappa / |k_z|`; small values mean a paraxial beam.
    pub fn paraxiality(&self) -> f64 {
        self.kappa / self.k_z.abs()
    }

    /// Half-angle of the momentum cone, `atan(kappa / k_z)`.
    pub fn opening_angle(&self) -> f64 {
        self.kappa.atan2(self.k_z)
    }
}

/// Right-handed orthonormal frame used to place a momentum cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: Vec3,
    pub y: Vec3,
    pub z: Vec3,
}

impl Frame {
    pub fn lab() -> Self {
        Self { x: Vec3::x(), y: Vec3::y(), z: Vec3::z() }
    }

    /// The primed frame: `z' = sin(theta) x + cos(theta) z`, `x' = cos(theta) x - sin(theta) z`, `y' = y`.
    pub fn tilted(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: Vec3::new(c, 0.0, -s), y: Vec3::y(), z: Vec3::new(s, 0.0, c) }
    }

    /// Rotation by pi about the frame's own `x` axis: `(x, -y, -z)`.
    pub fn reversed(&self) -> Self {
        Self { x: self.x, y: -self.y, z: -self.z }
    }

    /// Rigid rotation of the frame by `alpha` about the lab `z` axis.
    pub fn rotated_about_lab_z(&self, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        let rot = |v: Vec3| Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z);
        Self { x: rot(self.x), y: rot(self.y), z: rot(self.z) }
    }

    /// `k_long z + kappa (cos(phi) x + sin(phi) y)`.
    pub fn cone_momentum(&self, kappa: f64, k_long: f64, phi: f64) -> Vec3 {
        let (s, c) = phi.sin_cos();
        self.z * k_long + (self.x * c + self.y * s) * kappa
    }
}

/// Momentum of the plane-wave component of `state` at azimuth `phi`, the cone axis tilted
/// by `axis_theta` in the `x`–`z` plane.
pub fn cone_momentum(state: &TwistedState, phi: f64, axis_theta: f64) -> Vec3 {
    Frame::tilted(axis_theta).cone_momentum(state.kappa, state.k_z, phi)
}

/// The c.m.s. configuration of the triple-twisted process.
///
/// Only the transverse moduli, the tilt `theta` and the longitudinal imbalance
/// `q = k_1z' + k_2z'` enter the reduced amplitude; the longitudinal scale drops out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionGeometry {
    pub theta: f64,
    pub q: f64,
    pub kappa: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl CollisionGeometry {
    pub fn new(theta: f64, q: f64, kappa: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::Range { what: "theta", value: theta, range: "(0, pi/2)" });
        }
        if !q.is_finite() {
            return Err(Error::InvalidParameter("q must be finite"));
        }
        for k in [kappa, kappa1, kappa2] {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter("transverse moduli must be positive and finite"));
            }
        }
        Ok(Self { theta, q, kappa, kappa1, kappa2 })
    }

    /// Upper end of the allowed imbalance region, `kappa sin(theta)`.
    pub fn q_limit(&self) -> f64 {
        self.kappa * self.theta.sin()
    }
}

/// `xi` with `sin(xi) = q / kappa`, and the two azimuths fixed by the `z'` constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSet {
    pub xi: f64,
    /// `arccos(sin(xi) / sin(theta))`: initial azimuth of the contributing plane waves.
    pub phi_star: f64,
    /// `arccos(tan(xi) / tan(theta))`: azimuth of their transverse sum in the primed frame.
    pub phi_tilde_star: f64,
}

pub fn angle_set(geom: &CollisionGeometry) -> Result<AngleSet> {
    angles(geom.kappa, geom.theta, geom.q)
}

pub(crate) fn angles(kappa: f64, theta: f64, q: f64) -> Result<AngleSet> {
    if q.abs() >= kappa {
        return Err(Error::XiUndefined { q, kappa });
    }
    let sin_theta = theta.sin();
    let xi = (q / kappa).asin();
    if q.abs() >= kappa * sin_theta {
        return Err(Error::OutsideQRegion { xi, theta });
    }
    let tan_xi = q / (kappa * kappa - q * q).sqrt();
    Ok(AngleSet { xi, phi_star: (q / (kappa * sin_theta)).acos(), phi_tilde_star: (tan_xi / theta.tan()).acos() })
}

/// Triangle with sides `kappa~ = kappa cos(xi)`, `kappa1`, `kappa2`.
///
/// `delta1` is the inner angle between the `kappa~` and `kappa1` sides, `delta2` the one
/// between `kappa~` and `kappa2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub kappa_tilde: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub area: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Fails with [`Error::OutsideStripe`] off the stripe and with
/// [`Error::DegenerateTriangle`] on its boundary (zero area).
pub fn triangle_geometry(kappa: f64, xi: f64, kappa1: f64, kappa2: f64) -> Result<TriangleGeometry> {
    if !(kappa > 0.0 && kappa1 > 0.0 && kappa2 > 0.0) {
        return Err(Error::InvalidParameter("transverse moduli must be positive"));
    }
    TriangleGeometry::from_sides(kappa * xi.cos(), kappa1, kappa2)
}

impl TriangleGeometry {
    pub fn from_sides(kappa_tilde: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        let area =
            heron_area(kappa_tilde, kappa1, kappa2).map_err(|_| Error::OutsideStripe(kappa_tilde, kappa1, kappa2))?;
        if area == 0.0 {
            return Err(Error::DegenerateTriangle { area, floor: 0.0 });
        }
        let kt2 = kappa_tilde * kappa_tilde;
        let (k1s, k2s) = (kappa1 * kappa1, kappa2 * kappa2);
        Ok(Self {
            kappa_tilde,
            kappa1,
            kappa2,
            area,
            delta1: (4.0 * area).atan2(kt2 + k1s - k2s),
            delta2: (4.0 * area).atan2(kt2 + k2s - k1s),
        })
    }

    /// The inner angle between the `kappa1` and `kappa2` sides.
    pub fn delta3(&self) -> f64 {
        let kt2 = self.kappa_tilde * self.kappa_tilde;
        (4.0 * self.area).atan2(self.kappa1 * self.kappa1 + self.kappa2 * self.kappa2 - kt2)
    }
}

/// Open stripe `|kappa1 - kappa2| < kappa~ < kappa1 + kappa2`: a triangle of positive area.
pub fn stripe_contains(kappa_tilde: f64, kappa1: f64, kappa2: f64) -> bool {
    crate::numerics::triangle_strictly_inside(kappa_tilde, kappa1, kappa2)
}

/// Unit vector along `<k> + p - k2`, the direction of the phase vortex of particle 1 when
/// particle 2 is projected on the plane wave `k2` (swap the roles for particle 2).
pub fn vortex_axis(mean_initial: Vec3, p: Vec3, k2: Vec3) -> Result<Vec3> {
    let n = mean_initial + p - k2;
    let norm = n.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    Ok(n / norm)
}

/// Transverse profile `e^{i m phi_r} J_m(kappa r) sqrt(kappa / 2 pi)`.
pub fn field_amplitude(state: &TwistedState, r: f64, phi_r: f64) -> Result<Complex64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter("radius must be non-negative"));
    }
    let j = bessel_j_signed(state.m, state.kappa * r)?;
    let norm = (state.kappa / TAU).sqrt();
    Ok(Complex64::from_polar(j * norm, state.m as f64 * phi_r))
}

/// Longitudinal imbalance `q = |k_1z'| - |k_2z'|` when each final particle has a fixed
/// energy and mass, so `q` moves with `kappa1` and `kappa2`. The packet integrals in
/// [`crate::wavepackets`] instead hold `q` fixed.
pub fn imbalance_at_fixed_energy(
    energy1: f64,
    mass1: f64,
    kappa1: f64,
    energy2: f64,
    mass2: f64,
    kappa2: f64,
) -> Result<f64> {
    let first = TwistedState::monochromatic(energy1, mass1, kappa1, 0)?;
    let second = TwistedState::monochromatic(energy2, mass2, kappa2, 0)?;
    Ok(first.k_z - second.k_z)
}
