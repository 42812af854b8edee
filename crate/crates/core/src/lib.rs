//! Elastic scattering of a Bessel vortex beam on a counterpropagating plane wave.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`numerics`]: Bessel functions, triangle areas, Gauss–Legendre quadrature with the
//!   endpoint substitution used for the longitudinal imbalance, and a Newton solver on the
//!   torus of azimuthal angles.
//! * [`kinematics`]: momentum cones, the tilted final-state frame, the angle set
//!   `(xi, phi*, phi~*)` and the triangle `(kappa~, kappa1, kappa2)`.
//! * [`amplitudes`]: Fourier weights of Bessel states, the single-twisted element with its
//!   two-branch geometry, and the closed-form reduced triple-twisted amplitude.
//! * [`oracle`]: a brute-force evaluation of the same matrix element that solves the
//!   momentum-conservation constraints for the azimuths and sums phases over the roots.
//! * [`wavepackets`]: normalizable packets of Bessel states, smeared amplitudes and the
//!   q-integrated `(m1, m2)` intensity map.
//!
//! All momenta share one arbitrary inverse-length unit; the problem is scale covariant.
//! Reduced amplitudes drop the common factor `i * delta(E_f - E_i) / sqrt(2 pi)`.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod amplitudes;
mod error;
pub mod kinematics;
pub mod numerics;
pub mod oracle;
pub mod wavepackets;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Three-vectors in the lab (c.m.s.) frame.
pub type Vec3 = nalgebra::Vector3<f64>;
