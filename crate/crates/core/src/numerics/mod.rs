//! Special functions, quadrature and root finding shared by the physics modules.

mod bessel;
mod quadrature;
mod roots;
mod triangle;

pub use bessel::{bessel_j, bessel_j_signed, MAX_ARGUMENT, MAX_ORDER};
pub use quadrature::{integrate_q_substituted, integrate_q_substituted_on, GaussLegendre, QuadratureSpec};
pub use roots::{jacobian_det, solve_system, Root, RootFindSpec};
pub use triangle::heron_area;
pub(crate) use triangle::triangle_strictly_inside;

use core::f64::consts::{PI, TAU};

// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * (a / TAU).floor();
    // rounds up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed distance between two angles, in `(-pi, pi]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
