//! Cylindrical Bessel functions of the first kind, integer order.
//!
//! Small arguments use the power series directly. Everywhere else the values come from
//! Miller's backward recurrence, normalized with `J_0 + 2 sum_k J_2k = 1`.

// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub const MAX_ORDER: u32 = 200;
pub const MAX_ARGUMENT: f64 = 1.0e4;

const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

/// `J_order(x)` for `0 <= order <= 200` and `0 <= x <= 1e4`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::Range { what: "Bessel order", value: order as f64, range: "[0, 200]" });
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Range { what: "Bessel argument", value: x, range: "[0, 1e4]" });
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x <= 2.0 || x * x <= (order + 1) as f64 {
        Ok(series(order, x))
    } else {
        Ok(miller(order, x))
    }
}

/// `J_m(x)` for any integer `m`, using `J_{-m} = (-1)^m J_m`.
pub fn bessel_j_signed(order: i32, x: f64) -> Result<f64> {
    let j = bessel_j(order.unsigned_abs(), x)?;
    Ok(if order < 0 && order % 2 != 0 { -j } else { j })
}

fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=order {
        lead *= half / k as f64;
    }
    let y = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= y / (k * (order as f64 + k));
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    lead * sum
}

fn miller(order: u32, x: f64) -> f64 {
    let top = (order as f64).max(x) + 40.0 + (8.0 * x.cbrt()).ceil();
    let mut start = top as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut current = 1.0e-30; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        if k == order as usize {
            wanted = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let previous = k as f64 * two_over_x * current - next;
        next = current;
        current = previous;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            wanted *= RESCALE_BY;
        }
    }
    if order == 0 {
        wanted = current;
    }
    norm += current;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(bessel_j(1, 1.0).unwrap(), 0.440_050_585_744_933_5, epsilon = 1e-15);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(bessel_j(201, 1.0), Err(Error::Range { .. })));
        assert!(matches!(bessel_j(2, -1.0), Err(Error::Range { .. })));
        assert!(matches!(bessel_j(2, f64::NAN), Err(Error::Range { .. })));
        assert!(matches!(bessel_j(2, f64::INFINITY), Err(Error::Range { .. })));
    }

    #[test]
    fn negative_order_parity() {
        let x = 3.7;
        assert_eq!(bessel_j_signed(-3, x).unwrap(), -bessel_j(3, x).unwrap());
        assert_eq!(bessel_j_signed(-4, x).unwrap(), bessel_j(4, x).unwrap());
    }

    #[test]
    fn branches_agree_at_switch() {
        // x = 2 sits on the series side; just above it Miller takes over
        for m in 0..5 {
            let a = bessel_j(m, 2.0).unwrap();
            let b = bessel_j(m, 2.0 + 1e-12).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }
}
