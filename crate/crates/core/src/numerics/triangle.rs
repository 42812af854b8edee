// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Triangle area from its sides, Kahan's ordering.
///
/// The sides are sorted `a >= b >= c` before evaluating
/// `sqrt((a + (b + c)) (c - (a - b)) (c + (a - b)) (a + (b - c))) / 4`, so the result is
/// bit-identical under every permutation of the arguments and exactly zero for a
/// degenerate triangle. A strictly violated triangle inequality is an error.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) || a < 0.0 || b < 0.0 || c < 0.0 {
        return Err(Error::InvalidParameter("triangle sides must be finite and non-negative"));
    }
    let (a, b, c) = sort_desc(a, b, c);
    let gap = c - (a - b);
    if gap < 0.0 {
        return Err(Error::TriangleInequality(a, b, c));
    }
    let product = (a + (b + c)) * gap * (c + (a - b)) * (a + (b - c));
    Ok(0.25 * product.sqrt())
}

/// Strict triangle test with the same ordering as [`heron_area`]: true iff the area is
/// positive.
pub(crate) fn triangle_strictly_inside(a: f64, b: f64, c: f64) -> bool {
    let (a, b, c) = sort_desc(a, b, c);
    c > 0.0 && c - (a - b) > 0.0
}

fn sort_desc(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let mut s = [a, b, c];
    s.sort_unstable_by(|x, y| y.total_cmp(x));
    (s[0], s[1], s[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_triangles() {
        assert_eq!(heron_area(3.0, 4.0, 5.0).unwrap(), 6.0);
        assert_relative_eq!(heron_area(1.0, 1.0, 1.0).unwrap(), 3f64.sqrt() / 4.0, max_relative = 1e-15);
        assert_eq!(heron_area(1.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(heron_area(5.0, 12.0, 13.0).unwrap(), 30.0);
        assert_eq!(heron_area(8.0, 15.0, 17.0).unwrap(), 60.0);
    }

    #[test]
    fn violated_inequality_is_an_error() {
        assert!(matches!(heron_area(1.0, 1.0, 3.0), Err(Error::TriangleInequality(..))));
        assert!(heron_area(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn needle_triangle_is_accurate() {
        // Kahan's example: naive Heron loses most digits here
        // reference from 50-digit arithmetic on the binary values of the sides
        let area = heron_area(100_000.0, 99_999.999_79, 0.000_29).unwrap();
        assert_relative_eq!(area, 10.000_000_077_021_04, max_relative = 1e-9);
    }
}
