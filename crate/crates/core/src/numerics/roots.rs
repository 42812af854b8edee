//! Newton iteration on the torus of azimuthal angles.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::{angle_difference, wrap_angle};
use crate::{Error, Result};

/// Step used by the finite-difference Jacobian inside Newton iterations.
const NEWTON_STEP: f64 = 1e-7;
/// Largest step of the reported Jacobian; halved twice for the Richardson extrapolation.
const REPORT_STEP: f64 = 1e-2;
/// Largest Newton update per angle, radians.
const MAX_UPDATE: f64 = 1.0;

const POLISH_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFindSpec {
    /// Convergence threshold on the max-norm of the (pre-normalized) residual; also the
    /// floor below which `|det J|` marks a root as degenerate.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Starting points per angle; the start grid has `density^N` points.
    pub start_grid_density: usize,
    /// Roots closer than this (max-norm, modulo 2 pi) are merged.
    pub dedupe_tol: f64,
}

impl Default for RootFindSpec {
    fn default() -> Self {
        Self { residual_tol: 1e-12, max_iterations: 60, start_grid_density: 8, dedupe_tol: 1e-6 }
    }
}

impl RootFindSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter("residual_tol must be positive"));
        }
        if self.max_iterations == 0 || self.start_grid_density == 0 {
            return Err(Error::InvalidParameter("max_iterations and start_grid_density must be positive"));
        }
        if !(self.dedupe_tol > self.residual_tol) {
            return Err(Error::InvalidParameter("dedupe_tol must exceed residual_tol"));
        }
        Ok(())
    }
}

/// A converged root with `|det dR/d(angles)|` from Richardson-extrapolated central
/// differences (see [`jacobian_det`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<const N: usize> {
    pub angles: [f64; N],
    pub jacobian_det: f64,
    /// `jacobian_det` fell below `residual_tol`; callers must not divide by it.
    pub degenerate: bool,
}

/// All distinct roots of `residual` on the N-torus reachable by Newton iteration from a
/// uniform start grid, sorted lexicographically by angle.
///
/// The residual should already be scaled to order one. Starts that leave the basin,
/// stall, or hit a singular Jacobian are dropped silently.
pub fn solve_system<const N: usize, F>(residual: F, spec: &RootFindSpec) -> Result<Vec<Root<N>>>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    spec.validate()?;
    let density = spec.start_grid_density;
    let spacing = TAU / density as f64;
    let starts = density.checked_pow(N as u32).ok_or(Error::InvalidParameter("start grid too large"))?;

    let mut roots: Vec<Root<N>> = Vec::new();
    for index in 0..starts {
        let mut start = [0.0; N];
        let mut rest = index;
        for a in start.iter_mut() {
            // offset by half a cell so the grid avoids symmetric points like 0 and pi
            *a = ((rest % density) as f64 + 0.5) * spacing;
            rest /= density;
        }
        let Some(angles) = newton(&residual, start, spec) else {
            continue;
        };
        let duplicate = roots
            .iter()
            .any(|r| r.angles.iter().zip(&angles).all(|(a, b)| angle_difference(*a, *b).abs() <= spec.dedupe_tol));
        if duplicate {
            continue;
        }
        let det = jacobian_det(&residual, &angles);
        roots.push(Root { angles, jacobian_det: det.abs(), degenerate: det.abs() < spec.residual_tol });
    }
    roots.sort_by(|a, b| {
        a.angles
            .iter()
            .zip(&b.angles)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(roots)
}

fn newton<const N: usize, F>(residual: &F, start: [f64; N], spec: &RootFindSpec) -> Option<[f64; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut x = start;
    for _ in 0..spec.max_iterations {
        let r = residual(&x);
        if max_norm(&r) < spec.residual_tol {
            return Some(polish(residual, x, r).map(wrap_angle));
        }
        let j = central_jacobian(residual, &x, NEWTON_STEP);
        let (step, _) = eliminate(j, r.map(|v| -v))?;
        let largest = max_norm(&step);
        if !largest.is_finite() {
            return None;
        }
        let scale = if largest > MAX_UPDATE { MAX_UPDATE / largest } else { 1.0 };
        for (a, d) in x.iter_mut().zip(step.iter()) {
            *a = wrap_angle(*a + scale * d);
        }
    }
    let r = residual(&x);
    (max_norm(&r) < spec.residual_tol).then(|| polish(residual, x, r).map(wrap_angle))
}

/// Up to [`POLISH_STEPS`] further Newton steps once the tolerance is met, each kept only
/// if it shrinks the residual. Quadratic convergence takes the root to rounding level, so
/// quantities that amplify angle errors (high-order phases) stay accurate.
fn polish<const N: usize, F>(residual: &F, mut x: [f64; N], mut r: [f64; N]) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    for _ in 0..POLISH_STEPS {
        let j = central_jacobian(residual, &x, NEWTON_STEP);
        let Some((step, _)) = eliminate(j, r.map(|v| -v)) else {
            break;
        };
        let mut next = x;
        for (a, d) in next.iter_mut().zip(step.iter()) {
            *a += d;
        }
        let rn = residual(&next);
        if !(max_norm(&rn) < max_norm(&r)) {
            break;
        }
        x = next;
        r = rn;
    }
    x
}

fn max_norm<const N: usize>(r: &[f64; N]) -> f64 {
    r.iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

type Square<const N: usize> = [[f64; N]; N];

/// Gaussian elimination with partial pivoting: solution of `a x = b` and `det a`.
fn eliminate<const N: usize>(mut a: Square<N>, mut b: [f64; N]) -> Option<([f64; N], f64)> {
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some((x, det))
}

fn determinant<const N: usize>(a: Square<N>) -> f64 {
    eliminate(a, [0.0; N]).map_or(0.0, |(_, det)| det)
}

fn central_jacobian<const N: usize, F>(residual: &F, at: &[f64; N], h: f64) -> Square<N>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut j = [[0.0; N]; N];
    for col in 0..N {
        let mut plus = *at;
        let mut minus = *at;
        plus[col] += h;
        minus[col] -= h;
        let (rp, rm) = (residual(&plus), residual(&minus));
        for row in 0..N {
            j[row][col] = (rp[row] - rm[row]) / (2.0 * h);
        }
    }
    j
}

/// Signed `det dR/d(angles)` at `at`: central differences at `h = 1e-2`, `h/2` and `h/4`
/// combined by two rounds of Richardson extrapolation, leaving an `O(h^6)` truncation
/// error far below the `eps / h` rounding error.
pub fn jacobian_det<const N: usize, F>(residual: &F, at: &[f64; N]) -> f64
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut levels = [
        central_jacobian(residual, at, REPORT_STEP),
        central_jacobian(residual, at, 0.5 * REPORT_STEP),
        central_jacobian(residual, at, 0.25 * REPORT_STEP),
    ];
    // each round removes the leading even power: h^2, then h^4
    for (round, factor) in [4.0, 16.0].into_iter().enumerate() {
        for level in 0..levels.len() - 1 - round {
            for row in 0..N {
                for col in 0..N {
                    let (coarse, fine) = (levels[level][row][col], levels[level + 1][row][col]);
                    levels[level][row][col] = (factor * fine - coarse) / (factor - 1.0);
                }
            }
        }
    }
    determinant(levels[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn two_roots_of_a_circle_intersection() {
        // k1 e(phi1) + k2 e(phi2) = kappa e(phi12) with phi2 = 0 fixed: 3-4-5 geometry
        let (kappa, k1, k2) = (5.0, 4.0, 3.0);
        let residual = |a: &[f64; 2]| {
            let (phi1, phi12) = (a[0], a[1]);
            [(kappa * phi12.cos() - k1 * phi1.cos() - k2) / kappa, (kappa * phi12.sin() - k1 * phi1.sin()) / kappa]
        };
        let roots = solve_system(residual, &RootFindSpec::default()).unwrap();
        assert_eq!(roots.len(), 2);
        let phi1: Vec<f64> = roots.iter().map(|r| angle_difference(r.angles[0], 0.0)).collect();
        assert_abs_diff_eq!(phi1[0], core::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(phi1[1], -core::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(roots.iter().all(|r| !r.degenerate));
    }

    #[test]
    fn no_roots_when_circles_miss() {
        let residual = |a: &[f64; 2]| [(a[1].cos() - 5.0 * a[0].cos() - 1.0), (a[1].sin() - 5.0 * a[0].sin())];
        assert!(solve_system(residual, &RootFindSpec::default()).unwrap().is_empty());
    }

    #[test]
    fn analytic_determinant() {
        let residual = |a: &[f64; 3]| [a[0].sin() * 2.0, a[1].cos(), (a[2] - 1.0).sin()];
        let at = [0.3, 0.7, 1.0];
        let det = jacobian_det(&residual, &at);
        let exact = 2.0 * 0.3f64.cos() * -(0.7f64.sin()) * 1.0;
        assert_abs_diff_eq!(det, exact, epsilon = 1e-10);
    }

    #[test]
    fn invalid_spec() {
        let spec = RootFindSpec { dedupe_tol: 1e-13, ..Default::default() };
        assert!(solve_system(|a: &[f64; 1]| [a[0].sin()], &spec).is_err());
    }
}
