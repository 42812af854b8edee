//! Gauss–Legendre rules and the substituted integral over the longitudinal imbalance.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Controls every quadrature in the crate.
///
/// `node_count` is the order of the base Gauss–Legendre rule. Adaptive callers refine by
/// bisecting panels (or doubling the order) up to `max_refinements` times and stop when
/// two successive estimates differ by at most `max(abs_tol, rel_tol * |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { node_count: 64, abs_tol: 0.0, rel_tol: 1e-6, max_refinements: 6 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::InvalidParameter("node_count must be at least 2"));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return Err(Error::InvalidParameter("tolerances must be non-negative"));
        }
        if self.abs_tol <= 0.0 && self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter("at least one of abs_tol, rel_tol must be positive"));
        }
        if self.max_refinements == 0 {
            return Err(Error::InvalidParameter("max_refinements must be positive"));
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                derivative = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    let (_, dp) = legendre(n, x);
                    derivative = dp;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`, ascending.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule with `panels` equal panels.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + p as f64 * width;
                let hi = if p + 1 == panels { b } else { lo + width };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `int dq g(xi(q))` over the allowed region `|q| < kappa sin(theta)`.
///
/// With `sin(xi) = q / kappa` the substitution `sin(xi) = sin(theta) sin(u)`,
/// `u in (-pi/2, pi/2)`, gives `dq = kappa sin(theta) cos(u) du`, which cancels the
/// `1/sqrt(sin^2 theta - sin^2 xi)` endpoint blow-up of the amplitude. The integral in `u`
/// uses composite Gauss–Legendre, bisecting every panel until two successive estimates agree.
pub fn integrate_q_substituted<F: FnMut(f64) -> f64>(
    integrand: F,
    kappa: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_q_substituted_on(integrand, kappa, theta, (-FRAC_PI_2, FRAC_PI_2), spec)
}

/// [`integrate_q_substituted`] restricted to `u` in `u_range`, a sub-interval of
/// `[-pi/2, pi/2]`.
pub fn integrate_q_substituted_on<F: FnMut(f64) -> f64>(
    mut integrand: F,
    kappa: f64,
    theta: f64,
    u_range: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Range { what: "theta", value: theta, range: "(0, pi/2)" });
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter("kappa must be positive and finite"));
    }
    let (lo, hi) = u_range;
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&lo) || !(lo..=FRAC_PI_2).contains(&hi) {
        return Err(Error::InvalidParameter("u range must lie inside [-pi/2, pi/2]"));
    }

    let sin_theta = theta.sin();
    let rule = GaussLegendre::new(spec.node_count);
    let mut substituted = |u: f64| {
        let xi = (sin_theta * u.sin()).asin();
        integrand(xi) * kappa * sin_theta * u.cos()
    };

    let mut previous = rule.integrate(lo, hi, &mut substituted);
    let mut panels = 1;
    for _ in 0..spec.max_refinements {
        panels *= 2;
        let estimate = rule.integrate_composite(lo, hi, panels, &mut substituted);
        if (estimate - previous).abs() <= spec.tolerance(estimate) {
            return Ok(estimate);
        }
        if panels == 1 << spec.max_refinements {
            return Err(Error::NoConvergence { estimate, previous });
        }
        previous = estimate;
    }
    unreachable!("max_refinements is validated to be positive")
}
