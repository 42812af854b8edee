//! Wave packets of Bessel states, smeared amplitudes and the `(m1, m2)` intensity map.
//!
//! A packet `int dkappa f(kappa) |kappa, m>` has a normalizable weight `f`. The smeared
//! amplitude at fixed `q` is
//! `A(q) = int dkappa dkappa1 dkappa2 f f1 f2 S(kappa, kappa1, kappa2; q)`,
//! and the map is `I(m1, m2) = int dq |A(q)|^2`.
//!
//! Two substitutions make every integrand bounded:
//!
//! * `s = sqrt(kappa^2 sin^2 theta - q^2)` turns
//!   `dkappa / sqrt(sin^2 theta - sin^2 xi)` into `ds / sin^2 theta`;
//! * elliptic stripe coordinates `kappa1 = kappa~ (cosh b + cos a) / 2`,
//!   `kappa2 = kappa~ (cosh b - cos a) / 2` turn `dkappa1 dkappa2 2/area` into `4 da db`,
//!   and give the inner angles without any inverse trigonometry.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::ops::RangeInclusive;

use num_complex::Complex64;
// shadowed by std's inherent methods whenever std is in the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitudes::{i_pow, AmplitudeModel};
use crate::numerics::{GaussLegendre, QuadratureSpec};
use crate::{Error, Result};

/// Half-width of the truncated support, in units of `sigma`.
pub const SUPPORT_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// `exp(-(kappa - kappa0)^2 / (2 sigma^2))` on `[max(0, kappa0 - 5 sigma), kappa0 + 5 sigma]`.
    GaussianTruncated,
}

/// A real, non-negative weight `f(kappa)` with `int f^2 dkappa = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketProfile {
    pub kappa0: f64,
    pub sigma: f64,
    pub shape: ProfileShape,
    norm: f64,
}

impl WavePacketProfile {
    pub fn gaussian(kappa0: f64, sigma: f64) -> Result<Self> {
        if !(kappa0 > 0.0 && kappa0.is_finite()) {
            return Err(Error::InvalidParameter("kappa0 must be positive and finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter("sigma must be positive and finite"));
        }
        let mut p = Self { kappa0, sigma, shape: ProfileShape::GaussianTruncated, norm: 1.0 };
        // int_lo^hi exp(-(k - k0)^2 / sigma^2) dk
        let (lo, hi) = p.support();
        let erf_at = |k: f64| libm::erf((k - kappa0) / sigma);
        let mass = 0.5 * PI.sqrt() * sigma * (erf_at(hi) - erf_at(lo));
        p.norm = 1.0 / mass.sqrt();
        Ok(p)
    }

    pub fn support(&self) -> (f64, f64) {
        let half = SUPPORT_SIGMAS * self.sigma;
        ((self.kappa0 - half).max(0.0), self.kappa0 + half)
    }

    pub fn value(&self, kappa: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(kappa > lo && kappa <= hi) {
            return 0.0;
        }
        let z = (kappa - self.kappa0) / self.sigma;
        self.norm * (-0.5 * z * z).exp()
    }
}

pub fn profile_value(p: &WavePacketProfile, kappa: f64) -> f64 {
    p.value(kappa)
}

/// Weights of the initial packet and of the two final packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketProfiles {
    pub initial: WavePacketProfile,
    pub first: WavePacketProfile,
    pub second: WavePacketProfile,
}

impl PacketProfiles {
    /// The reference family: `kappa01 = kappa0`, `kappa02 = kappa0 / 2`, `sigma_i = kappa0i / 5`.
    pub fn reference(kappa0: f64) -> Result<Self> {
        Self::with_relative_width(kappa0, kappa0, 0.5 * kappa0, 0.2)
    }

    pub fn with_relative_width(kappa0: f64, kappa01: f64, kappa02: f64, sigma_rel: f64) -> Result<Self> {
        Ok(Self {
            initial: WavePacketProfile::gaussian(kappa0, sigma_rel * kappa0)?,
            first: WavePacketProfile::gaussian(kappa01, sigma_rel * kappa01)?,
            second: WavePacketProfile::gaussian(kappa02, sigma_rel * kappa02)?,
        })
    }

    /// Largest `|q|` for which some initial `kappa` in the support has `|xi| < theta`.
    pub fn q_limit(&self, theta: f64) -> f64 {
        self.initial.support().1 * theta.sin()
    }
}

/// The scattering setup shared by every smeared quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smearing {
    pub profiles: PacketProfiles,
    pub theta: f64,
    pub m: i32,
    pub model: AmplitudeModel,
}

impl Smearing {
    fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < FRAC_PI_2) {
            return Err(Error::Range { what: "theta", value: self.theta, range: "(0, pi/2)" });
        }
        Ok(())
    }
}

/// `A(q; m1, m2)`, refined by doubling every node count until two estimates agree.
pub fn smeared_amplitude(setup: &Smearing, q: f64, m1: i32, m2: i32, quad: &QuadratureSpec) -> Result<Complex64> {
    setup.validate()?;
    quad.validate()?;
    let engine = Engine::new(setup, m1..=m1, m2..=m2)?;
    let mut out = [0.0];
    let mut n = quad.node_count;
    engine.reduced_at_q(q, &GaussLegendre::new(n), &mut out);
    let mut previous = out[0];
    for _ in 0..quad.max_refinements {
        n *= 2;
        engine.reduced_at_q(q, &GaussLegendre::new(n), &mut out);
        let estimate = out[0];
        if (estimate - previous).abs() <= quad.tolerance(estimate.abs()) {
            return Ok(i_pow(m1 + m2 - setup.m) * setup.model.m0 * estimate);
        }
        previous = estimate;
    }
    engine.reduced_at_q(q, &GaussLegendre::new(n / 2), &mut out);
    Err(Error::NoConvergence { estimate: previous, previous: out[0] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub m1: i32,
    pub m2: i32,
    /// Relative to the largest cell.
    pub intensity: f64,
    /// `|I(n) - I(n/2)|`, relative to the largest cell.
    pub error_estimate: f64,
    pub converged: bool,
}

/// `q`-integrated intensities on an `(m1, m2)` grid, stored row-major with `m1` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub m1_range: (i32, i32),
    pub m2_range: (i32, i32),
    pub cells: Vec<MapCell>,
    /// The raw value of the largest cell before normalization.
    pub scale: f64,
    pub setup: Smearing,
    pub quad: QuadratureSpec,
}

impl IntensityMap {
    fn width(&self) -> usize {
        (self.m2_range.1 - self.m2_range.0 + 1) as usize
    }

    pub fn get(&self, m1: i32, m2: i32) -> Option<&MapCell> {
        if !(self.m1_range.0..=self.m1_range.1).contains(&m1) || !(self.m2_range.0..=self.m2_range.1).contains(&m2) {
            return None;
        }
        let (i, j) = ((m1 - self.m1_range.0) as usize, (m2 - self.m2_range.0) as usize);
        self.cells.get(i * self.width() + j)
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }

    /// `sum I(m1, m2)` over the cells with `m1 - m2 = d`.
    pub fn diagonal_sum(&self, d: i32) -> f64 {
        self.cells.iter().filter(|c| c.m1 - c.m2 == d).map(|c| c.intensity).sum()
    }

    /// Standard deviations of the `m1` and `m2` marginals.
    pub fn marginal_std(&self) -> (f64, f64) {
        let total: f64 = self.cells.iter().map(|c| c.intensity).sum();
        let moments = |pick: fn(&MapCell) -> i32| {
            let mean = self.cells.iter().map(|c| c.intensity * pick(c) as f64).sum::<f64>() / total;
            let var = self.cells.iter().map(|c| c.intensity * (pick(c) as f64 - mean).powi(2)).sum::<f64>() / total;
            var.sqrt()
        };
        (moments(|c| c.m1), moments(|c| c.m2))
    }
}

/// `I(m1, m2) = int dq |A(q; m1, m2)|^2`, normalized so the largest cell is 1.
///
/// `A` is even in `q` up to a sign, so only `q >= 0` is sampled, on the Gauss–Legendre grid
/// in `u` with `q = q_max sin(u)` that removes the endpoint square root. The same map at
/// half the node count gives each cell's error estimate; a cell is converged when that
/// difference is within `abs_tol + rel_tol * max` of the map.
pub fn intensity_map(
    setup: &Smearing,
    m1_range: RangeInclusive<i32>,
    m2_range: RangeInclusive<i32>,
    quad: &QuadratureSpec,
) -> Result<IntensityMap> {
    setup.validate()?;
    quad.validate()?;
    if m1_range.is_empty() || m2_range.is_empty() {
        return Err(Error::InvalidParameter("helicity ranges must be non-empty"));
    }
    let engine = Engine::new(setup, m1_range.clone(), m2_range.clone())?;
    let fine = engine.q_integrated(quad.node_count);
    let coarse = engine.q_integrated((quad.node_count / 2).max(2));
    let scale = fine.iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::EmptySupport);
    }
    let tolerance = quad.abs_tol + quad.rel_tol * scale;
    let mut cells = Vec::with_capacity(fine.len());
    for (index, (&value, &rough)) in fine.iter().zip(&coarse).enumerate() {
        let diff = (value - rough).abs();
        cells.push(MapCell {
            m1: engine.m1[index / engine.m2.len()],
            m2: engine.m2[index % engine.m2.len()],
            intensity: value / scale,
            error_estimate: diff / scale,
            converged: diff <= tolerance,
        });
    }
    Ok(IntensityMap {
        m1_range: (*m1_range.start(), *m1_range.end()),
        m2_range: (*m2_range.start(), *m2_range.end()),
        cells,
        scale,
        setup: *setup,
        quad: *quad,
    })
}

struct Engine<'a> {
    setup: &'a Smearing,
    m1: Vec<i32>,
    m2: Vec<i32>,
    d_min: i32,
}

impl<'a> Engine<'a> {
    fn new(setup: &'a Smearing, m1: RangeInclusive<i32>, m2: RangeInclusive<i32>) -> Result<Self> {
        let (m1, m2): (Vec<i32>, Vec<i32>) = (m1.collect(), m2.collect());
        if m1.is_empty() || m2.is_empty() {
            return Err(Error::InvalidParameter("helicity ranges must be non-empty"));
        }
        let d_min = m1[0] - m2[m2.len() - 1];
        Ok(Self { setup, m1, m2, d_min })
    }

    fn cell_count(&self) -> usize {
        self.m1.len() * self.m2.len()
    }

    /// Raw `int dq |A|^2` for every cell, `n` nodes in each dimension.
    fn q_integrated(&self, n: usize) -> Vec<f64> {
        let rule = GaussLegendre::new(n);
        let q_max = self.setup.profiles.q_limit(self.setup.theta);
        let m0_sq = self.setup.model.m0.norm_sqr();
        let mut total = vec![0.0; self.cell_count()];
        let mut a = vec![0.0; self.cell_count()];
        for (u, w) in rule.on(0.0, FRAC_PI_2) {
            self.reduced_at_q(q_max * u.sin(), &rule, &mut a);
            let weight = 2.0 * w * q_max * u.cos() * m0_sq;
            for (t, v) in total.iter_mut().zip(&a) {
                *t += weight * v * v;
            }
        }
        total
    }

    /// `A(q) / (i^(m1+m2-m) M0)` for every cell.
    fn reduced_at_q(&self, q: f64, rule: &GaussLegendre, out: &mut [f64]) {
        out.fill(0.0);
        let p = &self.setup.profiles;
        let (sin_t, cos_t) = self.setup.theta.sin_cos();
        let (lo, hi) = p.initial.support();
        let kappa_min = lo.max(q.abs() / sin_t);
        if kappa_min >= hi {
            return;
        }
        let s_a = ((kappa_min * sin_t).powi(2) - q * q).max(0.0).sqrt();
        let s_b = ((hi * sin_t).powi(2) - q * q).sqrt();

        let d_count = (self.m1[self.m1.len() - 1] - self.m2[0] - self.d_min + 1) as usize;
        let mut azimuthal = vec![0.0; d_count];
        let mut opening = vec![0.0; self.cell_count()];
        let mut scratch = Scratch::new(self.m1.len(), self.m2.len());
        let m = self.setup.m as f64;
        for (s, w) in rule.on(s_a, s_b) {
            let kappa = q.hypot(s) / sin_t;
            let f = p.initial.value(kappa);
            if f == 0.0 {
                continue;
            }
            let kappa_tilde = ((kappa - q) * (kappa + q)).sqrt();
            self.opening_sums(kappa_tilde, rule, &mut scratch, &mut opening);
            // cos(phi*) = q / (kappa sin theta), cos(phi~*) = q cos(theta) / (kappa~ sin theta)
            let phi_star = s.atan2(q);
            let phi_tilde_star = s.atan2(q * cos_t);
            for (k, c) in azimuthal.iter_mut().enumerate() {
                let d = (self.d_min + k as i32) as f64;
                *c = (m * phi_star - d * phi_tilde_star).cos();
            }
            let weight = w * f / (kappa.sqrt() * sin_t * sin_t);
            let n2 = self.m2.len();
            for (i, &m1) in self.m1.iter().enumerate() {
                for (j, &m2) in self.m2.iter().enumerate() {
                    let d = (m1 - m2 - self.d_min) as usize;
                    out[i * n2 + j] += weight * azimuthal[d] * opening[i * n2 + j];
                }
            }
        }
    }

    /// `int dkappa1 dkappa2 f1 f2 (2/area) sqrt(kappa1 kappa2) cos(m1 delta1 + m2 delta2)`
    /// at fixed `kappa~`, for every cell.
    fn opening_sums(&self, kappa_tilde: f64, rule: &GaussLegendre, scratch: &mut Scratch, out: &mut [f64]) {
        out.fill(0.0);
        let p = &self.setup.profiles;
        let (lo1, hi1) = p.first.support();
        let (lo2, hi2) = p.second.support();
        let sum_hi = (hi1 + hi2) / kappa_tilde;
        let cos_hi = ((hi1 - lo2) / kappa_tilde).min(1.0);
        let cos_lo = ((lo1 - hi2) / kappa_tilde).max(-1.0);
        if sum_hi <= 1.0 || cos_hi <= cos_lo {
            return;
        }
        let beta = (((lo1 + lo2) / kappa_tilde).max(1.0).acosh(), sum_hi.acosh());
        let alpha = (cos_hi.acos(), cos_lo.acos());

        let mut alpha_nodes = core::mem::take(&mut scratch.alpha);
        alpha_nodes.clear();
        alpha_nodes.extend(rule.on(alpha.0, alpha.1).map(|(a, w)| {
            let half = (0.5 * a).sin();
            (a.cos(), a.sin(), 2.0 * half * half, w)
        }));
        let n2 = self.m2.len();
        for (b, wb) in rule.on(beta.0, beta.1) {
            let (cosh_b, sinh_b) = (b.cosh(), b.sinh());
            let half = (0.5 * b).sinh();
            let cosh_m1 = 2.0 * half * half;
            for &(ca, sa, one_minus_ca, wa) in &alpha_nodes {
                // cosh b - cos a and 1 - cosh b cos a without cancellation near the corner
                let sum = cosh_b + ca;
                let diff = cosh_m1 + one_minus_ca;
                let (k1, k2) = (0.5 * kappa_tilde * sum, 0.5 * kappa_tilde * diff);
                let (f1, f2) = (p.first.value(k1), p.second.value(k2));
                if f1 == 0.0 || f2 == 0.0 {
                    continue;
                }
                let g = 4.0 * wa * wb * f1 * f2 * (k1 * k2).sqrt();
                let cross = sa * sinh_b;
                let e1 = Complex64::new(1.0 + cosh_b * ca, cross) / sum;
                let e2 = Complex64::new(one_minus_ca - ca * cosh_m1, cross) / diff;
                scratch.fill_powers(e1 / e1.norm(), self.m1[0], g, true);
                scratch.fill_powers(e2 / e2.norm(), self.m2[0], 1.0, false);
                for (i, (&pr, &pi)) in scratch.p1_re.iter().zip(&scratch.p1_im).enumerate() {
                    let row = &mut out[i * n2..(i + 1) * n2];
                    for ((o, &qr), &qi) in row.iter_mut().zip(&scratch.p2_re).zip(&scratch.p2_im) {
                        *o += pr * qr - pi * qi;
                    }
                }
            }
        }
        scratch.alpha = alpha_nodes;
    }
}

struct Scratch {
    alpha: Vec<(f64, f64, f64, f64)>,
    p1_re: Vec<f64>,
    p1_im: Vec<f64>,
    p2_re: Vec<f64>,
    p2_im: Vec<f64>,
}

impl Scratch {
    fn new(n1: usize, n2: usize) -> Self {
        Self {
            alpha: Vec::new(),
            p1_re: vec![0.0; n1],
            p1_im: vec![0.0; n1],
            p2_re: vec![0.0; n2],
            p2_im: vec![0.0; n2],
        }
    }

    /// `scale * e^(first + k)` for consecutive `k`.
    fn fill_powers(&mut self, e: Complex64, first: i32, scale: f64, into_first: bool) {
        let (re, im) = if into_first { (&mut self.p1_re, &mut self.p1_im) } else { (&mut self.p2_re, &mut self.p2_im) };
        let mut z = e.powi(first) * scale;
        for (r, i) in re.iter_mut().zip(im.iter_mut()) {
            *r = z.re;
            *i = z.im;
            z *= e;
        }
    }
}
