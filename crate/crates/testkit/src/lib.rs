//! Slow, simple reference implementations for the test suites.
//!
//! Nothing here shares code with `vortex-core`: every routine uses a different algorithm
//! from the one it checks.

use std::f64::consts::PI;

use rand::Rng;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn renormalize(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        Self::renormalize(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let err = self.hi.mul_add(other.hi, -p);
        Self::renormalize(p, err + self.hi * other.lo + self.lo * other.hi)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        // remainder self - q1 * d, computed exactly in its leading part
        let p = q1 * d;
        let p_err = q1.mul_add(d, -p);
        let r = (self.hi - p - p_err + self.lo) / d;
        Self::renormalize(q1, r)
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `J_m(x)` from the ascending power series summed in double-double arithmetic.
///
/// The series terms peak near `e^x / (2 pi x)`, so the 106-bit accumulator keeps the
/// absolute error below `1e-15` up to roughly `x = 35`.
pub fn bessel_series(m: u32, x: f64) -> f64 {
    assert!((0.0..=35.0).contains(&x), "series oracle used outside its accurate range");
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let half = DoubleDouble::new(0.5 * x);
    let mut term = DoubleDouble::new(1.0);
    for j in 1..=m {
        term = term.mul(half).div_f64(j as f64);
    }
    let half_sq = half.mul(half);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = term.mul(half_sq).div_f64(k as f64).div_f64((k + m) as f64).neg();
        sum = sum.add(term);
        if term.hi.abs() < 1e-40 * sum.hi.abs().max(1e-300) && k as f64 > x {
            break;
        }
        if k > 10_000 {
            break;
        }
    }
    sum.to_f64()
}

/// `J_m(x) = (1 / 2 pi) int_0^{2 pi} cos(m t - x sin t) dt` by the trapezoidal rule, which
/// converges geometrically for this periodic integrand once the point count exceeds
/// `x + m` by a safe margin.
pub fn bessel_integral(m: u32, x: f64) -> f64 {
    let n = 2 * (x.ceil() as usize + m as usize) + 128;
    let h = 2.0 * PI / n as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (m as f64 * t - x * t.sin()).cos()
        })
        .sum();
    sum / n as f64
}

/// Reference `J_m(x)`: the double-double series where it is accurate, the periodic
/// trapezoid elsewhere.
pub fn bessel_reference(m: u32, x: f64) -> f64 {
    if x <= 25.0 {
        bessel_series(m, x)
    } else {
        bessel_integral(m, x)
    }
}

/// Tanh-sinh (double-exponential) quadrature on the open interval `(a, b)`, halving the
/// step until two successive levels agree to `tol` relative. Tolerates integrable
/// endpoint singularities because nodes cluster doubly exponentially at the ends.
///
/// `f(x, x - a, b - x)` receives the distances to both endpoints computed without
/// cancellation, so a singular factor like `1/sqrt(b - x)` can be evaluated accurately.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let t_max = 4.5;
    let eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let (cosh_s, x) = (s.cosh(), s.tanh());
        // distance from the nearest endpoint computed without cancellation
        let gap = half / (s.abs().exp() * cosh_s);
        if gap == 0.0 {
            return 0.0;
        }
        let (node, from_a, to_b) =
            if x >= 0.0 { (b - gap, 2.0 * half - gap, gap) } else { (a + gap, gap, 2.0 * half - gap) };
        let weight = 0.5 * PI * t.cosh() / (cosh_s * cosh_s);
        half * weight * f(node, from_a, to_b)
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut previous = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let estimate = sum * h;
        if (estimate - previous).abs() <= tol * estimate.abs() {
            return estimate;
        }
        previous = estimate;
    }
    previous
}

/// Cells of a uniform `cells^N` grid on the torus `[0, 2 pi)^N` in which every component
/// of `f` changes sign between the cell's corners: candidates for a common zero.
pub fn sign_change_cells<const N: usize, F>(f: F, cells: usize) -> Vec<[usize; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let h = 2.0 * PI / cells as f64;
    let total = cells.pow(N as u32);
    let index_of = |mut i: usize| {
        let mut idx = [0usize; N];
        for v in idx.iter_mut() {
            *v = i % cells;
            i /= cells;
        }
        idx
    };
    let values: Vec<[f64; N]> = (0..total)
        .map(|i| {
            let idx = index_of(i);
            let mut p = [0.0; N];
            for (x, &k) in p.iter_mut().zip(&idx) {
                *x = k as f64 * h;
            }
            f(&p)
        })
        .collect();
    let flat = |idx: &[usize; N]| idx.iter().rev().fold(0, |acc, &k| acc * cells + k);

    let mut hits = Vec::new();
    for i in 0..total {
        let base = index_of(i);
        let mut lo = [f64::INFINITY; N];
        let mut hi = [f64::NEG_INFINITY; N];
        for corner in 0..(1usize << N) {
            let mut idx = base;
            for (d, v) in idx.iter_mut().enumerate() {
                if corner >> d & 1 == 1 {
                    *v = (*v + 1) % cells;
                }
            }
            let r = values[flat(&idx)];
            for c in 0..N {
                lo[c] = lo[c].min(r[c]);
                hi[c] = hi[c].max(r[c]);
            }
        }
        if (0..N).all(|c| lo[c] <= 0.0 && hi[c] >= 0.0) {
            hits.push(base);
        }
    }
    hits
}

/// Cells of a uniform `cells x cells` grid on the torus `[0, 2 pi)^2` that hold a zero of the
/// piecewise-linear interpolant of `f`: each cell is split into two triangles and the
/// linear zero is located in barycentric coordinates. Much sharper than a corner sign test
/// when the two zero curves run nearly parallel.
pub fn simplex_zero_cells<F>(f: F, cells: usize) -> Vec<[usize; 2]>
where
    F: Fn(&[f64; 2]) -> [f64; 2],
{
    let h = 2.0 * PI / cells as f64;
    let values: Vec<[f64; 2]> =
        (0..cells * cells).map(|i| f(&[(i % cells) as f64 * h, (i / cells) as f64 * h])).collect();
    let at = |i: usize, j: usize| values[(j % cells) * cells + i % cells];
    // zero of the linear map through three vertex values, in barycentric coordinates
    let contains_zero = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        let (u, v) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
        let det = u[0] * v[1] - u[1] * v[0];
        if det == 0.0 {
            return false;
        }
        let s = (-a[0] * v[1] + a[1] * v[0]) / det;
        let t = (-u[0] * a[1] + u[1] * a[0]) / det;
        s >= 0.0 && t >= 0.0 && s + t <= 1.0
    };
    let mut hits = Vec::new();
    for j in 0..cells {
        for i in 0..cells {
            let (p00, p10, p01, p11) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
            if contains_zero(p00, p10, p11) || contains_zero(p00, p11, p01) {
                hits.push([i, j]);
            }
        }
    }
    hits
}

/// Groups grid cells into clusters of mutually adjacent cells (periodic, including
/// diagonal neighbours).
pub fn cluster_cells<const N: usize>(hits: &[[usize; N]], cells: usize) -> Vec<Vec<[usize; N]>> {
    let adjacent = |a: &[usize; N], b: &[usize; N]| {
        a.iter().zip(b).all(|(&x, &y)| {
            let d = x.abs_diff(y);
            d <= 1 || d == cells - 1
        })
    };
    let mut label = vec![usize::MAX; hits.len()];
    let mut clusters = Vec::new();
    for start in 0..hits.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        label[start] = id;
        let mut members = vec![hits[start]];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..hits.len() {
                if label[j] == usize::MAX && adjacent(&hits[i], &hits[j]) {
                    label[j] = id;
                    members.push(hits[j]);
                    stack.push(j);
                }
            }
        }
        clusters.push(members);
    }
    clusters
}

/// A random triple-twisted configuration `(theta, q, kappa, kappa1, kappa2)` kept away from
/// every support boundary: `|xi| < 0.9 theta` and triangle area above `0.05 kappa~^2`.
pub fn supported_configuration<R: Rng>(rng: &mut R) -> (f64, f64, f64, f64, f64) {
    let theta = rng.gen_range(0.05..1.2);
    let kappa = rng.gen_range(0.5..2.0);
    let xi: f64 = rng.gen_range(-0.9..0.9) * theta;
    let q = kappa * xi.sin();
    let kt = kappa * xi.cos();
    loop {
        let (k1, k2) = (rng.gen_range(0.1..2.0) * kt, rng.gen_range(0.1..2.0) * kt);
        let s = 0.5 * (kt + k1 + k2);
        let area_sq = s * (s - kt) * (s - k1) * (s - k2);
        if area_sq > 0.0 && area_sq.sqrt() > 0.05 * kt * kt {
            return (theta, q, kappa, k1, k2);
        }
    }
}
