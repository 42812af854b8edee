//! The four subcommands. Each renders its artifact as text; [`run`] writes the files
//! and maps the outcome to an exit code.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vortex_core::amplitudes::reduced_triple_amplitude;
use vortex_core::kinematics::{angle_set, field_amplitude, triangle_geometry, CollisionGeometry, TwistedState};
use vortex_core::oracle::{oracle_amplitude, OracleOptions, NORMALIZATION_TAG};
use vortex_core::wavepackets::{intensity_map, PacketProfiles, Smearing};
use vortex_core::{Complex64, Error};

use crate::config::{Command, RunConfig};
use crate::format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_THRESHOLD: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DEGENERATE_SUPPORT: u8 = 3;
pub const EXIT_DEGENERATE_ORACLE: u8 = 4;
pub const EXIT_QUADRATURE: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("degenerate support: {0}")]
    DegenerateSupport(Error),
    #[error("quadrature failed: {0}")]
    Quadrature(Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::DegenerateSupport(_) => EXIT_DEGENERATE_SUPPORT,
            CliError::Quadrature(_) => EXIT_QUADRATURE,
        }
    }
}

fn core_error(e: Error) -> CliError {
    match e {
        Error::DegenerateTriangle { .. } | Error::EmptySupport | Error::DegenerateDirection => {
            CliError::DegenerateSupport(e)
        }
        Error::NoConvergence { .. } => CliError::Quadrature(e),
        other => CliError::Config(vec![other.to_string()]),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn load_config(path: &Path, command: Command) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { context: format!("reading {}", path.display()), source })?;
    let config = RunConfig::from_json(&text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    config.validate(command).map_err(CliError::Config)?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutput {
    pub value_re: f64,
    pub value_im: f64,
    pub phase_power: i32,
    pub in_support: bool,
    pub xi: f64,
    pub phi_star: f64,
    pub phi_tilde_star: f64,
    /// `None` off the stripe.
    pub area: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
}

pub fn eval(config: &RunConfig) -> Result<EvalOutput, CliError> {
    let geom = CollisionGeometry::new(config.theta, config.q, config.kappa0, config.kappa01, config.kappa02)
        .map_err(core_error)?;
    let angles = angle_set(&geom).map_err(core_error)?;
    let triangle = match triangle_geometry(geom.kappa, angles.xi, geom.kappa1, geom.kappa2) {
        Ok(t) => Some(t),
        Err(Error::OutsideStripe(..)) => None,
        Err(e) => return Err(core_error(e)),
    };
    let a =
        reduced_triple_amplitude(&geom, config.m, config.m1_min, config.m2_min, &config.model()).map_err(core_error)?;
    Ok(EvalOutput {
        value_re: a.value.re,
        value_im: a.value.im,
        phase_power: a.phase_power,
        in_support: a.in_support,
        xi: angles.xi,
        phi_star: angles.phi_star,
        phi_tilde_star: angles.phi_tilde_star,
        area: triangle.map(|t| t.area),
        delta1: triangle.map(|t| t.delta1),
        delta2: triangle.map(|t| t.delta2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSample {
    pub index: usize,
    pub theta: f64,
    pub q: f64,
    pub kappa: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub m: i32,
    pub m1: i32,
    pub m2: i32,
    pub ratio_re: f64,
    pub ratio_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedSample {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub sample_count: usize,
    pub normalization_tag: &'static str,
    pub ratio_mean_re: f64,
    pub ratio_mean_im: f64,
    /// `max |ratio - mean| / |mean|` over the kept samples.
    pub dispersion: f64,
    /// `max |ratio - 1|`: distance from the shared normalization.
    pub max_relative_deviation: f64,
    pub threshold: f64,
    pub pass: bool,
    pub samples: Vec<OracleSample>,
    pub excluded: Vec<ExcludedSample>,
}

impl OracleReport {
    pub fn exit_code(&self) -> u8 {
        if !self.excluded.is_empty() {
            EXIT_DEGENERATE_ORACLE
        } else if !self.pass {
            EXIT_THRESHOLD
        } else {
            EXIT_OK
        }
    }
}

/// A random configuration kept away from every support boundary: `theta` in
/// `[0.05, 1.2]`, `kappa` within a factor 2 of `kappa0`, `|xi| < 0.9 theta`, triangle area
/// above `0.05 kappa~^2`, helicities drawn from the configured ranges.
fn oracle_sample(rng: &mut ChaCha8Rng, config: &RunConfig) -> (CollisionGeometry, i32, i32) {
    let theta: f64 = rng.gen_range(0.05..1.2);
    let kappa = config.kappa0 * rng.gen_range(0.5..2.0);
    let xi = rng.gen_range(-0.9..0.9) * theta;
    let kt = kappa * f64::cos(xi);
    let (k1, k2) = loop {
        let (k1, k2) = (kt * rng.gen_range(0.1..2.0), kt * rng.gen_range(0.1..2.0));
        let s = 0.5 * (kt + k1 + k2);
        let area_sq = s * (s - kt) * (s - k1) * (s - k2);
        if area_sq > 0.0 && area_sq.sqrt() > 0.05 * kt * kt {
            break (k1, k2);
        }
    };
    let geom = CollisionGeometry { theta, q: kappa * xi.sin(), kappa, kappa1: k1, kappa2: k2 };
    let m1 = rng.gen_range(config.m1_min..=config.m1_max);
    let m2 = rng.gen_range(config.m2_min..=config.m2_max);
    (geom, m1, m2)
}

pub fn oracle_check(config: &RunConfig) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let options = OracleOptions { roots: config.root_find.into(), model: config.model(), ..OracleOptions::default() };
    let mut samples = Vec::with_capacity(config.sample_count);
    let mut ratios = Vec::with_capacity(config.sample_count);
    let mut excluded = Vec::new();
    for index in 0..config.sample_count {
        let (geom, m1, m2) = oracle_sample(&mut rng, config);
        let closed = reduced_triple_amplitude(&geom, config.m, m1, m2, &options.model);
        let oracle = oracle_amplitude(&geom, config.m, m1, m2, &options);
        let ratio = match (closed, oracle) {
            (Ok(c), Ok(o)) if c.value.norm() > 0.0 => o.amplitude / c.value,
            (Ok(_), Ok(_)) => {
                excluded.push(ExcludedSample { index, reason: "closed form vanishes exactly".into() });
                continue;
            }
            (Err(e), _) | (_, Err(e)) => {
                excluded.push(ExcludedSample { index, reason: e.to_string() });
                continue;
            }
        };
        ratios.push(ratio);
        samples.push(OracleSample {
            index,
            theta: geom.theta,
            q: geom.q,
            kappa: geom.kappa,
            kappa1: geom.kappa1,
            kappa2: geom.kappa2,
            m: config.m,
            m1,
            m2,
            ratio_re: ratio.re,
            ratio_im: ratio.im,
        });
    }
    let mean = if ratios.is_empty() {
        Complex64::new(f64::NAN, f64::NAN)
    } else {
        ratios.iter().sum::<Complex64>() / ratios.len() as f64
    };
    let dispersion = ratios.iter().map(|r| (r - mean).norm() / mean.norm()).fold(0.0, f64::max);
    let max_relative_deviation = ratios.iter().map(|r| (r - 1.0).norm()).fold(0.0, f64::max);
    let pass = !ratios.is_empty() && dispersion < config.dispersion_threshold;
    OracleReport {
        seed: config.seed,
        sample_count: config.sample_count,
        normalization_tag: NORMALIZATION_TAG,
        ratio_mean_re: if ratios.is_empty() { 0.0 } else { mean.re },
        ratio_mean_im: if ratios.is_empty() { 0.0 } else { mean.im },
        dispersion,
        max_relative_deviation,
        threshold: config.dispersion_threshold,
        pass,
        samples,
        excluded,
    }
}

/// The reference pipeline: packets `kappa0i` with widths `sigma_rel * kappa0i`.
pub fn map(config: &RunConfig) -> Result<vortex_core::wavepackets::IntensityMap, CliError> {
    let setup = Smearing {
        profiles: PacketProfiles::with_relative_width(config.kappa0, config.kappa01, config.kappa02, config.sigma_rel)
            .map_err(core_error)?,
        theta: config.theta,
        m: config.m,
        model: config.model(),
    };
    intensity_map(&setup, config.m1_min..=config.m1_max, config.m2_min..=config.m2_max, &config.quadrature.into())
        .map_err(core_error)
}

/// `e^{i m phi} J_m(kappa0 r) sqrt(kappa0 / 2 pi)` on `grid_n` radii in `[0, r_max]` times
/// `grid_n` azimuths in `[0, 2 pi)`, `r` outer.
pub fn field_csv(config: &RunConfig) -> Result<String, CliError> {
    // k_z only fixes the cone's opening angle; the transverse profile does not depend on it
    let state = TwistedState::massless(config.kappa0, config.m, 1.0).map_err(core_error)?;
    let n = config.grid_n;
    let mut out = String::from(format::FIELD_HEADER);
    out.push('\n');
    for i in 0..n {
        let r = config.r_max * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = TAU * j as f64 / n as f64;
            let v = field_amplitude(&state, r, phi).map_err(core_error)?;
            out.push_str(&format!(
                "{},{},{},{}\n",
                format::float(r),
                format::float(phi),
                format::float(v.re),
                format::float(v.im)
            ));
        }
    }
    Ok(out)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { context: format!("writing {}", path.display()), source })
}

fn partial_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".partial");
    PathBuf::from(name)
}

/// What a finished command reports on stderr besides its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub summary: String,
}

pub fn run(command: Command, config_path: &Path, out: &Path, plot: Option<&Path>) -> Result<Outcome, CliError> {
    let config = load_config(config_path, command)?;
    match command {
        Command::Eval => {
            let result = eval(&config)?;
            write(out, &json(&result))?;
            Ok(Outcome { code: EXIT_OK, summary: format!("in_support = {}", result.in_support) })
        }
        Command::OracleCheck => {
            let report = oracle_check(&config);
            write(out, &json(&report))?;
            Ok(Outcome {
                code: report.exit_code(),
                summary: format!(
                    "{} samples, {} excluded, dispersion {} (threshold {})",
                    report.samples.len(),
                    report.excluded.len(),
                    format::float(report.dispersion),
                    format::float(report.threshold)
                ),
            })
        }
        Command::Map => {
            let map = map(&config)?;
            if !map.all_converged() {
                let bad = map.cells.iter().filter(|c| !c.converged).count();
                let partial = partial_path(out);
                write(&partial, &format::partial_map_csv(&map))?;
                return Ok(Outcome {
                    code: EXIT_QUADRATURE,
                    summary: format!("{bad} cells did not converge; partial results in {}", partial.display()),
                });
            }
            write(out, &format::map_csv(&map))?;
            if let Some(plot) = plot {
                write(plot, &format::gnuplot_script(&map, &out.display().to_string(), config.m))?;
            }
            Ok(Outcome { code: EXIT_OK, summary: format!("{} cells", map.cells.len()) })
        }
        Command::Field => {
            write(out, &field_csv(&config)?)?;
            Ok(Outcome { code: EXIT_OK, summary: format!("{} points", config.grid_n * config.grid_n) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(m: i32, m1: i32, m2: i32, q: f64) -> RunConfig {
        RunConfig {
            m,
            q,
            kappa0: 1.0,
            kappa01: 0.9,
            kappa02: 0.7,
            m1_min: m1,
            m1_max: m1,
            m2_min: m2,
            m2_max: m2,
            ..RunConfig::default()
        }
    }

    #[test]
    fn eval_off_the_stripe_is_zero() {
        let config = RunConfig { kappa01: 0.1, kappa02: 0.2, ..single(5, 6, 1, 0.0) };
        let out = eval(&config).unwrap();
        assert!(!out.in_support);
        assert_eq!((out.value_re, out.value_im), (0.0, 0.0));
        assert_eq!(out.area, None);
    }

    #[test]
    fn eval_odd_m_cancels_at_xi_zero() {
        let out = eval(&single(1, 0, 0, 0.0)).unwrap();
        let scale = eval(&single(0, 0, 0, 0.0)).unwrap().value_re.abs();
        assert!(out.in_support);
        // cos(pi/2) is only zero up to rounding
        assert!(out.value_re.hypot(out.value_im) < 1e-15 * scale, "{out:?}");
    }

    #[test]
    fn oracle_check_is_deterministic() {
        let config = RunConfig { sample_count: 3, seed: 42, ..RunConfig::default() };
        let a = oracle_check(&config);
        assert_eq!(a, oracle_check(&config));
        assert!(a.pass, "{a:?}");
        let zero = oracle_check(&RunConfig { dispersion_threshold: 0.0, ..config });
        assert_eq!(zero.exit_code(), EXIT_THRESHOLD);
    }

    #[test]
    fn partial_path_appends_suffix() {
        assert_eq!(partial_path(Path::new("out/map.csv")), PathBuf::from("out/map.csv.partial"));
    }
}
