//! The JSON run configuration shared by every subcommand.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use vortex_core::amplitudes::AmplitudeModel;
use vortex_core::numerics::{QuadratureSpec, RootFindSpec};
use vortex_core::Complex64;

/// Which subcommand a configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    OracleCheck,
    Map,
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub node_count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { node_count: 64, abs_tol: 0.0, rel_tol: 1e-4, max_refinements: 6 }
    }
}

impl From<QuadratureConfig> for QuadratureSpec {
    fn from(c: QuadratureConfig) -> Self {
        Self { node_count: c.node_count, abs_tol: c.abs_tol, rel_tol: c.rel_tol, max_refinements: c.max_refinements }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RootFindConfig {
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub start_grid_density: usize,
    pub dedupe_tol: f64,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        let d = RootFindSpec::default();
        Self {
            residual_tol: d.residual_tol,
            max_iterations: d.max_iterations,
            start_grid_density: d.start_grid_density,
            dedupe_tol: d.dedupe_tol,
        }
    }
}

impl From<RootFindConfig> for RootFindSpec {
    fn from(c: RootFindConfig) -> Self {
        Self {
            residual_tol: c.residual_tol,
            max_iterations: c.max_iterations,
            start_grid_density: c.start_grid_density,
            dedupe_tol: c.dedupe_tol,
        }
    }
}

/// Every physical number is in one shared inverse-length unit. Missing fields take the
/// reference-setup defaults, so `{}` is a valid map configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub m: i32,
    pub theta: f64,
    pub kappa0: f64,
    pub kappa01: f64,
    pub kappa02: f64,
    pub sigma_rel: f64,
    pub q: f64,
    pub m1_min: i32,
    pub m1_max: i32,
    pub m2_min: i32,
    pub m2_max: i32,
    pub quadrature: QuadratureConfig,
    pub root_find: RootFindConfig,
    pub seed: u64,
    pub sample_count: usize,
    pub dispersion_threshold: f64,
    pub r_max: f64,
    pub grid_n: usize,
    pub m0_re: f64,
    pub m0_im: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: 5,
            theta: 0.2,
            kappa0: 1.0,
            kappa01: 1.0,
            kappa02: 0.5,
            sigma_rel: 0.2,
            q: 0.0,
            m1_min: -5,
            m1_max: 15,
            m2_min: -10,
            m2_max: 10,
            quadrature: QuadratureConfig::default(),
            root_find: RootFindConfig::default(),
            seed: 0,
            sample_count: 1000,
            dispersion_threshold: 1e-8,
            r_max: 10.0,
            grid_n: 64,
            m0_re: 1.0,
            m0_im: 0.0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn model(&self) -> AmplitudeModel {
        AmplitudeModel { m0: Complex64::new(self.m0_re, self.m0_im) }
    }

    /// Checks everything `command` relies on and returns every violated constraint.
    pub fn validate(&self, command: Command) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        let mut need = |ok: bool, message: String| {
            if !ok {
                errors.push(message);
            }
        };

        need(
            self.theta > 0.0 && self.theta < FRAC_PI_2,
            format!("theta = {} must satisfy 0 < theta < pi/2", self.theta),
        );
        for (name, value) in [("kappa0", self.kappa0), ("kappa01", self.kappa01), ("kappa02", self.kappa02)] {
            need(value > 0.0 && value.is_finite(), format!("{name} = {value} must be positive and finite"));
        }
        need(self.m0_re.is_finite() && self.m0_im.is_finite(), "m0_re and m0_im must be finite".into());
        need(self.m1_min <= self.m1_max, format!("m1_min = {} must not exceed m1_max = {}", self.m1_min, self.m1_max));
        need(self.m2_min <= self.m2_max, format!("m2_min = {} must not exceed m2_max = {}", self.m2_min, self.m2_max));

        match command {
            Command::Eval => {
                need(self.q.is_finite(), format!("q = {} must be finite", self.q));
                let limit = self.kappa0 * self.theta.sin();
                need(
                    self.q.abs() < limit,
                    format!(
                        "|q| < kappa0 * sin(theta) violated: |q| = {} but kappa0 * sin(theta) = {limit}",
                        self.q.abs()
                    ),
                );
                need(
                    self.m1_min == self.m1_max && self.m2_min == self.m2_max,
                    "eval needs a single (m1, m2): set m1_min = m1_max and m2_min = m2_max".into(),
                );
            }
            Command::OracleCheck => {
                need(self.sample_count >= 1, "sample_count must be at least 1".into());
                need(
                    self.dispersion_threshold >= 0.0,
                    format!("dispersion_threshold = {} must be non-negative", self.dispersion_threshold),
                );
                let r = &self.root_find;
                need(r.residual_tol > 0.0, format!("root_find.residual_tol = {} must be positive", r.residual_tol));
                need(r.max_iterations >= 1, "root_find.max_iterations must be at least 1".into());
                need(r.start_grid_density >= 1, "root_find.start_grid_density must be at least 1".into());
                need(
                    r.dedupe_tol > r.residual_tol,
                    format!("root_find.dedupe_tol = {} must exceed residual_tol = {}", r.dedupe_tol, r.residual_tol),
                );
            }
            Command::Map => {
                need(
                    self.sigma_rel > 0.0 && self.sigma_rel.is_finite(),
                    format!("sigma_rel = {} must be positive and finite", self.sigma_rel),
                );
                let quad = &self.quadrature;
                need(quad.node_count >= 2, format!("quadrature.node_count = {} must be at least 2", quad.node_count));
                need(quad.abs_tol >= 0.0 && quad.rel_tol >= 0.0, "quadrature tolerances must be non-negative".into());
                need(
                    quad.abs_tol > 0.0 || quad.rel_tol > 0.0,
                    "at least one of quadrature.abs_tol, quadrature.rel_tol must be positive".into(),
                );
                need(quad.max_refinements >= 1, "quadrature.max_refinements must be at least 1".into());
            }
            Command::Field => {
                need(self.grid_n >= 2, format!("grid_n = {} must be at least 2", self.grid_n));
                need(
                    self.r_max > 0.0 && self.r_max.is_finite(),
                    format!("r_max = {} must be positive and finite", self.r_max),
                );
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference_setup() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert!(c.validate(Command::Map).is_ok());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_json(r#"{"kappa": 1.0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"quadrature": {"nodes": 3}}"#).is_err());
    }

    #[test]
    fn every_violation_is_listed() {
        let c = RunConfig { theta: 2.0, kappa01: -1.0, m1_min: 3, m1_max: 1, ..RunConfig::default() };
        let errors = c.validate(Command::Eval).unwrap_err();
        assert_eq!(errors.len(), 4, "{errors:?}");
        assert!(errors.iter().any(|e| e.contains("theta")));
        assert!(errors.iter().any(|e| e.contains("kappa01")));
        assert!(errors.iter().any(|e| e.contains("m1_min")));
        assert!(errors.iter().any(|e| e.contains("single (m1, m2)")));
    }

    #[test]
    fn eval_rejects_q_outside_the_allowed_region() {
        let c = RunConfig { q: 0.2f64.sin(), m1_min: 5, m1_max: 5, m2_min: 0, m2_max: 0, ..RunConfig::default() };
        let errors = c.validate(Command::Eval).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert!(errors[0].contains("|q| < kappa0 * sin(theta)"), "{}", errors[0]);
    }
}
