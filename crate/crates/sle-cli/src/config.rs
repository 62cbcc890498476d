//! Experiment configuration: JSON file, command-line overrides, defaults, validation.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_PATHS: usize = 1000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, msg: msg.into() }
}

/// Every knob of every subcommand. Unset fields take the documented defaults
/// in [`ExperimentConfig::resolve`]; the resolved config is embedded in outputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
    pub rho: Option<Vec<f64>>,
    pub p: Option<usize>,
    pub angles: Option<Vec<f64>>,
    pub target: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    /// Time horizon (common, own or capacity time depending on the check).
    pub t: Option<f64>,
    #[serde(alias = "paths")]
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub stride: Option<usize>,
    pub horizon: Option<usize>,
    pub alpha: Option<f64>,
    pub x0: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub total_capacity: Option<f64>,
    pub bursts: Option<usize>,
    pub starts: Option<Vec<f64>>,
    pub ends: Option<Vec<f64>>,
}

/// Which validation rules apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Sampling and tracing: κ ∈ (0, 8).
    Sample,
    /// Checks that invoke transience and non-collision: κ ∈ (0, 4], ρ ≥ 0.
    Transient,
    /// Partition-function evaluation: κ > 0.
    Evaluate,
    /// Everything else.
    General,
}

impl ExperimentConfig {
    /// Reads a JSON config, rejecting unknown keys.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    self.$f = other.$f.clone();
                }
            )*};
        }
        take!(
            kappa,
            mu,
            rho,
            p,
            angles,
            target,
            dt,
            steps,
            t,
            n_paths,
            seed,
            out,
            tolerance,
            stride,
            horizon,
            alpha,
            x0,
            epsilons,
            total_capacity,
            bursts,
            starts,
            ends
        );
        self
    }

    /// Fills the common defaults (μ = 0, ρ = [], p from ρ or angles,
    /// equally spaced angles, dt = 1e−4, 1000 paths, seed 0) and validates.
    pub fn resolve(mut self, purpose: Purpose) -> Result<Self, ConfigError> {
        let kappa = self.kappa.ok_or_else(|| invalid("kappa", "required"))?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", format!("κ = {kappa} must be positive")));
        }
        match purpose {
            Purpose::Sample | Purpose::General if kappa >= 8.0 => {
                return Err(invalid("kappa", format!("κ = {kappa} must lie in (0, 8)")));
            }
            Purpose::Transient if kappa > 4.0 => {
                return Err(invalid(
                    "kappa",
                    format!("κ = {kappa} must lie in (0, 4] for transience checks"),
                ));
            }
            _ => {}
        }
        self.mu.get_or_insert(0.0);
        let rho = self.rho.get_or_insert_with(Vec::new).clone();
        if let Some((j, r)) = rho.iter().enumerate().find(|(_, r)| !r.is_finite()) {
            return Err(invalid("rho", format!("rho[{j}] = {r} is not finite")));
        }
        if purpose == Purpose::Transient {
            if let Some((j, r)) = rho.iter().enumerate().find(|(_, r)| **r < 0.0) {
                return Err(invalid("rho", format!("rho[{j}] = {r}: transience requires ρ_j ≥ 0")));
            }
        }
        let p = match (self.p, &self.angles) {
            (Some(p), _) => p,
            (None, Some(a)) => a.len(),
            (None, None) => rho.len() + 1,
        };
        if p == 0 {
            return Err(invalid("p", "must be at least 1"));
        }
        self.p = Some(p);
        let angles = self.angles.get_or_insert_with(|| {
            (0..p)
                .map(|j| 2.0 * std::f64::consts::PI * j as f64 / p as f64)
                .collect()
        });
        if angles.len() != p {
            return Err(invalid("angles", format!("{} angles for p = {p}", angles.len())));
        }
        let dt = *self.dt.get_or_insert(DEFAULT_DT);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("dt = {dt} must be positive")));
        }
        if *self.n_paths.get_or_insert(DEFAULT_PATHS) == 0 {
            return Err(invalid("n_paths", "must be at least 1"));
        }
        self.seed.get_or_insert(0);
        if let Some(t) = self.t {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid("t", format!("t = {t} must be non-negative")));
            }
        }
        Ok(self)
    }

    // Accessors for resolved configs.
    pub fn kappa(&self) -> f64 {
        self.kappa.expect("resolved")
    }
    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or(0.0)
    }
    pub fn rho(&self) -> &[f64] {
        self.rho.as_deref().unwrap_or(&[])
    }
    pub fn angles(&self) -> &[f64] {
        self.angles.as_deref().unwrap_or(&[])
    }
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(DEFAULT_DT)
    }
    pub fn n_paths(&self) -> usize {
        self.n_paths.unwrap_or(DEFAULT_PATHS)
    }
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ExperimentConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn defaults_applied() {
        let c = parse(r#"{"kappa": 2.0}"#).unwrap().resolve(Purpose::General).unwrap();
        assert_eq!(c.dt, Some(1e-4));
        assert_eq!(c.n_paths, Some(1000));
        assert_eq!(c.angles, Some(vec![0.0]));
        assert_eq!(c.mu, Some(0.0));
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse(r#"{"kappa": 2.0, "kapa": 3}"#).unwrap_err();
        assert!(e.to_string().contains("kapa"));
    }

    #[test]
    fn negative_kappa_names_field() {
        let e = parse(r#"{"kappa": -1.0}"#)
            .unwrap()
            .resolve(Purpose::General)
            .unwrap_err();
        assert!(e.to_string().contains("kappa"));
    }

    #[test]
    fn negative_rho_rejected_only_for_transience() {
        let c = parse(r#"{"kappa": 2.0, "rho": [2.0, -1.0]}"#).unwrap();
        assert!(c.clone().resolve(Purpose::Sample).is_ok());
        let e = c.resolve(Purpose::Transient).unwrap_err().to_string();
        assert!(e.contains("rho") && e.contains("ρ_j ≥ 0"), "{e}");
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = parse(r#"{"kappa": 2.0, "seed": 3}"#).unwrap();
        let flags = ExperimentConfig {
            seed: Some(9),
            ..Default::default()
        };
        let c = file.overlay(&flags);
        assert_eq!((c.kappa, c.seed), (Some(2.0), Some(9)));
    }
}
