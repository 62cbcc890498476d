//! Checks that turn the theory into assertable numbers.
//!
//! Monte-Carlo checks return [`McReport`] or [`KsReport`], pathwise laws a
//! [`PathwiseReport`], regressions a [`FitReport`] and deterministic identities
//! a [`NumericReport`]. Every report serializes to the JSON shape
//! `{name, params, …, pass}`.

mod martingale;
mod numeric;
mod pathwise;
mod resampling;
mod suite;

pub use martingale::{check_slice_martingale, check_spiral_martingale, check_two_time_martingale, Staircase};
pub use numeric::{check_bpz, check_constants, check_fusion_limit, check_identities, check_rainbow};
pub use pathwise::{check_common_time, check_coupling, check_gap_decay, check_transience, fit_hitting_exponent};
pub use resampling::check_resampling_marginal;
pub use suite::{run_criterion, run_suite, CriterionReport, Preset, SuiteReport, TITLES};

use crate::loewner::AngleConfig;
use crate::par::Exec;
use crate::partition::z_multiradial;
use crate::rng::mix;
use crate::stats::{mean_se, KsResult};
use crate::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;

/// Path budget shared by the Monte-Carlo checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl McConfig {
    pub fn new(n_paths: usize, dt: f64, seed: u64) -> Self {
        McConfig {
            n_paths,
            dt,
            seed,
            exec: Exec::default(),
        }
    }

    /// Sampler seed of path `i`.
    pub fn path_seed(&self, i: usize) -> u64 {
        mix(self.seed, i as u64)
    }

    /// Number of grid steps covering `t`.
    pub fn steps_for(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub name: String,
    pub params: Value,
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_discarded: usize,
    pub dt: f64,
    pub target: f64,
    /// Allowed |z| in standard errors.
    pub tolerance: f64,
    pub z_score: f64,
    pub pass: bool,
}

impl McReport {
    /// Builds the report from per-path samples. With zero spread the check is
    /// exact and passes iff the estimate equals the target to 1e−12.
    pub fn from_samples(
        name: &str,
        params: Value,
        samples: &[f64],
        n_discarded: usize,
        dt: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        let (estimate, std_error) = mean_se(samples);
        let diff = estimate - target;
        let z_score = if std_error > 0.0 {
            diff / std_error
        } else if diff.abs() <= 1e-12 * target.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        McReport {
            name: name.into(),
            params,
            estimate,
            std_error,
            n_paths: samples.len(),
            n_discarded,
            dt,
            target,
            tolerance,
            z_score,
            pass: !samples.is_empty() && z_score.abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub name: String,
    pub params: Value,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// (log x, log y) pairs entering the regression.
    pub points: Vec<(f64, f64)>,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEntry {
    pub functional: String,
    #[serde(flatten)]
    pub result: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub name: String,
    pub params: Value,
    /// Usable paths per side.
    pub n_paths: [usize; 2],
    pub n_discarded: [usize; 2],
    pub dt: f64,
    pub tests: Vec<KsEntry>,
    /// Minimum p-value required of every test.
    pub tolerance: f64,
    pub pass: bool,
}

/// A law that must hold on every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwiseReport {
    pub name: String,
    pub params: Value,
    pub n_paths: usize,
    pub n_ok: usize,
    pub n_discarded: usize,
    pub dt: f64,
    /// Smallest slack seen over all paths and grid points; negative means violated.
    pub worst_margin: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<Value>,
    pub pass: bool,
}

/// Deterministic identity or residual bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericReport {
    pub name: String,
    pub params: Value,
    pub n_cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl NumericReport {
    fn from_errors(name: &str, params: Value, errors: &[f64], tolerance: f64) -> Self {
        let max_error = errors
            .iter()
            .fold(0.0f64, |m, e| if e.is_nan() { f64::NAN } else { m.max(*e) });
        NumericReport {
            name: name.into(),
            params,
            n_cases: errors.len(),
            max_error,
            tolerance,
            pass: !errors.is_empty() && max_error <= tolerance,
        }
    }
}

/// Any report, serialized without a tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Mc(McReport),
    Fit(FitReport),
    Ks(KsReport),
    Pathwise(PathwiseReport),
    Numeric(NumericReport),
}

impl Report {
    pub fn name(&self) -> &str {
        match self {
            Report::Mc(r) => &r.name,
            Report::Fit(r) => &r.name,
            Report::Ks(r) => &r.name,
            Report::Pathwise(r) => &r.name,
            Report::Numeric(r) => &r.name,
        }
    }

    pub fn pass(&self) -> bool {
        match self {
            Report::Mc(r) => r.pass,
            Report::Fit(r) => r.pass,
            Report::Ks(r) => r.pass,
            Report::Pathwise(r) => r.pass,
            Report::Numeric(r) => r.pass,
        }
    }
}

macro_rules! into_report {
    ($($t:ident => $v:ident),*) => {$(
        impl From<$t> for Report {
            fn from(r: $t) -> Self {
                Report::$v(r)
            }
        }
    )*};
}
into_report!(McReport => Mc, FitReport => Fit, KsReport => Ks, PathwiseReport => Pathwise, NumericReport => Numeric);

/// log Z^μ_p at continuously lifted angles that may have left the window
/// [ω¹, ω¹ + 2π): the pair part is read mod 2π, the spiral part from the lifts.
pub(crate) fn log_z_spiral(kappa: f64, mu: f64, lifts: &[f64]) -> Result<f64> {
    let first = lifts[0];
    let mut folded: Vec<f64> = lifts.iter().map(|w| first + (w - first).rem_euclid(2.0 * PI)).collect();
    folded[0] = first;
    folded[1..].sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let pair = z_multiradial(kappa, 0.0, &AngleConfig::new(folded)?)?.log_abs;
    Ok(pair + mu / kappa * lifts.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_report_passes_only_on_target() {
        let ok = McReport::from_samples("x", Value::Null, &[1.0; 4], 0, 0.1, 1.0, 3.0);
        assert!(ok.pass && ok.z_score == 0.0 && ok.std_error == 0.0);
        let bad = McReport::from_samples("x", Value::Null, &[1.0; 4], 0, 0.1, 1.1, 3.0);
        assert!(!bad.pass);
        let empty = McReport::from_samples("x", Value::Null, &[], 4, 0.1, 1.0, 3.0);
        assert!(!empty.pass);
    }

    #[test]
    fn z_score_definition() {
        let r = McReport::from_samples("x", Value::Null, &[0.0, 2.0], 0, 0.1, 0.5, 3.0);
        assert!((r.z_score - (r.estimate - r.target) / r.std_error).abs() < 1e-15);
    }

    #[test]
    fn spiral_log_z_is_lift_aware() {
        let (k, mu) = (3.0, 0.7);
        let a = [0.2, 2.5];
        let plain = z_multiradial(k, mu, &AngleConfig::new(a.to_vec()).unwrap())
            .unwrap()
            .log_abs;
        assert!((log_z_spiral(k, mu, &a).unwrap() - plain).abs() < 1e-14);
        let shifted = log_z_spiral(k, mu, &[0.2, 2.5 + 2.0 * PI]).unwrap();
        assert!((shifted - plain - mu / k * 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn report_json_shape() {
        let r: Report =
            McReport::from_samples("m", serde_json::json!({"kappa": 2.0}), &[1.0, 1.0], 0, 0.1, 1.0, 3.0).into();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["name", "params", "estimate", "target", "tolerance", "pass"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r.name(), "m");
    }
}
