//! The acceptance suite as ten numbered criteria with preset budgets.

use super::*;
use crate::loewner::AngleConfig;
use crate::partition::RainbowOptions;
use crate::samplers::{BesselParams, SleParams};

/// Budget preset. `Desk` uses the full acceptance budgets; `Smoke` runs every
/// check end to end with a few paths and is not expected to pass statistically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Desk,
    Smoke,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub reports: Vec<Report>,
    pub pass: bool,
    /// Set when a check had too few usable samples to report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub preset: Preset,
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub pass: bool,
}

/// Criterion titles, indexed by id − 1.
pub const TITLES: [&str; 10] = [
    "exact identities",
    "BPZ residuals",
    "fusion constants",
    "rainbow quadrature",
    "fusion limit",
    "martingale Monte Carlo",
    "two-time martingale with interaction term",
    "Bessel hitting exponent",
    "pathwise laws",
    "resampling marginal",
];

fn paths(preset: Preset, desk: usize) -> usize {
    match preset {
        Preset::Desk => desk,
        Preset::Smoke => (desk / 100).max(20),
    }
}

fn budget(preset: Preset, desk: usize, dt: f64, seed: u64, exec: Exec) -> McConfig {
    McConfig {
        n_paths: paths(preset, desk),
        dt,
        seed,
        exec,
    }
}

/// Runs one criterion; `id` in 1..=10.
/// An inconclusive check fails the criterion instead of aborting; other errors propagate.
pub fn run_criterion(id: u8, preset: Preset, seed: u64, exec: Exec) -> Result<CriterionReport> {
    let title = TITLES
        .get((id as usize).wrapping_sub(1))
        .ok_or_else(|| crate::SleError::Domain(format!("no criterion {id}")))?
        .to_string();
    match criterion_reports(id, preset, seed, exec) {
        Ok(reports) => {
            let pass = reports.iter().all(Report::pass);
            Ok(CriterionReport {
                id,
                title,
                reports,
                pass,
                error: None,
            })
        }
        Err(e @ crate::SleError::Inconclusive(_)) => Ok(CriterionReport {
            id,
            title,
            reports: Vec::new(),
            pass: false,
            error: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

fn criterion_reports(id: u8, preset: Preset, seed: u64, exec: Exec) -> Result<Vec<Report>> {
    use std::f64::consts::PI;
    let antipodal = AngleConfig::new(vec![0.0, PI])?;
    let b = |desk: usize, dt: f64| budget(preset, desk, dt, seed, exec);
    let reports: Vec<Report> = match id {
        1 => check_identities(seed)?.into_iter().map(Report::from).collect(),
        2 => check_bpz(seed, 20)?.into_iter().map(Report::from).collect(),
        3 => check_constants()?.into_iter().map(Report::from).collect(),
        4 => check_rainbow(RainbowOptions::default())?
            .into_iter()
            .map(Report::from)
            .collect(),
        5 => {
            let eps = [0.1, 0.05, 0.025];
            let o = RainbowOptions::default();
            vec![
                check_fusion_limit(1, 5.0, &[0.0], 1.0, &eps, o)?.into(),
                check_fusion_limit(2, 5.0, &[0.0, 0.5], 1.0, &eps, o)?.into(),
            ]
        }
        6 => {
            let cfg = b(10_000, 1e-4);
            vec![
                check_spiral_martingale(2.0, 1.0, 0.0, 1.0, &cfg)?.into(),
                check_spiral_martingale(4.0, -2.0, PI, 1.0, &cfg)?.into(),
                check_spiral_martingale(2.0, 0.0, 0.0, 1.0, &cfg)?.into(),
                check_slice_martingale(3.0, 0.0, &antipodal, 0.5, &cfg)?.into(),
                check_slice_martingale(4.0, 1.0, &AngleConfig::equally_spaced(3), 0.5, &cfg)?.into(),
            ]
        }
        7 => {
            let cfg = b(4_000, TWO_TIME_DT);
            let sched = Staircase {
                total_capacity: 0.4,
                bursts: 8,
            };
            vec![
                check_two_time_martingale(8.0 / 3.0, 0.0, &antipodal, sched, 3.0, &cfg)?.into(),
                check_two_time_martingale(3.0, 0.0, &antipodal, sched, 4.0, &cfg)?.into(),
            ]
        }
        8 => {
            let bp = |alpha: f64, kappa: f64| BesselParams {
                alpha,
                kappa,
                mu: 0.0,
                x0: BESSEL_X0,
            };
            let fine = [0.2, 0.1, 0.05];
            vec![
                fit_hitting_exponent(&bp(2.0, 4.0), &fine, 1.0, 0.15, &b(20_000, BESSEL_DT))?.into(),
                fit_hitting_exponent(&bp(1.0, 2.0), &fine, 1.0, 0.15, &b(20_000, BESSEL_DT))?.into(),
                fit_hitting_exponent(&bp(2.0, 2.0), &[0.4, 0.2, 0.1], 1.0, 0.20, &b(100_000, BESSEL_DT))?.into(),
            ]
        }
        9 => {
            let cfg = b(500, 1e-3);
            let three = AngleConfig::new(vec![0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])?;
            let rho = SleParams {
                kappa: 2.0,
                mu: 0.0,
                rho: vec![2.0, 2.0],
                p: 3,
            };
            vec![
                check_transience(2.0, 0.0, &[], &AngleConfig::new(vec![0.0])?, 5, 16, &cfg)?.into(),
                check_gap_decay(&rho, &three, 5.0, &cfg)?.into(),
                check_coupling(&rho, &three, 2.0, &cfg)?.into(),
                check_common_time(3.0, 0.0, &antipodal, 0.3, 1, COMMON_TIME_TOL, &cfg)?.into(),
            ]
        }
        10 => {
            let cfg = b(2_000, 1e-3);
            vec![
                check_resampling_marginal(3.0, 0.0, &antipodal, 0.5, &cfg)?.into(),
                check_resampling_marginal(4.0, 2.0, &antipodal, 0.5, &cfg)?.into(),
            ]
        }
        _ => return Err(crate::SleError::Domain(format!("no criterion {id}"))),
    };
    Ok(reports)
}

/// Own-time step of the staircase schedule.
pub const TWO_TIME_DT: f64 = 1e-3;
/// Grid step of the Bessel runs (refined adaptively near the endpoints).
pub const BESSEL_DT: f64 = 1e-3;
pub const BESSEL_X0: f64 = 0.2;
/// Allowed zipper error in the common-time clock bounds.
pub const COMMON_TIME_TOL: f64 = 1e-6;

/// Runs all ten criteria in order.
pub fn run_suite(preset: Preset, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let criteria = (1..=10)
        .map(|id| run_criterion(id, preset, seed, exec))
        .collect::<Result<Vec<_>>>()?;
    let pass = criteria.iter().all(|c| c.pass);
    Ok(SuiteReport {
        preset,
        seed,
        criteria,
        pass,
    })
}
