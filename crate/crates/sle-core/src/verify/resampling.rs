//! First-curve marginal of multiradial SLE against the direct SLE_κ^μ(2, …, 2) sampler.

use super::{KsEntry, KsReport, McConfig};
use crate::error::{Result, SleError};
use crate::loewner::{joint_chart, AngleConfig, Chart, SlitStep};
use crate::par::map_paths;
use crate::samplers::{sample_multiradial_common, sample_radial_sle_rho, SleParams};
use crate::stats::ks_two_sample;
use serde_json::json;

/// (ξ_T − θ¹, max_{s ≤ T} (ξ_s − θ¹), V²_T − ξ_T) in own capacity time T.
type Functionals = [f64; 3];

const NAMES: [&str; 3] = ["terminal", "running_max", "first_gap"];

/// Truncates a zipped chart to capacity exactly `t` by shortening its last step.
fn truncate(chart: &Chart, t: f64) -> Option<Chart> {
    let mut out = Chart::new();
    let mut acc = 0.0;
    for s in &chart.steps {
        if acc + s.delta >= t {
            out.push(SlitStep::new(s.xi, t - acc));
            return Some(out);
        }
        acc += s.delta;
        out.push(*s);
    }
    None
}

fn functionals_of_chart(chart: &Chart, thetas: &[f64]) -> Result<Functionals> {
    let theta = thetas[0];
    let max = chart.steps.iter().map(|s| s.xi - theta).fold(0.0, f64::max);
    let xi = chart.driving().unwrap_or(theta);
    let gap = match thetas.get(1) {
        Some(&v) => chart.covering(v)? - xi,
        None => f64::NAN,
    };
    Ok([xi - theta, max, gap])
}

/// Multiradial side: trace γ¹ from a common-time record and unzip it until its
/// own capacity reaches `t_own`.
fn multiradial_sample(
    params: &SleParams,
    angles: &AngleConfig,
    t_own: f64,
    cfg: &McConfig,
    seed: u64,
) -> Result<Option<Functionals>> {
    let p = angles.len();
    // t ≤ t₁(t), so common time t_own always suffices.
    let steps = cfg.steps_for(t_own) + 1;
    let rec = match sample_multiradial_common(params, angles, &[], cfg.dt, steps, seed) {
        Ok(r) => r,
        Err(SleError::Collision { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let jc = joint_chart(&rec)?;
    let theta = angles.angles()[0];
    let mut own = Chart::new();
    for k in 0..steps {
        let tip = jc.chart.tip_after(k * p);
        let base = own.driving().unwrap_or(theta);
        own.zip_points(base, &[tip])?;
        if own.capacity() >= t_own {
            break;
        }
    }
    match truncate(&own, t_own) {
        Some(c) => Ok(Some(functionals_of_chart(&c, angles.angles())?)),
        None => Ok(None),
    }
}

fn direct_sample(
    params: &SleParams,
    angles: &AngleConfig,
    t_own: f64,
    cfg: &McConfig,
    seed: u64,
) -> Result<Option<Functionals>> {
    let steps = cfg.steps_for(t_own);
    let rec = match sample_radial_sle_rho(params, angles, cfg.dt, steps, seed) {
        Ok(r) => r,
        Err(SleError::Collision { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let theta = angles.angles()[0];
    let max = rec.xi.iter().map(|x| x - theta).fold(0.0, f64::max);
    let xi = rec.xi[steps];
    let gap = rec.force_points.first().map(|v| v[steps] - xi).unwrap_or(f64::NAN);
    Ok(Some([xi - theta, max, gap]))
}

/// Two-sample KS tests on three functionals of the first driving path at own
/// time `t_own`; passes when every p-value exceeds 0.01.
pub fn check_resampling_marginal(
    kappa: f64,
    mu: f64,
    angles: &AngleConfig,
    t_own: f64,
    cfg: &McConfig,
) -> Result<KsReport> {
    let p = angles.len();
    let multi = SleParams {
        kappa,
        mu,
        rho: Vec::new(),
        p,
    };
    let direct = SleParams {
        kappa,
        mu,
        rho: vec![2.0; p - 1],
        p,
    };
    multi.validate()?;
    let side_a = map_paths(cfg.exec, cfg.n_paths, |i| {
        multiradial_sample(&multi, angles, t_own, cfg, cfg.path_seed(2 * i))
    });
    let side_b = map_paths(cfg.exec, cfg.n_paths, |i| {
        direct_sample(&direct, angles, t_own, cfg, cfg.path_seed(2 * i + 1))
    });
    let collect = |runs: Vec<Result<Option<Functionals>>>| -> Result<(Vec<Functionals>, usize)> {
        let mut out = Vec::with_capacity(runs.len());
        let mut dropped = 0;
        for r in runs {
            match r? {
                Some(f) => out.push(f),
                None => dropped += 1,
            }
        }
        Ok((out, dropped))
    };
    let (a, da) = collect(side_a)?;
    let (b, db) = collect(side_b)?;
    if a.len() < 50 || b.len() < 50 {
        return Err(SleError::Inconclusive(format!(
            "only {} and {} usable paths",
            a.len(),
            b.len()
        )));
    }
    let n_fun = if p > 1 { 3 } else { 2 };
    let tests: Vec<KsEntry> = (0..n_fun)
        .map(|f| {
            let xa: Vec<f64> = a.iter().map(|v| v[f]).collect();
            let xb: Vec<f64> = b.iter().map(|v| v[f]).collect();
            KsEntry {
                functional: NAMES[f].into(),
                result: ks_two_sample(&xa, &xb),
            }
        })
        .collect();
    const THRESHOLD: f64 = 0.01;
    let pass = tests.iter().all(|t| t.result.p_value > THRESHOLD);
    Ok(KsReport {
        name: "resampling_marginal".into(),
        params: json!({"kappa": kappa, "mu": mu, "angles": angles.angles(), "t_own": t_own, "seed": cfg.seed}),
        n_paths: [a.len(), b.len()],
        n_discarded: [da, db],
        dt: cfg.dt,
        tests,
        tolerance: THRESHOLD,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_hits_capacity_exactly() {
        let mut c = Chart::new();
        for k in 0..5 {
            c.push(SlitStep::new(0.1 * k as f64, 0.1));
        }
        let t = truncate(&c, 0.25).unwrap();
        assert_eq!(t.len(), 3);
        assert!((t.capacity() - 0.25).abs() < 1e-15);
        assert!(truncate(&c, 0.6).is_none());
    }
}
