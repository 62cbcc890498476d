//! Driving-function SDEs for radial, radial-with-force-points, multiradial
//! (common time) and watermelon processes.

use super::record::{DrivingRecord, Scheme, SleParams};
use crate::error::{Result, SleError};
use crate::loewner::{multislit_step, AngleConfig, MultiSlitState, SlitStep, COLLISION_GAP};
use crate::rng::NoiseStream;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Smallest substep used by the adaptive refinement.
pub const DT_MIN: f64 = 1e-9;

/// Halves `h` while `gap < 10·√(κh)`, not below [`DT_MIN`].
pub fn adaptive_step(h: f64, gap: f64, kappa: f64) -> f64 {
    let mut h = h;
    while gap < 10.0 * (kappa * h).sqrt() && h / 2.0 >= DT_MIN {
        h /= 2.0;
    }
    h
}

fn circle_gap(d: f64) -> f64 {
    d.min(TAU - d)
}

/// ξ-drift of SLE_κ^μ(ρ): Σ_j (ρ_j/2) cot((ξ − V^j)/2) + μ.
pub fn rho_drift(xi: f64, force: &[f64], rho: &[f64], mu: f64) -> f64 {
    force
        .iter()
        .zip(rho)
        .map(|(v, r)| 0.5 * r / ((xi - v) / 2.0).tan())
        .sum::<f64>()
        + mu
}

/// Common-time drift of ω^j: 2 Σ_{i≠j} cot((ω^j − ω^i)/2) + μ.
pub fn multiradial_drift(omegas: &[f64], j: usize, mu: f64) -> f64 {
    let wj = omegas[j];
    2.0 * omegas
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, wi)| 1.0 / ((wj - wi) / 2.0).tan())
        .sum::<f64>()
        + mu
}

/// Radial SLE_κ^μ from θ: exact Gaussian increments.
pub fn sample_radial_sle(params: &SleParams, theta: f64, dt: f64, steps: usize, seed: u64) -> Result<DrivingRecord> {
    params.validate()?;
    check_grid(dt)?;
    let mut noise = NoiseStream::new(seed, 0, 0);
    let sd = (params.kappa * dt).sqrt();
    let mut xi = Vec::with_capacity(steps + 1);
    let mut x = theta;
    xi.push(x);
    for _ in 0..steps {
        x += sd * noise.normal() + params.mu * dt;
        xi.push(x);
    }
    Ok(DrivingRecord {
        scheme: Scheme::Radial,
        params: params.clone(),
        thetas: vec![theta],
        dt,
        steps,
        seed,
        xi,
        force_points: Vec::new(),
        omegas: Vec::new(),
    })
}

fn check_grid(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SleError::Domain(format!("dt = {dt} must be positive")));
    }
    Ok(())
}

/// Outcome of a force-point run that may stop early at a gap collapse.
struct RhoRun {
    record: DrivingRecord,
    failure: Option<SleError>,
}

fn run_rho(params: &SleParams, angles: &[f64], scheme: Scheme, dt: f64, steps: usize, seed: u64) -> Result<RhoRun> {
    params.validate()?;
    check_grid(dt)?;
    let force0 = &angles[1..];
    if params.rho.len() != force0.len() {
        return Err(SleError::Domain(format!(
            "{} force points but {} weights",
            force0.len(),
            params.rho.len()
        )));
    }
    let mut xi = angles[0];
    let mut v = force0.to_vec();
    if v.iter().any(|&vj| !(vj - xi > 0.0 && vj - xi < TAU)) {
        return Err(SleError::Domain("force points must lie in (θ¹, θ¹ + 2π)".into()));
    }
    let kappa = params.kappa;
    let mut noise = NoiseStream::new(seed, 0, 0);
    let mut rec = DrivingRecord {
        scheme,
        params: params.clone(),
        thetas: angles.to_vec(),
        dt,
        steps,
        seed,
        xi: vec![xi],
        force_points: v.iter().map(|&x| vec![x]).collect(),
        omegas: Vec::new(),
    };
    let mut t = 0.0;
    for _ in 0..steps {
        let mut rem = dt;
        while rem > 1e-12 * dt {
            let gap = v.iter().map(|&vj| circle_gap(vj - xi)).fold(PI, f64::min);
            let mut h = adaptive_step(rem, gap, kappa);
            let drift = rho_drift(xi, &v, &params.rho, params.mu);
            let new_xi = loop {
                let cand = xi + (kappa * h).sqrt() * noise.normal() + drift * h;
                if v.iter().all(|&vj| vj - cand > DT_MIN && vj - cand < TAU - DT_MIN) {
                    break cand;
                }
                h /= 2.0;
                if h < DT_MIN {
                    let (j, vj) = v
                        .iter()
                        .enumerate()
                        .map(|(j, &vj)| (j, circle_gap(vj - xi)))
                        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
                    rec.steps = rec.xi.len() - 1;
                    return Ok(RhoRun {
                        record: rec,
                        failure: Some(SleError::Collision {
                            i: 0,
                            j: j + 1,
                            time: t,
                            gap: vj,
                        }),
                    });
                }
            };
            xi = new_xi;
            let step = SlitStep::new(xi, h);
            for vj in v.iter_mut() {
                *vj = step.covering(*vj)?;
            }
            rem -= h;
            t += h;
        }
        rec.xi.push(xi);
        for (path, &vj) in rec.force_points.iter_mut().zip(&v) {
            path.push(vj);
        }
    }
    Ok(RhoRun {
        record: rec,
        failure: None,
    })
}

/// Radial SLE_κ^μ(ρ) with driver at `angles[0]` and force points `angles[1..]`.
///
/// Force points follow the exact frozen-driving flow over each substep.
pub fn sample_radial_sle_rho(
    params: &SleParams,
    angles: &AngleConfig,
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<DrivingRecord> {
    let run = run_rho(params, angles.angles(), Scheme::RadialRho, dt, steps, seed)?;
    match run.failure {
        Some(e) => Err(e),
        None => Ok(run.record),
    }
}

/// Multiradial SLE_κ^μ in common time (all rates one).
///
/// `spectators` are boundary angles whose images under g_t are carried along
/// and stored in `force_points`.
pub fn sample_multiradial_common(
    params: &SleParams,
    angles: &AngleConfig,
    spectators: &[f64],
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<DrivingRecord> {
    params.validate()?;
    check_grid(dt)?;
    let p = angles.len();
    if p != params.p {
        return Err(SleError::Domain(format!("{p} angles for p = {}", params.p)));
    }
    let kappa = params.kappa;
    let mut noise: Vec<NoiseStream> = (0..p as u64).map(|c| NoiseStream::new(seed, 0, c)).collect();
    let mut state = MultiSlitState::new(angles, spectators);
    let mut rec = DrivingRecord {
        scheme: Scheme::MultiradialCommon,
        params: params.clone(),
        thetas: angles.angles().iter().chain(spectators).copied().collect(),
        dt,
        steps,
        seed,
        xi: Vec::new(),
        force_points: spectators.iter().map(|&s| vec![s]).collect(),
        omegas: angles.angles().iter().map(|&a| vec![a]).collect(),
    };
    let mut inc = vec![0.0; p];
    let mut cand = vec![0.0; p];
    for _ in 0..steps {
        let mut rem = dt;
        while rem > 1e-12 * dt {
            let mut h = adaptive_step(rem, state.min_gap(), kappa);
            loop {
                for j in 0..p {
                    inc[j] =
                        (kappa * h).sqrt() * noise[j].normal() + multiradial_drift(&state.driving, j, params.mu) * h;
                    cand[j] = state.driving[j] + inc[j];
                }
                let ordered =
                    cand.windows(2).all(|w| w[1] - w[0] > COLLISION_GAP) && cand[0] + TAU - cand[p - 1] > COLLISION_GAP;
                if ordered {
                    break;
                }
                h /= 2.0;
                if h < DT_MIN {
                    let gap = state.min_gap();
                    return Err(SleError::Collision {
                        i: 0,
                        j: 1,
                        time: state.common_time,
                        gap,
                    });
                }
            }
            multislit_step(&mut state, &inc, h)?;
            rem -= h;
        }
        for (path, &w) in rec.omegas.iter_mut().zip(&state.driving) {
            path.push(w);
        }
        for (path, s) in rec.force_points.iter_mut().zip(&state.spectators) {
            path.push(s.h);
        }
    }
    Ok(rec)
}

/// Result of the watermelon coordinate-change driver.
#[derive(Debug, Clone)]
pub struct WatermelonRun {
    pub record: DrivingRecord,
    /// Time at which a gap collapsed, if it did. Expected for the negative weight.
    pub collapse_time: Option<f64>,
}

/// Weights (2, …, 2, κ − 4 − 2n) of the watermelon first-curve driver.
pub fn watermelon_weights(kappa: f64, n: usize) -> Vec<f64> {
    let mut w = vec![2.0; n.saturating_sub(1)];
    w.push(kappa - 4.0 - 2.0 * n as f64);
    w
}

/// Experimental: radial SLE_κ^μ(2,…,2,κ−4−2n) from `starts[0]` with force points at
/// the other starts and at `target`.
#[allow(clippy::too_many_arguments)]
pub fn sample_watermelon_driver(
    kappa: f64,
    mu: f64,
    n: usize,
    starts: &AngleConfig,
    target: f64,
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<WatermelonRun> {
    if !(kappa > 0.0 && kappa <= 4.0) {
        return Err(SleError::Domain(format!("κ = {kappa} outside (0,4]")));
    }
    if starts.len() != n {
        return Err(SleError::Domain(format!("{} starts for n = {n}", starts.len())));
    }
    let a = starts.angles();
    if !(target > a[n - 1] && target < a[0] + TAU) {
        return Err(SleError::Domain(
            "target must lie after the last start and before θ¹ + 2π".into(),
        ));
    }
    let params = SleParams {
        kappa,
        mu,
        rho: watermelon_weights(kappa, n),
        p: n,
    };
    let mut angles = a.to_vec();
    angles.push(target);
    let run = run_rho(&params, &angles, Scheme::Watermelon, dt, steps, seed)?;
    let collapse_time = match run.failure {
        Some(SleError::Collision { time, .. }) => Some(time),
        Some(e) => return Err(e),
        None => None,
    };
    Ok(WatermelonRun {
        record: run.record,
        collapse_time,
    })
}
