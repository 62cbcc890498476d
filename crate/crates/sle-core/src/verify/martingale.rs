//! Martingale expectations under independent radial SLEs.

use super::{log_z_spiral, McConfig, McReport};
use crate::error::{Result, SleError};
use crate::loewner::{n_coefficient, tip_jet_estimate, AngleConfig, DerivativeJet, OwnTimeCharts, SlitStep};
use crate::par::map_paths;
use crate::partition::exponents;
use crate::rng::NoiseStream;
use crate::samplers::{sample_radial_sle, SleParams};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// E[exp((μ/κ)(ξ_T − μT/2))] = exp(μθ/κ) for plain radial SLE_κ from θ.
pub fn check_spiral_martingale(kappa: f64, mu: f64, theta: f64, t_end: f64, cfg: &McConfig) -> Result<McReport> {
    let base = SleParams::radial(kappa, 0.0);
    base.validate()?;
    let steps = cfg.steps_for(t_end);
    let t = steps as f64 * cfg.dt;
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| {
        let rec = sample_radial_sle(&base, theta, cfg.dt, steps, cfg.path_seed(i))?;
        let xi = rec.xi[steps];
        Ok((mu / kappa * (xi - mu / 2.0 * t)).exp())
    });
    let samples = runs.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(McReport::from_samples(
        "spiral_martingale",
        json!({"kappa": kappa, "mu": mu, "theta": theta, "t": t, "seed": cfg.seed}),
        &samples,
        0,
        cfg.dt,
        (mu * theta / kappa).exp(),
        3.0,
    ))
}

/// E[M_T/M_0] = 1 for the one-curve slice of the multiradial martingale:
/// M = g'(0)^{(p²−1−μ²)/(2κ)} Π_{j≥2} h'(θ^j)^b Z^μ_p(ξ, h(θ²), …).
///
/// The first angle drives a plain radial SLE_κ; the others are spectators
/// carried by the exact frozen-step covering maps. Paths whose spectator is
/// swallowed are discarded.
pub fn check_slice_martingale(
    kappa: f64,
    mu: f64,
    angles: &AngleConfig,
    t_end: f64,
    cfg: &McConfig,
) -> Result<McReport> {
    SleParams::radial(kappa, 0.0).validate()?;
    let ex = exponents(kappa)?;
    let p = angles.len() as f64;
    let gexp = (p * p - 1.0 - mu * mu) / (2.0 * kappa);
    let a = angles.angles();
    let log_z0 = log_z_spiral(kappa, mu, a)?;
    let steps = cfg.steps_for(t_end);
    let sd = (kappa * cfg.dt).sqrt();
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<Option<f64>> {
        let mut noise = NoiseStream::new(cfg.path_seed(i), 0, 0);
        let mut xi = a[0];
        let mut jets: Vec<DerivativeJet> = a[1..].iter().map(|&t| DerivativeJet::identity(t)).collect();
        for _ in 0..steps {
            xi += sd * noise.normal();
            let step = SlitStep::new(xi, cfg.dt);
            for jet in jets.iter_mut() {
                *jet = match step.covering_jet(jet) {
                    Ok(j) => j,
                    Err(SleError::Swallowed { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
            }
        }
        let mut lifts = vec![xi];
        lifts.extend(jets.iter().map(|j| j.h));
        let log_m = gexp * steps as f64 * cfg.dt
            + ex.b * jets.iter().map(|j| j.h1.ln()).sum::<f64>()
            + log_z_spiral(kappa, mu, &lifts)?
            - log_z0;
        Ok(Some(log_m.exp()))
    });
    let mut samples = Vec::with_capacity(cfg.n_paths);
    let mut discarded = 0;
    for r in runs {
        match r? {
            Some(v) => samples.push(v),
            None => discarded += 1,
        }
    }
    Ok(McReport::from_samples(
        "slice_martingale",
        json!({"kappa": kappa, "mu": mu, "angles": a, "t": steps as f64 * cfg.dt, "seed": cfg.seed}),
        &samples,
        discarded,
        cfg.dt,
        1.0,
        3.0,
    ))
}

/// Growth schedule alternating between curves in equal capacity bursts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Staircase {
    pub total_capacity: f64,
    pub bursts: usize,
}

impl Staircase {
    /// Capacity of each burst, burst k growing curve k mod p.
    pub fn burst(&self) -> f64 {
        self.total_capacity / self.bursts.max(1) as f64
    }
}

/// E[M_t/M_0] = 1 for the full multi-time martingale
///
/// M = 1_disjoint exp((c/2) m − b̃ Σ t_j) g'(0)^{b̃ + (p²−1−μ²)/(2κ)} Π h_j'(ξ^j)^b Z^μ_p(ω),
///
/// under independent radial SLE_κ growth along a staircase schedule. Tip jets
/// come from the per-curve zipper charts; m accumulates N^j by the trapezoid
/// rule in each curve's own time.
pub fn check_two_time_martingale(
    kappa: f64,
    mu: f64,
    angles: &AngleConfig,
    schedule: Staircase,
    tolerance_se: f64,
    cfg: &McConfig,
) -> Result<McReport> {
    SleParams::radial(kappa, 0.0).validate()?;
    let ex = exponents(kappa)?;
    let p = angles.len();
    let pf = p as f64;
    let gexp = ex.b_tilde + (pf * pf - 1.0 - mu * mu) / (2.0 * kappa);
    let a = angles.angles();
    let log_z0 = log_z_spiral(kappa, mu, a)?;
    let burst = schedule.burst();
    let sub = if burst > 0.0 {
        (burst / cfg.dt).round().max(1.0) as usize
    } else {
        0
    };
    let h = if sub > 0 { burst / sub as f64 } else { 0.0 };
    let sd = (kappa * h).sqrt();
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<Option<f64>> {
        let mut noise: Vec<NoiseStream> = (0..p as u64)
            .map(|c| NoiseStream::new(cfg.path_seed(i), 0, c))
            .collect();
        let mut charts = OwnTimeCharts::new(angles);
        let mut xi = a.to_vec();
        let mut m = 0.0;
        let mut lifts = a.to_vec();
        let attempt = (|| -> Result<bool> {
            for k in 0..schedule.bursts {
                let j = k % p;
                let mut n_prev = n_coefficient(&tip_jet_estimate(&charts, j)?.jet);
                for _ in 0..sub {
                    xi[j] += sd * noise[j].normal();
                    charts.grow(j, xi[j], h)?;
                    if !charts.disjoint() {
                        return Ok(false);
                    }
                    let n_new = n_coefficient(&tip_jet_estimate(&charts, j)?.jet);
                    m += 0.5 * (n_prev + n_new) * h;
                    n_prev = n_new;
                }
                // Re-anchor the lifts once per burst so the spiral factor sees continuous angles.
                for (l, lift) in lifts.iter_mut().enumerate() {
                    let w = tip_jet_estimate(&charts, l)?.jet.h;
                    *lift = w + 2.0 * std::f64::consts::PI * ((*lift - w) / (2.0 * std::f64::consts::PI)).round();
                }
            }
            Ok(true)
        })();
        let disjoint = match attempt {
            Ok(d) => d,
            Err(SleError::Swallowed { .. }) | Err(SleError::Domain(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !disjoint {
            return Ok(Some(0.0));
        }
        let mut log_m = 0.5 * ex.c * m;
        let mut log_cap = 0.0;
        for j in 0..p {
            let tj = tip_jet_estimate(&charts, j)?;
            if j == 0 {
                log_cap = tj.log_cap;
            }
            log_m += -ex.b_tilde * charts.own_time(j) + ex.b * tj.jet.h1.ln();
        }
        log_m += gexp * log_cap + log_z_spiral(kappa, mu, &lifts)? - log_z0;
        Ok(Some(log_m.exp()))
    });
    let mut samples = Vec::with_capacity(cfg.n_paths);
    let mut discarded = 0;
    for r in runs {
        match r? {
            Some(v) => samples.push(v),
            None => discarded += 1,
        }
    }
    Ok(McReport::from_samples(
        "two_time_martingale",
        json!({
            "kappa": kappa, "mu": mu, "angles": a,
            "total_capacity": schedule.total_capacity, "bursts": schedule.bursts,
            "step": h, "seed": cfg.seed,
        }),
        &samples,
        discarded,
        h,
        1.0,
        tolerance_se,
    ))
}
