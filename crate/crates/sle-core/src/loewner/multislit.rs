//! Multiple radial Loewner chain with superposed driving fields.

use super::jet::{flow_frozen, DerivativeJet};
use crate::error::{Result, SleError};
use std::f64::consts::PI;

/// Drivers closer than this on the circle count as collided.
pub const COLLISION_GAP: f64 = 1e-4;

/// Ordered boundary angles θ¹ < ⋯ < θᵖ < θ¹ + 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleConfig {
    angles: Vec<f64>,
}

impl AngleConfig {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(SleError::Domain("empty angle configuration".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(SleError::Domain("non-finite angle".into()));
        }
        let ok = angles.windows(2).all(|w| w[0] < w[1]) && angles[angles.len() - 1] < angles[0] + 2.0 * PI;
        if !ok {
            return Err(SleError::Domain(format!(
                "angles must satisfy θ¹ < … < θᵖ < θ¹ + 2π, got {angles:?}"
            )));
        }
        Ok(AngleConfig { angles })
    }

    /// p equally spaced angles starting at 0.
    pub fn equally_spaced(p: usize) -> Self {
        AngleConfig {
            angles: (0..p).map(|j| 2.0 * PI * j as f64 / p as f64).collect(),
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Smallest circular gap between consecutive angles.
    pub fn min_gap(&self) -> f64 {
        min_circular_gap(&self.angles)
    }
}

/// Smallest gap between consecutive entries of a cyclically ordered lift.
pub fn min_circular_gap(angles: &[f64]) -> f64 {
    if angles.len() < 2 {
        return 2.0 * PI;
    }
    let mut g = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        g = g.min(w[1] - w[0]);
    }
    g
}

/// State of a multislit chain run in a common time with per-curve rates.
#[derive(Debug, Clone)]
pub struct MultiSlitState {
    pub common_time: f64,
    /// Capacity share ∫ a^j dt contributed by each curve.
    pub per_curve_capacity: Vec<f64>,
    pub driving: Vec<f64>,
    pub rates: Vec<f64>,
    pub spectators: Vec<DerivativeJet>,
    /// log g_t'(0).
    pub log_cap: f64,
    pub m_acc: f64,
}

impl MultiSlitState {
    pub fn new(config: &AngleConfig, spectator_angles: &[f64]) -> Self {
        let p = config.len();
        MultiSlitState {
            common_time: 0.0,
            per_curve_capacity: vec![0.0; p],
            driving: config.angles().to_vec(),
            rates: vec![1.0; p],
            spectators: spectator_angles.iter().map(|&t| DerivativeJet::identity(t)).collect(),
            log_cap: 0.0,
            m_acc: 0.0,
        }
    }

    pub fn min_gap(&self) -> f64 {
        min_circular_gap(&self.driving)
    }
}

/// Adds the driving increments, then flows all spectator jets for `dt` under
/// Σ_j a^j cot((h − ξ^j)/2) with the drivers frozen.
pub fn multislit_step(state: &mut MultiSlitState, increments: &[f64], dt: f64) -> Result<()> {
    if increments.len() != state.driving.len() {
        return Err(SleError::Domain("increment count differs from curve count".into()));
    }
    for (x, d) in state.driving.iter_mut().zip(increments) {
        *x += d;
    }
    let p = state.driving.len();
    for i in 0..p {
        let j = (i + 1) % p;
        if p < 2 {
            break;
        }
        let gap = if j == 0 {
            state.driving[0] + 2.0 * PI - state.driving[i]
        } else {
            state.driving[j] - state.driving[i]
        };
        if gap < COLLISION_GAP {
            return Err(SleError::Collision {
                i,
                j,
                time: state.common_time,
                gap,
            });
        }
    }
    let drivers: Vec<(f64, f64)> = state.driving.iter().copied().zip(state.rates.iter().copied()).collect();
    for s in state.spectators.iter_mut() {
        *s = flow_frozen(*s, &drivers, dt, state.common_time)?;
    }
    for (c, a) in state.per_curve_capacity.iter_mut().zip(&state.rates) {
        *c += a * dt;
    }
    state.log_cap += state.rates.iter().sum::<f64>() * dt;
    state.common_time += dt;
    Ok(())
}

/// Integrand N^j of the interaction term, from the jet of h_{t,j} at the tip.
pub fn n_coefficient(jet: &DerivativeJet) -> f64 {
    -jet.schwarzian() / 3.0 + (1.0 - jet.h1 * jet.h1) / 6.0
}

/// Adds Σ_j N^j dt_j to the running interaction integral and returns it.
pub fn accumulate_m(state: &mut MultiSlitState, tip_jets: &[DerivativeJet], dt_j: &[f64]) -> f64 {
    state.m_acc += tip_jets
        .iter()
        .zip(dt_j)
        .map(|(j, d)| n_coefficient(j) * d)
        .sum::<f64>();
    state.m_acc
}

/// Mixed second derivative ∂_{t_i}∂_{t_j} m at equal times zero.
pub fn mixed_partial_at_origin(omega_i: f64, omega_j: f64, a_i: f64, a_j: f64) -> f64 {
    let s = ((omega_j - omega_i) / 2.0).sin();
    a_i * a_j / (4.0 * s.powi(4))
}
