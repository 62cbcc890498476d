//! Third-order derivative jets of covering maps and their RK4 flow.

use crate::error::{Result, SleError};
use serde::{Deserialize, Serialize};

/// Value and first three θ-derivatives of a covering map at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeJet {
    pub h: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl DerivativeJet {
    /// Jet of the identity map at θ.
    pub fn identity(theta: f64) -> Self {
        DerivativeJet {
            h: theta,
            h1: 1.0,
            h2: 0.0,
            h3: 0.0,
        }
    }

    /// Jet of f ∘ self, given f's value and derivatives (f0, f1, f2, f3) at `self.h`.
    pub fn compose(&self, f: [f64; 4]) -> Self {
        let [f0, f1, f2, f3] = f;
        DerivativeJet {
            h: f0,
            h1: f1 * self.h1,
            h2: f2 * self.h1 * self.h1 + f1 * self.h2,
            h3: f3 * self.h1.powi(3) + 3.0 * f2 * self.h1 * self.h2 + f1 * self.h3,
        }
    }

    /// Schwarzian derivative h'''/h' − (3/2)(h''/h')².
    pub fn schwarzian(&self) -> f64 {
        let r = self.h2 / self.h1;
        self.h3 / self.h1 - 1.5 * r * r
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.h1.is_finite() && self.h2.is_finite() && self.h3.is_finite()
    }
}

/// Below this |sin((h − ξ)/2)| a tracked point counts as swallowed.
pub const SWALLOW_THRESHOLD: f64 = 1e-9;

/// cot(u/2) and its first three u-derivatives.
#[inline]
pub fn cot_half_derivs(u: f64) -> [f64; 4] {
    let (s, c) = (u / 2.0).sin_cos();
    let cot = c / s;
    let csc2 = 1.0 / (s * s);
    [
        cot,
        -0.5 * csc2,
        0.5 * csc2 * cot,
        -0.5 * csc2 * cot * cot - 0.25 * csc2 * csc2,
    ]
}

/// Right-hand side of the jet ODE for the field Σ_j rate_j · cot((h − ξ_j)/2).
fn jet_field(y: &DerivativeJet, drivers: &[(f64, f64)], time: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for &(xi, rate) in drivers {
        let u = y.h - xi;
        if (u / 2.0).sin().abs() < SWALLOW_THRESHOLD {
            return Err(SleError::Swallowed { time });
        }
        let [f0, f1, f2, f3] = cot_half_derivs(u);
        out[0] += rate * f0;
        out[1] += rate * f1 * y.h1;
        out[2] += rate * (f2 * y.h1 * y.h1 + f1 * y.h2);
        out[3] += rate * (f3 * y.h1.powi(3) + 3.0 * f2 * y.h1 * y.h2 + f1 * y.h3);
    }
    Ok(out)
}

fn axpy(y: &DerivativeJet, k: &[f64; 4], a: f64) -> DerivativeJet {
    DerivativeJet {
        h: y.h + a * k[0],
        h1: y.h1 + a * k[1],
        h2: y.h2 + a * k[2],
        h3: y.h3 + a * k[3],
    }
}

/// Distance from h to the nearest driver, measured on the circle.
fn min_gap(h: f64, drivers: &[(f64, f64)]) -> f64 {
    drivers
        .iter()
        .map(|&(xi, _)| {
            let u = (h - xi).rem_euclid(2.0 * std::f64::consts::PI);
            u.min(2.0 * std::f64::consts::PI - u)
        })
        .fold(f64::INFINITY, f64::min)
}

/// RK4 flow of a jet over `dt` under frozen drivers `(ξ_j, rate_j)`.
///
/// Substeps are at most dt/4 and are shortened further when the point sits
/// close to a driver, where the field is stiff.
pub fn flow_frozen(jet: DerivativeJet, drivers: &[(f64, f64)], dt: f64, t0: f64) -> Result<DerivativeJet> {
    let mut y = jet;
    let mut t = 0.0;
    while t < dt {
        let gap = min_gap(y.h, drivers);
        let h = (dt / 4.0).min(0.02 * gap * gap).max(1e-14).min(dt - t);
        let k1 = jet_field(&y, drivers, t0 + t)?;
        let k2 = jet_field(&axpy(&y, &k1, h / 2.0), drivers, t0 + t)?;
        let k3 = jet_field(&axpy(&y, &k2, h / 2.0), drivers, t0 + t)?;
        let k4 = jet_field(&axpy(&y, &k3, h), drivers, t0 + t)?;
        for i in 0..4 {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            match i {
                0 => y.h += inc,
                1 => y.h1 += inc,
                2 => y.h2 += inc,
                _ => y.h3 += inc,
            }
        }
        t += h;
    }
    if !y.is_finite() {
        return Err(SleError::Numeric(format!(
            "jet flow produced non-finite values at time {}",
            t0 + dt
        )));
    }
    Ok(y)
}

/// Advances a jet through a sampled driving path ξ_0, …, ξ_n spanning `[0, Δ]` on a
/// uniform grid. Each interval uses the driving value at its right end (splitting:
/// update the driving, then flow with it frozen).
pub fn flow_covering(jet: DerivativeJet, xi_path: &[f64], delta: f64, rate: f64) -> Result<DerivativeJet> {
    if xi_path.len() < 2 {
        return Ok(jet);
    }
    let n = xi_path.len() - 1;
    let dt = delta / n as f64;
    let mut y = jet;
    for (k, &xi) in xi_path[1..].iter().enumerate() {
        y = flow_frozen(y, &[(xi, rate)], dt, k as f64 * dt)?;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn antipodal_point_is_fixed() {
        let y = flow_covering(DerivativeJet::identity(PI), &[0.0, 0.0], 1.0, 1.0).unwrap();
        assert!((y.h - PI).abs() < 1e-14);
    }

    #[test]
    fn frozen_driving_closed_form() {
        // cos(u_t/2) = cos(u_0/2) e^{−t/2}; u_0 = π/2, t = 1.
        let u1 = 2.0 * ((PI / 4.0).cos() * (-0.5f64).exp()).acos();
        assert!((u1 - 2.25508).abs() < 1e-5);
        let y = flow_covering(DerivativeJet::identity(PI / 2.0), &vec![0.0; 101], 1.0, 1.0).unwrap();
        assert!((y.h - u1).abs() < 1e-10);
        // ∂u_t/∂u_0 from the closed form.
        let s = (-0.5f64).exp();
        let closed_h1 = s * (PI / 4.0).sin() / (u1 / 2.0).sin();
        assert!((y.h1 - closed_h1).abs() < 1e-8, "{} vs {}", y.h1, closed_h1);
    }

    #[test]
    fn swallowing_is_reported() {
        let err = flow_covering(DerivativeJet::identity(0.0), &[0.0, 0.0], 0.1, 1.0).unwrap_err();
        assert!(matches!(err, SleError::Swallowed { .. }));
    }

    #[test]
    fn compose_matches_chain_rule() {
        // f(x) = x², inner jet of sin at 0.3.
        let x: f64 = 0.3;
        let inner = DerivativeJet {
            h: x.sin(),
            h1: x.cos(),
            h2: -x.sin(),
            h3: -x.cos(),
        };
        let v = inner.h;
        let out = inner.compose([v * v, 2.0 * v, 2.0, 0.0]);
        // (sin²)' = sin 2x, '' = 2cos 2x, ''' = −4 sin 2x
        assert!((out.h1 - (2.0 * x).sin()).abs() < 1e-14);
        assert!((out.h2 - 2.0 * (2.0 * x).cos()).abs() < 1e-14);
        assert!((out.h3 + 4.0 * (2.0 * x).sin()).abs() < 1e-14);
    }
}
