//! Exact radial Loewner maps for a driving function frozen at one angle.
//!
//! With ξ frozen over capacity δ the radial Loewner chain grows a radial
//! segment ending at e^{iξ}. In the rotated coordinate w = z e^{−iξ} the map
//! satisfies F(g(w)) = e^δ F(w) with F(w) = w/(1+w)².

use super::jet::DerivativeJet;
use crate::conformal::C64;
use crate::error::{Result, SleError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// One frozen-driving step: the map g with g(0) = 0, g'(0) = e^δ removing a
/// radial segment that ends at e^{iξ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitStep {
    pub xi: f64,
    pub delta: f64,
}

fn koebe(w: C64) -> C64 {
    w / ((1.0 + w) * (1.0 + w))
}

/// Root of F w² + (2F − 1) w + F = 0 inside the closed unit disc.
fn koebe_inverse(f: C64) -> C64 {
    if f.norm() < 1e-300 {
        return C64::new(0.0, 0.0);
    }
    let s = (C64::new(1.0, 0.0) - 4.0 * f).sqrt();
    let base = C64::new(1.0, 0.0) - 2.0 * f;
    let (d1, d2) = (base + s, base - s);
    let d = if d1.norm() >= d2.norm() { d1 } else { d2 };
    2.0 * f / d
}

impl SlitStep {
    pub fn new(xi: f64, delta: f64) -> Self {
        SlitStep { xi, delta }
    }

    /// Interior image g(z).
    pub fn forward(&self, z: C64) -> C64 {
        let rot = C64::from_polar(1.0, self.xi);
        let w = z / rot;
        if (w + 1.0).norm() < 1e-300 {
            return z;
        }
        koebe_inverse(koebe(w) * self.delta.exp()) * rot
    }

    /// Interior preimage g⁻¹(w).
    pub fn inverse(&self, w: C64) -> C64 {
        let rot = C64::from_polar(1.0, self.xi);
        let v = w / rot;
        if (v + 1.0).norm() < 1e-300 {
            return w;
        }
        koebe_inverse(koebe(v) * (-self.delta).exp()) * rot
    }

    /// Radius of the segment tip: 4r/(1+r)² = e^{−δ}.
    pub fn tip_radius(&self) -> f64 {
        let q = (-self.delta).exp();
        let one_minus_q = -(-self.delta).exp_m1();
        let s = 1.0 - one_minus_q.sqrt();
        s * s / q
    }

    /// Tip of the segment in the coordinates before the step.
    pub fn tip(&self) -> C64 {
        C64::from_polar(self.tip_radius(), self.xi)
    }

    /// Capacity of the radial segment from e^{iξ} to r e^{iξ}.
    pub fn capacity_of_radius(r: f64) -> f64 {
        let q = (1.0 - r) / (1.0 + r);
        -(-q * q).ln_1p()
    }

    /// Covering map on boundary angles with value and derivatives (f0..f3), lift preserved.
    pub fn covering_derivs(&self, theta: f64) -> Result<[f64; 4]> {
        let u = (theta - self.xi).rem_euclid(TAU);
        if u == 0.0 {
            return Err(SleError::Swallowed { time: self.delta });
        }
        let s = (-0.5 * self.delta).exp();
        let (sn, cs) = (u / 2.0).sin_cos();
        let y = s * cs;
        let x1 = -0.5 * s * sn;
        let x2 = -0.25 * s * cs;
        let x3 = 0.125 * s * sn;
        let one = 1.0 - y * y;
        let a1 = -one.powf(-0.5);
        let a2 = -y * one.powf(-1.5);
        let a3 = -(1.0 + 2.0 * y * y) * one.powf(-2.5);
        let u_new = 2.0 * y.acos();
        Ok([
            theta + (u_new - u),
            2.0 * a1 * x1,
            2.0 * (a2 * x1 * x1 + a1 * x2),
            2.0 * (a3 * x1.powi(3) + 3.0 * a2 * x1 * x2 + a1 * x3),
        ])
    }

    /// Covering image of a boundary angle.
    pub fn covering(&self, theta: f64) -> Result<f64> {
        Ok(self.covering_derivs(theta)?[0])
    }

    /// Pushes a jet through the covering map.
    pub fn covering_jet(&self, jet: &DerivativeJet) -> Result<DerivativeJet> {
        Ok(jet.compose(self.covering_derivs(jet.h)?))
    }

    /// Inverse covering map; fails when the angle lies on the image of the two segment sides.
    pub fn covering_inverse(&self, theta: f64) -> Result<f64> {
        let u = (theta - self.xi).rem_euclid(TAU);
        let c = (u / 2.0).cos() * (0.5 * self.delta).exp();
        if c.abs() >= 1.0 {
            return Err(SleError::Domain(format!(
                "angle {theta} lies on the segment image of the step at {}",
                self.xi
            )));
        }
        Ok(theta + (2.0 * c.acos() - u))
    }
}

/// A finite composition of frozen-driving steps, applied in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub steps: Vec<SlitStep>,
}

impl Chart {
    pub fn new() -> Self {
        Chart { steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: SlitStep) {
        self.steps.push(step);
    }

    /// log g'(0), the capacity of the grown hull.
    pub fn capacity(&self) -> f64 {
        self.steps.iter().map(|s| s.delta).sum()
    }

    pub fn forward(&self, z: C64) -> C64 {
        self.steps.iter().fold(z, |z, s| s.forward(z))
    }

    pub fn inverse(&self, w: C64) -> C64 {
        self.inverse_prefix(self.steps.len(), w)
    }

    /// Preimage under the first `n` steps.
    pub fn inverse_prefix(&self, n: usize, w: C64) -> C64 {
        self.steps[..n].iter().rev().fold(w, |w, s| s.inverse(w))
    }

    /// Original-domain tip of the segment grown at step `k`.
    pub fn tip_after(&self, k: usize) -> C64 {
        self.inverse_prefix(k, self.steps[k].tip())
    }

    pub fn covering(&self, theta: f64) -> Result<f64> {
        self.steps.iter().try_fold(theta, |t, s| s.covering(t))
    }

    pub fn covering_jet(&self, jet: DerivativeJet) -> Result<DerivativeJet> {
        self.steps.iter().try_fold(jet, |j, s| s.covering_jet(&j))
    }

    /// Current driving angle: the image of the latest tip.
    pub fn driving(&self) -> Option<f64> {
        self.steps.last().map(|s| s.xi)
    }

    /// Extends the chart by unzipping a curve given by interior points in order,
    /// starting from the boundary angle `base` (already in this chart's coordinates).
    /// Each point becomes the tip of one radial segment.
    pub fn zip_points(&mut self, base: f64, points: &[C64]) -> Result<()> {
        let mut prev = base;
        for &p in points {
            let w = self.forward(p);
            let r = w.norm();
            if !(r < 1.0) {
                return Err(SleError::Domain(format!("zipper point {p} is not interior")));
            }
            let arg = w.arg();
            let xi = prev + (arg - prev + PI).rem_euclid(TAU) - PI;
            let delta = SlitStep::capacity_of_radius(r);
            self.steps.push(SlitStep::new(xi, delta));
            prev = xi;
        }
        Ok(())
    }

    /// Chart obtained by unzipping one curve from the identity.
    pub fn zipper(base: f64, points: &[C64]) -> Result<Chart> {
        let mut c = Chart::new();
        c.zip_points(base, points)?;
        Ok(c)
    }

    /// Cumulative capacities after each step.
    pub fn capacities(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.steps
            .iter()
            .map(|s| {
                acc += s.delta;
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::jet::{flow_covering, DerivativeJet};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tip_maps_to_driving_point() {
        let s = SlitStep::new(0.7, 0.3);
        let w = s.forward(s.tip() * (1.0 - 1e-12));
        assert!((w - C64::from_polar(1.0, 0.7)).norm() < 1e-5);
    }

    #[test]
    fn derivative_at_origin() {
        let s = SlitStep::new(1.1, 0.25);
        let e = 1e-7;
        let d = s.forward(C64::new(e, 0.0)) / e;
        assert!((d.norm() - 0.25f64.exp()).abs() < 1e-6);
        assert!(d.arg().abs() < 1e-6);
    }

    #[test]
    fn covering_agrees_with_rk4_flow() {
        let s = SlitStep::new(0.4, 0.2);
        let jet = DerivativeJet::identity(2.0);
        let exact = s.covering_jet(&jet).unwrap();
        let rk = flow_covering(jet, &[0.4; 201], 0.2, 1.0).unwrap();
        assert!((exact.h - rk.h).abs() < 1e-10);
        assert!((exact.h1 - rk.h1).abs() < 1e-9);
        assert!((exact.h2 - rk.h2).abs() < 1e-8);
        assert!((exact.h3 - rk.h3).abs() < 1e-7);
    }

    #[test]
    fn zipper_recovers_driving() {
        let mut c = Chart::new();
        let xs = [0.1, 0.15, 0.05, -0.02, 0.03];
        for &x in &xs {
            c.push(SlitStep::new(x, 0.01));
        }
        let pts: Vec<C64> = (0..xs.len()).map(|k| c.tip_after(k)).collect();
        let z = Chart::zipper(0.1, &pts).unwrap();
        for (a, b) in z.steps.iter().zip(&c.steps) {
            assert!((a.xi - b.xi).abs() < 1e-8 && (a.delta - b.delta).abs() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn forward_inverse_roundtrip(xi in -3.0..3.0f64, delta in 0.001..1.0f64, r in 0.0..0.95f64, a in -3.0..3.0f64) {
            let s = SlitStep::new(xi, delta);
            let z = C64::from_polar(r, a);
            let back = s.inverse(s.forward(z));
            prop_assert!((back - z).norm() < 1e-9);
        }

        #[test]
        fn covering_roundtrip(xi in -3.0..3.0f64, delta in 0.001..1.0f64, u in 0.01..6.27f64) {
            let s = SlitStep::new(xi, delta);
            let th = xi + u;
            let back = s.covering_inverse(s.covering(th).unwrap()).unwrap();
            prop_assert!((back - th).abs() < 1e-9);
        }

        #[test]
        fn covering_derivative_is_fd(xi in -3.0..3.0f64, delta in 0.01..1.0f64, u in 0.3..6.0f64) {
            let s = SlitStep::new(xi, delta);
            let th = xi + u;
            let e = 1e-5;
            let d = s.covering_derivs(th).unwrap();
            let fd1 = (s.covering(th + e).unwrap() - s.covering(th - e).unwrap()) / (2.0 * e);
            let fd2 = (s.covering_derivs(th + e).unwrap()[1] - s.covering_derivs(th - e).unwrap()[1]) / (2.0 * e);
            let fd3 = (s.covering_derivs(th + e).unwrap()[2] - s.covering_derivs(th - e).unwrap()[2]) / (2.0 * e);
            prop_assert!((d[1] - fd1).abs() < 1e-6 * (1.0 + d[1].abs()));
            prop_assert!((d[2] - fd2).abs() < 1e-5 * (1.0 + d[2].abs()));
            prop_assert!((d[3] - fd3).abs() < 1e-4 * (1.0 + d[3].abs()));
        }
    }
}
