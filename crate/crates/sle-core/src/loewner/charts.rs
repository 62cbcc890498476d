//! Per-curve Loewner charts grown in independent capacities.
//!
//! Curve j is grown in its own chart g^j by frozen-driving steps. The joint
//! map g_t = h_{t,j} ∘ g^j is never formed directly: h_{t,j} is recovered by
//! unzipping the images g^j(γ^i), i ≠ j, and its jet at ξ^j is pushed through
//! the resulting chart exactly.

use super::jet::DerivativeJet;
use super::multislit::AngleConfig;
use super::slit::{Chart, SlitStep};
use crate::conformal::C64;
use crate::error::{Result, SleError};

/// Default cap on the number of points fed to the zipper per curve.
pub const DEFAULT_ZIP_POINTS: usize = 48;

/// Jet of h_{t,j} at the tip together with log g_t'(0) seen from chart j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipJet {
    pub jet: DerivativeJet,
    pub log_cap: f64,
}

#[derive(Debug, Clone)]
pub struct OwnTimeCharts {
    thetas: Vec<f64>,
    charts: Vec<Chart>,
    /// Original-domain tips of each curve after each of its steps.
    traces: Vec<Vec<C64>>,
    /// images[j][i] = g^j applied to traces[i].
    images: Vec<Vec<Vec<C64>>>,
    /// base[j][i] = covering image of θ^i under g^j.
    base: Vec<Vec<f64>>,
    disjoint: bool,
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let orient = |p: C64, q: C64, r: C64| ((q - p).conj() * (r - p)).im;
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn subsample(points: &[C64], max: usize) -> Vec<C64> {
    let n = points.len();
    if n <= max {
        return points.to_vec();
    }
    (1..=max).map(|k| points[(k * n).div_ceil(max) - 1]).collect()
}

impl OwnTimeCharts {
    pub fn new(config: &AngleConfig) -> Self {
        let p = config.len();
        let thetas = config.angles().to_vec();
        OwnTimeCharts {
            base: (0..p).map(|_| thetas.clone()).collect(),
            thetas,
            charts: vec![Chart::new(); p],
            traces: vec![Vec::new(); p],
            images: vec![vec![Vec::new(); p]; p],
            disjoint: true,
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn chart(&self, j: usize) -> &Chart {
        &self.charts[j]
    }

    pub fn trace(&self, j: usize) -> &[C64] {
        &self.traces[j]
    }

    /// Own capacity t_j.
    pub fn own_time(&self, j: usize) -> f64 {
        self.charts[j].capacity()
    }

    /// Driving value ξ^j at the current own time.
    pub fn driving(&self, j: usize) -> f64 {
        self.charts[j].driving().unwrap_or(self.thetas[j])
    }

    /// False once two traced curves have been seen to cross.
    pub fn disjoint(&self) -> bool {
        self.disjoint
    }

    /// Grows curve j by one frozen step with driving `xi` and capacity `dt`.
    pub fn grow(&mut self, j: usize, xi: f64, dt: f64) -> Result<()> {
        let step = SlitStep::new(xi, dt);
        let n = self.charts[j].len();
        self.charts[j].push(step);
        let tip = self.charts[j].tip_after(n);
        let prev = self.traces[j]
            .last()
            .copied()
            .unwrap_or(C64::from_polar(1.0, self.thetas[j]));
        for i in 0..self.len() {
            if i == j {
                continue;
            }
            let other = &self.traces[i];
            let start = C64::from_polar(1.0, self.thetas[i]);
            let mut a = start;
            for &b in other {
                if segments_cross(prev, tip, a, b) {
                    self.disjoint = false;
                }
                a = b;
            }
            for z in self.images[j][i].iter_mut() {
                *z = step.forward(*z);
            }
            self.base[j][i] = step.covering(self.base[j][i])?;
            let img = self.charts[i].forward(tip);
            self.images[i][j].push(img);
        }
        self.traces[j].push(tip);
        Ok(())
    }

    /// Chart of h_{t,j}: the unzipped images of all other curves in chart j.
    pub fn complement_chart(&self, j: usize, max_points: usize) -> Result<Chart> {
        let mut g = Chart::new();
        for i in 0..self.len() {
            if i == j || self.images[j][i].is_empty() {
                continue;
            }
            let base = g.covering(self.base[j][i])?;
            let pts = subsample(&self.images[j][i], max_points);
            g.zip_points(base, &pts)?;
        }
        Ok(g)
    }

    /// Jet of h_{t,j} at ξ^j and the joint log-capacity.
    pub fn tip_jet(&self, j: usize, max_points: usize) -> Result<TipJet> {
        if !self.disjoint {
            return Err(SleError::Domain("curves intersect; joint chart undefined".into()));
        }
        let g = self.complement_chart(j, max_points)?;
        let jet = g.covering_jet(DerivativeJet::identity(self.driving(j)))?;
        Ok(TipJet {
            jet,
            log_cap: self.own_time(j) + g.capacity(),
        })
    }

    /// Covering image h_t(θ) of a boundary angle under the joint map, read through chart j.
    pub fn joint_covering(&self, j: usize, theta: f64, max_points: usize) -> Result<f64> {
        let g = self.complement_chart(j, max_points)?;
        g.covering(self.charts[j].covering(theta)?)
    }
}

/// Tip jet of h_{t,j} for curve `j` with the default zipper resolution.
pub fn tip_jet_estimate(charts: &OwnTimeCharts, j: usize) -> Result<TipJet> {
    charts.tip_jet(j, DEFAULT_ZIP_POINTS)
}
