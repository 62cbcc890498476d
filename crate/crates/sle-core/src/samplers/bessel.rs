//! Radial Bessel process and its monotone coupling with the gap process.

use super::record::SleParams;
use super::sde::{adaptive_step, DT_MIN};
use crate::error::{Result, SleError};
use crate::loewner::AngleConfig;
use crate::rng::NoiseStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Parameters of dX = −√κ dB + (α cot(X/2) − μ) dt on (0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselParams {
    pub alpha: f64,
    pub kappa: f64,
    pub mu: f64,
    pub x0: f64,
}

impl BesselParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.kappa > 0.0) {
            return Err(SleError::Domain("α and κ must be positive".into()));
        }
        if self.kappa > 4.0 * self.alpha * (1.0 + 1e-12) {
            return Err(SleError::Domain(format!(
                "κ = {} exceeds 4α = {}",
                self.kappa,
                4.0 * self.alpha
            )));
        }
        if !(self.x0 > 0.0 && self.x0 < TAU) {
            return Err(SleError::Domain(format!("x0 = {} outside (0, 2π)", self.x0)));
        }
        Ok(())
    }

    /// Local Bessel dimension 4α/κ + 1 near the endpoints.
    pub fn dimension(&self) -> f64 {
        4.0 * self.alpha / self.kappa + 1.0
    }
}

/// α cot(x/2) − μ.
pub fn bessel_drift(x: f64, alpha: f64, mu: f64) -> f64 {
    alpha / (x / 2.0).tan() - mu
}

/// Sampled Bessel path on the grid with its extrema over all substeps.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselPath {
    pub dt: f64,
    pub x: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

/// Within this distance of an endpoint the walk uses the Bessel transition.
const BOUNDARY_ZONE: f64 = 1e-3;

/// Step length inside the boundary zone.
fn zone_step(h: f64, kappa: f64) -> f64 {
    h.min(BOUNDARY_ZONE * BOUNDARY_ZONE / (100.0 * kappa))
}

/// Near an endpoint the distance u is √κ R with R a Bessel process of
/// dimension 4α/κ + 1, up to O(u) drift terms added as an Euler correction.
/// R² moves by h·χ'²_δ(R²/h), drawn as a Poisson mixture of central χ².
fn boundary_step(bp: &BesselParams, noise: &mut NoiseStream, x: f64, h: f64) -> Result<f64> {
    let (u, s) = if x < PI { (x, 1.0) } else { (TAU - x, -1.0) };
    let n = noise.poisson(u * u / (2.0 * bp.kappa * h));
    let y = noise.chi_squared(bp.dimension() + 2.0 * n);
    let bessel = (bp.kappa * h * y).sqrt();
    let correction = (bp.alpha * (1.0 / (u / 2.0).tan() - 2.0 / u) - s * bp.mu) * h;
    let next = (bessel + correction).max(0.5 * bessel);
    if !(next > 0.0 && next.is_finite()) {
        return Err(SleError::Numeric(format!("Bessel boundary step failed from u = {u:e}")));
    }
    Ok(if s > 0.0 { next } else { TAU - next })
}

/// Walks the process for `duration`, calling `visit(t, x)` after every substep;
/// stops early when `visit` returns false.
fn walk<F: FnMut(f64, f64) -> bool>(
    bp: &BesselParams,
    noise: &mut NoiseStream,
    x: &mut f64,
    t: &mut f64,
    duration: f64,
    base_dt: f64,
    mut visit: F,
) -> Result<bool> {
    let mut rem = duration;
    while rem > 1e-12 * duration {
        let gap = x.min(TAU - *x);
        if gap < BOUNDARY_ZONE {
            let h = zone_step(rem.min(base_dt), bp.kappa);
            *x = boundary_step(bp, noise, *x, h)?;
            rem -= h;
            *t += h;
            if !visit(*t, *x) {
                return Ok(false);
            }
            continue;
        }
        let mut h = adaptive_step(rem.min(base_dt), gap, bp.kappa);
        let drift = bessel_drift(*x, bp.alpha, bp.mu);
        let next = loop {
            let cand = *x - (bp.kappa * h).sqrt() * noise.normal() + drift * h;
            if cand > DT_MIN && cand < TAU - DT_MIN {
                break cand;
            }
            h /= 2.0;
            if h < DT_MIN {
                return Err(SleError::Numeric(format!(
                    "Bessel process reached an endpoint at t = {t}"
                )));
            }
        };
        *x = next;
        rem -= h;
        *t += h;
        if !visit(*t, *x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Euler–Maruyama with gap-adaptive refinement; within [`BOUNDARY_ZONE`] of an
/// endpoint the Bessel transition is used, which keeps the path inside.
pub fn sample_bessel(bp: &BesselParams, dt: f64, steps: usize, seed: u64) -> Result<BesselPath> {
    bp.validate()?;
    let mut noise = NoiseStream::new(seed, 0, 0);
    let (mut x, mut t) = (bp.x0, 0.0);
    let mut path = BesselPath {
        dt,
        x: vec![x],
        min: x,
        max: x,
    };
    for _ in 0..steps {
        let (mut lo, mut hi) = (path.min, path.max);
        walk(bp, &mut noise, &mut x, &mut t, dt, dt, |_, y| {
            lo = lo.min(y);
            hi = hi.max(y);
            true
        })?;
        path.min = lo;
        path.max = hi;
        path.x.push(x);
    }
    Ok(path)
}

/// Whether min_{t ≤ t_max} X_t ≤ level; the path stops at the first hit.
pub fn bessel_hits_level(bp: &BesselParams, dt: f64, t_max: f64, level: f64, seed: u64) -> Result<bool> {
    bp.validate()?;
    let mut noise = NoiseStream::new(seed, 0, 0);
    let (mut x, mut t) = (bp.x0, 0.0);
    let finished = walk(bp, &mut noise, &mut x, &mut t, t_max, dt, |_, y| y > level)?;
    Ok(!finished)
}

/// Running minimum of X over [0, t_max]; the walk stops once it drops to `floor`.
pub fn bessel_running_min(bp: &BesselParams, dt: f64, t_max: f64, floor: f64, seed: u64) -> Result<f64> {
    bp.validate()?;
    let mut noise = NoiseStream::new(seed, 0, 0);
    let (mut x, mut t) = (bp.x0, 0.0);
    let mut lo = x;
    walk(bp, &mut noise, &mut x, &mut t, t_max, dt, |_, y| {
        lo = lo.min(y);
        y > floor
    })?;
    Ok(lo)
}

/// Which gap the comparison process starts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingStart {
    /// X_0 = Θ^p_0; then X ≤ Θ^p.
    Outer,
    /// X_0 = Θ²_0; then X ≥ Θ².
    Inner,
}

/// Gaps Θ^ℓ = V^ℓ − ξ and the coupled Bessel process on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPaths {
    pub dt: f64,
    pub alpha: f64,
    /// theta[ℓ − 2][k] for ℓ = 2..=p.
    pub theta: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

/// Drives X^α by Euler–Maruyama and Y^ℓ by the coupled drift, so that
/// Θ^ℓ = X − Y^ℓ is the SLE_κ^μ(ρ) gap process built from the same noise.
pub fn sample_coupled_gap(
    params: &SleParams,
    angles: &AngleConfig,
    start: CouplingStart,
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<CoupledPaths> {
    params.validate()?;
    let a = angles.angles();
    let q = a.len() - 1;
    if q == 0 || params.rho.len() != q {
        return Err(SleError::Domain(
            "need one weight per force point and at least one force point".into(),
        ));
    }
    if params.rho.iter().any(|&r| r < 0.0) {
        return Err(SleError::Domain("coupling requires ρ_j ≥ 0".into()));
    }
    let alpha = 1.0 + params.rho.iter().sum::<f64>() / 2.0;
    let bp = BesselParams {
        alpha,
        kappa: params.kappa,
        mu: params.mu,
        x0: 0.0,
    };
    let theta0: Vec<f64> = a[1..].iter().map(|v| v - a[0]).collect();
    let x0 = match start {
        CouplingStart::Outer => theta0[q - 1],
        CouplingStart::Inner => theta0[0],
    };
    let mut x = x0;
    let mut y: Vec<f64> = theta0.iter().map(|th| x0 - th).collect();
    let mut out = CoupledPaths {
        dt,
        alpha,
        theta: theta0.iter().map(|&t| vec![t]).collect(),
        x: vec![x],
    };
    let mut noise = NoiseStream::new(seed, 0, 0);
    let mut dy = vec![0.0; q];
    for _ in 0..steps {
        let mut rem = dt;
        while rem > 1e-12 * dt {
            let gap = y
                .iter()
                .map(|yl| {
                    let th = x - yl;
                    th.min(TAU - th)
                })
                .fold(x.min(TAU - x), f64::min);
            let mut h = adaptive_step(rem, gap, params.kappa);
            let cot_x = 1.0 / (x / 2.0).tan();
            let cots: Vec<f64> = y.iter().map(|yl| 1.0 / ((x - yl) / 2.0).tan()).collect();
            let shared: f64 = params.rho.iter().zip(&cots).map(|(r, c)| 0.5 * r * c).sum();
            for l in 0..q {
                dy[l] = alpha * cot_x - cots[l] - shared;
            }
            let drift = bessel_drift(x, bp.alpha, bp.mu);
            loop {
                let nx = x - (params.kappa * h).sqrt() * noise.normal() + drift * h;
                let ok = nx > DT_MIN
                    && nx < TAU - DT_MIN
                    && y.iter().zip(&dy).all(|(yl, d)| {
                        let th = nx - (yl + d * h);
                        th > DT_MIN && th < TAU - DT_MIN
                    });
                if ok {
                    x = nx;
                    for (yl, d) in y.iter_mut().zip(&dy) {
                        *yl += d * h;
                    }
                    break;
                }
                h /= 2.0;
                if h < DT_MIN {
                    return Err(SleError::Numeric("coupled gap process reached an endpoint".into()));
                }
            }
            rem -= h;
        }
        out.x.push(x);
        for (path, yl) in out.theta.iter_mut().zip(&y) {
            path.push(x - yl);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_step_is_mirror_symmetric() {
        let bp = BesselParams {
            alpha: 1.0,
            kappa: 4.0,
            mu: 0.3,
            x0: 1.0,
        };
        let mirrored = BesselParams { mu: -0.3, ..bp };
        let a = boundary_step(&bp, &mut NoiseStream::new(1, 0, 0), 1e-4, 1e-9).unwrap();
        let b = boundary_step(&mirrored, &mut NoiseStream::new(1, 0, 0), TAU - 1e-4, 1e-9).unwrap();
        assert!((a - (TAU - b)).abs() < 1e-15);
    }

    #[test]
    fn boundary_step_has_squared_bessel_mean() {
        // E[R_h²] = R_0² + δh for a δ-dimensional Bessel process.
        let bp = BesselParams {
            alpha: 1.5,
            kappa: 2.0,
            mu: 0.0,
            x0: 1.0,
        };
        let (u, h, n) = (2e-5, 1e-10, 100_000);
        let mut noise = NoiseStream::new(3, 0, 0);
        let sq: Vec<f64> = (0..n)
            .map(|_| boundary_step(&bp, &mut noise, u, h).unwrap().powi(2) / bp.kappa)
            .collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let sd = (sq.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let expected = u * u / bp.kappa + bp.dimension() * h;
        assert!(
            (mean - expected).abs() < 4.0 * sd / (n as f64).sqrt(),
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn critical_dimension_never_errors() {
        let bp = BesselParams {
            alpha: 1.0,
            kappa: 4.0,
            mu: 0.0,
            x0: 1e-3,
        };
        for seed in 0..50 {
            let p = sample_bessel(&bp, 1e-2, 100, seed).unwrap();
            assert!(p.min > 0.0 && p.max < TAU);
        }
    }

    #[test]
    fn dimension_and_validation() {
        let bp = BesselParams {
            alpha: 2.0,
            kappa: 4.0,
            mu: 0.0,
            x0: 1.0,
        };
        assert_eq!(bp.dimension(), 3.0);
        assert!(BesselParams { x0: 0.0, ..bp }.validate().is_err());
        assert!(BesselParams { kappa: 9.0, ..bp }.validate().is_err());
    }
}
