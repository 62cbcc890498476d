//! Deterministic identities, BPZ residuals, constants and rainbow quadrature.

use super::{FitReport, NumericReport};
use crate::conformal::{boundary_poisson, conformal_radius_disc, poisson_kernel_interior, C64};
use crate::error::{Result, SleError};
use crate::loewner::AngleConfig;
use crate::partition::{
    bpz_residual, chordal_bpz_residual, exponents, fusion_constant, fusion_constant_n2_gauss, rainbow_value, z_fusion,
    z_fusion_halfplane, z_multiradial, z_multiradial_covariant, z_radial_rho, z_shuffle, RainbowOptions,
};
use crate::stats::linear_fit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::PI;

/// `n` sorted angles in [0, 2π) with cyclic gaps at least `sep`.
fn random_angles(rng: &mut ChaCha8Rng, n: usize, sep: f64) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        if crate::loewner::min_circular_gap(&a) >= sep {
            return a;
        }
    }
}

/// Exact identities, each asserted at machine precision:
/// the multiradial/fusion ratio identity, rotation invariance of Z⁰_p,
/// c = 1 − 24 e₀², and z_radial_rho ≡ z_multiradial at ρ ≡ 2.
pub fn check_identities(seed: u64) -> Result<Vec<NumericReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratio_err = Vec::new();
    for _ in 0..100 {
        let kappa = rng.gen_range(0.5..7.5);
        let n = rng.gen_range(1..=3usize);
        let pts = random_angles(&mut rng, n + 1, 0.1);
        let (th, y) = (&pts[..n], pts[n]);
        let z = C64::from_polar(rng.gen_range(0.0..0.9f64).sqrt(), rng.gen_range(0.0..2.0 * PI));
        let ex = exponents(kappa)?;
        let nf = n as f64;
        let hn = ex.h(n);
        let cr = conformal_radius_disc(z)?;
        let lhs = z_multiradial_covariant(kappa, th, z)?.log_abs
            - (hn - ex.b_tilde - (nf * nf - 1.0) / (2.0 * kappa)) * cr.ln()
            - z_fusion(kappa, &AngleConfig::new(th.to_vec())?, y)?.log_abs;
        let mut rhs = 0.0;
        for &t in th {
            let h = poisson_kernel_interior(t, z)?;
            let hb = boundary_poisson(t, y)?;
            rhs += (h / (cr * hb)).ln() * hn / nf;
        }
        ratio_err.push((lhs - rhs).abs());
    }

    let mut rot_err = Vec::new();
    let mut rho_err = Vec::new();
    for _ in 0..100 {
        let kappa = rng.gen_range(0.5..7.5);
        let p = rng.gen_range(2..=5usize);
        let a = random_angles(&mut rng, p, 0.05);
        let alpha = rng.gen_range(-PI..PI);
        let rotated: Vec<f64> = a.iter().map(|t| t + alpha).collect();
        let z0 = z_multiradial(kappa, 0.0, &AngleConfig::new(a.clone())?)?;
        let z1 = z_multiradial(kappa, 0.0, &AngleConfig::new(rotated)?)?;
        rot_err.push((z1.log_abs - z0.log_abs).abs());

        let mu = rng.gen_range(-2.0..2.0);
        let cfg = AngleConfig::new(a)?;
        let zm = z_multiradial(kappa, mu, &cfg)?;
        let zr = z_radial_rho(kappa, mu, &vec![2.0; p - 1], &cfg)?;
        let grad = zm
            .grad
            .iter()
            .zip(&zr.grad)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        rho_err.push((zm.log_abs - zr.log_abs).abs().max(grad));
    }

    let kappas = [1.0, 2.0, 8.0 / 3.0, 4.0, 6.0];
    let mut c_err = Vec::new();
    for &k in &kappas {
        let ex = exponents(k)?;
        c_err.push((ex.c - (1.0 - 24.0 * ex.e0 * ex.e0)).abs());
    }

    Ok(vec![
        NumericReport::from_errors(
            "fusion_ratio_identity",
            json!({"seed": seed, "configs": 100}),
            &ratio_err,
            1e-10,
        ),
        NumericReport::from_errors(
            "rotation_invariance",
            json!({"seed": seed, "configs": 100}),
            &rot_err,
            1e-12,
        ),
        NumericReport::from_errors("central_charge", json!({"kappas": kappas}), &c_err, 1e-12),
        NumericReport::from_errors(
            "rho_two_is_multiradial",
            json!({"seed": seed, "configs": 100}),
            &rho_err,
            1e-12,
        ),
    ])
}

/// Radial BPZ residuals of Z^μ_p and Z_fusion over random configurations.
pub fn check_bpz(seed: u64, n_configs: usize) -> Result<Vec<NumericReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappas = [2.0, 8.0 / 3.0, 4.0];
    let mut spiral = Vec::new();
    let mut fusion = Vec::new();
    for &p in &[2usize, 3] {
        for &kappa in &kappas {
            let ex = exponents(kappa)?;
            for &mu in &[0.0, 1.0] {
                for _ in 0..n_configs {
                    let a = random_angles(&mut rng, p, 0.2);
                    let eval = |x: &[f64]| z_multiradial(kappa, mu, &AngleConfig::new(x.to_vec())?);
                    let pf = p as f64;
                    let target = (mu * mu - (pf * pf - 1.0)) / (2.0 * kappa);
                    for j in 0..p {
                        spiral.push(bpz_residual(eval, &a, j, kappa, &vec![ex.b; p], target)?.abs());
                    }
                }
            }
            for _ in 0..n_configs {
                let a = random_angles(&mut rng, p + 1, 0.2);
                let eval = |x: &[f64]| z_fusion(kappa, &AngleConfig::new(x[..p].to_vec())?, x[p]);
                let mut w = vec![ex.b; p];
                w.push(ex.h(p));
                for j in 0..p {
                    fusion.push(bpz_residual(eval, &a, j, kappa, &w, ex.b_tilde)?.abs());
                }
            }
        }
    }
    let params = json!({"seed": seed, "configs_per_case": n_configs, "p": [2, 3], "kappas": kappas, "mu": [0.0, 1.0]});
    Ok(vec![
        NumericReport::from_errors("spiral_bpz", params.clone(), &spiral, 1e-6),
        NumericReport::from_errors("fusion_bpz", params, &fusion, 1e-6),
    ])
}

/// A₁ = 1 and A₂ = 1/₂F₁(4/κ, 1 − 4/κ; 8/κ; 1).
pub fn check_constants() -> Result<Vec<NumericReport>> {
    let k1 = [2.5, 3.0, 5.0, 6.0, 7.0];
    let a1: Vec<f64> = k1
        .iter()
        .map(|&k| fusion_constant(1, k).map(|a| (a - 1.0).abs()))
        .collect::<Result<_>>()?;
    let k2 = [5.0, 6.0, 7.0];
    let mut a2 = Vec::new();
    for &k in &k2 {
        let direct = fusion_constant(2, k)?;
        let gauss = fusion_constant_n2_gauss(k)?;
        a2.push(((direct - gauss) / gauss).abs());
    }
    Ok(vec![
        NumericReport::from_errors("fusion_constant_a1", json!({"kappas": k1}), &a1, 1e-10),
        NumericReport::from_errors("fusion_constant_a2", json!({"kappas": k2}), &a2, 1e-8),
    ])
}

/// Rainbow quadrature: the one-curve closed form, scaling covariance and the
/// chordal BPZ residual of the two-curve function at κ = 5.
pub fn check_rainbow(opts: RainbowOptions) -> Result<Vec<NumericReport>> {
    let kappa = 5.0;
    let b = exponents(kappa)?.b;
    let one = rainbow_value(kappa, &[0.0], &[1.0], opts)?;
    let mut scaling = Vec::new();
    for &lambda in &[0.5, 2.0, 3.7] {
        let z1 = rainbow_value(kappa, &[0.2], &[1.1], opts)?;
        let z1s = rainbow_value(kappa, &[0.2 * lambda], &[1.1 * lambda], opts)?;
        scaling.push((z1s / z1 / lambda.powf(-2.0 * b) - 1.0).abs());
        let z2 = rainbow_value(kappa, &[0.0, 1.0], &[3.0, 2.0], opts)?;
        let z2s = rainbow_value(kappa, &[0.0, lambda], &[3.0 * lambda, 2.0 * lambda], opts)?;
        scaling.push((z2s / z2 / lambda.powf(-4.0 * b) - 1.0).abs());
    }
    let tight = RainbowOptions { tol: 1e-12, ..opts };
    let u = [0.0, 1.0, 2.0, 3.5];
    let eval = |v: &[f64]| rainbow_value(kappa, &[v[0], v[1]], &[v[3], v[2]], tight);
    let bpz = (0..4)
        .map(|j| chordal_bpz_residual(eval, &u, j, kappa, 1e-3).map(f64::abs))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        NumericReport::from_errors(
            "rainbow_one_curve",
            json!({"kappa": kappa, "x": 0.0, "y": 1.0}),
            &[(one - 1.0).abs()],
            1e-6,
        ),
        NumericReport::from_errors(
            "rainbow_scaling",
            json!({"kappa": kappa, "lambdas": [0.5, 2.0, 3.7]}),
            &scaling,
            1e-6,
        ),
        NumericReport::from_errors(
            "rainbow_chordal_bpz",
            json!({"kappa": kappa, "points": u, "fd_step": 1e-3}),
            &bpz,
            1e-3,
        ),
    ])
}

/// Below this the fusion deviation is at the quadrature floor and no longer ordered.
const FUSION_FLOOR: f64 = 1e-8;

/// Deviation of Z_rainbow / Z_shuffle(ends) from A_n Z_fusion(starts; y) with the
/// n ends clustered at scale ε around y. Passes when the deviation decreases
/// along the (decreasing) ε list, down to the quadrature floor, and the last
/// value is below 2%. The slope of log deviation against log ε is reported.
pub fn check_fusion_limit(
    n: usize,
    kappa: f64,
    starts: &[f64],
    y: f64,
    epsilons: &[f64],
    opts: RainbowOptions,
) -> Result<FitReport> {
    if starts.len() != n || !(1..=2).contains(&n) {
        return Err(SleError::Domain("fusion limit implemented for n ∈ {1, 2}".into()));
    }
    let a_n = fusion_constant(n as u32, kappa)?;
    let limit = a_n * z_fusion_halfplane(kappa, starts, y)?.log_abs.exp();
    let mut devs = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let ends: Vec<f64> = if n == 1 {
            vec![y]
        } else {
            vec![y + eps / 2.0, y - eps / 2.0]
        };
        let mut ys = ends.clone();
        ys.reverse();
        let z = rainbow_value(kappa, starts, &ends, opts)?;
        let shuffle = z_shuffle(kappa, &ys)?.log_abs.exp();
        devs.push((z / shuffle / limit - 1.0).abs());
    }
    let monotone = devs.windows(2).all(|w| w[1] <= w[0] || w[1] < FUSION_FLOOR);
    let last = *devs.last().unwrap_or(&f64::NAN);
    let points: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(&devs)
        .filter(|(_, d)| **d >= FUSION_FLOOR)
        .map(|(e, d)| (e.ln(), d.ln()))
        .collect();
    let fit = if points.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        linear_fit(&xs, &ys)
    } else {
        crate::stats::LinearFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            r2: f64::NAN,
        }
    };
    Ok(FitReport {
        name: "fusion_limit".into(),
        params: json!({"n": n, "kappa": kappa, "starts": starts, "y": y, "epsilons": epsilons,
                       "deviations": devs, "a_n": a_n, "floor": FUSION_FLOOR}),
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        points,
        target: 0.0,
        tolerance: 0.02,
        pass: monotone && last < 0.02,
    })
}
