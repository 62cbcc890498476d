//! Closed-form Coulomb-gas partition functions on the circle and the real line.

use super::{exponents, PartitionValue};
use crate::conformal::{mobius_to_origin, C64};
use crate::error::{Result, SleError};
use crate::loewner::AngleConfig;

/// log Z = Σ_j lin_j θ^j + Σ_{i<j} pair(i,j) log |e^{iθ^j} − e^{iθ^i}|, with gradient.
fn circular_gas(thetas: &[f64], lin: &[f64], pair: impl Fn(usize, usize) -> f64) -> Result<PartitionValue> {
    let n = thetas.len();
    let mut log_abs: f64 = thetas.iter().zip(lin).map(|(t, c)| t * c).sum();
    let mut grad = lin.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            let e = pair(i, j);
            if e == 0.0 {
                continue;
            }
            let half = (thetas[j] - thetas[i]) / 2.0;
            let s = half.sin();
            if s.abs() < 1e-15 {
                return Err(SleError::Domain(format!("points {i} and {j} coincide")));
            }
            log_abs += e * (2.0 * s.abs()).ln();
            let g = 0.5 * e / half.tan();
            grad[j] += g;
            grad[i] -= g;
        }
    }
    Ok(PartitionValue {
        log_abs,
        phase: 0.0,
        grad,
    })
}

/// Same on the real line: Σ_{i<j} pair(i,j) log |x^j − x^i|.
fn linear_gas(xs: &[f64], pair: impl Fn(usize, usize) -> f64) -> Result<PartitionValue> {
    let n = xs.len();
    let mut log_abs = 0.0;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = pair(i, j);
            let d = xs[j] - xs[i];
            if d == 0.0 {
                return Err(SleError::Domain(format!("points {i} and {j} coincide")));
            }
            log_abs += e * d.abs().ln();
            grad[j] += e / d;
            grad[i] -= e / d;
        }
    }
    Ok(PartitionValue {
        log_abs,
        phase: 0.0,
        grad,
    })
}

/// Z^μ_p(θ) = Π_{i<j} |e^{iθ^j} − e^{iθ^i}|^{2/κ} · exp((μ/κ) Σ θ^j).
pub fn z_multiradial(kappa: f64, mu: f64, angles: &AngleConfig) -> Result<PartitionValue> {
    exponents(kappa)?;
    let lin = vec![mu / kappa; angles.len()];
    circular_gas(angles.angles(), &lin, |_, _| 2.0 / kappa)
}

/// Partition function of radial SLE_κ^μ(ρ): driver θ¹, force points θ², …, θᵖ.
pub fn z_radial_rho(kappa: f64, mu: f64, rho: &[f64], angles: &AngleConfig) -> Result<PartitionValue> {
    exponents(kappa)?;
    let p = angles.len();
    if rho.len() + 1 != p {
        return Err(SleError::Domain(format!("{} weights for {p} points", rho.len())));
    }
    // ρ₁ = 2 makes every coefficient uniform: pair(i,j) = ρ_iρ_j/(2κ), lin_j = (μ/κ)ρ_j/2.
    let w: Vec<f64> = std::iter::once(2.0).chain(rho.iter().copied()).collect();
    let lin: Vec<f64> = w.iter().map(|r| mu / kappa * r / 2.0).collect();
    circular_gas(angles.angles(), &lin, |i, j| w[i] * w[j] / (2.0 * kappa))
}

/// Z_fusion(θ¹, …, θⁿ; ϑ) in the disc. Gradient slots: θ¹, …, θⁿ, ϑ.
pub fn z_fusion(kappa: f64, starts: &AngleConfig, target: f64) -> Result<PartitionValue> {
    exponents(kappa)?;
    let n = starts.len();
    let e = 1.0 - 2.0 * (n as f64 + 2.0) / kappa;
    let pts: Vec<f64> = starts.angles().iter().copied().chain(std::iter::once(target)).collect();
    circular_gas(&pts, &vec![0.0; n + 1], |_, j| if j == n { e } else { 2.0 / kappa })
}

/// Z_fusion(H; x¹, …, xⁿ, y) = Π (x^j − x^i)^{2/κ} Π |y − x^j|^{1 − 2(n+2)/κ}.
pub fn z_fusion_halfplane(kappa: f64, starts: &[f64], target: f64) -> Result<PartitionValue> {
    exponents(kappa)?;
    let n = starts.len();
    let e = 1.0 - 2.0 * (n as f64 + 2.0) / kappa;
    let pts: Vec<f64> = starts.iter().copied().chain(std::iter::once(target)).collect();
    linear_gas(&pts, |_, j| if j == n { e } else { 2.0 / kappa })
}

/// Product form Π_{i<j} (y^j − y^i)^{2/κ}.
pub fn z_shuffle(kappa: f64, ys: &[f64]) -> Result<PartitionValue> {
    linear_gas(ys, |_, _| 2.0 / kappa)
}

/// Z^0_n(U; e^{iθ}; z): covariant extension to an interior target z ≠ 0.
///
/// Z^0_n(U; x; z) = |φ'(z)|^{b̃ + (n²−1)/(2κ)} Π |φ'(x^j)|^b Z^0_n(φ(x)) with φ(z) = 0.
/// Returns only the value in log form; the gradient is left empty.
pub fn z_multiradial_covariant(kappa: f64, angles: &[f64], z: C64) -> Result<PartitionValue> {
    let ex = exponents(kappa)?;
    let n = angles.len() as f64;
    let phi = mobius_to_origin(z)?;
    let images: Vec<f64> = angles.iter().map(|&t| phi.eval_angle(t)).collect();
    let base = circular_gas(&images, &vec![0.0; images.len()], |_, _| 2.0 / kappa)?;
    let dz = 1.0 / (1.0 - z.norm_sqr());
    let mut log_abs = base.log_abs + (ex.b_tilde + (n * n - 1.0) / (2.0 * kappa)) * dz.ln();
    for &t in angles {
        log_abs += ex.b * phi.boundary_stretch(t).ln();
    }
    Ok(PartitionValue {
        log_abs,
        phase: 0.0,
        grad: Vec::new(),
    })
}

/// Z^0_n(H; x; z) through the Cayley-type map w ↦ (w − z)/(w − z̄).
pub fn z_multiradial_halfplane(kappa: f64, xs: &[f64], z: C64) -> Result<PartitionValue> {
    let ex = exponents(kappa)?;
    if !(z.im > 0.0) {
        return Err(SleError::Domain(format!("{z} is not in the upper half-plane")));
    }
    let n = xs.len() as f64;
    let images: Vec<f64> = xs.iter().map(|&x| ((x - z) / (x - z.conj())).arg()).collect();
    let base = circular_gas(&images, &vec![0.0; images.len()], |_, _| 2.0 / kappa)?;
    let dz = 1.0 / (2.0 * z.im);
    let mut log_abs = base.log_abs + (ex.b_tilde + (n * n - 1.0) / (2.0 * kappa)) * dz.ln();
    for &x in xs {
        let stretch = 2.0 * z.im / (x - z).norm_sqr();
        log_abs += ex.b * stretch.ln();
    }
    Ok(PartitionValue {
        log_abs,
        phase: 0.0,
        grad: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{boundary_poisson, conformal_radius_disc, poisson_kernel_interior};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg(a: &[f64]) -> AngleConfig {
        AngleConfig::new(a.to_vec()).unwrap()
    }

    #[test]
    fn two_antipodal_points() {
        let z = z_multiradial(4.0, 0.0, &cfg(&[0.0, PI])).unwrap();
        assert!((z.value() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rho_two_is_multiradial() {
        let a = cfg(&[0.1, 1.7, 4.0]);
        let r = z_radial_rho(3.0, 0.7, &[2.0, 2.0], &a).unwrap();
        let m = z_multiradial(3.0, 0.7, &a).unwrap();
        assert!((r.log_abs - m.log_abs).abs() < 1e-13);
        for (x, y) in r.grad.iter().zip(&m.grad) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn rho_zero_has_flat_driver() {
        let r = z_radial_rho(3.0, 0.0, &[0.0, 0.0], &cfg(&[0.1, 1.7, 4.0])).unwrap();
        assert_eq!(r.grad[0], 0.0);
    }

    #[test]
    fn fusion_single_start() {
        let k = 3.0;
        let b = exponents(k).unwrap().b;
        let z = z_fusion(k, &cfg(&[0.4]), 2.9).unwrap();
        let d = (C64::cis(2.9) - C64::cis(0.4)).norm();
        assert!((z.log_abs - (-2.0 * b) * d.ln()).abs() < 1e-13);
    }

    #[test]
    fn fusion_target_free_at_special_kappa() {
        // κ = 2(n+2) with n = 2
        let z = z_fusion(8.0, &cfg(&[0.3, 1.0]), 3.0).unwrap();
        assert!(z.grad[2].abs() < 1e-15);
    }

    #[test]
    fn watermelon_identity_in_disc() {
        // Z^0_n(U;x;z) / (CR^{h_n − b̃ − (n²−1)/(2κ)} Z_fusion) = Π (H(x^j;z)/(CR H(x^j,y)))^{h_n/n}
        let cases: [(f64, Vec<f64>, f64, C64); 3] = [
            (3.0, vec![0.2, 1.1], 3.5, C64::new(0.2, -0.3)),
            (2.5, vec![0.5, 1.0, 2.2], 4.4, C64::new(-0.4, 0.1)),
            (4.0, vec![1.3], 5.0, C64::new(0.05, 0.6)),
        ];
        for (k, th, y, z) in cases {
            let ex = exponents(k).unwrap();
            let n = th.len();
            let nf = n as f64;
            let hn = ex.h(n);
            let cr = conformal_radius_disc(z).unwrap();
            let lhs = z_multiradial_covariant(k, &th, z).unwrap().log_abs
                - (hn - ex.b_tilde - (nf * nf - 1.0) / (2.0 * k)) * cr.ln()
                - z_fusion(k, &cfg(&th), y).unwrap().log_abs;
            let rhs: f64 = th
                .iter()
                .map(|&t| {
                    let h = poisson_kernel_interior(t, z).unwrap();
                    let hb = boundary_poisson(t, y).unwrap();
                    (h / (cr * hb)).ln() * hn / nf
                })
                .sum();
            assert!((lhs - rhs).abs() < 1e-10, "κ={k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn covariant_at_origin_is_plain() {
        let th = [0.3, 2.0, 4.1];
        let a = z_multiradial_covariant(3.0, &th, C64::new(0.0, 0.0)).unwrap();
        let b = z_multiradial(3.0, 0.0, &cfg(&th)).unwrap();
        assert!((a.log_abs - b.log_abs).abs() < 1e-13);
    }

    #[test]
    fn fusion_halfplane_matches_disc() {
        // Cayley φ(w) = (w − i)/(w + i): H → U, |φ'(x)| = 2/(1 + x²).
        let k = 3.5;
        let ex = exponents(k).unwrap();
        let xs = [-1.3, -0.2, 0.9];
        let y = 2.4;
        let n = xs.len();
        let ang = |x: f64| ((C64::new(x, 0.0) - C64::i()) / (C64::new(x, 0.0) + C64::i())).arg();
        let mut th: Vec<f64> = xs.iter().map(|&x| ang(x)).collect();
        let mut vt = ang(y);
        // lift so that θ¹ < … < θⁿ < ϑ < θ¹ + 2π
        for t in th.iter_mut() {
            if *t < 0.0 {
                *t += 2.0 * PI;
            }
        }
        if vt < 0.0 {
            vt += 2.0 * PI;
        }
        th.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let disc = z_fusion(k, &cfg(&th), vt);
        let st = |x: f64| (2.0 / (1.0 + x * x)).ln();
        let h = z_fusion_halfplane(k, &xs, y).unwrap();
        let transported = disc.map(|d| d.log_abs + xs.iter().map(|&x| ex.b * st(x)).sum::<f64>() + ex.h(n) * st(y));
        match transported {
            Ok(t) => assert!((t - h.log_abs).abs() < 1e-10, "{t} vs {}", h.log_abs),
            Err(e) => panic!("{e}"),
        }
    }

    fn check_grad(f: impl Fn(&[f64]) -> PartitionValue, x: &[f64]) -> f64 {
        let g = f(x).grad;
        let mut worst: f64 = 0.0;
        for j in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += 1e-6;
            xm[j] -= 1e-6;
            let fd = (f(&xp).log_abs - f(&xm).log_abs) / 2e-6;
            worst = worst.max((fd - g[j]).abs());
        }
        worst
    }

    fn sorted_angles(raw: Vec<f64>) -> Option<Vec<f64>> {
        let mut a = raw;
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ok = a.windows(2).all(|w| w[1] - w[0] > 0.1) && a[0] + 2.0 * PI - a[a.len() - 1] > 0.1;
        ok.then_some(a)
    }

    proptest! {
        #[test]
        fn gradients_match_finite_differences(
            raw in proptest::collection::vec(0.0..(2.0 * PI), 4),
            kappa in 1.0..7.5f64,
            mu in -2.0..2.0f64,
            r1 in 0.0..4.0f64,
            r2 in -1.0..4.0f64,
        ) {
            if let Some(a) = sorted_angles(raw) {
                let mr = |x: &[f64]| z_multiradial(kappa, mu, &cfg(x)).unwrap();
                prop_assert!(check_grad(mr, &a) < 1e-7);
                let rr = |x: &[f64]| z_radial_rho(kappa, mu, &[r1, r2, 1.0], &cfg(x)).unwrap();
                prop_assert!(check_grad(rr, &a) < 1e-7);
                let fu = |x: &[f64]| z_fusion(kappa, &cfg(&x[..3]), x[3]).unwrap();
                prop_assert!(check_grad(fu, &a) < 1e-7);
            }
        }

        #[test]
        fn rotation_covariance(
            raw in proptest::collection::vec(0.0..(2.0 * PI), 3),
            alpha in -3.0..3.0f64,
            mu in -2.0..2.0f64,
        ) {
            if let Some(a) = sorted_angles(raw) {
                let k = 2.5;
                let rot: Vec<f64> = a.iter().map(|t| t + alpha).collect();
                let z0 = z_multiradial(k, mu, &cfg(&a)).unwrap().log_abs;
                let z1 = z_multiradial(k, mu, &cfg(&rot)).unwrap().log_abs;
                prop_assert!((z1 - z0 - mu / k * 3.0 * alpha).abs() < 1e-11);
            }
        }
    }
}
