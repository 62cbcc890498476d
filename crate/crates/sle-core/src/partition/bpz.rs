//! Residuals of the radial and chordal BPZ equations.

use super::{exponents, PartitionValue};
use crate::error::{Result, SleError};

/// Central-difference step for second derivatives.
pub const BPZ_STEP: f64 = 1e-5;

/// Radial BPZ residual in slot `j`:
///
/// (κ/2) ∂_j²Z/Z + Σ_{i≠j} [cot((θ^i−θ^j)/2) ∂_iZ/Z − (w_i/2)/sin²((θ^i−θ^j)/2)] − target.
///
/// `weights[i]` is the conformal weight of slot i (b for curve starts). The
/// second derivative is a central difference of the analytic gradient.
pub fn bpz_residual<F>(eval: F, angles: &[f64], j: usize, kappa: f64, weights: &[f64], target: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<PartitionValue>,
{
    exponents(kappa)?;
    if weights.len() != angles.len() || j >= angles.len() {
        return Err(SleError::Domain("slot weights must match the angles".into()));
    }
    for (i, &t) in angles.iter().enumerate() {
        if i != j && ((t - angles[j]) / 2.0).sin().abs() < 100.0 * BPZ_STEP {
            return Err(SleError::Stencil(format!(
                "slots {i} and {j} too close for the stencil"
            )));
        }
    }
    let z = eval(angles)?;
    let mut ap = angles.to_vec();
    let mut am = angles.to_vec();
    ap[j] += BPZ_STEP;
    am[j] -= BPZ_STEP;
    let d2log = (eval(&ap)?.grad[j] - eval(&am)?.grad[j]) / (2.0 * BPZ_STEP);
    let gj = z.grad[j];
    let mut r = 0.5 * kappa * (d2log + gj * gj);
    for (i, &t) in angles.iter().enumerate() {
        if i == j {
            continue;
        }
        let half = (t - angles[j]) / 2.0;
        r += z.grad[i] / half.tan() - 0.5 * weights[i] / half.sin().powi(2);
    }
    Ok(r - target)
}

/// Chordal BPZ residual in slot `j`, normalized by Z, from values only:
///
/// (κ/2) ∂_j²Z/Z + Σ_{i≠j} [2 ∂_iZ/Z/(u_i − u_j) − 2b/(u_i − u_j)²].
///
/// All derivatives are central differences of `eval` with step `h`.
pub fn chordal_bpz_residual<F>(eval: F, u: &[f64], j: usize, kappa: f64, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let b = exponents(kappa)?.b;
    let z0 = eval(u)?;
    let shifted = |k: usize, d: f64| -> Result<f64> {
        let mut v = u.to_vec();
        v[k] += d;
        eval(&v)
    };
    let d2 = (shifted(j, h)? - 2.0 * z0 + shifted(j, -h)?) / (h * h);
    let mut r = 0.5 * kappa * d2 / z0;
    for i in 0..u.len() {
        if i == j {
            continue;
        }
        let di = (shifted(i, h)? - shifted(i, -h)?) / (2.0 * h);
        let d = u[i] - u[j];
        r += 2.0 * di / z0 / d - 2.0 * b / (d * d);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::{z_fusion, z_multiradial};
    use super::*;
    use crate::loewner::AngleConfig;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn single_point_spiral_is_exact() {
        let (k, mu) = (3.0, 0.8);
        let eval = |a: &[f64]| z_multiradial(k, mu, &AngleConfig::new(a.to_vec())?);
        let b = exponents(k).unwrap().b;
        let r = bpz_residual(eval, &[0.7], 0, k, &[b], mu * mu / (2.0 * k)).unwrap();
        assert!(r.abs() < 1e-9);
    }

    #[test]
    fn chordal_two_point() {
        // (y − x)^{−2b} solves the chordal equation.
        let k = 5.0;
        let b = exponents(k).unwrap().b;
        let eval = |u: &[f64]| Ok((u[1] - u[0]).powf(-2.0 * b));
        let r = chordal_bpz_residual(eval, &[0.0, 1.3], 0, k, 1e-4).unwrap();
        assert!(r.abs() < 1e-6);
    }

    #[test]
    fn stencil_guard() {
        let eval = |a: &[f64]| z_multiradial(3.0, 0.0, &AngleConfig::new(a.to_vec())?);
        let e = bpz_residual(eval, &[0.0, 1e-5], 0, 3.0, &[0.5, 0.5], 0.0).unwrap_err();
        assert!(matches!(e, SleError::Stencil(_)));
    }

    fn spread(raw: Vec<f64>) -> Option<Vec<f64>> {
        let mut a = raw;
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ok = a.windows(2).all(|w| w[1] - w[0] > 0.2) && a[0] + 2.0 * PI - a[a.len() - 1] > 0.2;
        ok.then_some(a)
    }

    proptest! {
        #[test]
        fn spiral_partition_function_solves_bpz(
            raw in proptest::collection::vec(0.0..(2.0 * PI), 3),
            kappa in 1.0..4.0f64,
            mu in -2.0..2.0f64,
        ) {
            if let Some(a) = spread(raw) {
                let p = a.len() as f64;
                let b = exponents(kappa).unwrap().b;
                let eval = |x: &[f64]| z_multiradial(kappa, mu, &AngleConfig::new(x.to_vec())?);
                for j in 0..a.len() {
                    let r = bpz_residual(eval, &a, j, kappa, &vec![b; a.len()], (mu * mu - (p * p - 1.0)) / (2.0 * kappa)).unwrap();
                    prop_assert!(r.abs() < 1e-6, "residual {}", r);
                }
            }
        }

        #[test]
        fn fusion_partition_function_solves_bpz(
            raw in proptest::collection::vec(0.0..(2.0 * PI), 4),
            kappa in 1.0..4.0f64,
        ) {
            if let Some(a) = spread(raw) {
                let n = 3;
                let ex = exponents(kappa).unwrap();
                let eval = |x: &[f64]| z_fusion(kappa, &AngleConfig::new(x[..n].to_vec())?, x[n]);
                let mut w = vec![ex.b; n];
                w.push(ex.h(n));
                for j in 0..n {
                    let r = bpz_residual(eval, &a, j, kappa, &w, ex.b_tilde).unwrap();
                    prop_assert!(r.abs() < 1e-6, "residual {}", r);
                }
            }
        }
    }
}
