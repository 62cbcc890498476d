//! q-integers, Selberg integrals and the fusion constants A_n.

use crate::error::{Result, SleError};
use crate::special::{gamma_signed, hyp2f1_at_one, recip_gamma_two_minus, SignedLog};
use std::f64::consts::PI;

fn q_denominator(kappa: f64) -> Result<f64> {
    let s = (4.0 * PI / kappa).sin();
    if s.abs() < 1e-12 {
        return Err(SleError::Pole {
            what: "q-integer denominator sin(4π/κ)".into(),
            arg: kappa,
        });
    }
    Ok(s)
}

/// [m]_q = sin(4πm/κ)/sin(4π/κ), q = e^{4πi/κ}.
pub fn q_integer(m: i64, kappa: f64) -> Result<f64> {
    Ok((4.0 * PI * m as f64 / kappa).sin() / q_denominator(kappa)?)
}

/// [n]_q! = Π_{m=1}^{n} [m]_q.
pub fn q_factorial(n: u32, kappa: f64) -> Result<f64> {
    (1..=n as i64).try_fold(1.0, |acc, m| Ok(acc * q_integer(m, kappa)?))
}

fn ln_factorial(n: u32) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

/// Numerator Gamma factors of S_n for index u, divided by Γ(1 + 4/κ).
fn selberg_numerator(n: u32, u: u32, kappa: f64) -> Result<SignedLog> {
    let a = 4.0 / kappa;
    let g1 = gamma_signed(1.0 - a * (n + 1 - u) as f64)?;
    Ok(g1 * g1 * gamma_signed(1.0 + a * u as f64)? / gamma_signed(1.0 + a)?)
}

/// Selberg integral S_n(κ).
pub fn selberg_constant(n: u32, kappa: f64) -> Result<f64> {
    if n == 0 {
        return Err(SleError::Domain("n must be at least 1".into()));
    }
    let a = 4.0 / kappa;
    let mut acc = SignedLog {
        ln_abs: -ln_factorial(n),
        sign: 1.0,
    };
    for u in 1..=n {
        acc = acc * selberg_numerator(n, u, kappa)?;
        match recip_gamma_two_minus(a * (n + 2 - u) as f64)? {
            Some(r) => acc = acc * r,
            None => return Ok(0.0),
        }
    }
    Ok(acc.value())
}

/// A_n(κ) = ([2]_q^n [n]_q! / [n+1]_q) (Γ(2−8/κ)/Γ(1−4/κ)²)^n S_n.
///
/// The factor 1/([n+1]_q Γ(2 − 4(n+1)/κ)) is evaluated as
/// −sin(4π/κ) Γ(4(n+1)/κ − 1)/π, which stays finite where [n+1]_q vanishes.
pub fn fusion_constant(n: u32, kappa: f64) -> Result<f64> {
    if n == 0 {
        return Err(SleError::Domain("n must be at least 1".into()));
    }
    if !(kappa > 0.0 && kappa < 8.0) {
        return Err(SleError::Domain(format!("κ = {kappa} outside (0, 8)")));
    }
    let a = 4.0 / kappa;
    let q2 = 2.0 * (4.0 * PI / kappa).cos();
    let mut acc = SignedLog::from_f64(q2)?.powi(n as i32) * SignedLog::from_f64(q_factorial(n, kappa)?)?;
    let n1 = gamma_signed(2.0 - 2.0 * a)? / (gamma_signed(1.0 - a)? * gamma_signed(1.0 - a)?);
    acc = acc * n1.powi(n as i32);
    acc = acc
        * SignedLog {
            ln_abs: -ln_factorial(n),
            sign: 1.0,
        };
    for u in 1..=n {
        acc = acc * selberg_numerator(n, u, kappa)?;
        if u >= 2 {
            match recip_gamma_two_minus(a * (n + 2 - u) as f64)? {
                Some(r) => acc = acc * r,
                None => return Ok(0.0),
            }
        }
    }
    let x = a * (n + 1) as f64;
    let tail = -(4.0 * PI / kappa).sin() / PI;
    acc = acc * SignedLog::from_f64(tail)? * gamma_signed(x - 1.0)?;
    Ok(acc.value())
}

/// A_2 = 1/₂F₁(4/κ, 1−4/κ; 8/κ; 1) through Gauss's formula.
pub fn fusion_constant_n2_gauss(kappa: f64) -> Result<f64> {
    let a = 4.0 / kappa;
    Ok(1.0 / hyp2f1_at_one(a, 1.0 - a, 2.0 * a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma(x: f64) -> f64 {
        gamma_signed(x).unwrap().value()
    }

    #[test]
    fn q_integers() {
        for k in [2.5, 5.0, 7.0] {
            assert!((q_integer(1, k).unwrap() - 1.0).abs() < 1e-14);
            assert!((q_integer(2, k).unwrap() - 2.0 * (4.0 * PI / k).cos()).abs() < 1e-13);
        }
        assert!((q_integer(2, 16.0 / 3.0).unwrap() + 2f64.sqrt()).abs() < 1e-13);
        assert!(matches!(q_integer(2, 4.0), Err(SleError::Pole { .. })));
        assert!(matches!(q_integer(2, 2.0), Err(SleError::Pole { .. })));
    }

    #[test]
    fn selberg_one() {
        for k in [3.0, 5.0, 7.0] {
            let s1 = selberg_constant(1, k).unwrap();
            let a = 4.0 / k;
            assert!((s1 - gamma(1.0 - a).powi(2) / gamma(2.0 - 2.0 * a)).abs() < 1e-12 * s1.abs());
            assert!((s1 * gamma(2.0 - 2.0 * a) / gamma(1.0 - a).powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn selberg_two_expanded() {
        let k = 5.0;
        let a = 4.0 / k;
        let expanded =
            0.5 * gamma(1.0 - 2.0 * a).powi(2) / gamma(2.0 - 3.0 * a) * gamma(1.0 - a).powi(2) * gamma(1.0 + 2.0 * a)
                / (gamma(1.0 + a) * gamma(2.0 - 2.0 * a));
        let s2 = selberg_constant(2, k).unwrap();
        assert!((s2 - expanded).abs() < 1e-10 * expanded.abs());
    }

    #[test]
    fn a1_is_one() {
        for k in [2.5, 3.0, 5.0, 6.0, 7.0] {
            assert!((fusion_constant(1, k).unwrap() - 1.0).abs() < 1e-12, "κ={k}");
        }
    }

    #[test]
    fn a2_two_ways() {
        for k in [2.5, 3.0, 5.0, 6.0, 7.0] {
            let direct = fusion_constant(2, k).unwrap();
            let gauss = fusion_constant_n2_gauss(k).unwrap();
            assert!(
                (direct - gauss).abs() < 1e-8 * gauss.abs(),
                "κ={k}: {direct} vs {gauss}"
            );
        }
    }

    #[test]
    fn a2_at_six_avoids_pole() {
        // [3]_q = 0 at κ = 6 while A_2 stays finite.
        assert!(q_integer(3, 6.0).unwrap().abs() < 1e-14);
        assert!(fusion_constant(2, 6.0).unwrap().is_finite());
    }

    #[test]
    fn poles_reported() {
        assert!(matches!(fusion_constant(1, 4.0), Err(SleError::Pole { .. })));
    }
}
