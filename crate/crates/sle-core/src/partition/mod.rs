//! Partition functions, exponents and constants.
//!
//! Values are carried in log form with a separate phase, together with the
//! gradient of log |Z| in the angle (or real) coordinates.

mod bpz;
mod constants;
mod coulomb;
mod rainbow;

pub use bpz::{bpz_residual, chordal_bpz_residual, BPZ_STEP};
pub use constants::{fusion_constant, fusion_constant_n2_gauss, q_factorial, q_integer, selberg_constant};
pub use coulomb::{
    z_fusion, z_fusion_halfplane, z_multiradial, z_multiradial_covariant, z_multiradial_halfplane, z_radial_rho,
    z_shuffle,
};
pub use rainbow::{rainbow_numeric, rainbow_value, RainbowOptions};

use crate::error::{Result, SleError};
use serde::{Deserialize, Serialize};

/// Exponents attached to κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalExponents {
    pub kappa: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub c: f64,
    pub e0: f64,
}

impl UniversalExponents {
    /// h_n = n(n+2)/κ − n/2.
    pub fn h(&self, n: usize) -> f64 {
        let n = n as f64;
        n * (n + 2.0) / self.kappa - n / 2.0
    }
}

pub fn exponents(kappa: f64) -> Result<UniversalExponents> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(SleError::Domain(format!("κ = {kappa} must be positive")));
    }
    Ok(UniversalExponents {
        kappa,
        b: (6.0 - kappa) / (2.0 * kappa),
        b_tilde: (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa),
        c: (6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa),
        e0: (kappa - 4.0) / (4.0 * kappa.sqrt()),
    })
}

/// log |Z|, phase of Z (0 or π for real functions) and ∂ log |Z|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub log_abs: f64,
    pub phase: f64,
    pub grad: Vec<f64>,
}

impl PartitionValue {
    pub fn value(&self) -> f64 {
        self.log_abs.exp() * self.phase.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_kappas() {
        let e = exponents(6.0).unwrap();
        assert_eq!((e.b, e.c), (0.0, 0.0));
        assert!(exponents(8.0 / 3.0).unwrap().c.abs() < 1e-15);
        assert!(exponents(0.0).is_err());
    }

    #[test]
    fn central_charge_identity() {
        for k in [2.0, 3.0, 4.0, 17.0 / 4.0] {
            let e = exponents(k).unwrap();
            assert!((e.c - (1.0 - 24.0 * e.e0 * e.e0)).abs() < 1e-12);
        }
    }

    #[test]
    fn kac_weights() {
        let e = exponents(4.0).unwrap();
        assert!((e.h(1) - 0.25).abs() < 1e-15);
        assert!((e.h(2) - 1.0).abs() < 1e-15);
        for k in [1.5, 3.0, 5.5] {
            let e = exponents(k).unwrap();
            assert!((e.h(1) - e.b).abs() < 1e-14);
        }
    }
}
