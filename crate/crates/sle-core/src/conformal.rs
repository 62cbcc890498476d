//! Geometric kernels on the unit disc: conformal radius, Poisson kernels,
//! disc automorphisms and the closed-form uniformizer of a radial slit.
//!
//! Boundary points are passed as angles θ standing for e^{iθ}; interior points
//! as complex numbers. Angle differences are reduced to (−π, π] before any
//! trigonometric evaluation.

use crate::error::{domain, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

/// Reduces an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn check_interior(z: C64) -> Result<()> {
    if !(z.norm_sqr() < 1.0) {
        return Err(domain(format!("point {z} is not inside the unit disc")));
    }
    Ok(())
}

/// CR(U; z) = 1 − |z|².
pub fn conformal_radius_disc(z: C64) -> Result<f64> {
    check_interior(z)?;
    Ok(1.0 - z.norm_sqr())
}

/// Interior Poisson kernel H(U; e^{iθ}, z) = (1 − |z|²)/|z − e^{iθ}|².
pub fn poisson_kernel_interior(theta: f64, z: C64) -> Result<f64> {
    check_interior(z)?;
    Ok((1.0 - z.norm_sqr()) / (z - C64::cis(theta)).norm_sqr())
}

/// Boundary Poisson kernel H(U; e^{iθ}, e^{iϑ}) = 1/(4 sin²((ϑ − θ)/2)).
pub fn boundary_poisson(theta: f64, vartheta: f64) -> Result<f64> {
    let s = (wrap_angle(vartheta - theta) / 2.0).sin();
    if s.abs() < 1e-300 {
        return Err(domain("boundary Poisson kernel at coincident points"));
    }
    Ok(1.0 / (4.0 * s * s))
}

/// Disc automorphism φ(w) = e^{iα}(w − z₀)/(1 − z̄₀ w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscMobius {
    pub z0: C64,
    pub rotation: f64,
}

impl DiscMobius {
    pub fn eval(&self, w: C64) -> C64 {
        C64::cis(self.rotation) * (w - self.z0) / (C64::new(1.0, 0.0) - self.z0.conj() * w)
    }

    pub fn deriv(&self, w: C64) -> C64 {
        let d = C64::new(1.0, 0.0) - self.z0.conj() * w;
        C64::cis(self.rotation) * (1.0 - self.z0.norm_sqr()) / (d * d)
    }

    /// Image of the boundary point e^{iθ}, as an angle in (−π, π].
    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.eval(C64::cis(theta)).arg()
    }

    /// |φ'(e^{iθ})|, which is also the derivative of the induced angle map.
    pub fn boundary_stretch(&self, theta: f64) -> f64 {
        self.deriv(C64::cis(theta)).norm()
    }
}

/// The automorphism with φ(z₀) = 0 and φ'(z₀) = 1/(1 − |z₀|²) > 0.
pub fn mobius_to_origin(z0: C64) -> Result<DiscMobius> {
    check_interior(z0)?;
    Ok(DiscMobius { z0, rotation: 0.0 })
}

/// Radial slit from e^{i·anchor} to (1 − depth)·e^{i·anchor}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitHull {
    pub anchor: f64,
    pub depth: f64,
}

/// The uniformizer g_K of U ∖ K with g_K(0) = 0 and g_K'(0) > 0.
///
/// Built as T: U → H sending the anchor to 0 and the slit onto the segment
/// [0, ih], then w ↦ √(w² + h²), then the Cayley map back to U centred at the
/// image of 0, followed by the rotation making g_K'(0) positive.
#[derive(Debug, Clone, Copy)]
pub struct SlitMap {
    hull: SlitHull,
    h: f64,
    s0: C64,
    rot: C64,
}

pub fn slit_hull_map(k: SlitHull) -> Result<SlitMap> {
    if !(k.depth > 0.0 && k.depth < 1.0) {
        return Err(domain(format!("slit depth {} outside (0, 1)", k.depth)));
    }
    let r = 1.0 - k.depth;
    let h = (1.0 - r) / (1.0 + r);
    let s0 = C64::new(0.0, (1.0 - h * h).sqrt());
    let mut m = SlitMap {
        hull: k,
        h,
        s0,
        rot: C64::new(1.0, 0.0),
    };
    let d0 = m.deriv(C64::new(0.0, 0.0));
    m.rot = (d0 / d0.norm()).conj();
    Ok(m)
}

impl SlitMap {
    pub fn hull(&self) -> SlitHull {
        self.hull
    }

    fn to_half_plane(self, z: C64) -> (C64, C64) {
        let e = C64::cis(-self.hull.anchor);
        let zp = z * e;
        let one = C64::new(1.0, 0.0);
        let w = C64::i() * (one - zp) / (one + zp);
        let dw = C64::i() * (-2.0) * e / ((one + zp) * (one + zp));
        (w, dw)
    }

    fn unslit(&self, w: C64) -> (C64, C64) {
        let mut s = (w * w + self.h * self.h).sqrt();
        // The branch mapping H to H is the root nearer to w.
        if (s - w).norm_sqr() > (s + w).norm_sqr() {
            s = -s;
        }
        (s, w / s)
    }

    fn to_disc(self, s: C64) -> (C64, C64) {
        let d = s - self.s0.conj();
        (
            self.rot * (s - self.s0) / d,
            self.rot * (self.s0 - self.s0.conj()) / (d * d),
        )
    }

    /// g_K(z) for z in the closed disc off the slit.
    pub fn eval(&self, z: C64) -> C64 {
        let (w, _) = self.to_half_plane(z);
        let (s, _) = self.unslit(w);
        self.to_disc(s).0
    }

    /// g_K'(z) by the chain rule.
    pub fn deriv(&self, z: C64) -> C64 {
        let (w, dw) = self.to_half_plane(z);
        let (s, ds) = self.unslit(w);
        let (_, dm) = self.to_disc(s);
        dm * ds * dw
    }

    /// g_K'(0) = 1/CR(U ∖ K; 0).
    pub fn deriv_at_origin(&self) -> f64 {
        self.deriv(C64::new(0.0, 0.0)).re
    }

    /// Image angle of the boundary point e^{iθ} (θ off the anchor).
    pub fn boundary_image(&self, theta: f64) -> f64 {
        self.eval(C64::cis(theta)).arg()
    }

    /// Images of the two prime ends at the slit base, (left, right) of the anchor.
    pub fn base_images(&self) -> (f64, f64) {
        let (s_minus, s_plus) = (C64::new(-self.h, 0.0), C64::new(self.h, 0.0));
        (self.to_disc(s_minus).0.arg(), self.to_disc(s_plus).0.arg())
    }

    /// CR(U ∖ K; z) = (1 − |g(z)|²)/|g'(z)|.
    pub fn conformal_radius(&self, z: C64) -> Result<f64> {
        check_interior(z)?;
        let g = self.eval(z);
        Ok((1.0 - g.norm_sqr()) / self.deriv(z).norm())
    }

    /// H(U ∖ K; e^{iθ}, z) = |g'(e^{iθ})| H(U; g(e^{iθ}), g(z)).
    pub fn poisson_kernel(&self, theta: f64, z: C64) -> Result<f64> {
        check_interior(z)?;
        let x = C64::cis(theta);
        let gx = self.eval(x);
        let gz = self.eval(z);
        Ok(self.deriv(x).norm() * (1.0 - gz.norm_sqr()) / (gz - gx).norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn conformal_radius_examples() {
        assert_eq!(conformal_radius_disc(c(0.0, 0.0)).unwrap(), 1.0);
        assert!((conformal_radius_disc(c(0.6, 0.0)).unwrap() - 0.64).abs() < 1e-15);
        assert!((conformal_radius_disc(c(0.3, 0.4)).unwrap() - 0.75).abs() < 1e-15);
        assert!(conformal_radius_disc(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn poisson_examples() {
        assert!((poisson_kernel_interior(1.234, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((poisson_kernel_interior(0.0, c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-14);
        assert!((poisson_kernel_interior(PI, c(0.5, 0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(poisson_kernel_interior(0.0, c(0.0, 1.5)).is_err());
        assert!((boundary_poisson(0.0, PI).unwrap() - 0.25).abs() < 1e-15);
        assert!((boundary_poisson(0.0, PI / 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((boundary_poisson(0.7, 0.7 + PI / 2.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(boundary_poisson(1.0, 1.0 + 2.0 * PI).is_err());
    }

    #[test]
    fn mobius_examples() {
        let id = mobius_to_origin(c(0.0, 0.0)).unwrap();
        assert_eq!(id.eval(c(0.3, -0.2)), c(0.3, -0.2));
        let m = mobius_to_origin(c(0.5, 0.0)).unwrap();
        assert!(m.eval(c(0.5, 0.0)).norm() < 1e-15);
        assert!((m.deriv(c(0.5, 0.0)) - c(4.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn slit_map_depth_to_zero_is_identity() {
        let g = slit_hull_map(SlitHull {
            anchor: 0.4,
            depth: 1e-7,
        })
        .unwrap();
        assert!((g.deriv_at_origin() - 1.0).abs() < 1e-12);
        let z = c(0.1, -0.3);
        assert!((g.eval(z) - z).norm() < 1e-6);
        assert!(slit_hull_map(SlitHull {
            anchor: 0.0,
            depth: 1.0
        })
        .is_err());
        assert!(slit_hull_map(SlitHull {
            anchor: 0.0,
            depth: 0.0
        })
        .is_err());
    }

    #[test]
    fn slit_map_derivative_at_origin_is_at_least_one() {
        for i in 1..50 {
            let depth = i as f64 / 50.0;
            let g = slit_hull_map(SlitHull { anchor: 1.0, depth }).unwrap();
            let d = g.deriv_at_origin();
            assert!(d >= 1.0, "depth {depth}: {d}");
            // Closed form: 1/CR = (1 + r)²/(4r) for r = 1 − depth.
            let r = 1.0 - depth;
            assert!((d - (1.0 + r) * (1.0 + r) / (4.0 * r)).abs() < 1e-12 * d);
            assert!(g.eval(c(0.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn slit_base_maps_around_anchor() {
        let anchor = 2.0;
        let g = slit_hull_map(SlitHull { anchor, depth: 0.4 }).unwrap();
        let (left, right) = g.base_images();
        let (dl, dr) = (wrap_angle(left - anchor), wrap_angle(right - anchor));
        assert!(dl < 0.0 && dr > 0.0);
        assert!((dl + dr).abs() < 1e-12, "symmetric about the anchor");
        // The tip goes to the anchor itself.
        let tip = C64::from_polar(0.6, anchor);
        assert!(wrap_angle(g.eval(tip).arg() - anchor).abs() < 1e-12);
        // Points just off the base land just outside the arc.
        let near = g.boundary_image(anchor + 1e-6);
        assert!(wrap_angle(near - anchor) > dr - 1e-3);
    }

    #[test]
    fn hull_limits_near_the_boundary() {
        // CR and Poisson-kernel ratios against the empty hull tend to 1 as z → x.
        let g = slit_hull_map(SlitHull {
            anchor: 0.0,
            depth: 0.5,
        })
        .unwrap();
        let x = 2.5;
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let z = C64::from_polar(1.0 - 10f64.powi(-k), x);
            let cr = g.conformal_radius(z).unwrap() / conformal_radius_disc(z).unwrap();
            let pk = g.poisson_kernel(x, z).unwrap() / poisson_kernel_interior(x, z).unwrap();
            let dev = (cr - 1.0).abs().max((pk - 1.0).abs());
            assert!(dev < prev, "k={k}: {dev} {prev}");
            prev = dev;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn poisson_to_boundary_poisson_limit() {
        let (x, y) = (0.3, 2.0);
        for k in 2..7 {
            let eps = 10f64.powi(-k);
            let z = C64::from_polar(1.0 - eps, y);
            let ratio = poisson_kernel_interior(x, z).unwrap()
                / (conformal_radius_disc(z).unwrap() * boundary_poisson(x, y).unwrap());
            assert!((ratio - 1.0).abs() < 10.0 * eps, "k={k}: {ratio}");
        }
    }

    fn random_mobius() -> impl Strategy<Value = DiscMobius> {
        (0.0..0.9f64, -PI..PI, -PI..PI).prop_map(|(r, a, rot)| DiscMobius {
            z0: C64::from_polar(r, a),
            rotation: rot,
        })
    }

    proptest! {
        #[test]
        fn mobius_boundary_identity(m in random_mobius(), u in -PI..PI, v in -PI..PI) {
            let (zu, zv) = (C64::cis(u), C64::cis(v));
            let lhs = (m.eval(zu) - m.eval(zv)).norm();
            let rhs = (m.deriv(zu).norm() * m.deriv(zv).norm()).sqrt() * (zu - zv).norm();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn poisson_kernel_covariance(m in random_mobius(), theta in -PI..PI, zr in 0.0..0.9f64, za in -PI..PI) {
            let z = C64::from_polar(zr, za);
            let lhs = m.boundary_stretch(theta) * poisson_kernel_interior(m.eval_angle(theta), m.eval(z)).unwrap();
            let rhs = poisson_kernel_interior(theta, z).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn conformal_radius_covariance(m in random_mobius(), zr in 0.0..0.9f64, za in -PI..PI) {
            let z = C64::from_polar(zr, za);
            // φ(U) = U, so CR(U; φ(z)) = |φ'(z)| CR(U; z).
            let lhs = conformal_radius_disc(m.eval(z)).unwrap();
            let rhs = m.deriv(z).norm() * conformal_radius_disc(z).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
