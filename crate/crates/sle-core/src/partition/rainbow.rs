//! Rainbow partition functions for n ∈ {1, 2} and κ ∈ (4, 8) by Coulomb-gas
//! quadrature on real segments.
//!
//! For κ ∈ (4, 8) the screening integrals converge on the segments themselves,
//! so the loop contours collapse to line integrals with endpoint weights
//! |u − x|^{−4/κ}. These are integrated with Gauss–Jacobi rules; pieces are
//! graded geometrically toward endpoints that sit close to another marked point.
//!
//! With U(x₁, …, x₄) the integral with screening charges on [x₁, x₂] and
//! [x₃, x₄] and V its image under a Möbius map cycling the points,
//! the rainbow function is ν(νV − U)/(ν² − 1) with ν = −2cos(4π/κ).

use super::{exponents, PartitionValue};
use crate::error::{Result, SleError};
use crate::special::gamma_signed;
use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use std::f64::consts::PI;
use std::num::NonZeroUsize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RainbowOptions {
    /// Nodes per piece on the first pass.
    pub degree: usize,
    /// Relative agreement required between successive degree doublings.
    pub tol: f64,
    pub max_degree: usize,
}

impl Default for RainbowOptions {
    fn default() -> Self {
        RainbowOptions {
            degree: 24,
            tol: 1e-8,
            max_degree: 192,
        }
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

struct Rules {
    left: Vec<(f64, f64)>,
    right: Vec<(f64, f64)>,
    inner: Vec<(f64, f64)>,
}

impl Rules {
    fn new(deg: usize, expo: f64) -> Result<Rules> {
        let d = NonZeroUsize::new(deg).ok_or_else(|| SleError::Domain("degree must be positive".into()))?;
        let e = FiniteAboveNegOneF64::new(expo).ok_or_else(|| SleError::Domain(format!("exponent {expo} ≤ −1")))?;
        let zero = FiniteAboveNegOneF64::new(0.0).expect("0 > −1");
        // Jacobi weight (1 − x)^α (1 + x)^β: β sits at the left end.
        Ok(Rules {
            left: GaussJacobi::new(d, zero, e).as_node_weight_pairs().to_vec(),
            right: GaussJacobi::new(d, e, zero).as_node_weight_pairs().to_vec(),
            inner: GaussLegendre::new(d).as_node_weight_pairs().to_vec(),
        })
    }
}

/// Rule for ∫_a^b (u − a)^e (b − u)^e f(u) du, graded toward an end whose
/// nearest outside singularity lies at distance `gl` (left) or `gr` (right).
fn graded_rule(rules: &Rules, a: f64, b: f64, expo: f64, gl: f64, gr: f64) -> Rule {
    let len = b - a;
    let mid = a + len / 2.0;
    let mut bps = vec![a, mid, b];
    if gl < len / 4.0 {
        let mut s = gl.max(len * 1e-12);
        while a + s < mid {
            bps.push(a + s);
            s *= 2.0;
        }
    }
    if gr < len / 4.0 {
        let mut s = gr.max(len * 1e-12);
        while b - s > mid {
            bps.push(b - s);
            s *= 2.0;
        }
    }
    bps.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    bps.dedup();
    let mut rule = Rule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for w in bps.windows(2) {
        let (p, q) = (w[0], w[1]);
        let half = (q - p) / 2.0;
        let (pairs, first, last) = if p == a {
            (&rules.left, true, false)
        } else if q == b {
            (&rules.right, false, true)
        } else {
            (&rules.inner, false, false)
        };
        for &(x, wt) in pairs {
            let u = p + half * (1.0 + x);
            let weight = if first {
                wt * half.powf(1.0 + expo) * (b - u).powf(expo)
            } else if last {
                wt * half.powf(1.0 + expo) * (u - a).powf(expo)
            } else {
                wt * half * ((u - a) * (b - u)).powf(expo)
            };
            rule.nodes.push(u);
            rule.weights.push(weight);
        }
    }
    rule
}

fn screening_norm(kappa: f64) -> Result<f64> {
    let a = 4.0 / kappa;
    Ok((gamma_signed(2.0 - 2.0 * a)? / (gamma_signed(1.0 - a)? * gamma_signed(1.0 - a)?)).value())
}

/// Two-charge integral with charges on [p₀, p₁] and [p₂, p₃], p₀ < p₁ < p₂ < p₃.
fn coulomb_u(p: [f64; 4], kappa: f64, rules: &Rules) -> f64 {
    let a = 4.0 / kappa;
    let gap = p[2] - p[1];
    let r1 = graded_rule(rules, p[0], p[1], -a, f64::INFINITY, gap);
    let r2 = graded_rule(rules, p[2], p[3], -a, gap, f64::INFINITY);
    let outer1: Vec<f64> = r1
        .nodes
        .iter()
        .zip(&r1.weights)
        .map(|(&u, &w)| w * ((p[2] - u) * (p[3] - u)).powf(-a))
        .collect();
    let outer2: Vec<f64> = r2
        .nodes
        .iter()
        .zip(&r2.weights)
        .map(|(&u, &w)| w * ((u - p[0]) * (u - p[1])).powf(-a))
        .collect();
    let mut total = 0.0;
    for (u1, w1) in r1.nodes.iter().zip(&outer1) {
        let mut inner = 0.0;
        for (u2, w2) in r2.nodes.iter().zip(&outer2) {
            inner += w2 * (u2 - u1).powf(2.0 * a);
        }
        total += w1 * inner;
    }
    let mut pref = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            pref += (p[j] - p[i]).ln();
        }
    }
    let n1 = screening_norm(kappa).expect("checked by caller");
    n1 * n1 * (2.0 / kappa * pref).exp() * total
}

fn rainbow2_at_degree(x: [f64; 4], kappa: f64, deg: usize) -> Result<f64> {
    let b = exponents(kappa)?.b;
    let rules = Rules::new(deg, -4.0 / kappa)?;
    let u = coulomb_u(x, kappa, &rules);
    let c = (x[0] + x[1]) / 2.0;
    let phi = |t: f64| -1.0 / (t - c);
    let jac: f64 = x.iter().map(|&t| -2.0 * b * (t - c).abs().ln()).sum();
    let v = jac.exp() * coulomb_u([phi(x[1]), phi(x[2]), phi(x[3]), phi(x[0])], kappa, &rules);
    let nu = -2.0 * (4.0 * PI / kappa).cos();
    Ok(nu * (nu * v - u) / (nu * nu - 1.0))
}

fn rainbow1_at_degree(x: f64, y: f64, kappa: f64, deg: usize) -> Result<f64> {
    let rules = Rules::new(deg, -4.0 / kappa)?;
    let r = graded_rule(&rules, x, y, -4.0 / kappa, f64::INFINITY, f64::INFINITY);
    let integral: f64 = r.weights.iter().sum();
    Ok(screening_norm(kappa)? * (y - x).powf(2.0 / kappa) * integral)
}

fn validate(kappa: f64, starts: &[f64], ends: &[f64]) -> Result<()> {
    if !(kappa > 4.0 && kappa < 8.0) {
        return Err(SleError::Domain(format!(
            "rainbow quadrature needs κ ∈ (4, 8), got {kappa}"
        )));
    }
    if starts.len() != ends.len() || !(1..=2).contains(&starts.len()) {
        return Err(SleError::Domain("rainbow quadrature supports n ∈ {1, 2}".into()));
    }
    let mut pts: Vec<f64> = starts.to_vec();
    pts.extend(ends.iter().rev());
    if !pts.windows(2).all(|w| w[0] < w[1]) || pts.iter().any(|p| !p.is_finite()) {
        return Err(SleError::Domain("need x¹ < … < xⁿ < yⁿ < … < y¹".into()));
    }
    if starts.len() == 2 && (4.0 * (4.0 * PI / kappa).cos().powi(2) - 1.0).abs() < 1e-12 {
        return Err(SleError::Pole {
            what: "rainbow basis change ν² − 1".into(),
            arg: kappa,
        });
    }
    Ok(())
}

/// Value of the rainbow partition function with degree doubling until convergence.
pub fn rainbow_value(kappa: f64, starts: &[f64], ends: &[f64], opts: RainbowOptions) -> Result<f64> {
    validate(kappa, starts, ends)?;
    let eval = |deg: usize| match starts.len() {
        1 => rainbow1_at_degree(starts[0], ends[0], kappa, deg),
        _ => rainbow2_at_degree([starts[0], starts[1], ends[1], ends[0]], kappa, deg),
    };
    let mut deg = opts.degree;
    let mut prev = eval(deg)?;
    while deg * 2 <= opts.max_degree {
        deg *= 2;
        let cur = eval(deg)?;
        if (cur - prev).abs() <= opts.tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(SleError::Accuracy(format!(
        "rainbow quadrature did not reach relative {} by degree {}",
        opts.tol, opts.max_degree
    )))
}

/// Rainbow partition function with a finite-difference gradient in
/// (x¹, …, xⁿ, y¹, …, yⁿ).
pub fn rainbow_numeric(kappa: f64, starts: &[f64], ends: &[f64], opts: RainbowOptions) -> Result<PartitionValue> {
    let z = rainbow_value(kappa, starts, ends, opts)?;
    let mut all: Vec<f64> = starts.to_vec();
    all.extend_from_slice(ends);
    let n = starts.len();
    let mut sorted = all.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("validated"));
    let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let h = 1e-4 * gap;
    let mut grad = Vec::with_capacity(all.len());
    for k in 0..all.len() {
        let mut p = all.clone();
        let mut m = all.clone();
        p[k] += h;
        m[k] -= h;
        let zp = rainbow_value(kappa, &p[..n], &p[n..], opts)?;
        let zm = rainbow_value(kappa, &m[..n], &m[n..], opts)?;
        grad.push((zp.abs().ln() - zm.abs().ln()) / (2.0 * h));
    }
    Ok(PartitionValue {
        log_abs: z.abs().ln(),
        phase: if z < 0.0 { PI } else { 0.0 },
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{chordal_bpz_residual, fusion_constant, z_fusion_halfplane, z_shuffle};
    use super::*;
    use crate::special::hyp2f1_at_one;

    /// ₂F₁(a, b; c; w) by its power series, |w| < 1.
    fn hyp2f1_series(a: f64, b: f64, c: f64, w: f64) -> f64 {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 0..20000 {
            let k = k as f64;
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    /// Closed form for n = 2 via the connection formula at 1 − w.
    fn rainbow2_oracle(x: [f64; 4], kappa: f64) -> f64 {
        let b = (6.0 - kappa) / (2.0 * kappa);
        let w = (x[2] - x[1]) * (x[3] - x[0]) / ((x[2] - x[0]) * (x[3] - x[1]));
        let (a1, b1, c1) = (4.0 / kappa, 1.0 - 4.0 / kappa, 8.0 / kappa);
        let g = |t: f64| gamma_signed(t).unwrap().value();
        let ratio = g(a1 + b1 - c1) * g(c1 - a1) * g(c1 - b1) / (g(a1) * g(b1) * g(c1 - a1 - b1));
        // F(1−w)/F(1)
        let f = hyp2f1_series(a1, b1, a1 + b1 - c1 + 1.0, w)
            + ratio * w.powf(c1 - a1 - b1) * hyp2f1_series(c1 - a1, c1 - b1, c1 - a1 - b1 + 1.0, w);
        (x[3] - x[0]).powf(-2.0 * b) * (x[2] - x[1]).powf(-2.0 * b) * (1.0 - w).powf(2.0 / kappa) * f
    }

    #[test]
    fn oracle_normalization() {
        // As the inner pair merges the oracle factorizes.
        let k = 5.0;
        let f1 = hyp2f1_at_one(4.0 / k, 1.0 - 4.0 / k, 8.0 / k).unwrap();
        assert!(f1 > 0.0);
        let x = [0.0, 1.0, 1.0 + 1e-9, 3.0];
        let b = (6.0 - k) / (2.0 * k);
        let r = rainbow2_oracle(x, k) / (3f64.powf(-2.0 * b) * 1e-9f64.powf(-2.0 * b));
        assert!((r - 1.0).abs() < 1e-4, "{r}");
    }

    #[test]
    fn one_curve_closed_form() {
        let k = 5.0;
        let b = exponents(k).unwrap().b;
        let z = rainbow_value(k, &[0.3], &[1.9], RainbowOptions::default()).unwrap();
        assert!((z / 1.6f64.powf(-2.0 * b) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn one_curve_scaling() {
        let k = 5.5;
        let b = exponents(k).unwrap().b;
        let o = RainbowOptions::default();
        let z1 = rainbow_value(k, &[0.2], &[0.9], o).unwrap();
        let z2 = rainbow_value(k, &[0.2 * 3.0], &[0.9 * 3.0], o).unwrap();
        assert!((z2 / z1 - 3f64.powf(-2.0 * b)).abs() < 1e-9);
    }

    #[test]
    fn two_curves_against_hypergeometric_oracle() {
        for &k in &[4.5, 5.0, 5.5, 7.0] {
            for x in [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.2, 0.5, 4.0], [0.0, 0.9, 1.2, 1.5]] {
                let z = rainbow_value(k, &[x[0], x[1]], &[x[3], x[2]], RainbowOptions::default()).unwrap();
                let o = rainbow2_oracle(x, k);
                assert!((z / o - 1.0).abs() < 1e-7, "κ={k} x={x:?}: {z} vs {o}");
            }
        }
    }

    #[test]
    fn two_curves_scaling() {
        let k = 5.0;
        let b = exponents(k).unwrap().b;
        let o = RainbowOptions::default();
        let z1 = rainbow_value(k, &[0.0, 1.0], &[3.0, 2.0], o).unwrap();
        let z2 = rainbow_value(k, &[0.0, 2.0], &[6.0, 4.0], o).unwrap();
        assert!((z2 / z1 - 2f64.powf(-4.0 * b)).abs() < 1e-8);
    }

    #[test]
    fn two_curves_chordal_bpz() {
        let k = 5.0;
        let eval = |u: &[f64]| {
            rainbow_value(
                k,
                &[u[0], u[1]],
                &[u[3], u[2]],
                RainbowOptions {
                    tol: 1e-12,
                    ..Default::default()
                },
            )
        };
        for j in 0..4 {
            let r = chordal_bpz_residual(eval, &[0.0, 1.0, 2.0, 3.5], j, k, 1e-3).unwrap();
            assert!(r.abs() < 1e-3, "slot {j}: {r}");
        }
    }

    #[test]
    fn fusion_limit_n2() {
        let k = 5.0;
        let a2 = fusion_constant(2, k).unwrap();
        let (x1, x2, y) = (0.0, 0.5, 1.0);
        let target = a2 * z_fusion_halfplane(k, &[x1, x2], y).unwrap().log_abs.exp();
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025] {
            let z = rainbow_value(k, &[x1, x2], &[y + eps / 2.0, y - eps / 2.0], RainbowOptions::default()).unwrap();
            let shuffle = z_shuffle(k, &[y - eps / 2.0, y + eps / 2.0]).unwrap().log_abs.exp();
            let dev = (z / shuffle / target - 1.0).abs();
            assert!(dev < prev, "ε={eps}: {dev}");
            prev = dev;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let o = RainbowOptions::default();
        assert!(rainbow_value(3.0, &[0.0], &[1.0], o).is_err());
        assert!(rainbow_value(5.0, &[0.0, 2.0], &[3.0, 1.0], o).is_err());
        assert!(matches!(
            rainbow_value(6.0, &[0.0, 1.0], &[3.0, 2.0], o),
            Err(SleError::Pole { .. })
        ));
    }
}
