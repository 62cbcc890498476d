//! Laws that hold on every path: capacity windows, gap decay, coupling
//! dominance, the common-time clock bounds, and the Bessel hitting exponent fit.

use super::{FitReport, McConfig, PathwiseReport};
use crate::error::{Result, SleError};
use crate::loewner::{joint_chart, trace_curves, AngleConfig, Chart};
use crate::par::map_paths;
use crate::samplers::{
    bessel_running_min, sample_coupled_gap, sample_multiradial_common, sample_radial_sle, sample_radial_sle_rho,
    BesselParams, CouplingStart, SleParams,
};
use crate::stats::linear_fit;
use serde_json::json;

/// Per-path outcome: the worst slack, or None when the path was discarded.
type PathMargin = Option<f64>;

fn tally(
    name: &str,
    params: serde_json::Value,
    runs: Vec<Result<PathMargin>>,
    dt: f64,
    tolerance: f64,
) -> Result<PathwiseReport> {
    let (mut n_ok, mut n_discarded, mut worst) = (0, 0, f64::INFINITY);
    let n_paths = runs.len();
    for r in runs {
        match r? {
            Some(m) => {
                worst = worst.min(m);
                if m >= -tolerance {
                    n_ok += 1;
                }
            }
            None => n_discarded += 1,
        }
    }
    Ok(PathwiseReport {
        name: name.into(),
        params,
        n_paths,
        n_ok,
        n_discarded,
        dt,
        worst_margin: worst,
        tolerance,
        extra: None,
        pass: n_ok == n_paths && n_paths > 0,
    })
}

fn require_transient_regime(kappa: f64, rho: &[f64]) -> Result<()> {
    if !(kappa > 0.0 && kappa <= 4.0) {
        return Err(SleError::Domain(format!("κ = {kappa} outside (0, 4]")));
    }
    if let Some(r) = rho.iter().find(|r| **r < 0.0) {
        return Err(SleError::Domain(format!(
            "ρ = {r} < 0; the transience law needs ρ_j ≥ 0"
        )));
    }
    Ok(())
}

/// First-passage times τ_n = inf{t : |γ_t| ≤ e^{−n}} must satisfy
/// n − log 4 − 0.05 ≤ τ_n ≤ n + 0.05 for n = 1..=horizon on every path.
///
/// `angles[0]` is the curve start; further angles are force points with weights `rho`.
/// The report also carries the fraction of paths with |γ_T| < e^{−horizon} at T = horizon.
pub fn check_transience(
    kappa: f64,
    mu: f64,
    rho: &[f64],
    angles: &AngleConfig,
    horizon: usize,
    stride: usize,
    cfg: &McConfig,
) -> Result<PathwiseReport> {
    require_transient_regime(kappa, rho)?;
    const SLACK: f64 = 0.05;
    let steps = cfg.steps_for(horizon as f64);
    let params = SleParams {
        kappa,
        mu,
        rho: rho.to_vec(),
        p: 1,
    };
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<Option<(f64, bool)>> {
        let seed = cfg.path_seed(i);
        let rec = if rho.is_empty() {
            sample_radial_sle(&params, angles.angles()[0], cfg.dt, steps, seed)?
        } else {
            match sample_radial_sle_rho(&params, angles, cfg.dt, steps, seed) {
                Ok(r) => r,
                Err(SleError::Collision { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        };
        let tr = &trace_curves(&rec, stride)?[0];
        let mut worst = f64::INFINITY;
        for n in 1..=horizon {
            let level = (-(n as f64)).exp();
            let tau = tr
                .times
                .iter()
                .zip(&tr.points)
                .find(|(_, z)| z.norm() <= level)
                .map(|(t, _)| *t);
            let nf = n as f64;
            let m = match tau {
                Some(t) => (t - (nf - 4f64.ln() - SLACK)).min(nf + SLACK - t),
                None => -f64::INFINITY,
            };
            worst = worst.min(m);
        }
        let tip_inside = tr
            .points
            .last()
            .map(|z| z.norm() < (-(horizon as f64)).exp())
            .unwrap_or(false);
        Ok(Some((worst, tip_inside)))
    });
    let mut margins = Vec::with_capacity(runs.len());
    let mut inside = 0usize;
    for r in runs {
        margins.push(r.map(|o| {
            o.map(|(m, t)| {
                inside += t as usize;
                m
            })
        }));
    }
    let mut rep = tally(
        "transience",
        json!({"kappa": kappa, "mu": mu, "rho": rho, "angles": angles.angles(), "horizon": horizon,
               "stride": stride, "slack": SLACK, "seed": cfg.seed}),
        margins,
        cfg.dt,
        0.0,
    )?;
    let used = rep.n_paths - rep.n_discarded;
    rep.extra = Some(json!({"fraction_tip_below_horizon": inside as f64 / used.max(1) as f64}));
    Ok(rep)
}

/// V^p − V² ≤ (V^p_0 − V²_0) e^{−Ct} + 10⁻³ with C = sin(D/2)/D, D = V^p_0 − V²_0,
/// at every grid point of every SLE_κ^μ(ρ) path.
pub fn check_gap_decay(params: &SleParams, angles: &AngleConfig, t_end: f64, cfg: &McConfig) -> Result<PathwiseReport> {
    require_transient_regime(params.kappa, &params.rho)?;
    let a = angles.angles();
    if a.len() < 3 {
        return Err(SleError::Domain("gap decay needs at least two force points".into()));
    }
    let d = a[a.len() - 1] - a[1];
    let c = (d / 2.0).sin() / d;
    let steps = cfg.steps_for(t_end);
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<PathMargin> {
        let rec = match sample_radial_sle_rho(params, angles, cfg.dt, steps, cfg.path_seed(i)) {
            Ok(r) => r,
            Err(SleError::Collision { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let (first, last) = (&rec.force_points[0], &rec.force_points[rec.force_points.len() - 1]);
        let worst = (0..=steps)
            .map(|k| d * (-c * rec.time(k)).exp() + 1e-3 - (last[k] - first[k]))
            .fold(f64::INFINITY, f64::min);
        Ok(Some(worst))
    });
    tally(
        "gap_decay",
        json!({"kappa": params.kappa, "mu": params.mu, "rho": params.rho, "angles": a, "t": t_end,
               "rate": c, "slack": 1e-3, "seed": cfg.seed}),
        runs,
        cfg.dt,
        0.0,
    )
}

/// X ≤ Θ^p from the outer start and X ≥ Θ² from the inner start, at every grid point.
pub fn check_coupling(params: &SleParams, angles: &AngleConfig, t_end: f64, cfg: &McConfig) -> Result<PathwiseReport> {
    const TOL: f64 = 1e-10;
    let steps = cfg.steps_for(t_end);
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<PathMargin> {
        let seed = cfg.path_seed(i);
        let mut worst = f64::INFINITY;
        for start in [CouplingStart::Outer, CouplingStart::Inner] {
            let cp = match sample_coupled_gap(params, angles, start, cfg.dt, steps, seed) {
                Ok(c) => c,
                Err(SleError::Numeric(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let m = match start {
                CouplingStart::Outer => {
                    let th = &cp.theta[cp.theta.len() - 1];
                    th.iter().zip(&cp.x).map(|(t, x)| t - x).fold(f64::INFINITY, f64::min)
                }
                CouplingStart::Inner => {
                    let th = &cp.theta[0];
                    th.iter().zip(&cp.x).map(|(t, x)| x - t).fold(f64::INFINITY, f64::min)
                }
            };
            worst = worst.min(m);
        }
        Ok(Some(worst))
    });
    tally(
        "coupling",
        json!({"kappa": params.kappa, "mu": params.mu, "rho": params.rho, "angles": angles.angles(), "t": t_end,
               "seed": cfg.seed}),
        runs,
        cfg.dt,
        TOL,
    )
}

/// Own capacities of multiradial curves grown in common time t satisfy
/// t ≤ t_j(t) ≤ p t. Each curve is traced from the record and unzipped alone;
/// `tolerance` absorbs the zipper's capacity error.
pub fn check_common_time(
    kappa: f64,
    mu: f64,
    angles: &AngleConfig,
    t_end: f64,
    stride: usize,
    tolerance: f64,
    cfg: &McConfig,
) -> Result<PathwiseReport> {
    let p = angles.len();
    let params = SleParams {
        kappa,
        mu,
        rho: Vec::new(),
        p,
    };
    let steps = cfg.steps_for(t_end);
    let stride = stride.max(1);
    let runs = map_paths(cfg.exec, cfg.n_paths, |i| -> Result<PathMargin> {
        let rec = match sample_multiradial_common(&params, angles, &[], cfg.dt, steps, cfg.path_seed(i)) {
            Ok(r) => r,
            Err(SleError::Collision { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let jc = joint_chart(&rec)?;
        let mut worst = f64::INFINITY;
        for j in 0..p {
            let mut own = Chart::new();
            let mut k = stride;
            while k <= steps {
                let tip = jc.chart.tip_after((k - 1) * p + j);
                let base = own.driving().unwrap_or(angles.angles()[j]);
                own.zip_points(base, &[tip])?;
                let t = rec.time(k);
                let tj = own.capacity();
                worst = worst.min((tj - t).min(p as f64 * t - tj));
                k += stride;
            }
        }
        Ok(Some(worst))
    });
    tally(
        "common_time",
        json!({"kappa": kappa, "mu": mu, "angles": angles.angles(), "t": t_end, "stride": stride, "seed": cfg.seed}),
        runs,
        cfg.dt,
        tolerance,
    )
}

/// Log-log regression of P[min_{t ≤ t0} X_t ≤ ε x0] against ε; the slope is
/// compared with 4α/κ − 1 at relative tolerance `rel_tol`.
pub fn fit_hitting_exponent(
    bp: &BesselParams,
    epsilons: &[f64],
    t0: f64,
    rel_tol: f64,
    cfg: &McConfig,
) -> Result<FitReport> {
    bp.validate()?;
    if epsilons.len() < 3 {
        return Err(SleError::Domain("need at least three ε values".into()));
    }
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    if hi < 4.0 * lo {
        return Err(SleError::Domain("ε values must span at least a factor of 4".into()));
    }
    let floor = lo * bp.x0;
    let mins = map_paths(cfg.exec, cfg.n_paths, |i| {
        bessel_running_min(bp, cfg.dt, t0, floor, cfg.path_seed(i))
    });
    let mins = mins.into_iter().collect::<Result<Vec<f64>>>()?;
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let hits = mins.iter().filter(|&&m| m <= eps * bp.x0).count();
        if hits == 0 {
            return Err(SleError::Inconclusive(format!(
                "no path reached ε = {eps}; raise n_paths or widen ε"
            )));
        }
        points.push((eps.ln(), (hits as f64 / mins.len() as f64).ln()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = linear_fit(&xs, &ys);
    let target = 4.0 * bp.alpha / bp.kappa - 1.0;
    Ok(FitReport {
        name: "bessel_hitting_exponent".into(),
        params: json!({"alpha": bp.alpha, "kappa": bp.kappa, "mu": bp.mu, "x0": bp.x0, "t0": t0,
                       "epsilons": epsilons, "n_paths": cfg.n_paths, "dt": cfg.dt, "seed": cfg.seed}),
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        points,
        target,
        tolerance: rel_tol,
        pass: (fit.slope - target).abs() <= rel_tol * target.abs(),
    })
}
