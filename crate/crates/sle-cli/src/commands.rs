//! Subcommand implementations. Each returns whether its gated checks passed.

use crate::config::{ExperimentConfig, Purpose};
use crate::{CliError, FnArg, PresetArg, SchemeArg};
use serde::Serialize;
use serde_json::{json, Value};
use sle_core::loewner::{trace_curves, write_traces_csv, AngleConfig};
use sle_core::par::Exec;
use sle_core::partition::{
    rainbow_numeric, z_fusion, z_fusion_halfplane, z_multiradial, z_radial_rho, z_shuffle, PartitionValue,
    RainbowOptions,
};
use sle_core::rng::mix;
use sle_core::samplers::{
    sample_multiradial_common, sample_radial_sle, sample_radial_sle_rho, sample_watermelon_driver, BesselParams,
    DrivingRecord, SleParams,
};
use sle_core::verify::{self, McConfig, Preset, Report, Staircase};
use sle_core::SleError;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleScheme {
    Radial,
    Rho,
    Multiradial,
    Watermelon,
}

pub fn scheme_of(s: SchemeArg) -> SampleScheme {
    match s {
        SchemeArg::Radial => SampleScheme::Radial,
        SchemeArg::Rho => SampleScheme::Rho,
        SchemeArg::Multiradial => SampleScheme::Multiradial,
        SchemeArg::Watermelon => SampleScheme::Watermelon,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Function {
    ZMultiradial,
    ZRadialRho,
    ZFusion,
    ZFusionHalfplane,
    ZShuffle,
    Rainbow,
}

pub fn function_of(f: FnArg) -> Function {
    match f {
        FnArg::ZMultiradial => Function::ZMultiradial,
        FnArg::ZRadialRho => Function::ZRadialRho,
        FnArg::ZFusion => Function::ZFusion,
        FnArg::ZFusionHalfplane => Function::ZFusionHalfplane,
        FnArg::ZShuffle => Function::ZShuffle,
        FnArg::Rainbow => Function::Rainbow,
    }
}

pub fn preset_of(p: PresetArg) -> Preset {
    match p {
        PresetArg::Desk => Preset::Desk,
        PresetArg::Smoke => Preset::Smoke,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Martingale,
    Slice,
    TwoTime,
    Resampling,
    Transience,
    Bessel,
    Fusion,
    GapDecay,
    Coupling,
    CommonTime,
}

fn missing(field: &'static str, what: &str) -> CliError {
    crate::config::ConfigError::Invalid {
        field,
        msg: format!("required {what}"),
    }
    .into()
}

/// Writes `value` as pretty JSON to `out`, or to stdout.
fn emit(value: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn numbered(base: &Path, i: usize, n: usize) -> PathBuf {
    if n == 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "drive".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{i:04}.{ext}"))
}

fn default_scheme(cfg: &ExperimentConfig) -> SampleScheme {
    match (cfg.angles().len(), cfg.rho().is_empty()) {
        (1, true) => SampleScheme::Radial,
        (_, false) => SampleScheme::Rho,
        _ => SampleScheme::Multiradial,
    }
}

fn sample_one(
    scheme: SampleScheme,
    cfg: &ExperimentConfig,
    steps: usize,
    seed: u64,
) -> Result<DrivingRecord, CliError> {
    let (kappa, mu, dt) = (cfg.kappa(), cfg.mu(), cfg.dt());
    let angles = cfg.angles();
    Ok(match scheme {
        SampleScheme::Radial => sample_radial_sle(&SleParams::radial(kappa, mu), angles[0], dt, steps, seed)?,
        SampleScheme::Rho => {
            let params = SleParams::new(kappa, mu, cfg.rho().to_vec(), 1)?;
            sample_radial_sle_rho(&params, &AngleConfig::new(angles.to_vec())?, dt, steps, seed)?
        }
        SampleScheme::Multiradial => {
            let params = SleParams::new(kappa, mu, Vec::new(), angles.len())?;
            sample_multiradial_common(&params, &AngleConfig::new(angles.to_vec())?, &[], dt, steps, seed)?
        }
        SampleScheme::Watermelon => {
            let target = cfg.target.ok_or_else(|| missing("target", "boundary target angle"))?;
            let starts = AngleConfig::new(angles.to_vec())?;
            sample_watermelon_driver(kappa, mu, angles.len(), &starts, target, dt, steps, seed)?.record
        }
    })
}

/// Samples `n_paths` records; path i uses seed mix(seed, i).
pub fn sample(mut cfg: ExperimentConfig, scheme: Option<crate::commands::SampleScheme>) -> Result<bool, CliError> {
    cfg.n_paths.get_or_insert(1);
    let mut cfg = cfg.resolve(Purpose::Sample)?;
    let scheme = scheme.unwrap_or_else(|| default_scheme(&cfg));
    if scheme == SampleScheme::Rho && cfg.rho().len() + 1 != cfg.angles().len() {
        return Err(crate::config::ConfigError::Invalid {
            field: "rho",
            msg: format!(
                "{} weights for {} force points",
                cfg.rho().len(),
                cfg.angles().len() - 1
            ),
        }
        .into());
    }
    let steps = match (cfg.steps, cfg.t) {
        (Some(s), _) => s,
        (None, Some(t)) => (t / cfg.dt()).round() as usize,
        (None, None) => 1000,
    };
    cfg.steps = Some(steps);
    let out = cfg.out.get_or_insert_with(|| PathBuf::from("drive.csv")).clone();
    let n = cfg.n_paths();
    let mut files = Vec::with_capacity(n);
    for i in 0..n {
        let record = sample_one(scheme, &cfg, steps, mix(cfg.seed(), i as u64))?;
        let path = numbered(&out, i, n);
        record.write(&path)?;
        files.push(path);
    }
    let manifest = out.with_extension("config.json");
    emit(
        &json!({ "scheme": format!("{scheme:?}").to_lowercase(), "config": cfg, "files": files }),
        Some(&manifest),
    )?;
    eprintln!("wrote {n} record(s); run config in {}", manifest.display());
    Ok(true)
}

pub fn trace(input: &Path, stride: usize, out: Option<&Path>) -> Result<bool, CliError> {
    let record = DrivingRecord::read(input)?;
    let traces = trace_curves(&record, stride.max(1))?;
    match out {
        Some(path) => write_traces_csv(&traces, std::fs::File::create(path)?)?,
        None => write_traces_csv(&traces, std::io::stdout().lock())?,
    }
    Ok(true)
}

fn evaluate(function: Function, cfg: &ExperimentConfig) -> Result<PartitionValue, CliError> {
    let kappa = cfg.kappa();
    let starts = || cfg.starts.clone().ok_or_else(|| missing("starts", "real start points"));
    let target = || cfg.target.ok_or_else(|| missing("target", "target point"));
    Ok(match function {
        Function::ZMultiradial => z_multiradial(kappa, cfg.mu(), &AngleConfig::new(cfg.angles().to_vec())?)?,
        Function::ZRadialRho => z_radial_rho(kappa, cfg.mu(), cfg.rho(), &AngleConfig::new(cfg.angles().to_vec())?)?,
        Function::ZFusion => z_fusion(kappa, &AngleConfig::new(cfg.angles().to_vec())?, target()?)?,
        Function::ZFusionHalfplane => z_fusion_halfplane(kappa, &starts()?, target()?)?,
        Function::ZShuffle => z_shuffle(kappa, &starts()?)?,
        Function::Rainbow => {
            let ends = cfg
                .ends
                .clone()
                .ok_or_else(|| missing("ends", "real end points, outermost first"))?;
            rainbow_numeric(kappa, &starts()?, &ends, RainbowOptions::default())?
        }
    })
}

pub fn eval(function: Function, cfg: ExperimentConfig) -> Result<bool, CliError> {
    let cfg = cfg.resolve(Purpose::Evaluate)?;
    let v = evaluate(function, &cfg)?;
    let out = cfg.out.clone();
    emit(
        &json!({ "function": function, "config": cfg, "log_abs": v.log_abs, "phase": v.phase, "grad": v.grad }),
        out.as_deref(),
    )?;
    Ok(true)
}

/// Fills check-specific defaults for fields the user left unset.
fn defaults(mut cfg: ExperimentConfig, dt: f64, t: f64) -> ExperimentConfig {
    cfg.dt.get_or_insert(dt);
    cfg.t.get_or_insert(t);
    cfg
}

fn run_check(check: Check, cfg: &ExperimentConfig, mc: &McConfig) -> Result<Report, SleError> {
    let (kappa, mu) = (cfg.kappa(), cfg.mu());
    let t = cfg.t.unwrap_or(1.0);
    let angles = || AngleConfig::new(cfg.angles().to_vec());
    let rho_params = || SleParams {
        kappa,
        mu,
        rho: cfg.rho().to_vec(),
        p: cfg.angles().len(),
    };
    Ok(match check {
        Check::Martingale => verify::check_spiral_martingale(kappa, mu, cfg.angles()[0], t, mc)?.into(),
        Check::Slice => verify::check_slice_martingale(kappa, mu, &angles()?, t, mc)?.into(),
        Check::TwoTime => {
            let sched = Staircase {
                total_capacity: cfg.total_capacity.unwrap_or(0.4),
                bursts: cfg.bursts.unwrap_or(8),
            };
            verify::check_two_time_martingale(kappa, mu, &angles()?, sched, cfg.tolerance.unwrap_or(3.0), mc)?.into()
        }
        Check::Resampling => verify::check_resampling_marginal(kappa, mu, &angles()?, t, mc)?.into(),
        Check::Transience => verify::check_transience(
            kappa,
            mu,
            cfg.rho(),
            &angles()?,
            cfg.horizon.unwrap_or(5),
            cfg.stride.unwrap_or(16),
            mc,
        )?
        .into(),
        Check::Bessel => {
            let bp = BesselParams {
                alpha: cfg.alpha.unwrap_or(2.0),
                kappa,
                mu,
                x0: cfg.x0.unwrap_or(0.2),
            };
            let eps = cfg.epsilons.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05]);
            verify::fit_hitting_exponent(&bp, &eps, t, cfg.tolerance.unwrap_or(0.15), mc)?.into()
        }
        Check::Fusion => {
            let starts = cfg.starts.clone().unwrap_or_else(|| vec![0.0]);
            let eps = cfg.epsilons.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
            let y = cfg.target.unwrap_or(1.0);
            verify::check_fusion_limit(starts.len(), kappa, &starts, y, &eps, RainbowOptions::default())?.into()
        }
        Check::GapDecay => verify::check_gap_decay(&rho_params(), &angles()?, t, mc)?.into(),
        Check::Coupling => verify::check_coupling(&rho_params(), &angles()?, t, mc)?.into(),
        Check::CommonTime => verify::check_common_time(
            kappa,
            mu,
            &angles()?,
            t,
            cfg.stride.unwrap_or(1),
            cfg.tolerance.unwrap_or(1e-6),
            mc,
        )?
        .into(),
    })
}

pub fn verify(check: Check, cfg: ExperimentConfig) -> Result<bool, CliError> {
    let (purpose, dt, t) = match check {
        Check::Martingale => (Purpose::General, 1e-4, 1.0),
        Check::Slice => (Purpose::General, 1e-4, 0.5),
        Check::TwoTime => (Purpose::General, 1e-3, 0.0),
        Check::Resampling => (Purpose::General, 1e-3, 0.5),
        Check::Transience => (Purpose::Transient, 1e-3, 0.0),
        Check::Bessel => (Purpose::General, 1e-3, 1.0),
        Check::Fusion => (Purpose::Evaluate, 1e-4, 0.0),
        Check::GapDecay => (Purpose::Transient, 1e-3, 5.0),
        Check::Coupling => (Purpose::Transient, 1e-3, 2.0),
        Check::CommonTime => (Purpose::Transient, 1e-3, 0.3),
    };
    let cfg = defaults(cfg, dt, t).resolve(purpose)?;
    let mut mc = McConfig::new(cfg.n_paths(), cfg.dt(), cfg.seed());
    mc.exec = Exec::Parallel;
    let report = run_check(check, &cfg, &mc)?;
    let pass = report.pass();
    eprintln!("{}: {}", report.name(), if pass { "PASS" } else { "FAIL" });
    emit(&json!({ "config": cfg, "report": report }), cfg.out.as_deref())?;
    Ok(pass)
}

pub fn suite(preset: Preset, seed: u64, out: Option<&Path>) -> Result<bool, CliError> {
    let mut criteria = Vec::with_capacity(10);
    for id in 1..=10u8 {
        let c = verify::run_criterion(id, preset, seed, Exec::Parallel)?;
        eprintln!(
            "criterion {id:>2}: {} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.title
        );
        if let Some(e) = &c.error {
            eprintln!("    {e}");
        }
        criteria.push(c);
    }
    let pass = criteria.iter().all(|c| c.pass);
    let report = verify::SuiteReport {
        preset,
        seed,
        criteria,
        pass,
    };
    emit(
        &json!({ "config": { "preset": preset, "seed": seed }, "report": report }),
        out,
    )?;
    Ok(pass)
}
