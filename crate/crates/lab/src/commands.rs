//! The four CLI commands. Each returns the lines it wants printed on stdout.

use std::path::PathBuf;

use frontier_core::asymptotics::{
    normalization, plug_in_normalizer, regime_report, select_hyperparams, Hyperparams,
};
use frontier_core::estimator::{evaluate_estimator, grid, CellMaxima, Estimator, EstimatorConfig};
use frontier_core::metrics::l1_error;
use frontier_core::simulate::{sample, PointSet};
use frontier_core::stats::normal_quantile;
use frontier_core::{FrontierSpec, KernelSpec};
use serde::Serialize;

use crate::config::{Command, Hyper, RunConfig};
use crate::error::LabError;
use crate::experiments::{
    run_replicates, ExperimentPlan, ExperimentReport, Regime, Schedule, Statistic,
};
use crate::io;

pub const SUMMARY_SCHEMA: &str = "frontier-lab/estimate-summary/v1";

pub fn run(cfg: &RunConfig) -> Result<Vec<String>, LabError> {
    match cfg.command {
        Command::Simulate => cmd_simulate(cfg),
        Command::Estimate => cmd_estimate(cfg),
        Command::Experiment => cmd_experiment(cfg),
        Command::Rates => cmd_rates(cfg),
    }
}

fn frontier(cfg: &RunConfig) -> Result<FrontierSpec, LabError> {
    FrontierSpec::from_name(&cfg.frontier).map_err(|e| LabError::validation("frontier", e.to_string()))
}

fn simulate(cfg: &RunConfig, spec: &FrontierSpec, n: f64) -> Result<PointSet, LabError> {
    Ok(sample(spec, cfg.sampling.into(), n, cfg.seed.unwrap_or(0))?)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<String>, LabError> {
    let spec = frontier(cfg)?;
    let n = cfg.n.ok_or_else(|| LabError::validation("n", "simulate needs --n"))?;
    let points = simulate(cfg, &spec, n)?;
    let path = io::write_points(&cfg.output_dir, &points)?;
    Ok(vec![format!("wrote {} points to {}", points.len(), path.display())])
}

#[derive(Debug, Serialize)]
pub struct EstimateSummary {
    pub schema: &'static str,
    pub frontier: String,
    pub kernel: &'static str,
    pub correction: &'static str,
    pub n: f64,
    pub points: usize,
    pub k: usize,
    pub h: f64,
    pub l1_error: f64,
    pub sigma_n: f64,
    pub sigma: f64,
    pub zn: f64,
    pub plug_in_normalizer: Option<f64>,
    pub level: f64,
    pub ci_half_width: f64,
    pub regime: Regime,
}

fn hyperparams(cfg: &RunConfig, n: f64) -> Result<Hyperparams, LabError> {
    match cfg.hyper {
        Hyper::Explicit { k, h } => Ok(Hyperparams { k, h }),
        Hyper::Selector(mode) => Ok(select_hyperparams(n, cfg.alpha, mode.into())?),
    }
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<Vec<String>, LabError> {
    let spec = frontier(cfg)?;
    let (points, n) = match &cfg.input {
        Some(path) => {
            let points = io::read_points(path)?;
            let n = match (cfg.n, io::read_points_meta(path)?) {
                (Some(n), _) => n,
                (None, Some(meta)) => meta.n,
                (None, None) => {
                    return Err(LabError::validation("n", "no metadata sidecar next to the input; give --n"))
                }
            };
            (points, n)
        }
        None => {
            let n = cfg.n.ok_or_else(|| LabError::validation("n", "estimate needs --input or --n"))?;
            (simulate(cfg, &spec, n)?.points, n)
        }
    };
    let kernel = KernelSpec::from_name(&cfg.kernel).map_err(|e| LabError::validation("kernel", e.to_string()))?;
    let hp = hyperparams(cfg, n)?;
    let config = EstimatorConfig::new(kernel, hp.h, hp.k, cfg.correction.into());
    config
        .validate(n)
        .map_err(|e| LabError::validation("k", e.to_string()))?;
    let maxima = CellMaxima::from_points(&points, hp.k)?;
    let estimator = Estimator::new(&maxima, config, n)?;
    let result = evaluate_estimator(&estimator, &spec, grid(cfg.grid)?, n);
    let params = normalization(n, hp.k, hp.h, &kernel, spec.normalizer())?;
    let regime = regime_report(n, hp.k, hp.h, cfg.alpha, &kernel)?;
    let summary = EstimateSummary {
        schema: SUMMARY_SCHEMA,
        frontier: spec.id().to_string(),
        kernel: kernel.name(),
        correction: config.correction.name(),
        n,
        points: points.len(),
        k: hp.k,
        h: hp.h,
        l1_error: l1_error(&result)?,
        sigma_n: params.sigma_n,
        sigma: params.sigma,
        zn: result.zn,
        plug_in_normalizer: plug_in_normalizer(&result).ok(),
        level: cfg.level,
        ci_half_width: normal_quantile(0.5 * (1.0 + cfg.level)) * params.scale(),
        regime: regime.into(),
    };
    let path = io::write_estimate(&cfg.output_dir, &result)?;
    io::write_json(&cfg.output_dir.join(io::SUMMARY_FILE), &summary)?;
    let mut out = vec![
        format!("wrote {} grid values to {}", result.xs.len(), path.display()),
        format!("k = {}, h = {}, L1 error = {:.6}", hp.k, hp.h, summary.l1_error),
    ];
    out.extend(summary.regime.warnings.iter().map(|w| format!("warning: {w}")));
    Ok(out)
}

pub fn plan(cfg: &RunConfig) -> Result<ExperimentPlan, LabError> {
    let seed = cfg
        .seed
        .ok_or_else(|| LabError::validation("seed", "experiments need an explicit --seed"))?;
    let schedule = match cfg.hyper {
        Hyper::Selector(mode) => Schedule::Selector { mode },
        Hyper::Explicit { k, h } => Schedule::Explicit {
            cells: vec![k; cfg.n_ladder.len()],
            bandwidths: vec![h; cfg.n_ladder.len()],
        },
    };
    let mut statistics = cfg.stats.clone();
    if cfg.command == Command::Rates && !statistics.contains(&Statistic::L1) {
        statistics.insert(0, Statistic::L1);
    }
    Ok(ExperimentPlan {
        frontier: cfg.frontier.clone(),
        kernel: cfg.kernel.clone(),
        alpha: cfg.alpha,
        schedule,
        correction: cfg.correction,
        sampling: cfg.sampling,
        n_ladder: cfg.n_ladder.clone(),
        replicates: cfg.replicates,
        grid: cfg.grid,
        master_seed: seed,
        statistics,
        points: cfg.points.clone(),
        coverage_levels: cfg.levels.clone(),
    })
}

fn experiment(cfg: &RunConfig) -> Result<(ExperimentReport, PathBuf), LabError> {
    let plan = plan(cfg)?;
    let report = run_replicates(&plan, cfg.workers)?;
    io::write_report(&cfg.output_dir, &report)?;
    Ok((report, cfg.output_dir.join(io::REPORT_FILE)))
}

pub fn cmd_experiment(cfg: &RunConfig) -> Result<Vec<String>, LabError> {
    let (report, path) = experiment(cfg)?;
    let mut out = vec![format!("wrote {}", path.display())];
    for level in &report.levels {
        if let Some(l1) = &level.l1 {
            out.push(format!(
                "n = {}: k = {}, h = {:.5}, mean L1 = {:.6} ± {:.6}",
                level.n, level.k, level.h, l1.mean, l1.stderr
            ));
        }
    }
    Ok(out)
}

pub fn cmd_rates(cfg: &RunConfig) -> Result<Vec<String>, LabError> {
    if cfg.n_ladder.len() < 3 {
        return Err(LabError::validation("n_ladder", "a rate fit needs at least 3 ladder points"));
    }
    let (report, path) = experiment(cfg)?;
    let rate = report.rate.expect("L1 collected on a ladder of 3 or more");
    let verdict = if rate.pass { "PASS" } else { "FAIL" };
    let line = format!(
        "fitted slope {:.4} ± {:.4}, target {:.4}, tolerance {}: {verdict}",
        rate.slope, rate.stderr, rate.target, rate.tolerance
    );
    if rate.pass {
        Ok(vec![format!("wrote {}", path.display()), line])
    } else {
        Err(LabError::Threshold(line))
    }
}
