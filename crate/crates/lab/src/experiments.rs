//! Replicated Monte Carlo experiments.
//!
//! Every replicate is an independent task seeded from
//! `(master_seed, ladder index, replicate index)`; results are collected in
//! replicate order and reduced sequentially, so reports do not depend on the
//! number of worker threads.
//!
//! The centered statistic `s_n(x) = (f̂(x) - E f̂(x)) / σ_n` is computed in two
//! passes: the first pass stores `f̂(x)` for every replicate, the second
//! centers at the cross-replicate mean. `t_n(x) = (f̃(x) - f(x)) / σ_n` uses
//! the true frontier.

use frontier_core::asymptotics::{
    confidence_interval, normalization, regime_report, select_hyperparams, AsymptoticParams,
    Hyperparams, RegimeReport, SelectorMode, Situation,
};
use frontier_core::estimator::{grid, CellMaxima, Correction, Estimator, EstimatorConfig};
use frontier_core::metrics::{l1_error, normality_stats, rate_fit, NormalityStats};
use frontier_core::rng::substream_seed;
use frontier_core::simulate::{sample, SamplingMode};
use frontier_core::{stats, FrontierSpec, KernelSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, ReplicateFailure};

pub const REPORT_SCHEMA: &str = "frontier-lab/experiment-report/v1";
/// Declared tolerance on fitted L1 slopes.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Declared relative band on the variance of standardized statistics.
pub const VARIANCE_BAND: f64 = 0.15;
pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MseRaw,
    MseCorrected,
}

impl From<Mode> for SelectorMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::MseRaw => SelectorMode::MseRaw,
            Mode::MseCorrected => SelectorMode::MseCorrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Selector { mode: Mode },
    /// One `(k, h)` pair per ladder point.
    Explicit { cells: Vec<usize>, bandwidths: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionKind {
    Raw,
    Bias,
    Edge,
}

impl From<CorrectionKind> for Correction {
    fn from(c: CorrectionKind) -> Self {
        match c {
            CorrectionKind::Raw => Correction::Raw,
            CorrectionKind::Bias => Correction::BiasCorrected,
            CorrectionKind::Edge => Correction::EdgeCorrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Poisson,
    Binomial,
}

impl From<Sampling> for SamplingMode {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Poisson => SamplingMode::Poisson,
            Sampling::Binomial => SamplingMode::Binomial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    L1,
    Pointwise,
    Coverage,
    Normality,
    VectorNormality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub frontier: String,
    pub kernel: String,
    pub alpha: f64,
    pub schedule: Schedule,
    pub correction: CorrectionKind,
    pub sampling: Sampling,
    pub n_ladder: Vec<f64>,
    pub replicates: usize,
    pub grid: usize,
    pub master_seed: u64,
    pub statistics: Vec<Statistic>,
    /// Abscissae for pointwise, normality and coverage statistics.
    pub points: Vec<f64>,
    pub coverage_levels: Vec<f64>,
}

impl ExperimentPlan {
    /// A plan with the defaults used throughout: biweight kernel, α = 1,
    /// bias-corrected estimator with its selector, Poisson sampling, 512-point
    /// grid, L1 statistics only, evaluation point 1/2 and 95% coverage.
    pub fn new(frontier: &str, n_ladder: Vec<f64>, replicates: usize, master_seed: u64) -> Self {
        ExperimentPlan {
            frontier: frontier.to_string(),
            kernel: "biweight".to_string(),
            alpha: 1.0,
            schedule: Schedule::Selector { mode: Mode::MseCorrected },
            correction: CorrectionKind::Bias,
            sampling: Sampling::Poisson,
            n_ladder,
            replicates,
            grid: DEFAULT_GRID,
            master_seed,
            statistics: vec![Statistic::L1],
            points: vec![0.5],
            coverage_levels: vec![0.95],
        }
    }

    fn wants(&self, s: Statistic) -> bool {
        self.statistics.contains(&s)
    }

    /// Hyperparameters at every ladder point.
    pub fn hyperparams(&self) -> Result<Vec<Hyperparams>, LabError> {
        match &self.schedule {
            Schedule::Selector { mode } => self
                .n_ladder
                .iter()
                .map(|&n| select_hyperparams(n, self.alpha, (*mode).into()).map_err(LabError::from))
                .collect(),
            Schedule::Explicit { cells, bandwidths } => {
                if cells.len() != self.n_ladder.len() || bandwidths.len() != self.n_ladder.len() {
                    return Err(LabError::validation(
                        "schedule",
                        "explicit schedules need one (k, h) pair per ladder point",
                    ));
                }
                Ok(cells
                    .iter()
                    .zip(bandwidths)
                    .map(|(&k, &h)| Hyperparams { k, h })
                    .collect())
            }
        }
    }

    /// Checks the plan and returns the resolved frontier, kernel and
    /// per-level hyperparameters.
    pub fn resolve(&self) -> Result<(FrontierSpec, KernelSpec, Vec<Hyperparams>), LabError> {
        let spec = FrontierSpec::from_name(&self.frontier)
            .map_err(|e| LabError::validation("frontier", e.to_string()))?;
        let kernel = KernelSpec::from_name(&self.kernel)
            .map_err(|e| LabError::validation("kernel", e.to_string()))?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(LabError::validation("alpha", "need 0 < alpha <= 1"));
        }
        if self.n_ladder.is_empty() {
            return Err(LabError::validation("n_ladder", "ladder is empty"));
        }
        if self.n_ladder.iter().any(|n| !(n.is_finite() && *n >= 2.0)) {
            return Err(LabError::validation("n_ladder", "intensities must be finite and >= 2"));
        }
        if self.n_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::validation("n_ladder", "ladder must be strictly increasing"));
        }
        if self.replicates < 2 {
            return Err(LabError::validation("replicates", "need at least 2 replicates"));
        }
        if self.grid < 2 {
            return Err(LabError::validation("grid", "need at least 2 grid points"));
        }
        if self.statistics.is_empty() {
            return Err(LabError::validation("statistics", "no statistic requested"));
        }
        if self.points.is_empty() || self.points.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(LabError::validation("points", "need abscissae in [0, 1]"));
        }
        if self.coverage_levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return Err(LabError::validation("coverage_levels", "levels must lie in (0, 1)"));
        }
        if self.correction == CorrectionKind::Edge && !kernel.is_compact() {
            return Err(LabError::validation(
                "correction",
                format!("edge correction needs a compact kernel, not {}", kernel.name()),
            ));
        }
        let hps = self.hyperparams()?;
        for (&n, hp) in self.n_ladder.iter().zip(&hps) {
            if hp.k == 0 || (hp.k as f64) >= n {
                return Err(LabError::validation("k", format!("need 1 <= k < n, got k = {} at n = {n}", hp.k)));
            }
            if !(hp.h.is_finite() && hp.h > 0.0) {
                return Err(LabError::validation("h", format!("bandwidth must be positive, got {}", hp.h)));
            }
            if self.sampling == Sampling::Binomial && n.fract() != 0.0 {
                return Err(LabError::validation("n_ladder", "binomial sampling needs integer n"));
            }
        }
        if self.wants(Statistic::VectorNormality) {
            let mut pts = self.points.clone();
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            if pts.len() < 2 {
                return Err(LabError::validation("points", "vector normality needs at least 2 distinct points"));
            }
            let Some(radius) = kernel.support_radius() else {
                return Err(LabError::validation(
                    "kernel",
                    "vector normality needs a compact kernel (disjoint supports)",
                ));
            };
            let widest = hps.iter().map(|hp| hp.h).fold(0.0, f64::max);
            let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if gap <= 2.0 * radius * widest {
                return Err(LabError::validation(
                    "points",
                    format!("points {gap} apart overlap kernel supports of half-width {}", radius * widest),
                ));
            }
        }
        Ok((spec, kernel, hps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime {
    pub situation: &'static str,
    pub h_k_alpha: f64,
    pub h_k_beta: f64,
    pub h_k: f64,
    pub k_log_n_over_n: f64,
    pub n_over_k_power: f64,
    pub corrected_bias_proxy: f64,
    pub corrected_z_proxy: f64,
    pub warnings: Vec<String>,
}

impl From<RegimeReport> for Regime {
    fn from(r: RegimeReport) -> Self {
        Regime {
            situation: match r.situation {
                Situation::A => "A",
                Situation::B => "B",
                Situation::Neither => "none",
            },
            h_k_alpha: r.ratios.h_k_alpha,
            h_k_beta: r.ratios.h_k_beta,
            h_k: r.ratios.h_k,
            k_log_n_over_n: r.ratios.k_log_n_over_n,
            n_over_k_power: r.ratios.n_over_k_power,
            corrected_bias_proxy: r.ratios.corrected_bias_proxy,
            corrected_z_proxy: r.ratios.corrected_z_proxy,
            warnings: r.warnings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Summary {
    pub errors: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub x: f64,
    pub truth: f64,
    pub mean_fhat: f64,
    pub sd_fhat: f64,
    pub mean_ftilde: f64,
    pub sd_ftilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normality {
    pub x: f64,
    pub mean: f64,
    pub variance: f64,
    pub target_variance: f64,
    pub variance_ratio: f64,
    pub skewness: f64,
    pub ks: f64,
    pub ks_critical_1pct: f64,
}

impl Normality {
    fn new(x: f64, s: NormalityStats, target_variance: f64, samples: usize) -> Self {
        Normality {
            x,
            mean: s.mean,
            variance: s.variance,
            target_variance,
            variance_ratio: s.variance / target_variance,
            skewness: s.skewness,
            ks: s.ks,
            ks_critical_1pct: stats::ks_critical_1pct(samples),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub x: f64,
    pub level: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub n: f64,
    pub k: usize,
    pub h: f64,
    pub sigma_n: f64,
    pub sigma: f64,
    pub regime: Regime,
    pub l1: Option<L1Summary>,
    pub pointwise: Vec<PointSummary>,
    /// Normality of `s_n(x)`, centered at the Monte Carlo mean of `f̂(x)`.
    pub normality_s: Vec<Normality>,
    /// Normality of `t_n(x)`, centered at the true frontier.
    pub normality_t: Vec<Normality>,
    pub coverage: Vec<Coverage>,
    /// Correlation matrix of `(s_n(y_1), …, s_n(y_q))`.
    pub correlation: Option<Vec<Vec<f64>>>,
    /// The raw per-replicate standardized values `s_n(x)` for each point.
    #[serde(skip)]
    pub s_samples: Vec<Vec<f64>>,
    #[serde(skip)]
    pub t_samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub slope: f64,
    pub variance_band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub plan: ExperimentPlan,
    pub tolerances: Tolerances,
    pub levels: Vec<LevelReport>,
    pub rate: Option<RateReport>,
}

struct Replicate {
    l1: f64,
    fhat: Vec<f64>,
    ftilde: Vec<f64>,
}

struct Level<'a> {
    index: usize,
    n: f64,
    spec: &'a FrontierSpec,
    config: EstimatorConfig,
    correction: Correction,
    xs: &'a [f64],
    truth: &'a [f64],
}

impl Level<'_> {
    fn run(&self, plan: &ExperimentPlan, replicate: usize) -> frontier_core::Result<Replicate> {
        let seed = substream_seed(plan.master_seed, &[self.index as u64, replicate as u64]);
        let points = sample(self.spec, plan.sampling.into(), self.n, seed)?;
        let maxima = CellMaxima::from_points(&points.points, self.config.cells)?;
        let estimator = Estimator::new(&maxima, self.config, self.n)?;
        let estimate = |x: f64| match self.correction {
            Correction::Raw => estimator.fhat(x),
            Correction::BiasCorrected => estimator.ftilde(x),
            Correction::EdgeCorrected => estimator.fcheck(x),
        };
        let l1 = if plan.wants(Statistic::L1) {
            let result = frontier_core::estimator::EstimateResult {
                xs: self.xs.to_vec(),
                estimates: self.xs.iter().map(|&x| estimate(x)).collect(),
                truth: self.truth.to_vec(),
                config: self.config,
                intensity: self.n,
                zn: estimator.zn(),
            };
            l1_error(&result)?
        } else {
            0.0
        };
        Ok(Replicate {
            l1,
            fhat: plan.points.iter().map(|&x| estimator.fhat(x)).collect(),
            ftilde: plan.points.iter().map(|&x| estimator.ftilde(x)).collect(),
        })
    }
}

/// Runs the plan on `workers` threads (the global rayon pool when `None`).
pub fn run_replicates(plan: &ExperimentPlan, workers: Option<usize>) -> Result<ExperimentReport, LabError> {
    match workers {
        Some(w) => {
            if w == 0 {
                return Err(LabError::validation("workers", "need at least one worker"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| LabError::validation("workers", e.to_string()))?;
            pool.install(|| run(plan))
        }
        None => run(plan),
    }
}

fn run(plan: &ExperimentPlan) -> Result<ExperimentReport, LabError> {
    let (spec, kernel, hps) = plan.resolve()?;
    let xs = grid(plan.grid)?;
    let truth: Vec<f64> = xs.iter().map(|&x| spec.eval(x)).collect();
    let correction: Correction = plan.correction.into();
    let mut levels = Vec::with_capacity(plan.n_ladder.len());
    for (index, (&n, hp)) in plan.n_ladder.iter().zip(&hps).enumerate() {
        // Z is always needed for f̃ at the evaluation points
        let stored = if correction == Correction::EdgeCorrected {
            Correction::EdgeCorrected
        } else {
            Correction::BiasCorrected
        };
        let level = Level {
            index,
            n,
            spec: &spec,
            config: EstimatorConfig::new(kernel, hp.h, hp.k, stored),
            correction,
            xs: &xs,
            truth: &truth,
        };
        let outcomes: Vec<_> = (0..plan.replicates)
            .into_par_iter()
            .map(|r| level.run(plan, r))
            .collect();
        let mut failures = Vec::new();
        let mut replicates = Vec::with_capacity(outcomes.len());
        for (replicate, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(r) => replicates.push(r),
                Err(error) => failures.push(ReplicateFailure { n, replicate, error }),
            }
        }
        if !failures.is_empty() {
            return Err(LabError::Replicates(failures));
        }
        let params = normalization(n, hp.k, hp.h, &kernel, spec.normalizer())?;
        let regime = regime_report(n, hp.k, hp.h, plan.alpha, &kernel)?;
        levels.push(summarize(plan, &spec, params, regime, &replicates)?);
    }
    let rate = if plan.wants(Statistic::L1) && levels.len() >= 3 {
        let ns: Vec<f64> = levels.iter().map(|l| l.n).collect();
        let means: Vec<f64> = levels.iter().filter_map(|l| l.l1.as_ref().map(|s| s.mean)).collect();
        let fit = rate_fit(&ns, &means)?;
        let target = target_slope(correction, plan.alpha);
        Some(RateReport {
            slope: fit.slope,
            stderr: fit.stderr,
            intercept: fit.intercept,
            target,
            tolerance: SLOPE_TOLERANCE,
            pass: (fit.slope - target).abs() <= SLOPE_TOLERANCE,
        })
    } else {
        None
    };
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA,
        plan: plan.clone(),
        tolerances: Tolerances {
            slope: SLOPE_TOLERANCE,
            variance_band: VARIANCE_BAND,
        },
        levels,
        rate,
    })
}

/// L1 slope the estimator should attain: raw `-α/(1+3α/2)`, corrected `-α/(1+5α/4)`.
pub fn target_slope(correction: Correction, alpha: f64) -> f64 {
    match correction {
        Correction::Raw => SelectorMode::MseRaw.target_slope(alpha),
        _ => SelectorMode::MseCorrected.target_slope(alpha),
    }
}

fn column(replicates: &[Replicate], i: usize, pick: fn(&Replicate) -> &Vec<f64>) -> Vec<f64> {
    replicates.iter().map(|r| pick(r)[i]).collect()
}

fn summarize(
    plan: &ExperimentPlan,
    spec: &FrontierSpec,
    params: AsymptoticParams,
    regime: RegimeReport,
    replicates: &[Replicate],
) -> Result<LevelReport, LabError> {
    let r = replicates.len();
    let l1 = plan.wants(Statistic::L1).then(|| {
        let errors: Vec<f64> = replicates.iter().map(|x| x.l1).collect();
        L1Summary {
            mean: stats::mean(&errors),
            stderr: stats::std_error(&errors),
            min: errors.iter().copied().fold(f64::INFINITY, f64::min),
            max: errors.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            errors,
        }
    });

    let target_variance = params.sigma * params.sigma;
    let mut pointwise = Vec::new();
    let mut normality_s = Vec::new();
    let mut normality_t = Vec::new();
    let mut coverage = Vec::new();
    let mut s_samples = Vec::new();
    let mut t_samples = Vec::new();
    for (i, &x) in plan.points.iter().enumerate() {
        let fhat = column(replicates, i, |r| &r.fhat);
        let ftilde = column(replicates, i, |r| &r.ftilde);
        let truth = spec.eval(x);
        let center = stats::mean(&fhat);
        let s: Vec<f64> = fhat.iter().map(|v| (v - center) / params.sigma_n).collect();
        let t: Vec<f64> = ftilde.iter().map(|v| (v - truth) / params.sigma_n).collect();
        if plan.wants(Statistic::Pointwise) {
            pointwise.push(PointSummary {
                x,
                truth,
                mean_fhat: center,
                sd_fhat: stats::variance(&fhat).sqrt(),
                mean_ftilde: stats::mean(&ftilde),
                sd_ftilde: stats::variance(&ftilde).sqrt(),
            });
        }
        if plan.wants(Statistic::Normality) {
            normality_s.push(Normality::new(x, normality_stats(&s, target_variance)?, target_variance, r));
            normality_t.push(Normality::new(x, normality_stats(&t, target_variance)?, target_variance, r));
        }
        if plan.wants(Statistic::Coverage) {
            for &level in &plan.coverage_levels {
                let mut hits = 0usize;
                for &v in &ftilde {
                    let (lo, hi) = confidence_interval(v, &params, level)?;
                    if lo <= truth && truth <= hi {
                        hits += 1;
                    }
                }
                coverage.push(Coverage {
                    x,
                    level,
                    frequency: hits as f64 / r as f64,
                });
            }
        }
        s_samples.push(s);
        t_samples.push(t);
    }
    let correlation = plan
        .wants(Statistic::VectorNormality)
        .then(|| stats::correlation_matrix(&s_samples));
    Ok(LevelReport {
        n: params.n,
        k: params.k,
        h: params.h,
        sigma_n: params.sigma_n,
        sigma: params.sigma,
        regime: regime.into(),
        l1,
        pointwise,
        normality_s,
        normality_t,
        coverage,
        correlation,
        s_samples,
        t_samples,
    })
}

/// Correlation matrix of `s_n` at `points`, from the last ladder level.
pub fn vector_normality(
    plan: &ExperimentPlan,
    points: &[f64],
    workers: Option<usize>,
) -> Result<Vec<Vec<f64>>, LabError> {
    let mut plan = plan.clone();
    plan.points = points.to_vec();
    plan.statistics = vec![Statistic::VectorNormality];
    let report = run_replicates(&plan, workers)?;
    Ok(report
        .levels
        .last()
        .and_then(|l| l.correlation.clone())
        .expect("vector normality requested"))
}

/// Fraction of replicates whose interval around `f̃(point)` covers `f(point)`,
/// at the last ladder level.
pub fn coverage_test(
    plan: &ExperimentPlan,
    point: f64,
    level: f64,
    workers: Option<usize>,
) -> Result<f64, LabError> {
    let mut plan = plan.clone();
    plan.points = vec![point];
    plan.coverage_levels = vec![level];
    plan.statistics = vec![Statistic::Coverage];
    let report = run_replicates(&plan, workers)?;
    Ok(report.levels.last().map(|l| l.coverage[0].frequency).expect("one level"))
}
