//! Cell partition, cell maxima and the kernel frontier estimators.
//!
//! With cells `I_r = [(r-1)/k, r/k)` (the last one closed at 1), centers
//! `x_r` and per-cell maxima `X*_r`, the estimators evaluated here are
//!
//! * raw: `f̂(x) = (1/k) Σ_r K_h(x - x_r) X*_r`
//! * bias-corrected: `f̃(x) = (1/k) Σ_r K_h(x - x_r) (X*_r + Z)` with
//!   `Z = Σ_r X*_r / (n - k)`
//! * edge-corrected: `f̃` with the kernel reflected at 0 and 1,
//!   `K_h(x - x_r) + K_h(x + x_r) + K_h(x + x_r - 2)`
//! * Geffroy: `X*_{r(x)}`, the piecewise-constant special case.

use alloc::vec;
use alloc::vec::Vec;

use crate::frontier::FrontierSpec;
use crate::kernel::{cell_center, check_bandwidth, contributing_cells, KernelSpec};
use crate::simulate::{Point, PointSet};
use crate::{Error, Result};

/// Zero-based index of the cell containing `x`; half-open cells, the last
/// one closed, abscissae outside `[0, 1]` clamped to the end cells.
#[inline]
pub fn cell_of(x: f64, k: usize) -> usize {
    let r = libm::floor(x * k as f64);
    if r.is_nan() || r < 0.0 {
        0
    } else {
        (r as usize).min(k - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    k: usize,
    measures: Vec<f64>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl CellPartition {
    pub fn new(spec: &FrontierSpec, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("k", "need at least one cell"));
        }
        let mut measures = Vec::with_capacity(k);
        let mut mins = Vec::with_capacity(k);
        let mut maxs = Vec::with_capacity(k);
        for r in 0..k {
            let (a, b) = interval(r, k);
            measures.push(spec.integral(a, b)?);
            let (lo, hi) = spec.range_on(a, b);
            mins.push(lo);
            maxs.push(hi);
        }
        Ok(CellPartition { k, measures, mins, maxs })
    }

    pub fn cells(&self) -> usize {
        self.k
    }

    /// Center of the zero-based cell `r`.
    pub fn center(&self, r: usize) -> f64 {
        cell_center(r, self.k)
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(|r| self.center(r))
    }

    pub fn interval(&self, r: usize) -> (f64, f64) {
        interval(r, self.k)
    }

    /// `λ_{n,r}`, the area of the strip above cell `r`.
    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    /// `m_{n,r}`, the minimum of `f` on each cell.
    pub fn cell_mins(&self) -> &[f64] {
        &self.mins
    }

    /// `M_{n,r}`, the maximum of `f` on each cell.
    pub fn cell_maxs(&self) -> &[f64] {
        &self.maxs
    }

    pub fn cell_of(&self, x: f64) -> usize {
        cell_of(x, self.k)
    }
}

fn interval(r: usize, k: usize) -> (f64, f64) {
    (r as f64 / k as f64, (r + 1) as f64 / k as f64)
}

pub fn make_partition(spec: &FrontierSpec, k: usize) -> Result<CellPartition> {
    CellPartition::new(spec, k)
}

/// Highest ordinate per cell; zero for empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMaxima {
    values: Vec<f64>,
    empty_cells: Vec<usize>,
}

impl CellMaxima {
    pub fn from_points(points: &[Point], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("k", "need at least one cell"));
        }
        let mut values = vec![0.0; k];
        let mut seen = vec![false; k];
        for p in points {
            let r = cell_of(p.x, k);
            seen[r] = true;
            if p.y > values[r] {
                values[r] = p.y;
            }
        }
        let empty_cells = (0..k).filter(|&r| !seen[r]).collect();
        Ok(CellMaxima { values, empty_cells })
    }

    /// Maxima given directly, e.g. from a closed-form draw. Zeros are
    /// treated as empty cells.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::arg("values", "need at least one cell"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::arg("values", "maxima must be finite and nonnegative"));
        }
        let empty_cells = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 0.0)
            .map(|(r, _)| r)
            .collect();
        Ok(CellMaxima { values, empty_cells })
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn empty_cells(&self) -> &[usize] {
        &self.empty_cells
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn cell_maxima(points: &PointSet, partition: &CellPartition) -> Result<CellMaxima> {
    CellMaxima::from_points(&points.points, partition.cells())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Correction {
    Raw,
    BiasCorrected,
    EdgeCorrected,
}

impl Correction {
    pub fn name(self) -> &'static str {
        match self {
            Correction::Raw => "raw",
            Correction::BiasCorrected => "bias",
            Correction::EdgeCorrected => "edge",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "raw" => Ok(Correction::Raw),
            "bias" | "bias_corrected" => Ok(Correction::BiasCorrected),
            "edge" | "edge_corrected" => Ok(Correction::EdgeCorrected),
            other => Err(Error::arg("correction", alloc::format!("unknown correction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub kernel: KernelSpec,
    pub bandwidth: f64,
    pub cells: usize,
    pub correction: Correction,
}

impl EstimatorConfig {
    pub fn new(kernel: KernelSpec, bandwidth: f64, cells: usize, correction: Correction) -> Self {
        EstimatorConfig { kernel, bandwidth, cells, correction }
    }

    /// Checks the configuration against the intensity `n` it will be used with.
    pub fn validate(&self, n: f64) -> Result<()> {
        check_bandwidth(self.bandwidth)?;
        if self.cells == 0 {
            return Err(Error::arg("k", "need at least one cell"));
        }
        if self.correction != Correction::Raw && (n.is_nan() || n <= self.cells as f64) {
            return Err(Error::Config(alloc::format!(
                "bias correction needs n > k (n = {n}, k = {})",
                self.cells
            )));
        }
        if self.correction == Correction::EdgeCorrected && !self.kernel.is_compact() {
            return Err(Error::UnsupportedKernel {
                kernel: self.kernel.name(),
                reason: "edge correction needs a compactly supported kernel",
            });
        }
        Ok(())
    }
}

/// `Z = Σ_r X*_r / (n - k)`.
pub fn bias_correction_zn(maxima: &CellMaxima, n: f64) -> Result<f64> {
    let k = maxima.cells() as f64;
    if n.is_nan() || n <= k {
        return Err(Error::Config(alloc::format!(
            "bias correction needs n > k (n = {n}, k = {k})"
        )));
    }
    Ok(maxima.sum() / (n - k))
}

/// An estimator bound to one realization. `Z` is computed once here and
/// reused for every evaluation point.
#[derive(Debug, Clone)]
pub struct Estimator<'a> {
    maxima: &'a CellMaxima,
    config: EstimatorConfig,
    zn: f64,
}

impl<'a> Estimator<'a> {
    pub fn new(maxima: &'a CellMaxima, config: EstimatorConfig, n: f64) -> Result<Self> {
        config.validate(n)?;
        if maxima.cells() != config.cells {
            return Err(Error::Config(alloc::format!(
                "maxima have {} cells but the configuration asks for {}",
                maxima.cells(),
                config.cells
            )));
        }
        let zn = match config.correction {
            Correction::Raw => 0.0,
            _ => bias_correction_zn(maxima, n)?,
        };
        Ok(Estimator { maxima, config, zn })
    }

    /// Raw estimator only; no intensity needed.
    pub fn raw(maxima: &'a CellMaxima, kernel: KernelSpec, bandwidth: f64) -> Result<Self> {
        let config = EstimatorConfig::new(kernel, bandwidth, maxima.cells(), Correction::Raw);
        Self::new(maxima, config, f64::INFINITY)
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn zn(&self) -> f64 {
        self.zn
    }

    // (1/k) Σ_r K_h(t - x_r) X*_r  and  (1/k) Σ_r K_h(t - x_r)
    #[inline]
    fn sums(&self, t: f64) -> (f64, f64) {
        let k = self.config.cells;
        let h = self.config.bandwidth;
        let kernel = &self.config.kernel;
        let values = self.maxima.values();
        let mut weighted = 0.0;
        let mut mass = 0.0;
        for r in contributing_cells(t, kernel.reach() * h, k) {
            let w = kernel.eval((t - cell_center(r, k)) / h);
            weighted += w * values[r];
            mass += w;
        }
        let scale = 1.0 / (h * k as f64);
        (weighted * scale, mass * scale)
    }

    /// `f̂(x)`
    pub fn fhat(&self, x: f64) -> f64 {
        self.sums(x).0
    }

    /// `(1/k) Σ_r K_h(x - x_r)`, the kernel Riemann sum.
    pub fn kernel_mass(&self, x: f64) -> f64 {
        self.sums(x).1
    }

    /// `f̃(x) = f̂(x) + Z (1/k) Σ_r K_h(x - x_r)`
    pub fn ftilde(&self, x: f64) -> f64 {
        let (weighted, mass) = self.sums(x);
        weighted + self.zn * mass
    }

    /// `f̌(x)`; the catalog kernels are symmetric, so the reflected terms are
    /// the plain sums at `-x` and `2 - x`.
    pub fn fcheck(&self, x: f64) -> f64 {
        [x, -x, 2.0 - x]
            .into_iter()
            .map(|t| {
                let (weighted, mass) = self.sums(t);
                weighted + self.zn * mass
            })
            .sum()
    }

    /// The variant selected by the configuration.
    pub fn eval(&self, x: f64) -> f64 {
        match self.config.correction {
            Correction::Raw => self.fhat(x),
            Correction::BiasCorrected => self.ftilde(x),
            Correction::EdgeCorrected => self.fcheck(x),
        }
    }
}

pub fn estimate_fhat(maxima: &CellMaxima, cfg: &EstimatorConfig, x: f64) -> Result<f64> {
    Ok(Estimator::raw(maxima, cfg.kernel, cfg.bandwidth)?.fhat(x))
}

pub fn estimate_geffroy(maxima: &CellMaxima, x: f64) -> f64 {
    maxima.values()[cell_of(x, maxima.cells())]
}

pub fn estimate_ftilde(maxima: &CellMaxima, cfg: &EstimatorConfig, n: f64, x: f64) -> Result<f64> {
    let cfg = EstimatorConfig { correction: Correction::BiasCorrected, ..*cfg };
    Ok(Estimator::new(maxima, cfg, n)?.ftilde(x))
}

pub fn estimate_fcheck(maxima: &CellMaxima, cfg: &EstimatorConfig, n: f64, x: f64) -> Result<f64> {
    let cfg = EstimatorConfig { correction: Correction::EdgeCorrected, ..*cfg };
    Ok(Estimator::new(maxima, cfg, n)?.fcheck(x))
}

/// Estimates on an equispaced grid over `[0, 1]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub xs: Vec<f64>,
    pub estimates: Vec<f64>,
    pub truth: Vec<f64>,
    pub config: EstimatorConfig,
    pub intensity: f64,
    pub zn: f64,
}

pub fn grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::arg("grid", "need at least 2 grid points"));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 / last).collect())
}

pub fn evaluate_on_grid(
    points: &PointSet,
    spec: &FrontierSpec,
    cfg: &EstimatorConfig,
    grid_size: usize,
) -> Result<EstimateResult> {
    let xs = grid(grid_size)?;
    let maxima = CellMaxima::from_points(&points.points, cfg.cells)?;
    let estimator = Estimator::new(&maxima, *cfg, points.intensity)?;
    Ok(evaluate_estimator(&estimator, spec, xs, points.intensity))
}

pub fn evaluate_estimator(
    estimator: &Estimator<'_>,
    spec: &FrontierSpec,
    xs: Vec<f64>,
    intensity: f64,
) -> EstimateResult {
    let estimates = xs.iter().map(|&x| estimator.eval(x)).collect();
    let truth = xs.iter().map(|&x| spec.eval(x)).collect();
    EstimateResult {
        xs,
        estimates,
        truth,
        config: *estimator.config(),
        intensity,
        zn: estimator.zn(),
    }
}
