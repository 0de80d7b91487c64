//! Error functionals and summary statistics used by the experiment harness.

use crate::estimator::EstimateResult;
use crate::stats;
use crate::{Error, Result};

/// Composite trapezoid rule on a (not necessarily uniform) grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `∫_0^1 |estimate - truth|` by the trapezoid rule on the result grid.
pub fn l1_error(result: &EstimateResult) -> Result<f64> {
    if result.xs.len() < 2 {
        return Err(Error::arg("grid", "need at least 2 grid points"));
    }
    let abs_err: alloc::vec::Vec<f64> = result
        .estimates
        .iter()
        .zip(&result.truth)
        .map(|(e, t)| libm::fabs(e - t))
        .collect();
    Ok(trapezoid(&result.xs, &abs_err))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the regression residuals.
    pub stderr: f64,
}

/// Least-squares fit of `log(error)` against `log(n)`.
pub fn rate_fit(ns: &[f64], errors: &[f64]) -> Result<RateFit> {
    if ns.len() != errors.len() {
        return Err(Error::arg("errors", "one error per ladder point is required"));
    }
    if ns.len() < 3 {
        return Err(Error::arg("n_ladder", "a rate fit needs at least 3 ladder points"));
    }
    if errors.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::arg("errors", "errors must be positive and finite"));
    }
    if ns.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(Error::arg("n_ladder", "intensities must be positive and finite"));
    }
    let lx: alloc::vec::Vec<f64> = ns.iter().map(|&n| libm::log(n)).collect();
    let ly: alloc::vec::Vec<f64> = errors.iter().map(|&e| libm::log(e)).collect();
    let m = lx.len() as f64;
    let mx = stats::mean(&lx);
    let my = stats::mean(&ly);
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("n_ladder", "ladder points must not all coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = libm::sqrt(ssr / (m - 2.0) / sxx);
    Ok(RateFit { slope, intercept, stderr })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// KS distance to `N(0, sigma²)`.
    pub ks: f64,
}

/// Moments of standardized statistics and their KS distance to a centered
/// Gaussian with variance `sigma_sq`.
pub fn normality_stats(samples: &[f64], sigma_sq: f64) -> Result<NormalityStats> {
    if samples.len() < 100 {
        return Err(Error::arg("samples", "need at least 100 samples"));
    }
    if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
        return Err(Error::arg("sigma_sq", "target variance must be positive"));
    }
    let variance = stats::variance(samples);
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::Degenerate("standardized sample has zero variance"));
    }
    let sd = libm::sqrt(sigma_sq);
    Ok(NormalityStats {
        mean: stats::mean(samples),
        variance,
        skewness: stats::skewness(samples),
        ks: stats::ks_distance(samples, |z| stats::normal_cdf(z / sd)),
    })
}
