//! Distributional and asymptotic quantities.
//!
//! The cell maximum has the explicit CDF
//! `F(x) = exp((n c / k) (x - k λ_r))` on `[0, m_r]`; above `M_r` it is 1 and
//! in between it is not determined by the frontier's bounds alone, so
//! [`cell_max_cdf`] answers with an enclosing band there. The remaining
//! functions cover the smoothed frontier `g_n`, its discretization `f_n`,
//! the normalizations `σ_n = √k / (n √h)` and `σ = ‖K‖₂ / c`, the
//! hyperparameter schedules, finite-`n` regime diagnostics and plug-in
//! confidence intervals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::estimator::{CellPartition, EstimateResult};
use crate::frontier::FrontierSpec;
use crate::kernel::{cell_center, check_bandwidth, contributing_cells, KernelSpec, Smoothness};
use crate::metrics::trapezoid;
use crate::quad::{self, Tolerance};
use crate::stats::normal_quantile;
use crate::{Error, Result};

/// Proxies that should diverge are flagged below this value.
pub const DIVERGENT_FLOOR: f64 = 5.0;
/// Proxies that should vanish are flagged above this value.
pub const VANISHING_CEILING: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdfValue {
    Exact(f64),
    /// `F(x)` is only known to lie in `[lo, hi]`.
    Band { lo: f64, hi: f64 },
}

impl CdfValue {
    pub fn exact(self) -> Option<f64> {
        match self {
            CdfValue::Exact(p) => Some(p),
            CdfValue::Band { .. } => None,
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            CdfValue::Exact(p) => (p, p),
            CdfValue::Band { lo, hi } => (lo, hi),
        }
    }
}

/// `P(X*_r <= x)` for the one-based cell index `r`.
pub fn cell_max_cdf(
    spec: &FrontierSpec,
    partition: &CellPartition,
    r: usize,
    n: f64,
    x: f64,
) -> Result<CdfValue> {
    let k = partition.cells();
    if r == 0 || r > k {
        return Err(Error::CellOutOfRange { index: r, cells: k });
    }
    let i = r - 1;
    let rate = n * spec.normalizer() / k as f64;
    let level = k as f64 * partition.measures()[i];
    let (lo, hi) = (partition.cell_mins()[i], partition.cell_maxs()[i]);
    let explicit = || libm::exp(rate * (x - level)).min(1.0);
    Ok(if x < 0.0 {
        CdfValue::Exact(0.0)
    } else if x > hi {
        CdfValue::Exact(1.0)
    } else if x <= lo {
        CdfValue::Exact(explicit())
    } else {
        CdfValue::Band { lo: explicit(), hi: 1.0 }
    })
}

/// Exact mean and variance of a cell maximum when `f ≡ level`, obtained by
/// integrating the survival function of the explicit CDF (with its atom
/// `exp(-n c level / k)` at zero).
pub fn expected_cell_max_flat(level: f64, n: f64, k: usize, c: f64) -> (f64, f64) {
    let rate = n * c / k as f64;
    let atom = libm::exp(-rate * level);
    let mean = level - (1.0 - atom) / rate;
    let variance = (1.0 - atom * atom) / (rate * rate) - 2.0 * level * atom / rate;
    (mean, variance)
}

/// `g_n(x) = ∫ K_h(x - y) f(y) dy` with `f` extended by zero.
pub fn smoothed_frontier(spec: &FrontierSpec, kernel: &KernelSpec, h: f64, x: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let reach = kernel.reach() * h;
    let (a, b) = ((x - reach).max(0.0), (x + reach).min(1.0));
    if b <= a {
        return Ok(0.0);
    }
    let mut breaks: Vec<f64> = kernel
        .breakpoints()
        .iter()
        .map(|u| x - u * h)
        .chain(spec.kinks().iter().copied())
        .filter(|t| *t > a && *t < b)
        .collect();
    breaks.push(a);
    breaks.push(b);
    breaks.sort_by(f64::total_cmp);
    let q = quad::integrate_pieces(
        |y| kernel.eval((x - y) / h) / h * spec.eval(y),
        &breaks,
        Tolerance::relative(1e-10),
    );
    if q.converged {
        Ok(q.value)
    } else {
        Err(Error::Quadrature {
            what: format!("convolution of `{}` with the {} kernel at x = {x}", spec.id(), kernel.name()),
            error: q.error,
        })
    }
}

/// `f_n(x) = (1/k) Σ_r K_h(x - x_r) f(x_r)`.
pub fn discretized_smoothed_frontier(
    spec: &FrontierSpec,
    kernel: &KernelSpec,
    h: f64,
    k: usize,
    x: f64,
) -> Result<f64> {
    check_bandwidth(h)?;
    if k == 0 {
        return Err(Error::arg("k", "need at least one cell"));
    }
    let sum: f64 = contributing_cells(x, kernel.reach() * h, k)
        .map(|r| {
            let c = cell_center(r, k);
            kernel.eval((x - c) / h) * spec.eval(c)
        })
        .sum();
    Ok(sum / (h * k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub sigma_n: f64,
    pub sigma: f64,
    pub n: f64,
    pub k: usize,
    pub h: f64,
}

impl AsymptoticParams {
    /// Standard deviation scale `σ_n σ` of the pointwise estimator.
    pub fn scale(&self) -> f64 {
        self.sigma_n * self.sigma
    }
}

pub fn sigma_n(n: f64, k: usize, h: f64) -> f64 {
    libm::sqrt(k as f64) / (n * libm::sqrt(h))
}

pub fn normalization(n: f64, k: usize, h: f64, kernel: &KernelSpec, c: f64) -> Result<AsymptoticParams> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::arg("n", "intensity must be positive"));
    }
    if k == 0 {
        return Err(Error::arg("k", "need at least one cell"));
    }
    check_bandwidth(h)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::arg("c", "normalizer must be positive"));
    }
    Ok(AsymptoticParams {
        sigma_n: sigma_n(n, k, h),
        sigma: kernel.l2_norm() / c,
        n,
        k,
        h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectorMode {
    /// `k = n^{(α+2)/(3α+2)}`, `h = n^{-2/(3α+2)}`, for the raw estimator.
    MseRaw,
    /// `k = n^{(4+2α)/(4+5α)}`, `h = n^{-4/(4+5α)}`, for the bias-corrected one.
    MseCorrected,
}

impl SelectorMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectorMode::MseRaw => "mse_raw",
            SelectorMode::MseCorrected => "mse_corrected",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "mse_raw" | "raw" => Ok(SelectorMode::MseRaw),
            "mse_corrected" | "corrected" => Ok(SelectorMode::MseCorrected),
            other => Err(Error::arg("mode", format!("unknown selector mode `{other}`"))),
        }
    }

    /// `(cells exponent, bandwidth exponent)` with `k = n^a`, `h = n^{-b}`.
    pub fn exponents(self, alpha: f64) -> (f64, f64) {
        match self {
            SelectorMode::MseRaw => ((alpha + 2.0) / (3.0 * alpha + 2.0), 2.0 / (3.0 * alpha + 2.0)),
            SelectorMode::MseCorrected => {
                ((4.0 + 2.0 * alpha) / (4.0 + 5.0 * alpha), 4.0 / (4.0 + 5.0 * alpha))
            }
        }
    }

    /// Expected log-log slope of the L1 error in `n`:
    /// `-α/(1 + 3α/2)` raw, `-α/(1 + 5α/4)` corrected.
    pub fn target_slope(self, alpha: f64) -> f64 {
        match self {
            SelectorMode::MseRaw => -alpha / (1.0 + 1.5 * alpha),
            SelectorMode::MseCorrected => -alpha / (1.0 + 1.25 * alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub k: usize,
    pub h: f64,
}

pub fn select_hyperparams(n: f64, alpha: f64, mode: SelectorMode) -> Result<Hyperparams> {
    if !(n.is_finite() && n >= 2.0) {
        return Err(Error::arg("n", "intensity must be at least 2"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::arg("alpha", "need 0 < alpha <= 1"));
    }
    let (a, b) = mode.exponents(alpha);
    let cap = libm::ceil(n) - 1.0;
    let k = libm::round(libm::pow(n, a)).clamp(1.0, cap) as usize;
    Ok(Hyperparams { k, h: libm::pow(n, -b) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Situation {
    /// Lipschitz kernel, possibly unbounded support.
    A,
    /// Compact, piecewise C² kernel.
    B,
    /// The kernel satisfies neither hypothesis set (e.g. the uniform kernel).
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRatios {
    /// `h k^α`, should diverge under A.
    pub h_k_alpha: f64,
    /// `h^{1+β} k^β`, should diverge under A.
    pub h_k_beta: f64,
    /// `h k`, should diverge under B.
    pub h_k: f64,
    /// `k ln n / n`, should vanish.
    pub k_log_n_over_n: f64,
    /// `n / k^{1+α}`, should vanish.
    pub n_over_k_power: f64,
    /// `n h^{1/2+α} / k^{1/2}`, relevant to the corrected estimator's limit law.
    pub corrected_bias_proxy: f64,
    /// `n / (k^{5/2} h^{3/2})`, relevant to the corrected estimator's limit law.
    pub corrected_z_proxy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub situation: Situation,
    pub ratios: RegimeRatios,
    pub warnings: Vec<String>,
}

impl RegimeReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Finite-`n` stand-ins for the asymptotic conditions on `(n, k, h)`.
pub fn regime_report(n: f64, k: usize, h: f64, alpha: f64, kernel: &KernelSpec) -> Result<RegimeReport> {
    if !(n.is_finite() && n > 1.0) || k == 0 || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::arg("n, k, alpha", "need n > 1, k >= 1 and 0 < alpha <= 1"));
    }
    check_bandwidth(h)?;
    let kf = k as f64;
    let beta = kernel.beta().unwrap_or(1.0);
    let ratios = RegimeRatios {
        h_k_alpha: h * libm::pow(kf, alpha),
        h_k_beta: libm::pow(h, 1.0 + beta) * libm::pow(kf, beta),
        h_k: h * kf,
        k_log_n_over_n: kf * libm::log(n) / n,
        n_over_k_power: n / libm::pow(kf, 1.0 + alpha),
        corrected_bias_proxy: n * libm::pow(h, 0.5 + alpha) / libm::sqrt(kf),
        corrected_z_proxy: n / (libm::pow(kf, 2.5) * libm::pow(h, 1.5)),
    };
    let situation = match kernel.smoothness() {
        Smoothness::CompactPiecewiseC2 => Situation::B,
        Smoothness::LipschitzOnly => Situation::A,
        Smoothness::Discontinuous => Situation::Neither,
    };
    let mut warnings = Vec::new();
    let mut diverging = |name: &str, v: f64| {
        if v < DIVERGENT_FLOOR {
            warnings.push(format!("{name} = {v:.4} is below {DIVERGENT_FLOOR} but should be large"));
        }
    };
    match situation {
        Situation::A => {
            diverging("h k^alpha", ratios.h_k_alpha);
            diverging("h^(1+beta) k^beta", ratios.h_k_beta);
        }
        Situation::B => diverging("h k", ratios.h_k),
        Situation::Neither => warnings.push(format!(
            "the {} kernel satisfies neither kernel regime; estimates are Geffroy-type and the limit theory does not apply",
            kernel.name()
        )),
    }
    for (name, v) in [("k ln(n) / n", ratios.k_log_n_over_n), ("n / k^(1+alpha)", ratios.n_over_k_power)] {
        if v > VANISHING_CEILING {
            warnings.push(format!("{name} = {v:.4} is above {VANISHING_CEILING} but should be small"));
        }
    }
    Ok(RegimeReport { situation, ratios, warnings })
}

/// `estimate ± z_{(1+level)/2} σ_n σ`, with the lower end clamped at 0.
pub fn confidence_interval(estimate: f64, params: &AsymptoticParams, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::arg("level", "coverage level must lie in (0, 1)"));
    }
    let half = normal_quantile(0.5 * (1.0 + level)) * params.scale();
    Ok(((estimate - half).max(0.0), estimate + half))
}

/// Plug-in normalizer `1 / ∫ estimate` (trapezoid rule on the result grid),
/// for confidence intervals when `c` is unknown.
pub fn plug_in_normalizer(result: &EstimateResult) -> Result<f64> {
    let area = trapezoid(&result.xs, &result.estimates);
    if area > 0.0 {
        Ok(1.0 / area)
    } else {
        Err(Error::Degenerate("estimated frontier has zero area"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::make_partition;
    use crate::kernel::KernelKind;

    fn flat() -> FrontierSpec {
        FrontierSpec::flat(1.0).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let spec = flat();
        let part = make_partition(&spec, 10).unwrap();
        let p = cell_max_cdf(&spec, &part, 3, 100.0, 0.9).unwrap().exact().unwrap();
        assert!((p - libm::exp(-1.0)).abs() < 1e-15);
        assert!((p - 0.367879).abs() < 1e-6);
        assert_eq!(cell_max_cdf(&spec, &part, 1, 100.0, -0.1).unwrap(), CdfValue::Exact(0.0));
        assert_eq!(cell_max_cdf(&spec, &part, 1, 100.0, 1.01).unwrap(), CdfValue::Exact(1.0));
        assert_eq!(cell_max_cdf(&spec, &part, 10, 100.0, 1.0).unwrap(), CdfValue::Exact(1.0));
        assert!(matches!(
            cell_max_cdf(&spec, &part, 0, 100.0, 0.5),
            Err(Error::CellOutOfRange { .. })
        ));
        assert!(cell_max_cdf(&spec, &part, 11, 100.0, 0.5).is_err());
    }

    #[test]
    fn cdf_band_for_non_flat_frontier() {
        let spec = FrontierSpec::affine(1.0, 1.0).unwrap();
        let part = make_partition(&spec, 4).unwrap();
        let (m, mm) = (part.cell_mins()[1], part.cell_maxs()[1]);
        assert!(matches!(cell_max_cdf(&spec, &part, 2, 50.0, 0.5 * (m + mm)).unwrap(), CdfValue::Band { .. }));
        assert!(cell_max_cdf(&spec, &part, 2, 50.0, m).unwrap().exact().is_some());
    }

    #[test]
    fn cdf_is_monotone() {
        let spec = FrontierSpec::sine(1.0, 0.3, 6.0).unwrap();
        let part = make_partition(&spec, 7).unwrap();
        for r in 1..=7 {
            let mut prev = (0.0, 0.0);
            for i in 0..=300 {
                let x = -0.1 + 1.6 * i as f64 / 300.0;
                let (lo, hi) = cell_max_cdf(&spec, &part, r, 200.0, x).unwrap().bounds();
                assert!(lo >= prev.0 && hi >= prev.1 && lo <= hi);
                prev = (lo, hi);
            }
            assert_eq!(prev, (1.0, 1.0));
        }
    }

    #[test]
    fn flat_moments_match_survival_quadrature() {
        for &(level, n, k) in &[(1.0, 100.0, 10usize), (2.0, 500.0, 30), (0.5, 1e4, 100)] {
            let c = 1.0 / level;
            let rate = n * c / k as f64;
            let survival = |x: f64| 1.0 - libm::exp(rate * (x - level));
            let q1 = quad::integrate(survival, 0.0, level, Tolerance::relative(1e-13)).value;
            let q2 = quad::integrate(|x| 2.0 * x * survival(x), 0.0, level, Tolerance::relative(1e-13)).value;
            let (mean, var) = expected_cell_max_flat(level, n, k, c);
            assert!((mean - q1).abs() < 1e-12 * level, "{mean} vs {q1}");
            assert!((var - (q2 - q1 * q1)).abs() < 1e-9 * var, "{var} vs {}", q2 - q1 * q1);
        }
        let (mean, _) = expected_cell_max_flat(1.0, 100.0, 10, 1.0);
        assert!((mean - (1.0 - 0.1 * (1.0 - libm::exp(-10.0)))).abs() < 1e-15);
        assert!((mean - 0.9000045).abs() < 1e-7);
    }

    #[test]
    fn flat_mean_expansion_remainder_is_exponentially_small() {
        for &(n, k) in &[(100.0, 10usize), (1e3, 10), (1e4, 100), (1e5, 1000)] {
            let (mean, _) = expected_cell_max_flat(1.0, n, k, 1.0);
            let step = k as f64 / n;
            assert!((mean - (1.0 - step)).abs() <= step * libm::exp(-n / k as f64) * (1.0 + 1e-9));
        }
        let mut prev = 0.0;
        for n in [1e2, 1e3, 1e4, 1e5, 1e6] {
            let (mean, var) = expected_cell_max_flat(1.0, n, 10, 1.0);
            assert!(mean > prev && mean < 1.0 && var > 0.0);
            prev = mean;
        }
    }

    #[test]
    fn smoothed_frontier_examples() {
        let biweight = KernelSpec::new(KernelKind::Biweight);
        let uniform = KernelSpec::new(KernelKind::Uniform);
        let g = smoothed_frontier(&flat(), &biweight, 0.05, 0.5).unwrap();
        assert!((g - 1.0).abs() < 1e-8);
        let affine = FrontierSpec::affine(1.0, 1.0).unwrap();
        for kind in [KernelKind::Triangular, KernelKind::Epanechnikov, KernelKind::Biweight, KernelKind::Uniform] {
            let g = smoothed_frontier(&affine, &KernelSpec::new(kind), 0.05, 0.5).unwrap();
            assert!((g - 1.5).abs() < 1e-6, "{kind:?}");
        }
        let g = smoothed_frontier(&flat(), &uniform, 0.1, 0.0).unwrap();
        assert!((g - 0.5).abs() < 1e-10);
        assert!(smoothed_frontier(&flat(), &uniform, -0.1, 0.0).is_err());
    }

    #[test]
    fn discretized_frontier_examples() {
        let biweight = KernelSpec::new(KernelKind::Biweight);
        let fnx = discretized_smoothed_frontier(&flat(), &biweight, 0.1, 60, 0.41).unwrap();
        assert!((fnx - biweight.riemann_sum(0.1, 60, 0.41).unwrap()).abs() < 1e-15);

        let sine = FrontierSpec::sine(1.0, 0.3, 6.0).unwrap();
        let defect = |k| {
            let f = discretized_smoothed_frontier(&sine, &biweight, 0.1, k, 0.5).unwrap();
            (f - smoothed_frontier(&sine, &biweight, 0.1, 0.5).unwrap()).abs()
        };
        assert!(defect(100) > defect(400));
    }

    fn loglog_slope(hs: &[f64], errs: &[f64]) -> f64 {
        crate::metrics::rate_fit(hs, errs).unwrap().slope
    }

    #[test]
    fn discretized_bias_decays_like_a_power_of_h() {
        // k h = 400 keeps the discretization defect negligible
        let hs = [0.2, 0.1, 0.05, 0.025];
        let biweight = KernelSpec::new(KernelKind::Biweight);
        let bias = |spec: &FrontierSpec| -> Vec<f64> {
            hs.iter()
                .map(|&h| {
                    let k = libm::round(400.0 / h) as usize;
                    (discretized_smoothed_frontier(spec, &biweight, h, k, 0.5).unwrap() - spec.eval(0.5)).abs()
                })
                .collect()
        };
        // kink at 0.5: the bias is of exact order h^alpha with alpha = 1
        let tent = FrontierSpec::tent(1.0, 0.5).unwrap();
        let slope = loglog_slope(&hs, &bias(&tent));
        assert!((slope - 1.0).abs() < 0.3, "tent slope {slope}");
        // smooth sine: at least as fast as h^alpha
        let sine = FrontierSpec::sine(1.0, 0.3, 6.0).unwrap();
        let slope = loglog_slope(&hs, &bias(&sine));
        assert!(slope > 1.0 - 0.3, "sine slope {slope}");
    }

    #[test]
    fn normalization_examples() {
        let uniform = KernelSpec::new(KernelKind::Uniform);
        let p = normalization(1000.0, 100, 0.04, &uniform, 1.0).unwrap();
        assert!((p.sigma_n - 0.05).abs() < 1e-15);
        assert_eq!(p.sigma, 1.0);
        let q = normalization(2000.0, 100, 0.04, &uniform, 1.0).unwrap();
        assert_eq!(q.sigma_n, p.sigma_n / 2.0);
        assert!(normalization(0.0, 100, 0.04, &uniform, 1.0).is_err());
    }

    #[test]
    fn selector_examples() {
        let s = select_hyperparams(1000.0, 1.0, SelectorMode::MseCorrected).unwrap();
        assert_eq!(s.k, 100);
        assert!((s.h - libm::pow(1000.0, -4.0 / 9.0)).abs() < 1e-15);
        assert!((s.h - 0.04642).abs() < 1e-5);
        let s = select_hyperparams(1000.0, 1.0, SelectorMode::MseRaw).unwrap();
        assert_eq!(s.k, 63);
        assert!((s.h - 0.06310).abs() < 1e-5);
        assert!((SelectorMode::MseCorrected.target_slope(1.0) + 4.0 / 9.0).abs() < 1e-15);
        assert!((SelectorMode::MseRaw.target_slope(1.0) + 0.4).abs() < 1e-15);
        assert_eq!(select_hyperparams(2.0, 1.0, SelectorMode::MseRaw).unwrap().k, 1);
        assert!(select_hyperparams(1.0, 1.0, SelectorMode::MseRaw).is_err());
        assert!(select_hyperparams(100.0, 1.5, SelectorMode::MseRaw).is_err());
    }

    #[test]
    fn selector_exponents_satisfy_condition_c() {
        for alpha in [0.1, 0.3, 0.5, 0.8, 1.0] {
            for mode in [SelectorMode::MseRaw, SelectorMode::MseCorrected] {
                let (a, _) = mode.exponents(alpha);
                assert!(a < 1.0 && a * (1.0 + alpha) > 1.0, "{mode:?} alpha={alpha}");
            }
        }
    }

    #[test]
    fn regime_examples() {
        let biweight = KernelSpec::new(KernelKind::Biweight);
        let s = select_hyperparams(1e5, 1.0, SelectorMode::MseRaw).unwrap();
        let report = regime_report(1e5, s.k, s.h, 1.0, &biweight).unwrap();
        assert_eq!(report.situation, Situation::B);
        assert!(report.ratios.h_k > 5.0);
        assert!(report.is_clean(), "{:?}", report.warnings);

        let uniform = KernelSpec::new(KernelKind::Uniform);
        let report = regime_report(1e5, s.k, s.h, 1.0, &uniform).unwrap();
        assert_eq!(report.situation, Situation::Neither);
        assert!(!report.is_clean());

        let report = regime_report(1000.0, 1000, 0.1, 1.0, &biweight).unwrap();
        assert!(report.warnings.iter().any(|w| w.starts_with("k ln(n) / n")));

        let gaussian = KernelSpec::new(KernelKind::Gaussian);
        assert_eq!(regime_report(1e5, s.k, s.h, 1.0, &gaussian).unwrap().situation, Situation::A);
    }

    #[test]
    fn raw_schedule_leaves_the_warning_zone() {
        let biweight = KernelSpec::new(KernelKind::Biweight);
        for n in [3e4, 1e5, 1e6, 1e7] {
            let s = select_hyperparams(n, 1.0, SelectorMode::MseRaw).unwrap();
            let report = regime_report(n, s.k, s.h, 1.0, &biweight).unwrap();
            assert!(report.is_clean(), "n={n}: {:?}", report.warnings);
        }
        // condition (C) proxies shrink along the schedule
        let mut prev = f64::INFINITY;
        for n in [1e2, 1e3, 1e4, 1e5, 1e6] {
            let s = select_hyperparams(n, 1.0, SelectorMode::MseRaw).unwrap();
            let r = regime_report(n, s.k, s.h, 1.0, &biweight).unwrap().ratios;
            let worst = r.k_log_n_over_n.max(r.n_over_k_power);
            assert!(worst < prev);
            prev = worst;
        }
    }

    #[test]
    fn confidence_interval_examples() {
        let params = AsymptoticParams { sigma_n: 0.05, sigma: 1.0, n: 1.0, k: 1, h: 1.0 };
        let (lo, hi) = confidence_interval(1.0, &params, 0.95).unwrap();
        let z = 1.959_963_984_540_054;
        assert!((lo - (1.0 - 0.05 * z)).abs() < 1e-12 && (hi - (1.0 + 0.05 * z)).abs() < 1e-12);
        assert!((lo - 0.902).abs() < 1e-3 && (hi - 1.098).abs() < 1e-3);
        let (lo, hi) = confidence_interval(1.0, &params, 1e-12).unwrap();
        assert!((hi - lo) < 1e-12);
        let wide = AsymptoticParams { sigma_n: 1.0, ..params };
        assert_eq!(confidence_interval(0.01, &wide, 0.95).unwrap().0, 0.0);
        assert!(confidence_interval(1.0, &params, 1.0).is_err());
        assert!(confidence_interval(1.0, &params, 0.0).is_err());
    }
}
