//! Parzen-Rosenblatt kernels and the constants the asymptotic theory uses.
//!
//! All catalog kernels are symmetric probability densities. The Gaussian is
//! the representative of the unbounded-support regime (kernel merely
//! Lipschitz); the compact kernels other than the uniform one are piecewise
//! C² with a bounded derivative. The uniform kernel reproduces Geffroy's
//! piecewise-constant estimate and satisfies neither regime.

use core::f64::consts::PI;
use core::ops::Range;

use crate::quad::{self, Tolerance};
use crate::{Error, Result};

/// Gaussian tails are cut at `|u| = 40`; `exp(-800)` underflows to zero.
const GAUSSIAN_REACH: f64 = 40.0;
const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Uniform,
    Triangular,
    Epanechnikov,
    Biweight,
    Gaussian,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::Uniform,
        KernelKind::Triangular,
        KernelKind::Epanechnikov,
        KernelKind::Biweight,
        KernelKind::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Uniform => "uniform",
            KernelKind::Triangular => "triangular",
            KernelKind::Epanechnikov => "epanechnikov",
            KernelKind::Biweight => "biweight",
            KernelKind::Gaussian => "gaussian",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == name.trim())
            .ok_or_else(|| Error::UnknownKernel(name.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Jumps; fits neither hypothesis regime.
    Discontinuous,
    /// Hölder/Lipschitz on the whole line, possibly unbounded support.
    LipschitzOnly,
    /// Compact support, bounded first derivative, piecewise C².
    CompactPiecewiseC2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    /// `∫ K²`
    pub l2_norm_sq: f64,
    /// `∫ u² K(u) du`
    pub second_moment: f64,
    /// `∫ K³`
    pub cubic_integral: f64,
}

/// A catalog kernel together with its declared metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    support_radius: Option<f64>,
    beta: Option<f64>,
    lipschitz_const: Option<f64>,
    smoothness: Smoothness,
    peak: f64,
    constants: KernelConstants,
}

// ∫_{-1}^{1} (1 - u²)^m du = 2^{2m+1} (m!)² / (2m+1)!
fn power_bump_integral(m: u32) -> f64 {
    let mut factorial_m = 1.0;
    for i in 1..=m {
        factorial_m *= i as f64;
    }
    let mut factorial_2m1 = 1.0;
    for i in 1..=(2 * m + 1) {
        factorial_2m1 *= i as f64;
    }
    libm::pow(2.0, (2 * m + 1) as f64) * factorial_m * factorial_m / factorial_2m1
}

impl KernelSpec {
    pub fn new(kind: KernelKind) -> Self {
        match kind {
            KernelKind::Uniform => KernelSpec {
                kind,
                support_radius: Some(0.5),
                beta: None,
                lipschitz_const: None,
                smoothness: Smoothness::Discontinuous,
                peak: 1.0,
                constants: KernelConstants {
                    l2_norm_sq: 1.0,
                    second_moment: 1.0 / 12.0,
                    cubic_integral: 1.0,
                },
            },
            KernelKind::Triangular => KernelSpec {
                kind,
                support_radius: Some(1.0),
                beta: Some(1.0),
                lipschitz_const: Some(1.0),
                smoothness: Smoothness::CompactPiecewiseC2,
                peak: 1.0,
                constants: KernelConstants {
                    l2_norm_sq: 2.0 / 3.0,
                    second_moment: 1.0 / 6.0,
                    cubic_integral: 0.5,
                },
            },
            KernelKind::Epanechnikov => KernelSpec {
                kind,
                support_radius: Some(1.0),
                beta: Some(1.0),
                lipschitz_const: Some(1.5),
                smoothness: Smoothness::CompactPiecewiseC2,
                peak: 0.75,
                constants: KernelConstants {
                    l2_norm_sq: 0.6,
                    second_moment: 0.2,
                    cubic_integral: 27.0 / 70.0,
                },
            },
            KernelKind::Biweight => KernelSpec {
                kind,
                support_radius: Some(1.0),
                beta: Some(1.0),
                // max |K'| at u = 1/sqrt(3)
                lipschitz_const: Some(2.5 / libm::sqrt(3.0)),
                smoothness: Smoothness::CompactPiecewiseC2,
                peak: 15.0 / 16.0,
                constants: KernelConstants {
                    l2_norm_sq: 5.0 / 7.0,
                    second_moment: 1.0 / 7.0,
                    cubic_integral: libm::pow(15.0 / 16.0, 3.0) * power_bump_integral(6),
                },
            },
            KernelKind::Gaussian => KernelSpec {
                kind,
                support_radius: None,
                beta: Some(1.0),
                // max |φ'| = φ(1)
                lipschitz_const: Some(libm::exp(-0.5) / libm::sqrt(2.0 * PI)),
                smoothness: Smoothness::LipschitzOnly,
                peak: 1.0 / libm::sqrt(2.0 * PI),
                constants: KernelConstants {
                    l2_norm_sq: 1.0 / (2.0 * libm::sqrt(PI)),
                    second_moment: 1.0,
                    cubic_integral: 1.0 / (2.0 * PI * libm::sqrt(3.0)),
                },
            },
        }
    }

    /// Looks the kernel up by name and audits its declared metadata.
    pub fn from_name(name: &str) -> Result<Self> {
        let spec = KernelSpec::new(KernelKind::from_name(name)?);
        spec.audit()?;
        Ok(spec)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// `A` such that `K` vanishes outside `[-A, A]`; `None` for unbounded support.
    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn is_compact(&self) -> bool {
        self.support_radius.is_some()
    }

    /// Radius beyond which `K` is exactly zero in `f64`.
    pub fn reach(&self) -> f64 {
        self.support_radius.unwrap_or(GAUSSIAN_REACH)
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn lipschitz_const(&self) -> Option<f64> {
        self.lipschitz_const
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn constants(&self) -> KernelConstants {
        self.constants
    }

    /// `‖K‖₂`
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.constants.l2_norm_sq)
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let a = libm::fabs(u);
        match self.kind {
            KernelKind::Uniform => {
                if a <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Triangular => {
                if a <= 1.0 {
                    1.0 - a
                } else {
                    0.0
                }
            }
            KernelKind::Epanechnikov => {
                if a <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelKind::Biweight => {
                if a <= 1.0 {
                    let w = 1.0 - u * u;
                    (15.0 / 16.0) * w * w
                } else {
                    0.0
                }
            }
            KernelKind::Gaussian => {
                if a <= GAUSSIAN_REACH {
                    libm::exp(-0.5 * u * u) / libm::sqrt(2.0 * PI)
                } else {
                    0.0
                }
            }
        }
    }

    /// `K_h(t) = K(t / h) / h`.
    pub fn scaled_eval(&self, h: f64, t: f64) -> Result<f64> {
        check_bandwidth(h)?;
        Ok(self.eval(t / h) / h)
    }

    /// Points where `K` is not smooth, scaled to the unit kernel.
    pub(crate) fn breakpoints(&self) -> &'static [f64] {
        match self.kind {
            KernelKind::Uniform => &[-0.5, 0.5],
            KernelKind::Triangular => &[-1.0, 0.0, 1.0],
            KernelKind::Epanechnikov | KernelKind::Biweight => &[-1.0, 1.0],
            KernelKind::Gaussian => &[-GAUSSIAN_REACH, 0.0, GAUSSIAN_REACH],
        }
    }

    /// Integrates `g(u) K(u)` over the kernel's support.
    pub(crate) fn integrate_against<G: FnMut(f64) -> f64>(&self, mut g: G) -> quad::Quadrature {
        quad::integrate_pieces(
            |u| g(u) * self.eval(u),
            self.breakpoints(),
            Tolerance::relative(1e-12),
        )
    }

    /// Recomputes the declared constants by quadrature and checks positivity,
    /// unit mass and tail decay. Returns the numerically integrated constants.
    pub fn audit(&self) -> Result<KernelConstants> {
        let mass = self.integrate_against(|_| 1.0).value;
        let numeric = KernelConstants {
            l2_norm_sq: self.integrate_against(|u| self.eval(u)).value,
            second_moment: self.integrate_against(|u| u * u).value,
            cubic_integral: self.integrate_against(|u| self.eval(u) * self.eval(u)).value,
        };
        let close = |declared: f64, numeric: f64| libm::fabs(declared - numeric) <= AUDIT_TOL * declared;
        let unsupported = |reason| Error::UnsupportedKernel { kernel: self.name(), reason };
        if libm::fabs(mass - 1.0) > AUDIT_TOL {
            return Err(unsupported("kernel mass differs from 1"));
        }
        if !close(self.constants.l2_norm_sq, numeric.l2_norm_sq)
            || !close(self.constants.second_moment, numeric.second_moment)
            || !close(self.constants.cubic_integral, numeric.cubic_integral)
        {
            return Err(unsupported("declared constants disagree with quadrature"));
        }
        let far = match self.support_radius {
            Some(a) => 10.0 * a,
            None => 50.0,
        };
        if far * self.eval(far) > 1e-12 || far * self.eval(-far) > 1e-12 {
            return Err(unsupported("u K(u) does not vanish in the tails"));
        }
        for i in 0..=4000 {
            let u = -2.0 * self.reach() + 4.0 * self.reach() * i as f64 / 4000.0;
            let v = self.eval(u);
            if !(v >= 0.0 && v <= self.peak) || v != self.eval(-u) {
                return Err(unsupported("kernel must be symmetric with 0 <= K <= peak"));
            }
        }
        Ok(numeric)
    }

    /// `(1/k) Σ_r K_h(x - x_r)` over the cell centers `x_r = (r - 1/2)/k`.
    pub fn riemann_sum(&self, h: f64, k: usize, x: f64) -> Result<f64> {
        check_bandwidth(h)?;
        let sum: f64 = contributing_cells(x, self.reach() * h, k)
            .map(|r| self.eval((x - cell_center(r, k)) / h))
            .sum();
        Ok(sum / (h * k as f64))
    }

    /// `(1/(h k)) Σ_r K((x - x_r)/h) K((y - x_r)/h)`.
    pub fn cross_sum(&self, h: f64, k: usize, x: f64, y: f64) -> Result<f64> {
        check_bandwidth(h)?;
        let sum: f64 = contributing_cells(x, self.reach() * h, k)
            .map(|r| {
                let c = cell_center(r, k);
                self.eval((x - c) / h) * self.eval((y - c) / h)
            })
            .sum();
        Ok(sum / (h * k as f64))
    }
}

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBandwidth(h))
    }
}

/// Center of the zero-based cell `r` out of `k`.
#[inline]
pub fn cell_center(r: usize, k: usize) -> f64 {
    (r as f64 + 0.5) / k as f64
}

/// Zero-based indices of the cells whose centers may lie within `reach` of `t`.
/// Over-inclusive by at most one cell on each side.
#[inline]
pub(crate) fn contributing_cells(t: f64, reach: f64, k: usize) -> Range<usize> {
    let kf = k as f64;
    let lo = libm::floor((t - reach) * kf - 0.5);
    let hi = libm::ceil((t + reach) * kf - 0.5) + 1.0;
    let lo = if lo.is_nan() || lo < 0.0 { 0 } else { (lo as usize).min(k) };
    let hi = if hi.is_nan() || hi < 0.0 { 0 } else { (hi as usize).min(k) };
    lo..hi.max(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let uniform = KernelSpec::new(KernelKind::Uniform);
        let epan = KernelSpec::new(KernelKind::Epanechnikov);
        assert_eq!(uniform.eval(0.0), 1.0);
        assert_eq!(epan.eval(0.0), 0.75);
        assert_eq!(epan.eval(2.0), 0.0);
    }

    #[test]
    fn scaled_eval_examples() {
        let uniform = KernelSpec::new(KernelKind::Uniform);
        let epan = KernelSpec::new(KernelKind::Epanechnikov);
        assert_eq!(uniform.scaled_eval(0.1, 0.0).unwrap(), 10.0);
        // (1 / 0.5) * 0.75 * (1 - 0.5^2)
        assert_eq!(epan.scaled_eval(0.5, 0.25).unwrap(), 2.0 * 0.75 * (1.0 - 0.25));
        assert_eq!(epan.scaled_eval(0.5, 0.25).unwrap(), 1.125);
        for kind in KernelKind::ALL {
            let k = KernelSpec::new(kind);
            for u in [-1.3, -0.4, 0.0, 0.2, 0.77] {
                assert_eq!(k.scaled_eval(1.0, u).unwrap(), k.eval(u));
            }
        }
        assert_eq!(epan.scaled_eval(0.0, 0.1), Err(Error::InvalidBandwidth(0.0)));
        assert_eq!(epan.scaled_eval(-1.0, 0.1), Err(Error::InvalidBandwidth(-1.0)));
    }

    #[test]
    fn constants_examples() {
        let c = KernelSpec::new(KernelKind::Uniform).constants();
        assert_eq!(c.l2_norm_sq, 1.0);
        let c = KernelSpec::new(KernelKind::Epanechnikov).constants();
        assert_eq!(c.l2_norm_sq, 0.6);
        assert_eq!(c.second_moment, 0.2);
    }

    #[test]
    fn every_catalog_kernel_passes_its_audit() {
        for kind in KernelKind::ALL {
            let spec = KernelSpec::new(kind);
            let numeric = spec.audit().unwrap();
            let declared = spec.constants();
            assert!((numeric.l2_norm_sq - declared.l2_norm_sq).abs() < 1e-9 * declared.l2_norm_sq);
            assert_eq!(KernelSpec::from_name(kind.name()).unwrap(), spec);
        }
        assert!(KernelSpec::from_name("cosine").is_err());
    }

    #[test]
    fn declared_lipschitz_constants_hold() {
        for kind in KernelKind::ALL {
            let spec = KernelSpec::new(kind);
            let Some(lip) = spec.lipschitz_const() else { continue };
            let du = 1e-4;
            for i in 0..100_000 {
                let u = -1.5 * spec.reach().min(5.0) + i as f64 * 3.0 * spec.reach().min(5.0) / 100_000.0;
                let slope = (spec.eval(u + du) - spec.eval(u)).abs() / du;
                assert!(slope <= lip * (1.0 + 1e-6), "{kind:?} at {u}: {slope} > {lip}");
            }
        }
    }

    #[test]
    fn scaled_kernels_integrate_to_one() {
        for kind in KernelKind::ALL {
            let spec = KernelSpec::new(kind);
            for h in [0.01, 0.3, 2.0] {
                let reach = spec.reach() * h;
                let breaks: [f64; 3] = [-reach, 0.0, reach];
                let q = quad::integrate_pieces(
                    |t| spec.scaled_eval(h, t).unwrap(),
                    &breaks,
                    Tolerance::relative(1e-12),
                );
                // the uniform jump sits exactly on the endpoints here
                assert!((q.value - 1.0).abs() < 1e-8, "{kind:?} h={h}: {}", q.value);
            }
        }
    }

    #[test]
    fn contributing_cells_cover_support() {
        for k in [1, 2, 7, 50, 400] {
            for &(t, reach) in &[(0.5, 0.1), (0.0, 0.05), (1.0, 0.3), (-0.2, 0.1), (1.3, 0.2), (0.37, 2.0)] {
                let range = contributing_cells(t, reach, k);
                for r in 0..k {
                    if (t - cell_center(r, k)).abs() <= reach {
                        assert!(range.contains(&r), "k={k} t={t} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_defect_shrinks_with_k() {
        for kind in [KernelKind::Uniform, KernelKind::Triangular, KernelKind::Epanechnikov, KernelKind::Biweight] {
            let spec = KernelSpec::new(kind);
            let coarse = (spec.riemann_sum(0.1, 50, 0.5).unwrap() - 1.0).abs();
            let fine = (spec.riemann_sum(0.1, 400, 0.5).unwrap() - 1.0).abs();
            assert!(fine < 0.01, "{kind:?}: {fine}");
            assert!(fine <= coarse, "{kind:?}: {fine} vs {coarse}");
            if kind != KernelKind::Uniform {
                assert!(fine < coarse, "{kind:?}: {fine} vs {coarse}");
            }
        }
        // the Gaussian defect at h = 0.1 is the mass beyond 5h left outside [0, 1]
        let gaussian = KernelSpec::new(KernelKind::Gaussian);
        let tail = 2.0 * (1.0 - crate::stats::normal_cdf(5.0));
        for k in [50, 400] {
            let defect = (gaussian.riemann_sum(0.1, k, 0.5).unwrap() - 1.0).abs();
            assert!((defect - tail).abs() < 0.1 * tail, "k={k}: {defect} vs {tail}");
        }
    }
}
