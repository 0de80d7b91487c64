//! The support `S` and its upper boundary `f`.
//!
//! A [`FrontierSpec`] bundles the boundary function with the regularity
//! metadata the estimator theory consumes: the Hölder exponent `alpha`, the
//! constant `L_f`, bounds `m <= f <= M`, the area `λ(S)` and the normalizer
//! `c = 1 / λ(S)`. Built-in frontiers are addressable by name, e.g.
//! `flat:1.0`, `affine:1.0:0.5`, `sine:1.0:0.3:6.0`, `tent:1.0:0.5` and
//! `weierstrass:2.0:0.3:0.5:8`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::quad::{self, Tolerance};
use crate::{Error, Result};

const AREA_TOL: Tolerance = Tolerance { rel: 1e-10, abs: 1e-300 };
const RANGE_SAMPLES: usize = 257;

pub type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Shape {
    /// `f(x) = level`
    Flat { level: f64 },
    /// `f(x) = intercept + slope * x`
    Affine { intercept: f64, slope: f64 },
    /// `f(x) = base + amplitude * sin(frequency * x)`
    Sine { base: f64, amplitude: f64, frequency: f64 },
    /// `f(x) = base + height * (1 - |2x - 1|)`, kinked at 1/2.
    Tent { base: f64, height: f64 },
    /// `f(x) = base + amplitude * sum_{j<terms} 2^{-j alpha} cos(2^j pi x)`,
    /// a truncated Weierstrass function, Hölder of order `alpha`.
    Weierstrass { base: f64, amplitude: f64, alpha: f64, terms: u32 },
    Custom(BoundaryFn),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Flat { level } => f.debug_struct("Flat").field("level", level).finish(),
            Shape::Affine { intercept, slope } => f
                .debug_struct("Affine")
                .field("intercept", intercept)
                .field("slope", slope)
                .finish(),
            Shape::Sine { base, amplitude, frequency } => f
                .debug_struct("Sine")
                .field("base", base)
                .field("amplitude", amplitude)
                .field("frequency", frequency)
                .finish(),
            Shape::Tent { base, height } => f
                .debug_struct("Tent")
                .field("base", base)
                .field("height", height)
                .finish(),
            Shape::Weierstrass { base, amplitude, alpha, terms } => f
                .debug_struct("Weierstrass")
                .field("base", base)
                .field("amplitude", amplitude)
                .field("alpha", alpha)
                .field("terms", terms)
                .finish(),
            Shape::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// The unknown boundary `f` and its metadata. Immutable once built.
#[derive(Clone, Debug)]
pub struct FrontierSpec {
    id: String,
    shape: Shape,
    alpha: f64,
    lipschitz_const: f64,
    lower: f64,
    upper: f64,
    area: f64,
    normalizer: f64,
}

fn weierstrass_weight_sum(alpha: f64, terms: u32) -> f64 {
    (0..terms).map(|j| libm::pow(2.0, -(j as f64) * alpha)).sum()
}

fn positive(id: &str, what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFrontier {
            id: id.to_string(),
            reason: format!("{what} must be positive and finite, got {v}"),
        })
    }
}

impl FrontierSpec {
    /// `f ≡ level`.
    pub fn flat(level: f64) -> Result<Self> {
        let id = format!("flat:{level:?}");
        positive(&id, "level", level)?;
        Ok(Self::assemble(id, Shape::Flat { level }, 1.0, 0.0, level, level, level))
    }

    /// `f(x) = intercept + slope * x`.
    pub fn affine(intercept: f64, slope: f64) -> Result<Self> {
        let id = format!("affine:{intercept:?}:{slope:?}");
        positive(&id, "f(0)", intercept)?;
        positive(&id, "f(1)", intercept + slope)?;
        let (lo, hi) = if slope >= 0.0 {
            (intercept, intercept + slope)
        } else {
            (intercept + slope, intercept)
        };
        let area = intercept + 0.5 * slope;
        Ok(Self::assemble(id, Shape::Affine { intercept, slope }, 1.0, slope.abs(), lo, hi, area))
    }

    /// `f(x) = base + amplitude * sin(frequency * x)`.
    pub fn sine(base: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        let id = format!("sine:{base:?}:{amplitude:?}:{frequency:?}");
        if !(amplitude.is_finite() && frequency.is_finite() && frequency > 0.0) {
            return Err(Error::InvalidFrontier {
                id,
                reason: "amplitude must be finite and frequency positive".into(),
            });
        }
        let shape = Shape::Sine { base, amplitude, frequency };
        let (lo, hi) = shape_range(&shape, 0.0, 1.0);
        positive(&id, "min f", lo)?;
        let area = base + amplitude * (1.0 - libm::cos(frequency)) / frequency;
        Ok(Self::assemble(id, shape, 1.0, amplitude.abs() * frequency, lo, hi, area))
    }

    /// `f(x) = base + height * (1 - |2x - 1|)`.
    pub fn tent(base: f64, height: f64) -> Result<Self> {
        let id = format!("tent:{base:?}:{height:?}");
        positive(&id, "f(0)", base)?;
        positive(&id, "f(1/2)", base + height)?;
        let (lo, hi) = if height >= 0.0 {
            (base, base + height)
        } else {
            (base + height, base)
        };
        let area = base + 0.5 * height;
        Ok(Self::assemble(id, Shape::Tent { base, height }, 1.0, 2.0 * height.abs(), lo, hi, area))
    }

    /// Truncated Weierstrass function with `terms` octaves, Hölder of order
    /// `alpha`. The declared constant is the elementwise bound
    /// `amplitude * terms * 2^{1-alpha} * pi^alpha`.
    pub fn weierstrass(base: f64, amplitude: f64, alpha: f64, terms: u32) -> Result<Self> {
        let id = format!("weierstrass:{base:?}:{amplitude:?}:{alpha:?}:{terms}");
        if !(alpha > 0.0 && alpha <= 1.0) || terms == 0 || !amplitude.is_finite() {
            return Err(Error::InvalidFrontier {
                id,
                reason: "need 0 < alpha <= 1, terms >= 1 and finite amplitude".into(),
            });
        }
        let spread = amplitude.abs() * weierstrass_weight_sum(alpha, terms);
        positive(&id, "base - |amplitude| * sum of weights", base - spread)?;
        let lipschitz = amplitude.abs()
            * terms as f64
            * libm::pow(2.0, 1.0 - alpha)
            * libm::pow(PI, alpha);
        let shape = Shape::Weierstrass { base, amplitude, alpha, terms };
        // every cosine term integrates to zero over [0, 1]
        Ok(Self::assemble(id, shape, alpha, lipschitz, base - spread, base + spread, base))
    }

    /// A programmatic frontier. The area is obtained by quadrature; the bounds
    /// and Hölder metadata are trusted as declared.
    pub fn custom(
        id: impl Into<String>,
        f: BoundaryFn,
        alpha: f64,
        lipschitz_const: f64,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let id = id.into();
        positive(&id, "lower bound", lower)?;
        if !(upper >= lower && upper.is_finite()) || !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidFrontier {
                id,
                reason: "need upper >= lower and 0 < alpha <= 1".into(),
            });
        }
        let g = f.clone();
        let q = quad::integrate(move |x| g(x), 0.0, 1.0, AREA_TOL);
        if !q.converged {
            return Err(Error::Quadrature {
                what: format!("area of frontier `{id}`"),
                error: q.error,
            });
        }
        Ok(Self::assemble(id, Shape::Custom(f), alpha, lipschitz_const, lower, upper, q.value))
    }

    fn assemble(
        id: String,
        shape: Shape,
        alpha: f64,
        lipschitz_const: f64,
        lower: f64,
        upper: f64,
        area: f64,
    ) -> Self {
        FrontierSpec {
            id,
            shape,
            alpha,
            lipschitz_const,
            lower,
            upper,
            area,
            normalizer: 1.0 / area,
        }
    }

    /// Parses a catalog name such as `sine:1.0:0.3:6.0`. Trailing parameters
    /// may be omitted and take their defaults.
    pub fn from_name(name: &str) -> Result<Self> {
        let mut parts = name.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let params: Vec<f64> = parts
            .map(|p| p.trim().parse::<f64>())
            .collect::<core::result::Result<_, _>>()
            .map_err(|_| Error::UnknownFrontier(name.to_string()))?;
        let arg = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let max_params = match kind {
            "flat" => 1,
            "affine" | "tent" => 2,
            "sine" => 3,
            "weierstrass" => 4,
            _ => return Err(Error::UnknownFrontier(name.to_string())),
        };
        if params.len() > max_params {
            return Err(Error::UnknownFrontier(name.to_string()));
        }
        match kind {
            "flat" => Self::flat(arg(0, 1.0)),
            "affine" => Self::affine(arg(0, 1.0), arg(1, 0.5)),
            "sine" => Self::sine(arg(0, 1.0), arg(1, 0.3), arg(2, 6.0)),
            "tent" => Self::tent(arg(0, 1.0), arg(1, 0.5)),
            _ => {
                let terms = arg(3, 8.0);
                if terms != libm::trunc(terms) || !(1.0..=52.0).contains(&terms) {
                    return Err(Error::UnknownFrontier(name.to_string()));
                }
                Self::weierstrass(arg(0, 2.0), arg(1, 0.3), arg(2, 0.5), terms as u32)
            }
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lipschitz_const(&self) -> f64 {
        self.lipschitz_const
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.shape, Shape::Flat { .. })
    }

    /// `f(x)` on `[0, 1]`, zero elsewhere.
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        eval_shape(&self.shape, x)
    }

    /// `(λ(S), c)` with `c * λ(S) = 1`.
    pub fn region_area(&self) -> (f64, f64) {
        (self.area, self.normalizer)
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Interior points where `f` is not differentiable; useful quadrature breakpoints.
    pub fn kinks(&self) -> &'static [f64] {
        match self.shape {
            Shape::Tent { .. } => &[0.5],
            _ => &[],
        }
    }

    /// `∫_a^b f` for `0 <= a <= b <= 1`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let a = a.clamp(0.0, 1.0);
        let b = b.clamp(0.0, 1.0);
        if b <= a {
            return Ok(0.0);
        }
        match &self.shape {
            Shape::Custom(f) => {
                let q = quad::integrate(|x| f(x), a, b, AREA_TOL);
                if q.converged {
                    Ok(q.value)
                } else {
                    Err(Error::Quadrature {
                        what: format!("integral of frontier `{}` over [{a}, {b}]", self.id),
                        error: q.error,
                    })
                }
            }
            Shape::Tent { .. } if a < 0.5 && b > 0.5 => {
                Ok(antiderivative(&self.shape, 0.5) - antiderivative(&self.shape, a)
                    + antiderivative(&self.shape, b)
                    - antiderivative(&self.shape, 0.5))
            }
            shape => Ok(antiderivative(shape, b) - antiderivative(shape, a)),
        }
    }

    /// `(min, max)` of `f` over `[a, b]`. Exact for the closed-form catalog
    /// entries; for the others a dense evaluation widened by the Hölder bound,
    /// so the result always encloses the true range.
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = shape_range(&self.shape, a, b);
        match self.shape {
            Shape::Weierstrass { .. } | Shape::Custom(_) => {
                let spacing = (b - a) / (RANGE_SAMPLES - 1) as f64;
                let pad = self.lipschitz_const * libm::pow(0.5 * spacing, self.alpha);
                ((lo - pad).max(self.lower), (hi + pad).min(self.upper))
            }
            _ => (lo, hi),
        }
    }

    /// Largest `|f(x) - f(y)| / |x - y|^alpha` over all pairs of an
    /// equispaced grid of `grid_size` points covering `[0, 1]`.
    pub fn lipschitz_audit(&self, grid_size: usize) -> Result<f64> {
        lipschitz_audit(|x| self.eval(x), self.alpha, grid_size)
    }

    /// The frontier `s * f`, with every piece of metadata rescaled.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::arg("s", "scale must be positive"));
        }
        match self.shape.clone() {
            Shape::Flat { level } => Self::flat(level * s),
            Shape::Affine { intercept, slope } => Self::affine(intercept * s, slope * s),
            Shape::Sine { base, amplitude, frequency } => {
                Self::sine(base * s, amplitude * s, frequency)
            }
            Shape::Tent { base, height } => Self::tent(base * s, height * s),
            Shape::Weierstrass { base, amplitude, alpha, terms } => {
                Self::weierstrass(base * s, amplitude * s, alpha, terms)
            }
            Shape::Custom(f) => {
                let mut spec = self.clone();
                spec.id = format!("{}*{s:?}", self.id);
                spec.shape = Shape::Custom(Arc::new(move |x| s * f(x)));
                spec.lipschitz_const *= s;
                spec.lower *= s;
                spec.upper *= s;
                spec.area *= s;
                spec.normalizer = 1.0 / spec.area;
                Ok(spec)
            }
        }
    }
}

fn eval_shape(shape: &Shape, x: f64) -> f64 {
    match shape {
        Shape::Flat { level } => *level,
        Shape::Affine { intercept, slope } => intercept + slope * x,
        Shape::Sine { base, amplitude, frequency } => base + amplitude * libm::sin(frequency * x),
        Shape::Tent { base, height } => base + height * (1.0 - libm::fabs(2.0 * x - 1.0)),
        Shape::Weierstrass { base, amplitude, alpha, terms } => {
            let mut sum = 0.0;
            let mut octave = 1.0;
            for j in 0..*terms {
                sum += libm::pow(2.0, -(j as f64) * alpha) * libm::cos(octave * PI * x);
                octave *= 2.0;
            }
            base + amplitude * sum
        }
        Shape::Custom(f) => f(x),
    }
}

// Antiderivative on [0, 1] for the closed-form shapes; the tent formula is
// only valid on one side of the kink at a time.
fn antiderivative(shape: &Shape, x: f64) -> f64 {
    match shape {
        Shape::Flat { level } => level * x,
        Shape::Affine { intercept, slope } => intercept * x + 0.5 * slope * x * x,
        Shape::Sine { base, amplitude, frequency } => {
            base * x - amplitude * libm::cos(frequency * x) / frequency
        }
        Shape::Tent { base, height } => {
            if x <= 0.5 {
                base * x + height * x * x
            } else {
                base * x + height * (0.5 - (1.0 - x) * (1.0 - x))
            }
        }
        Shape::Weierstrass { base, amplitude, alpha, terms } => {
            let mut sum = 0.0;
            let mut octave = 1.0;
            for j in 0..*terms {
                let w = octave * PI;
                sum += libm::pow(2.0, -(j as f64) * alpha) * libm::sin(w * x) / w;
                octave *= 2.0;
            }
            base * x + amplitude * sum
        }
        Shape::Custom(_) => unreachable!("custom frontiers are integrated numerically"),
    }
}

fn shape_range(shape: &Shape, a: f64, b: f64) -> (f64, f64) {
    let mut lo = eval_shape(shape, a).min(eval_shape(shape, b));
    let mut hi = eval_shape(shape, a).max(eval_shape(shape, b));
    let mut visit = |x: f64| {
        let v = eval_shape(shape, x);
        lo = lo.min(v);
        hi = hi.max(v);
    };
    match shape {
        Shape::Flat { .. } | Shape::Affine { .. } => {}
        Shape::Tent { .. } => {
            if a < 0.5 && 0.5 < b {
                visit(0.5);
            }
        }
        Shape::Sine { frequency, .. } => {
            // critical points: frequency * x = pi/2 + j * pi
            let first = libm::ceil((frequency * a - 0.5 * PI) / PI) as i64;
            let mut j = first;
            loop {
                let x = (0.5 * PI + j as f64 * PI) / frequency;
                if x >= b {
                    break;
                }
                if x > a {
                    visit(x);
                }
                j += 1;
            }
        }
        Shape::Weierstrass { .. } | Shape::Custom(_) => {
            for i in 1..RANGE_SAMPLES - 1 {
                visit(a + (b - a) * i as f64 / (RANGE_SAMPLES - 1) as f64);
            }
        }
    }
    (lo, hi)
}

/// Largest Hölder quotient of `f` over all pairs of an equispaced grid.
pub fn lipschitz_audit<F: Fn(f64) -> f64>(f: F, alpha: f64, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::arg("grid_size", "need at least 2 grid points"));
    }
    let last = (grid_size - 1) as f64;
    let xs: Vec<f64> = (0..grid_size).map(|i| i as f64 / last).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut worst = 0.0_f64;
    for i in 0..grid_size {
        for j in i + 1..grid_size {
            let ratio = libm::fabs(ys[j] - ys[i]) / libm::pow(xs[j] - xs[i], alpha);
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<FrontierSpec> {
        [
            "flat:1.0",
            "flat:2.5",
            "affine:1.0:0.5",
            "affine:2.0:-1.0",
            "sine:1.0:0.3:6.0",
            "sine:2.0:-0.5:11.0",
            "tent:1.0:0.5",
            "tent:2.0:-1.0",
            "weierstrass:2.0:0.3:0.5:8",
        ]
        .iter()
        .map(|n| FrontierSpec::from_name(n).unwrap())
        .collect()
    }

    #[test]
    fn eval_examples() {
        let flat = FrontierSpec::flat(1.0).unwrap();
        assert_eq!(flat.eval(0.3), 1.0);
        for spec in catalog() {
            assert_eq!(spec.eval(1.5), 0.0);
            assert_eq!(spec.eval(-0.1), 0.0);
        }
        let sine = FrontierSpec::sine(1.0, 0.3, 6.0).unwrap();
        assert_eq!(sine.eval(0.0), 1.0);
    }

    #[test]
    fn area_examples() {
        assert_eq!(FrontierSpec::flat(1.0).unwrap().region_area(), (1.0, 1.0));
        assert_eq!(FrontierSpec::flat(2.0).unwrap().region_area(), (2.0, 0.5));
        let (area, c) = FrontierSpec::affine(1.0, 1.0).unwrap().region_area();
        assert_eq!(area, 1.5);
        assert!((c - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_areas_match_quadrature() {
        for spec in catalog() {
            let mut breaks = vec![0.0];
            breaks.extend_from_slice(spec.kinks());
            breaks.push(1.0);
            let q = quad::integrate_pieces(|x| spec.eval(x), &breaks, Tolerance::relative(1e-12));
            assert!(
                (q.value - spec.area()).abs() <= 1e-10 * spec.area(),
                "{}: {} vs {}",
                spec.id(),
                q.value,
                spec.area()
            );
            assert_eq!(spec.area() * spec.normalizer(), 1.0, "{}", spec.id());
        }
    }

    #[test]
    fn piecewise_integrals_add_up() {
        for spec in catalog() {
            let total: f64 = (0..7)
                .map(|i| spec.integral(i as f64 / 7.0, (i + 1) as f64 / 7.0).unwrap())
                .sum();
            assert!((total - spec.area()).abs() < 1e-12, "{}", spec.id());
        }
    }

    #[test]
    fn custom_frontier_uses_quadrature() {
        let spec = FrontierSpec::custom("quad", Arc::new(|x: f64| 1.0 + x), 1.0, 1.0, 1.0, 2.0).unwrap();
        assert!((spec.area() - 1.5).abs() < 1e-12);
        assert!((spec.integral(0.0, 0.5).unwrap() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn bounds_and_holder_constants_hold() {
        for spec in catalog() {
            for i in 0..=2000 {
                let x = i as f64 / 2000.0;
                let v = spec.eval(x);
                assert!(spec.lower_bound() <= v && v <= spec.upper_bound(), "{} at {x}", spec.id());
            }
            let worst = spec.lipschitz_audit(400).unwrap();
            assert!(worst <= spec.lipschitz_const() * (1.0 + 1e-12), "{}: {worst}", spec.id());
        }
    }

    #[test]
    fn range_on_encloses_samples() {
        for spec in catalog() {
            for cell in 0..13 {
                let (a, b) = (cell as f64 / 13.0, (cell + 1) as f64 / 13.0);
                let (lo, hi) = spec.range_on(a, b);
                for i in 0..=500 {
                    let v = spec.eval(a + (b - a) * i as f64 / 500.0);
                    assert!(lo <= v + 1e-15 && v <= hi + 1e-15, "{} cell {cell}", spec.id());
                }
            }
        }
    }

    #[test]
    fn lipschitz_audit_examples() {
        let flat = FrontierSpec::flat(1.0).unwrap();
        assert_eq!(flat.lipschitz_audit(50).unwrap(), 0.0);
        let identity = lipschitz_audit(|x| x, 1.0, 100).unwrap();
        assert!((identity - 1.0).abs() < 1e-12);
        let sine = FrontierSpec::sine(1.0, 0.3, 6.0).unwrap();
        let worst = sine.lipschitz_audit(1000).unwrap();
        // oracle: dense maximization of |f'| = |1.8 cos(6x)|
        let sup_derivative = (0..=200_000)
            .map(|i| libm::fabs(1.8 * libm::cos(6.0 * i as f64 / 200_000.0)))
            .fold(0.0, f64::max);
        assert!((sup_derivative - 1.8).abs() < 1e-9);
        assert!(worst <= sup_derivative && worst > 1.7, "{worst}");
        assert!(lipschitz_audit(|x| x, 1.0, 1).is_err());
    }

    #[test]
    fn audit_is_monotone_on_nested_grids() {
        let spec = FrontierSpec::from_name("weierstrass:2.0:0.3:0.5:8").unwrap();
        let mut previous = 0.0;
        for grid in [3, 5, 9, 17, 33, 65, 129] {
            let worst = spec.lipschitz_audit(grid).unwrap();
            assert!(worst >= previous);
            previous = worst;
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(FrontierSpec::from_name("wobble:1").is_err());
        assert!(FrontierSpec::from_name("flat:abc").is_err());
        assert!(FrontierSpec::from_name("flat:1:2").is_err());
        assert!(FrontierSpec::from_name("flat:-1").is_err());
        assert!(FrontierSpec::from_name("sine:0.1:-0.5:3").is_err());
        assert_eq!(FrontierSpec::from_name("flat").unwrap().eval(0.2), 1.0);
    }

    #[test]
    fn scaling_rescales_metadata() {
        for spec in catalog() {
            let scaled = spec.scaled(3.0).unwrap();
            assert!((scaled.area() - 3.0 * spec.area()).abs() < 1e-12);
            assert!((scaled.eval(0.37) - 3.0 * spec.eval(0.37)).abs() < 1e-12);
        }
    }
}
