//! Realizations of the observation process on `S`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::frontier::FrontierSpec;
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

/// Hard cap on rejection proposals for one realization.
pub const PROPOSAL_BUDGET: u64 = 1_000_000_000;
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Poisson process with mean measure `n c λ`.
    Poisson,
    /// Exactly `n` i.i.d. uniform points on `S`.
    Binomial,
}

impl SamplingMode {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMode::Poisson => "poisson",
            SamplingMode::Binomial => "binomial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// One realization of the point process together with what produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub intensity: f64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub frontier_id: String,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `N(S) ~ Poisson(n)` and then that many uniform points on `S`.
pub fn sample_poisson(spec: &FrontierSpec, n: f64, seed: u64) -> Result<PointSet> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::arg("n", "intensity must be a finite number >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let count = poisson_count(&mut rng, n);
    let points = uniform_points(spec, count, &mut rng)?;
    Ok(PointSet {
        points,
        intensity: n,
        seed,
        mode: SamplingMode::Poisson,
        frontier_id: spec.id().to_string(),
    })
}

/// Exactly `n` uniform points on `S`.
pub fn sample_binomial(spec: &FrontierSpec, n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::arg("n", "sample size must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let points = uniform_points(spec, n as u64, &mut rng)?;
    Ok(PointSet {
        points,
        intensity: n as f64,
        seed,
        mode: SamplingMode::Binomial,
        frontier_id: spec.id().to_string(),
    })
}

pub fn sample(spec: &FrontierSpec, mode: SamplingMode, n: f64, seed: u64) -> Result<PointSet> {
    match mode {
        SamplingMode::Poisson => sample_poisson(spec, n, seed),
        SamplingMode::Binomial => {
            if !(n.is_finite() && n >= 1.0 && n == libm::trunc(n)) {
                return Err(Error::arg("n", "binomial sample size must be a positive integer"));
            }
            sample_binomial(spec, n as usize, seed)
        }
    }
}

/// Inversion below `mean = 30`, the transformed-rejection sampler of
/// `rand_distr` above.
pub fn poisson_count(rng: &mut SimRng, mean: f64) -> u64 {
    if mean < INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = libm::exp(-mean);
        let mut cdf = p;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    } else {
        let dist = Poisson::new(mean).expect("mean is finite and positive");
        dist.sample(rng) as u64
    }
}

fn uniform_points(spec: &FrontierSpec, count: u64, rng: &mut SimRng) -> Result<Vec<Point>> {
    let height = spec.upper_bound();
    let mut points = Vec::with_capacity(count as usize);
    let mut proposals = 0u64;
    while (points.len() as u64) < count {
        if proposals >= PROPOSAL_BUDGET {
            return Err(Error::PathologicalFrontier(spec.id().to_string()));
        }
        proposals += 1;
        let x: f64 = rng.random();
        let y: f64 = rng.random::<f64>() * height;
        if y <= spec.eval(x) {
            points.push(Point { x, y });
        }
    }
    Ok(points)
}
