//! Estimation of the upper boundary `f` of a planar support
//! `S = {(x, y) : 0 <= x <= 1, 0 <= y <= f(x)}` from a Poisson point process
//! observed inside `S`.
//!
//! The estimator partitions `[0, 1]` into `k` strips, keeps the highest point
//! in every strip and smooths those maxima with a Parzen-Rosenblatt kernel.
//! Bias-corrected and edge-reflected variants, the closed-form distribution
//! of the strip maxima, normalization sequences, hyperparameter schedules and
//! the statistics used by the Monte Carlo harness all live here.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; file formats, parallel experiments and the CLI are in
//! `frontier-lab`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod estimator;
pub mod frontier;
pub mod kernel;
pub mod metrics;
pub mod quad;
pub mod rng;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{CellMaxima, CellPartition, Correction, Estimator, EstimatorConfig};
pub use frontier::FrontierSpec;
pub use kernel::{KernelKind, KernelSpec};
pub use simulate::{PointSet, SamplingMode};
