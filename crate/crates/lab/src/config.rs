//! Command-line flags, the optional TOML config file, and their merge into a
//! validated [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use frontier_core::asymptotics::SelectorMode;
use frontier_core::estimator::Correction;
use frontier_core::KernelSpec;
use serde::Deserialize;

use crate::error::LabError;
use crate::experiments::{CorrectionKind, Mode, Sampling, Statistic, DEFAULT_GRID};

#[derive(Debug, Parser)]
#[command(name = "frontier", version, about = "Kernel estimation of support frontiers from Poisson point processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Debug, Subcommand)]
pub enum CommandLine {
    /// Simulate a point set and write points.csv with a metadata sidecar.
    Simulate(Flags),
    /// Estimate the frontier from a points file or an inline simulation.
    Estimate(Flags),
    /// Run a replicated experiment and write report.json plus CSV tables.
    Experiment(Flags),
    /// Run a rate experiment and compare the fitted L1 slope with its target.
    Rates(Flags),
}

impl CommandLine {
    pub fn split(self) -> (Command, Flags) {
        match self {
            CommandLine::Simulate(f) => (Command::Simulate, f),
            CommandLine::Estimate(f) => (Command::Estimate, f),
            CommandLine::Experiment(f) => (Command::Experiment, f),
            CommandLine::Rates(f) => (Command::Rates, f),
        }
    }
}

/// Flags shared by every command. Each may also be set in the `--config`
/// file under the same name with `_` for `-`; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// TOML file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Frontier id, e.g. `flat:1.0`, `sine:1:0.3:6`, `tent:0.5:1`.
    #[arg(long)]
    pub frontier: Option<String>,
    /// Kernel: uniform, triangular, epanechnikov, biweight, triweight, gaussian.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Intensity n (expected number of points).
    #[arg(long)]
    pub n: Option<f64>,
    /// Number of cells.
    #[arg(long)]
    pub k: Option<usize>,
    /// Bandwidth.
    #[arg(long)]
    pub h: Option<f64>,
    /// Hyperparameter selector: mse_raw or mse_corrected.
    #[arg(long)]
    pub mode: Option<String>,
    /// Hölder exponent used by the selector.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// raw, bias or edge.
    #[arg(long)]
    pub correction: Option<String>,
    /// Number of evaluation grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Comma-separated intensities.
    #[arg(long, value_delimiter = ',')]
    pub n_ladder: Option<Vec<f64>>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for replicates.
    #[arg(long)]
    pub workers: Option<usize>,
    /// poisson or binomial.
    #[arg(long)]
    pub sampling: Option<String>,
    /// Comma-separated evaluation points for pointwise statistics.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    /// Comma-separated coverage levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Points CSV to estimate from.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Confidence level reported by `estimate`.
    #[arg(long)]
    pub level: Option<f64>,
    /// Comma-separated statistics: l1, pointwise, coverage, normality, vector_normality.
    #[arg(long, value_delimiter = ',')]
    pub stats: Option<Vec<String>>,
}

macro_rules! overlay {
    ($flags:ident, $file:ident, $($field:ident),*) => {
        Flags { config: $flags.config, $($field: $flags.$field.or($file.$field)),* }
    };
}

impl Flags {
    /// Fills unset flags from the config file named by `--config`.
    pub fn with_file(self) -> Result<Flags, LabError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config_file(&path)?;
        Ok(overlay!(
            self, file, frontier, kernel, n, k, h, mode, alpha, correction, grid, seed, replicates,
            n_ladder, output_dir, workers, sampling, points, levels, input, level, stats
        ))
    }
}

pub fn read_config_file(path: &Path) -> Result<Flags, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    toml::from_str(&text).map_err(|e| LabError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Estimate,
    Experiment,
    Rates,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyper {
    Explicit { k: usize, h: f64 },
    Selector(Mode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub frontier: String,
    pub kernel: String,
    pub n: Option<f64>,
    pub hyper: Hyper,
    pub alpha: f64,
    pub correction: CorrectionKind,
    pub grid: usize,
    pub seed: Option<u64>,
    pub replicates: usize,
    pub n_ladder: Vec<f64>,
    pub output_dir: PathBuf,
    pub workers: Option<usize>,
    pub sampling: Sampling,
    pub points: Vec<f64>,
    pub levels: Vec<f64>,
    pub input: Option<PathBuf>,
    pub level: f64,
    pub stats: Vec<Statistic>,
}

fn positive(field: &str, v: f64) -> Result<f64, LabError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(LabError::validation(field, format!("must be positive, got {v}")))
    }
}

fn positive_count(field: &str, v: usize) -> Result<usize, LabError> {
    if v > 0 {
        Ok(v)
    } else {
        Err(LabError::validation(field, "must be positive"))
    }
}

fn parse_statistic(name: &str) -> Result<Statistic, LabError> {
    Ok(match name.trim() {
        "l1" => Statistic::L1,
        "pointwise" => Statistic::Pointwise,
        "coverage" => Statistic::Coverage,
        "normality" => Statistic::Normality,
        "vector_normality" | "vector" => Statistic::VectorNormality,
        other => return Err(LabError::validation("stats", format!("unknown statistic `{other}`"))),
    })
}

impl RunConfig {
    pub fn from_flags(command: Command, flags: Flags) -> Result<Self, LabError> {
        let f = flags.with_file()?;
        let n = f.n.map(|v| positive("n", v)).transpose()?;
        let correction = match f.correction.as_deref() {
            None => CorrectionKind::Bias,
            Some(name) => match Correction::from_name(name)
                .map_err(|e| LabError::validation("correction", e.to_string()))?
            {
                Correction::Raw => CorrectionKind::Raw,
                Correction::BiasCorrected => CorrectionKind::Bias,
                Correction::EdgeCorrected => CorrectionKind::Edge,
            },
        };
        let kernel = f.kernel.unwrap_or_else(|| "biweight".to_string());
        let spec = KernelSpec::from_name(&kernel).map_err(|e| LabError::validation("kernel", e.to_string()))?;
        if correction == CorrectionKind::Edge && !spec.is_compact() {
            return Err(LabError::validation(
                "correction",
                format!("edge correction needs a compactly supported kernel, {} is not", spec.name()),
            ));
        }
        let hyper = match (f.k, f.h, f.mode.as_deref()) {
            (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => {
                return Err(LabError::validation("mode", "give either --k/--h or --mode, not both"))
            }
            (Some(k), Some(h), None) => Hyper::Explicit {
                k: positive_count("k", k)?,
                h: positive("h", h)?,
            },
            (Some(_), None, None) => return Err(LabError::validation("h", "--k needs --h")),
            (None, Some(_), None) => return Err(LabError::validation("k", "--h needs --k")),
            (None, None, Some(name)) => Hyper::Selector(
                match SelectorMode::from_name(name).map_err(|e| LabError::validation("mode", e.to_string()))? {
                    SelectorMode::MseRaw => Mode::MseRaw,
                    SelectorMode::MseCorrected => Mode::MseCorrected,
                },
            ),
            (None, None, None) => Hyper::Selector(match correction {
                CorrectionKind::Raw => Mode::MseRaw,
                _ => Mode::MseCorrected,
            }),
        };
        let alpha = positive("alpha", f.alpha.unwrap_or(1.0))?;
        if alpha > 1.0 {
            return Err(LabError::validation("alpha", "must not exceed 1"));
        }
        let sampling = match f.sampling.as_deref().map(str::trim) {
            None | Some("poisson") => Sampling::Poisson,
            Some("binomial") => Sampling::Binomial,
            Some(other) => return Err(LabError::validation("sampling", format!("unknown mode `{other}`"))),
        };
        let n_ladder = match f.n_ladder {
            Some(ladder) => ladder
                .into_iter()
                .map(|v| positive("n_ladder", v))
                .collect::<Result<Vec<_>, _>>()?,
            None => n.into_iter().collect(),
        };
        let level = f.level.unwrap_or(0.95);
        if !(level > 0.0 && level < 1.0) {
            return Err(LabError::validation("level", "must lie in (0, 1)"));
        }
        let stats = match f.stats {
            Some(names) => names.iter().map(|s| parse_statistic(s)).collect::<Result<Vec<_>, _>>()?,
            None => vec![Statistic::L1],
        };
        let cfg = RunConfig {
            command,
            frontier: f.frontier.unwrap_or_else(|| "flat:1.0".to_string()),
            kernel,
            n,
            hyper,
            alpha,
            correction,
            grid: positive_count("grid", f.grid.unwrap_or(DEFAULT_GRID))?,
            seed: f.seed,
            replicates: positive_count("replicates", f.replicates.unwrap_or(200))?,
            n_ladder,
            output_dir: f.output_dir.unwrap_or_else(|| PathBuf::from(".")),
            workers: f.workers.map(|w| positive_count("workers", w)).transpose()?,
            sampling,
            points: f.points.unwrap_or_else(|| vec![0.5]),
            levels: f.levels.unwrap_or_else(|| vec![0.95]),
            input: f.input,
            level,
            stats,
        };
        cfg.check_command()?;
        Ok(cfg)
    }

    fn check_command(&self) -> Result<(), LabError> {
        match self.command {
            Command::Simulate => {
                if self.n.is_none() {
                    return Err(LabError::validation("n", "simulate needs --n"));
                }
            }
            Command::Estimate => {
                if self.input.is_none() && self.n.is_none() {
                    return Err(LabError::validation("n", "estimate needs --input or --n"));
                }
            }
            Command::Experiment | Command::Rates => {
                if self.seed.is_none() {
                    return Err(LabError::validation("seed", "experiments need an explicit --seed"));
                }
                if self.n_ladder.is_empty() {
                    return Err(LabError::validation("n_ladder", "give --n-ladder or --n"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, LabError> {
        let cli = Cli::try_parse_from(std::iter::once("frontier").chain(args.iter().copied())).unwrap();
        let (command, flags) = cli.command.split();
        RunConfig::from_flags(command, flags)
    }

    fn field(err: LabError) -> String {
        match err {
            LabError::Validation { field, .. } => field,
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn zero_intensity_names_n() {
        assert_eq!(field(parse(&["simulate", "--n", "0", "--seed", "1"]).unwrap_err()), "n");
    }

    #[test]
    fn edge_with_gaussian_rejected() {
        let err = parse(&["estimate", "--n", "1000", "--kernel", "gaussian", "--correction", "edge"]).unwrap_err();
        assert_eq!(field(err), "correction");
    }

    #[test]
    fn explicit_and_selector_exclusive() {
        let err = parse(&["estimate", "--n", "1000", "--k", "10", "--h", "0.1", "--mode", "mse_raw"]).unwrap_err();
        assert_eq!(field(err), "mode");
        assert_eq!(field(parse(&["estimate", "--n", "1000", "--k", "10"]).unwrap_err()), "h");
    }

    #[test]
    fn science_commands_need_seed() {
        assert_eq!(field(parse(&["experiment", "--n-ladder", "1000,2000"]).unwrap_err()), "seed");
        assert_eq!(field(parse(&["rates", "--n-ladder", "1000,2000,4000"]).unwrap_err()), "seed");
    }

    #[test]
    fn selector_follows_correction() {
        let cfg = parse(&["estimate", "--n", "1000", "--correction", "raw"]).unwrap();
        assert_eq!(cfg.hyper, Hyper::Selector(Mode::MseRaw));
        let cfg = parse(&["estimate", "--n", "1000"]).unwrap();
        assert_eq!(cfg.hyper, Hyper::Selector(Mode::MseCorrected));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "frontier = \"tent\"\nn = 500.0\nseed = 9\nn_ladder = [100.0, 200.0, 400.0]\n").unwrap();
        let cfg = parse(&["experiment", "--config", path.to_str().unwrap(), "--seed", "4"]).unwrap();
        assert_eq!(cfg.frontier, "tent");
        assert_eq!(cfg.seed, Some(4));
        assert_eq!(cfg.n, Some(500.0));
        assert_eq!(cfg.n_ladder, vec![100.0, 200.0, 400.0]);
    }

    #[test]
    fn unknown_file_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "frontiers = \"tent\"\n").unwrap();
        let err = parse(&["simulate", "--config", path.to_str().unwrap(), "--n", "10"]).unwrap_err();
        assert!(matches!(err, LabError::Format { .. }));
    }
}
