//! Command line and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tennisball_core::{Preset, StaircaseParams};
use thiserror::Error;

use crate::vector_io::VectorFormat;

/// Subspace dimension ratio of the main theorem.
pub const ALPHA: f64 = 4.3e-5;

#[derive(Debug, Parser)]
#[command(name = "tbl", version, about = "Monte-Carlo laboratory for the tennis-ball construction")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Paper,
    Desk,
    Custom,
}

impl PresetArg {
    pub fn name(self) -> &'static str {
        match self {
            PresetArg::Paper => "paper",
            PresetArg::Desk => "desk",
            PresetArg::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Parameter preset; `custom` requires --lambda, --eta, --beta and --epsilon.
    #[arg(long, value_enum, default_value_t = PresetArg::Desk, global = true)]
    pub preset: PresetArg,
    /// Dimension.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Subspace dimension [default: max(1, floor(4.3e-5 n))].
    #[arg(long, global = true)]
    pub d: Option<usize>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Expansion radius [default: tau^2 / 2].
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, env = "TBL_SEED", global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub circles: Option<u64>,
    /// Theta grid size for circle scans.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "TBL_THREADS", global = true)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,
    /// Report file [default: stdout].
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Apply the tennis-ball map (or its inverse) to vectors from a file.
    Map {
        /// Text or TBL1 binary vector file.
        #[arg(long)]
        input: PathBuf,
        /// Where to write the mapped vectors.
        #[arg(long)]
        vectors_out: Option<PathBuf>,
        /// Format of --vectors-out [default: same as the input].
        #[arg(long, value_enum)]
        vector_format: Option<VectorFormat>,
        #[arg(long)]
        inverse: bool,
    },
    /// Scan random great circles for witnesses outside Gamma.
    ScanCircles,
    /// Estimate the measure of Delta on the sphere.
    EstimateDelta {
        /// Dimensions to sweep [default: --n].
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// Check that a random subspace avoids Delta and maps into Gamma.
    SubspaceTest,
    /// Subspace test plus circle scans in one run.
    EndToEnd,
    /// Randomised checks of the individual lemmas.
    VerifyLemmas {
        /// Perturbation size for the switching lemma.
        #[arg(long, default_value_t = 0.01)]
        switch_eps: f64,
    },
    /// Evaluate the explicit counting and volume bounds.
    Bounds {
        /// Net scale.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Block length for the counting bounds.
        #[arg(long, default_value_t = 10)]
        m: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Map { .. } => "map",
            Command::ScanCircles => "scan-circles",
            Command::EstimateDelta { .. } => "estimate-delta",
            Command::SubspaceTest => "subspace-test",
            Command::EndToEnd => "end-to-end",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::Bounds { .. } => "bounds",
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("preset custom requires {0}")]
    MissingCustom(String),
    #[error(transparent)]
    Params(#[from] tennisball_core::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: PresetArg,
    pub params: StaircaseParams,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub trials: u64,
    pub circles: u64,
    pub grid: usize,
    pub threads: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves flags (and, through clap, `TBL_` variables) against the
    /// preset defaults.
    pub fn resolve(a: &CommonArgs) -> Result<Self, ConfigError> {
        let params = match a.preset {
            PresetArg::Custom => {
                let missing: Vec<&str> = [
                    ("--lambda", a.lambda.is_none()),
                    ("--eta", a.eta.is_none()),
                    ("--beta", a.beta.is_none()),
                    ("--epsilon", a.epsilon.is_none()),
                ]
                .into_iter()
                .filter_map(|(flag, gone)| gone.then_some(flag))
                .collect();
                if !missing.is_empty() {
                    return Err(ConfigError::MissingCustom(missing.join(", ")));
                }
                StaircaseParams::new(a.lambda.unwrap(), a.eta.unwrap(), a.beta.unwrap(), a.epsilon.unwrap())?
            }
            preset => {
                let base =
                    StaircaseParams::preset(if preset == PresetArg::Paper { Preset::Paper } else { Preset::Desk });
                let eta = a.eta.unwrap_or(base.eta());
                let epsilon = a.epsilon.unwrap_or_else(|| {
                    let tau = -(-2.0 * eta.ln_1p()).exp_m1();
                    tau * tau / 2.0
                });
                StaircaseParams::new(a.lambda.unwrap_or(base.lambda()), eta, a.beta.unwrap_or(base.beta()), epsilon)?
            }
        };
        let n = a.n.unwrap_or(1000);
        let d = a.d.unwrap_or_else(|| ((ALPHA * n as f64).floor() as usize).max(1));
        let cfg = Self {
            preset: a.preset,
            params,
            n,
            d,
            seed: a.seed.unwrap_or(0),
            trials: a.trials.unwrap_or(1000),
            circles: a.circles.unwrap_or(100),
            grid: a.grid.unwrap_or(tennisball_core::experiments::DEFAULT_GRID),
            threads: a.threads.unwrap_or(0),
            format: a.format,
            output: a.output.clone(),
        };
        if cfg.n == 0 {
            return Err(ConfigError::Invalid("--n must be at least 1".into()));
        }
        if cfg.d == 0 || cfg.d > cfg.n {
            return Err(ConfigError::Invalid(format!("--d must lie in 1..={}", cfg.n)));
        }
        if cfg.trials == 0 || cfg.circles == 0 {
            return Err(ConfigError::Invalid("--trials and --circles must be positive".into()));
        }
        if cfg.grid < 8 {
            return Err(ConfigError::Invalid("--grid must be at least 8".into()));
        }
        Ok(cfg)
    }
}
