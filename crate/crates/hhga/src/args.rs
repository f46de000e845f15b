//! Command-line flags and their TOML mirror. Flags override the file.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::grid::Grid;

#[derive(Debug, Parser)]
#[command(
    name = "hhga",
    version,
    about = "Check Hermite-Hadamard type bounds for (alpha,m)-GA-convex functions",
    after_help = "Exit codes: 0 success / all bounds hold, 1 violation found, 2 usage or input error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the (alpha,m)-GA-convexity inequality and report a witness on failure.
    Convexity(ConvexityArgs),
    /// Evaluate bounds at a single parameter point.
    Verify(CommonArgs),
    /// Evaluate bounds over parameter grids and write CSV or JSON.
    Sweep(CommonArgs),
    /// Rank right-hand sides at each grid point.
    Compare(CommonArgs),
    /// Check the integral identity behind the single-function bounds.
    Identity(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Ga,
    Ordinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Convex,
    Concave,
}

/// Which function of `f` is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformArg {
    /// `f` itself.
    Identity,
    /// `|f'|^q`.
    AbsDeriv,
    /// `f^q` (f must be nonnegative).
    Power,
}

macro_rules! merge_fields {
    ($self:ident, $file:ident; $($field:ident),* $(,)?) => {
        Self { $($field: $self.$field.or($file.$field),)* config: $self.config }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommonArgs {
    /// Function f(x), e.g. "x^2 + ln(x)".
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Second function g(x) for the product bounds.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Left endpoint grid.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<Grid>,
    /// Right endpoint grid.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<Grid>,
    /// Grid for alpha in (0,1] [default: 1]. Grids are a value, a comma list or start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<Grid>,
    /// Grid for m in (0,1] [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<Grid>,
    /// Grid for q >= 1 [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<Grid>,
    /// Grid for the auxiliary power p, 0 < p < q.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<Grid>,
    /// Grid for the second function's alpha [default: alpha].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<Grid>,
    /// Grid for the second function's m [default: m].
    #[arg(long, allow_hyphen_values = true)]
    pub m2: Option<Grid>,
    /// Comma-separated theorem ids, or all / single / product.
    #[arg(long)]
    pub theorems: Option<String>,
    /// (x, y) pairs per hypothesis check [default: 256].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sampler seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comparison tolerance floor [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write an SVG margin plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Worker threads (0 = all cores) [default: 0].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// TOML file with any of the above keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    fn merge(self, file: Self) -> Self {
        merge_fields!(self, file; f, g, a, b, alpha, m, q, p, alpha2, m2, theorems,
            samples, seed, tol, out, format, plot, jobs)
    }

    /// Apply `--config` if given.
    pub fn resolve(self) -> anyhow::Result<Self> {
        match &self.config {
            Some(path) => {
                let file: Self = read_config(path)?;
                Ok(self.merge(file))
            }
            None => Ok(self),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvexityArgs {
    /// Function f(x).
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Exponent alpha in [0,1] [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Parameter m in [0,1] [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Power for --transform abs-deriv or power [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Right end of the domain.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Left end of the domain [default: 1e-12].
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long, value_enum)]
    pub transform: Option<TransformArg>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replay one triple "x,y,lambda" instead of sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl ConvexityArgs {
    fn merge(self, file: Self) -> Self {
        merge_fields!(self, file; f, alpha, m, q, hi, lo, kind, direction, transform,
            samples, seed, at)
    }

    pub fn resolve(self) -> anyhow::Result<Self> {
        match &self.config {
            Some(path) => {
                let file: Self = read_config(path)?;
                Ok(self.merge(file))
            }
            None => Ok(self),
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
