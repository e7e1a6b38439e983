use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morrey_core::morrey::Side;
use morrey_core::report::Format;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "morrey", version, about = "One-sided weighted Morrey spaces: norms, operators, Abel and fractional Cauchy problems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Grid resolution (cells); inputs are resampled, generated grids use it directly.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Refinement levels for resolution-stability checks.
    #[arg(long, global = true)]
    pub refine: Option<usize>,
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `csv` or `json`; each command has its own default
    #[arg(long, global = true, value_parser = parse_format)]
    #[serde(serialize_with = "display")]
    pub format: Option<Format>,
    /// Manifest path; defaults to `<out>.manifest.json`, or standard error without `--out`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: morrey_core::Error| e.to_string())
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: morrey_core::Error| e.to_string())
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Strong or weak one-sided Morrey norm of a sampled function.
    Norm(NormArgs),
    /// Apply an operator to a sampled function.
    #[command(subcommand)]
    Ops(OpsCommand),
    /// One-sided weight class constants.
    Weights(WeightsArgs),
    /// Abel's equation I^α φ = f.
    #[command(subcommand)]
    Abel(AbelCommand),
    /// The fractional Cauchy problem D^α u = f(t, u).
    #[command(subcommand)]
    Fde(FdeCommand),
    /// Run a verification experiment.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, value_parser = parse_side)]
    pub side: Side,
    /// `const:<c>`, `exp`, `pow:<δ>` or `file:<path.csv>`.
    #[arg(long, default_value = "const:1")]
    pub weight: String,
    /// Use the local space on (0, T) instead of the whole line.
    #[arg(long = "local-T")]
    pub local_t: Option<f64>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub weak: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpsCommand {
    Apply(OpsApplyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OpName {
    #[value(name = "maximal+")]
    #[serde(rename = "maximal+")]
    MaximalPlus,
    #[value(name = "maximal-")]
    #[serde(rename = "maximal-")]
    MaximalMinus,
    #[value(name = "weyl+")]
    #[serde(rename = "weyl+")]
    WeylPlus,
    #[value(name = "weyl-")]
    #[serde(rename = "weyl-")]
    WeylMinus,
    #[value(name = "rl-int")]
    #[serde(rename = "rl-int")]
    RlInt,
    #[value(name = "rl-der")]
    #[serde(rename = "rl-der")]
    RlDer,
    #[value(name = "singular")]
    #[serde(rename = "singular")]
    Singular,
    #[value(name = "majorant")]
    #[serde(rename = "majorant")]
    Majorant,
    #[value(name = "meanvalue")]
    #[serde(rename = "meanvalue")]
    MeanValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelName {
    /// `sin(log|x|) / (x log|x|)` on the negative half-line
    #[value(alias = "paper")]
    LogSinc,
}

#[derive(Debug, Args, Serialize)]
pub struct OpsApplyArgs {
    #[arg(long, value_enum)]
    pub op: OpName,
    /// Order; required for the Weyl and R-L operators, 0 by default otherwise.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelName::LogSinc)]
    pub kernel: KernelName,
    /// Window length of the mean-value operator.
    #[arg(long)]
    pub window: Option<f64>,
    /// Declared power `s` of the data at 0 (`f ~ c t^s`).
    #[arg(long, allow_hyphen_values = true)]
    pub origin_power: Option<f64>,
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightClass {
    /// A_p^+.
    Ap,
    /// A_(p,q)^+.
    Apq,
    /// One-sided doubling ratio.
    Doubling,
    /// Dyadic growth condition.
    Growth,
    /// A_(p,q)^+ against A_{q(1−α)}^+ for ω^q.
    Equivalence,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightsArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, value_enum)]
    pub class: WeightClass,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub k_max: u32,
    /// Sweep interval.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub left: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub right: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbelCommand {
    Solve(AbelSolveArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AbelSolveArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value = "const:1")]
    pub weight: String,
    /// Solve even when the solvability proxies fail.
    #[arg(long)]
    pub force: bool,
    /// Declared power `s` of the data at 0 (`f ~ c t^s`).
    #[arg(long, allow_hyphen_values = true)]
    pub origin_power: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdeCommand {
    /// Picard iteration for the problem in a JSON config.
    Solve(FdeSolveArgs),
    /// Residual of the exact power solution of D^α u = λ t^γ u².
    Exact(FdeExactArgs),
    /// Contraction horizons δ.
    Delta(FdeDeltaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FdeSolveArgs {
    /// JSON problem description
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FdeExactArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda_coef: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.25)]
    pub interior_cut: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FdeDeltaArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Weak11,
    StrongFrac,
    RlBound,
    RlScaling,
    Compactness,
    EquicontRate,
    Membership,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Weak11 => "weak11",
            Experiment::StrongFrac => "strong-frac",
            Experiment::RlBound => "rl-bound",
            Experiment::RlScaling => "rl-scaling",
            Experiment::Compactness => "compactness",
            Experiment::EquicontRate => "equicont-rate",
            Experiment::Membership => "membership",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// JSON experiment configuration
    #[arg(long)]
    pub config: PathBuf,
}
