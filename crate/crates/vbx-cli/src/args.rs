//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "vbx",
    version,
    about = "Laplace invariants, adapted coframes and conservation laws of hyperbolic systems"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled zero tests (overridden by VBX_SEED).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance of sampled zero tests.
    #[arg(long = "tol", global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Jet points per sampled zero test.
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,
    /// Rescaling `mu` of the contact form, `Theta = mu * theta`.
    #[arg(long, global = true, default_value = "1")]
    pub mu: String,
    /// Highest jet order reductions may reach.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrability conditions of the system.
    Check(System),
    /// Linearized operators and their integrability relations.
    Linearize(System),
    /// Generalized Laplace invariants.
    Invariants(System),
    /// Iterated Laplace transform in one direction.
    Transform(TransformArgs),
    /// Laplace indices in every direction.
    Indices(IndicesArgs),
    /// Formal adjoint of the linearized system.
    Adjoint(System),
    /// Laplace-adapted coframe, optionally with its structure equations checked.
    Coframe(CoframeArgs),
    /// Conservation law assembled from a rho-triple.
    Conslaw(ConslawArgs),
    /// Closure of a given form.
    Verify(VerifyArgs),
    /// Darboux integrability of an invariant bundle.
    Darboux(DarbouxArgs),
    /// Conservation law generated from invariants.
    Generate(GenerateArgs),
    /// Symbol classification of a three-variable system or explicit symbol forms.
    Classify(System),
}

#[derive(Debug, Args)]
pub struct System {
    /// System JSON file, or the name of a bundled system.
    pub system: String,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub sys: System,
    /// Direction `i,j`.
    #[arg(long, value_parser = parse_dir)]
    pub dir: (u8, u8),
    /// Number of transforms to apply.
    #[arg(long, default_value_t = 1)]
    pub times: usize,
    #[arg(long, value_enum, default_value_t = Rule::Derived)]
    pub rule: Rule,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Rule {
    Derived,
    Published,
}

#[derive(Debug, Args)]
pub struct IndicesArgs {
    #[command(flatten)]
    pub sys: System,
    /// Largest number of transforms tried per direction.
    #[arg(long, default_value_t = 10)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct CoframeArgs {
    #[command(flatten)]
    pub sys: System,
    /// Highest coframe level.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Check the structure equations and bracket congruences.
    #[arg(long)]
    pub verify: bool,
    /// Branch seed `j:i`, repeatable.
    #[arg(long = "branch", value_parser = parse_branch)]
    pub branches: Vec<(u8, u8)>,
    #[arg(long, value_enum, default_value_t = Reading::Matching)]
    pub readings: Reading,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Reading {
    Matching,
    Fixed,
}

#[derive(Debug, Args)]
pub struct ConslawArgs {
    #[command(flatten)]
    pub sys: System,
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long, value_enum, default_value_t = Psi::Green)]
    pub psi: Psi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Psi {
    Green,
    Published,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub sys: System,
    #[arg(long)]
    pub form: PathBuf,
}

#[derive(Debug, Args)]
pub struct DarbouxArgs {
    #[command(flatten)]
    pub sys: System,
    #[arg(long)]
    pub bundle: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub sys: System,
    #[arg(long, value_parser = ["1s", "2s"])]
    pub kind: String,
    #[arg(long)]
    pub inputs: PathBuf,
}

fn index_pair(s: &str, sep: char) -> Result<(u8, u8), String> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| format!("expected two indices separated by '{sep}'"))?;
    let a: u8 = a.trim().parse().map_err(|_| format!("bad index {a:?}"))?;
    let b: u8 = b.trim().parse().map_err(|_| format!("bad index {b:?}"))?;
    Ok((a, b))
}

fn parse_dir(s: &str) -> Result<(u8, u8), String> {
    index_pair(s, ',')
}

fn parse_branch(s: &str) -> Result<(u8, u8), String> {
    index_pair(s, ':')
}
