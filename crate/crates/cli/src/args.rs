use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use thirring_core::simulator::DEFAULT_PACKET_WIDTH;

#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(name = "thirring", version, about = "Two-particle Thirring quantum walk: spectra, eigensolutions and simulations")]
pub struct Cli {
    /// Read every angle and momentum argument as a multiple of π.
    #[arg(long, global = true)]
    pub pi_units: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Continuous band edges and discrete (bound/localized) quasi-energies versus p.
    Bands(BandsArgs),
    /// Bound state at fixed total momentum.
    Boundstate(BoundStateArgs),
    /// Time evolution of a two-particle state on an L×L lattice.
    Evolve(EvolveArgs),
    /// Scattering eigenstate and transmission coefficients.
    Scatter(ScatterArgs),
    /// Relative momenta sharing one quasi-energy in the free two-particle spectrum.
    Degeneracy(DegeneracyArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands(_) => "bands",
            Command::Boundstate(_) => "boundstate",
            Command::Evolve(_) => "evolve",
            Command::Scatter(_) => "scatter",
            Command::Degeneracy(_) => "degeneracy",
            Command::Verify(_) => "verify",
        }
    }
}

/// Comma-separated list of couplings. An empty string is an empty list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChiList(pub Vec<f64>);

fn parse_chi_list(s: &str) -> Result<ChiList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(ChiList)
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandsArgs {
    #[arg(long)]
    pub mass: f64,
    /// Couplings, comma separated; one discrete column each.
    #[arg(long, value_parser = parse_chi_list, allow_hyphen_values = true, default_value = "")]
    pub chi: ChiList,
    #[arg(long, default_value_t = 200)]
    pub p_steps: usize,
    /// Lower end of the p range (default -π).
    #[arg(long, allow_hyphen_values = true)]
    pub p_min: Option<f64>,
    /// Upper end of the p range (default π).
    #[arg(long, allow_hyphen_values = true)]
    pub p_max: Option<f64>,
    /// Output directory; without it the table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateArgs {
    #[arg(long)]
    pub mass: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    /// Half width of the relative-coordinate window of the profile.
    #[arg(long, default_value_t = 40)]
    pub window: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Singlet,
    Packet,
    Custom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveArgs {
    #[arg(long)]
    pub mass: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi: f64,
    #[arg(long, value_enum, default_value_t = InitKind::Singlet)]
    pub init: InitKind,
    /// Central total momentum of the packet.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub p0: f64,
    /// Packet width in x₁ + x₂ (`inf` for a pure momentum state).
    #[arg(long, default_value_t = DEFAULT_PACKET_WIDTH)]
    pub width: f64,
    /// CSV with columns x1,x2,component,re,im (component 0..3 = ↑↑,↑↓,↓↑,↓↓).
    #[arg(long)]
    pub amplitudes: Option<PathBuf>,
    #[arg(long)]
    pub steps: usize,
    /// Lattice side L (even).
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[arg(long, visible_alias = "out-dir")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    #[value(alias = "+")]
    Plus,
    #[value(alias = "-")]
    Minus,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterArgs {
    #[arg(long)]
    pub mass: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = BranchArg::Plus, allow_hyphen_values = true)]
    pub branch: BranchArg,
    /// Half width of the relative-coordinate window of the profile.
    #[arg(long, default_value_t = 20)]
    pub window: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyArgs {
    #[arg(long)]
    pub mass: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    pub level: LevelArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
