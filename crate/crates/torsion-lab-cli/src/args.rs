use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "torsion-lab", version, about = "Torsional stiffness of generalized continua")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// T_c, T_m, T_w against L_c for each model.
    Curve(Common),
    /// Radial profiles, or point fields with --fields.
    Profile(ProfileArgs),
    /// T_w of several models on a shared L_c grid, one column per model.
    Compare(Common),
    /// Closed form against the collocation oracle.
    Verify(VerifyArgs),
    /// Fit free parameters to (R, T_w) data.
    Fit(FitArgs),
    /// L_c → 0 and L_c → ∞ values and the bounded classification.
    Limits(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Model name; repeat or separate with commas.
    #[arg(long = "model", value_delimiter = ',')]
    pub models: Vec<String>,

    /// JSON or TOML parameter document.
    #[arg(long)]
    pub params: Option<PathBuf>,

    /// Override one parameter, `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,

    /// Cylinder radius.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,

    /// `min:max:count[:log]`.
    #[arg(long = "Lc-grid")]
    pub lc_grid: Option<String>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Skip the positive-definiteness check.
    #[arg(long)]
    pub allow_indefinite: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,

    #[arg(long, default_value_t = 101)]
    pub samples: usize,

    /// Dump 3D field components instead of the radial profiles.
    #[arg(long)]
    pub fields: bool,

    /// Angles per radius for --fields.
    #[arg(long, default_value_t = 4)]
    pub angles: usize,

    /// Axial coordinate for --fields.
    #[arg(long, default_value_t = 0.0)]
    pub z: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,

    #[arg(long, default_value_t = 200)]
    pub nodes: usize,

    #[arg(long, default_value_t = 1e-7)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,

    /// TOML fit configuration.
    #[arg(long)]
    pub config: PathBuf,
}
