use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "srbm2d", version, about = "Geometry, rate function and tail asymptotics of two-dimensional SRBMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Instance file: JSON with keys sigma, mu, r and optional name.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Relative tolerance for every equality decision.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 1e-3)]
    pub dt: f64,

    #[arg(long, global = true, default_value_t = 2e5)]
    pub horizon: f64,

    #[arg(long = "burn-in", global = true, default_value_t = 100.0)]
    pub burn_in: f64,

    #[arg(long, global = true, default_value_t = 4)]
    pub replications: usize,

    /// Histogram bins for simulate.
    #[arg(long, global = true, default_value_t = 200)]
    pub bins: usize,

    /// Histogram range for simulate; defaults to 10/min(τ1, τ2).
    #[arg(long = "x-max", global = true)]
    pub x_max: Option<f64>,

    /// Evaluate on N directions evenly spaced in angle over [0, π/2].
    #[arg(long, global = true)]
    pub polar: Option<usize>,

    /// Direction "v1,v2"; repeatable.
    #[arg(long = "direction", global = true, value_parser = parse_direction, allow_hyphen_values = true)]
    pub directions: Vec<(f64, f64)>,

    #[arg(long, global = true, value_enum, default_value_t = MeasureArg::Nu2)]
    pub measure: MeasureArg,

    #[arg(long, global = true, value_enum, default_value_t = What::All)]
    pub what: What,

    /// Directory for CSV output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for simulation and oracle runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the existence and stability conditions.
    Validate,
    /// Characteristic points, τ and the category.
    Points,
    /// Rate function I(v) on given directions.
    Rate,
    /// Skew symmetry, the geometric condition and α.
    ProductForm,
    /// Exact tail asymptotic of a boundary measure.
    Tail,
    /// Euler simulation of the reflected process.
    Simulate,
    /// Variational-problem oracle against the closed form.
    Oracle,
    /// CSV data for plots.
    Plot,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Points => "points",
            Command::Rate => "rate",
            Command::ProductForm => "product-form",
            Command::Tail => "tail",
            Command::Simulate => "simulate",
            Command::Oracle => "oracle",
            Command::Plot => "plot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Nu1,
    Nu2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Ellipse,
    Rays,
    Points,
    Domains,
    RateProfile,
    All,
}

fn parse_direction(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected \"v1,v2\", got {s:?}"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok((num(parts[0])?, num(parts[1])?))
}
