use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gramlab", version, about = "Controllability Gramians, minimum control energy and entropy metrics for the damped oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full report for one parameter set.
    Analyze(AnalyzeArgs),
    /// One CSV row per point of the (zeta, omega_n, T) grid.
    Sweep(SweepArgs),
    /// Minimum-energy control profile, replayed and checked by simulation.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizonArg {
    Finite(f64),
    Infinite,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(format!("horizon must be finite and > 0 (got {s})"));
    }
    Ok(v)
}

pub fn parse_horizon(s: &str) -> Result<HorizonArg, String> {
    match s.trim() {
        "infinite" | "inf" => Ok(HorizonArg::Infinite),
        other => parse_positive(other).map(HorizonArg::Finite),
    }
}

/// Comma-separated numbers as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            let v: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{p}` is not finite"))
            }
        })
        .collect()
}

/// Comma-separated, non-empty, strictly increasing.
pub fn parse_grid(s: &str) -> Result<List, String> {
    let v = parse_list(s)?;
    if v.is_empty() {
        return Err("grid is empty".into());
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(List(v))
}

fn parse_t_grid(s: &str) -> Result<List, String> {
    let v = parse_grid(s)?;
    if v.0[0] <= 0.0 {
        return Err("horizons must be > 0".into());
    }
    Ok(v)
}

fn parse_vector(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

/// `--zeta/--omega-n` or `--m/--c/--k`; exactly one set is resolved later.
#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Damping factor (>= 0).
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
    /// Natural frequency in rad/s (> 0).
    #[arg(long = "omega-n", allow_negative_numbers = true)]
    pub omega_n: Option<f64>,
    /// Mass.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Damping coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Stiffness.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct EntropyArgs {
    /// Duality constant c in det(W_c) det(I) = c.
    #[arg(long = "duality", visible_alias = "duality-c", default_value_t = 1.0, allow_negative_numbers = true)]
    pub duality: f64,
    /// Boltzmann constant used for the thermodynamic entropy.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub kb: f64,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// `infinite` or a finite horizon T > 0.
    #[arg(long, default_value = "infinite", value_parser = parse_horizon)]
    pub horizon: HorizonArg,
    #[command(flatten)]
    pub entropy: EntropyArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "zeta-grid", value_parser = parse_grid)]
    pub zeta_grid: Option<List>,
    #[arg(long = "omega-n-grid", value_parser = parse_grid)]
    pub omega_n_grid: Option<List>,
    #[arg(long = "t-grid", value_parser = parse_t_grid, conflicts_with = "horizon")]
    pub t_grid: Option<List>,
    /// Fixed damping factor when no zeta grid is given.
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
    /// Fixed natural frequency when no omega_n grid is given.
    #[arg(long = "omega-n", allow_negative_numbers = true)]
    pub omega_n: Option<f64>,
    /// Fixed horizon when no T grid is given.
    #[arg(long, default_value = "infinite", value_parser = parse_horizon)]
    pub horizon: HorizonArg,
    #[command(flatten)]
    pub entropy: EntropyArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Transfer time T > 0.
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: f64,
    /// Target state, comma separated.
    #[arg(long, default_value = "1,0", value_parser = parse_vector, allow_negative_numbers = true)]
    pub xf: List,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    /// Report format; `csv` prints the (t, u) profile instead.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the (t, u) profile CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
