use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use hvstab_core::simulator::InitialCondition;

#[derive(Debug, Parser)]
#[command(
    name = "hvstab",
    version,
    about = "Exact stability analysis of hybrid-variable advection schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cpi,
    AltForm,
    Derivative,
    Representation,
    Zrec,
    Harmonic,
    Recurrence,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StarScheme {
    Hv,
    Fdm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimScheme {
    Hv,
    Hweno,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cell and node weights of the optimally accurate operator.
    Coeffs {
        #[arg(long, value_parser = pair::<u32>)]
        stencil: (u32, u32),
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Stability verdict with both condition polynomials.
    Classify {
        #[arg(long, value_parser = pair::<u32>)]
        stencil: (u32, u32),
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Verdicts for all 0 <= R < L <= max-L.
    Table {
        #[arg(long = "max-L", default_value_t = 8)]
        max_l: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Upwind-bias bound for R = 0..=max-R.
    Barrier {
        #[arg(long = "max-R", default_value_t = 12)]
        max_r: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact Re H(pi) for a stencil or for one of the eight quadruple families.
    Rehpi {
        #[arg(long, value_parser = pair::<u32>, required_unless_present = "item", conflicts_with = "item")]
        stencil: Option<(u32, u32)>,
        #[arg(long, requires = "t")]
        item: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact identity checks over a parameter range.
    Identities {
        #[arg(long, value_enum)]
        suite: Suite,
        /// LO..HI (inclusive) or a single value.
        #[arg(long, value_parser = range)]
        range: Option<(u64, u64)>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Hermite-WENO trace condition.
    Hweno {
        #[command(subcommand)]
        action: HwenoAction,
    },
    /// Order-star shading grid written as CSV.
    Orderstar {
        #[arg(long, value_enum)]
        scheme: StarScheme,
        #[arg(long, value_parser = pair::<u32>)]
        stencil: (u32, u32),
        #[arg(long, value_parser = pair::<f64>, default_value = "-3,3", allow_hyphen_values = true)]
        window: (f64, f64),
        #[arg(long, value_parser = pair::<usize>, default_value = "200,200")]
        res: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Method-of-lines run of u_t + u_x = 0 on a periodic grid.
    Simulate {
        #[arg(long, value_enum)]
        scheme: SimScheme,
        #[arg(long, value_parser = pair::<u32>)]
        stencil: (u32, u32),
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0.4)]
        cfl: f64,
        #[arg(long, default_value_t = 5.0)]
        tfinal: f64,
        #[arg(long, value_parser = initial_condition, default_value = "sine:1")]
        ic: InitialCondition,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum HwenoAction {
    /// Necessary-condition verdict.
    Classify {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Trace of the symbol, exactly at 0 or pi, or in floating point at an angle.
    Trace {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "pi")]
        at: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn pair<T: FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated values, got '{s}'"))?;
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| format!("cannot parse '{x}'"));
    Ok((p(a)?, p(b)?))
}

fn range(s: &str) -> Result<(u64, u64), String> {
    let p = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("cannot parse '{x}'"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (p(a)?, p(b.trim_start_matches('='))?),
        None => {
            let v = p(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

fn initial_condition(s: &str) -> Result<InitialCondition, String> {
    s.parse()
        .map_err(|_| format!("expected sine:K, gaussian:W or packet:K,W, got '{s}'"))
}
