use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use skewho::model::DEFAULT_NODES;
use skewho_cli::config::{parse_eps, parse_eps_list, parse_half_width};
use skewho_cli::output::{render, summary_lines};
use skewho_cli::{run, CommandKind, FKind, Format, GridSpec, PotentialSpec, Recipe, RunConfig, Strategy};

#[derive(Debug, Clone)]
struct EpsList(Vec<f64>);

#[derive(Debug, Clone)]
struct HalfWidth(Option<f64>);

/// Resolvent scans, spectra and decay runs for H = -d²/dx² + x² + (i/ε) f(x).
#[derive(Debug, Parser)]
#[command(name = "skewho", version, about)]
struct Args {
    #[arg(value_enum)]
    command: CommandKind,
    /// Potential family.
    #[arg(long = "f", value_enum, default_value = "fex")]
    f: FKind,
    /// Decay exponent for fex and sl, value for const.
    #[arg(long)]
    k: Option<f64>,
    /// A single epsilon, e.g. 2^-14 or 1e-3.
    #[arg(long, value_parser = parse_eps, conflicts_with = "eps_list")]
    eps: Option<f64>,
    /// Comma-separated epsilons; 2^a..2^b expands to every power of two in between.
    #[arg(long = "eps-list", value_parser = |s: &str| parse_eps_list(s).map(EpsList))]
    eps_list: Option<EpsList>,
    /// Grid half-width, or auto.
    #[arg(long = "L", default_value = "auto", value_parser = |s: &str| parse_half_width(s).map(HalfWidth))]
    half_width: HalfWidth,
    /// Grid nodes.
    #[arg(long = "N", default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Raise N until every potential well spans this many nodes.
    #[arg(long = "points-per-well")]
    points_per_well: Option<f64>,
    /// Eigenvalues for spectrum; points for a uniform scan.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "adaptive")]
    strategy: Strategy,
    /// Parameter recipe for decay (default follows the potential).
    #[arg(long, value_enum)]
    recipe: Option<Recipe>,
    /// Decay horizon.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Concurrent jobs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read the whole configuration from a JSON file instead of the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn into_config(self) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return RunConfig::from_json(&text);
        }
        let epsilons = match (self.eps, self.eps_list) {
            (Some(e), _) => vec![e],
            (None, Some(list)) => list.0,
            (None, None) => Vec::new(),
        };
        let cfg = RunConfig {
            command: self.command,
            potential: PotentialSpec { kind: self.f, k: self.k },
            epsilons,
            grid: GridSpec { half_width: self.half_width.0, nodes: self.nodes, points_per_well: self.points_per_well },
            strategy: self.strategy,
            n: self.n,
            recipe: self.recipe,
            t_final: self.t_final,
            out: self.out,
            format: self.format,
            jobs: self.jobs,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> Result<ExitCode> {
    let cfg = Args::parse().into_config()?;
    let report = run(&cfg)?;
    let text = render(&cfg, &report);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    for line in summary_lines(&report) {
        eprintln!("{line}");
    }
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
