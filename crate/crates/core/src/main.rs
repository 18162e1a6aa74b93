use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use marstrand::commands::{
    cmd_cover, cmd_density, cmd_gen, cmd_marstrand, parse_depths, RunConfig,
};
use marstrand::{MergeScope, Result};

#[derive(Parser)]
#[command(
    name = "marstrand",
    version,
    about = "Dyadic covers and projection estimates for digit fractals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Inclusive depth range, e.g. 1..5
    #[arg(long, global = true)]
    depths: Option<String>,
    /// Number of theta grid nodes
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Merge threshold for good covers
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Levels allowed to merge: all or fine
    #[arg(long, global = true)]
    merge: Option<MergeScope>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest cover size accepted by the O(N^2) pair sums
    #[arg(long, global = true)]
    pair_cap: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate dyadic discretizations of the fractal
    Gen,
    /// Build good dyadic covers
    Cover,
    /// Sweep directions and evaluate the L2 estimates
    Marstrand,
    /// Push-forward densities and window-average domination
    Density,
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(d) = &cli.depths {
        cfg.depths = parse_depths(d)?;
    }
    if let Some(g) = cli.grid {
        cfg.grid = g;
    }
    if let Some(t) = cli.tau {
        cfg.tau = t;
    }
    if let Some(m) = cli.merge {
        cfg.merge = m;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(c) = cli.pair_cap {
        cfg.pair_cap = c;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = config(cli)?;
    match cli.command {
        Command::Gen => {
            for s in cmd_gen(&cfg)? {
                println!(
                    "depth {}: {} squares, sum |Q|^s = {:.6}",
                    s.depth, s.count, s.hausdorff_sum
                );
            }
        }
        Command::Cover => {
            for c in cmd_cover(&cfg)? {
                println!(
                    "depth {}: {} squares, goodness {:.6} (bound {:.6})",
                    c.depth, c.count, c.goodness_constant, c.goodness_bound
                );
            }
        }
        Command::Marstrand => {
            for d in cmd_marstrand(&cfg)?.depths {
                println!(
                    "depth {}: I_numeric {:.6} <= I_pair {:.6} <= I_trans {:.6}; cs_lower >= 0.05 on {:.1}% of directions",
                    d.depth,
                    d.I_numeric,
                    d.I_pair_bound,
                    d.I_transversal_capped,
                    100.0 * d.fraction_cs_lower_ge_0_05
                );
            }
        }
        Command::Density => {
            let s = cmd_density(&cfg)?;
            println!(
                "{} domination checks, max ratio {:.6}",
                s.records.len(),
                s.max_ratio
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
