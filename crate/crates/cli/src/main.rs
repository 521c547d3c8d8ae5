//! `hamlab`: problem ingestion, gadget checks, variational runs and sweeps.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad usage or input,
//! 3 a size limit was hit.

mod embed;
mod gadget;
mod manifest;
mod variational;
mod walk;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use manifest::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "hamlab", version, about = "Hamiltonian embedding, gadgets, variational circuits and walks")]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "HAMLAB_THREADS")]
    threads: Option<usize>,
    /// Output file; a `.manifest.json` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed a CNF instance or Boolean formula as a diagonal operator.
    Embed(embed::EmbedArgs),
    /// Build and verify a perturbative gadget.
    Gadget(gadget::GadgetArgs),
    /// Variational search, QAOA, reachability deficits and clock reports.
    Variational {
        #[command(subcommand)]
        mode: variational::Mode,
    },
    /// Walks on a weighted graph.
    Walk(walk::WalkArgs),
    /// Random 3-SAT sweep: satisfiable fraction and Gibbs occupancy.
    Sweep(walk::SweepArgs),
}

/// Parses `start:stop:step` (inclusive) or a single number.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad number `{t}` in `{s}`")));
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(CliError::usage(format!("grid `{s}` needs start ≤ stop and a positive step")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + step * i as f64).collect())
        }
        _ => Err(CliError::usage(format!("expected `start:stop:step`, got `{s}`"))),
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Embed(a) => embed::run(a, out),
        Command::Gadget(a) => gadget::run(a, out),
        Command::Variational { mode } => variational::run(mode, out),
        Command::Walk(a) => walk::run_walk(a, out),
        Command::Sweep(a) => walk::run_sweep(a, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(manifest::EXIT_VERIFY as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.5:8:0.25").unwrap().len(), 31);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
