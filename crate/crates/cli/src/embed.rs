use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};
use hamlab::boolean::{cnf_to_hamiltonian, embed_formula, kernel_embed, parse_dimacs, BooleanFormula};
use hamlab::io::{self, sig12};
use hamlab::walks::{energy_histogram, ENUMERATION_LIMIT};
use hamlab::OperatorSum;
use serde::Serialize;

use crate::manifest::{emit, read_input, Body, CliError, CliResult, RunManifest};

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["dimacs", "formula"])))]
pub struct EmbedArgs {
    /// DIMACS CNF file; every clause becomes a projector on its violating string.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    /// Formula JSON `{n, expr}`.
    #[arg(long)]
    pub formula: Option<PathBuf>,
    /// Embed a formula as its 0/1 violation indicator instead of mapping OR to a sum.
    #[arg(long)]
    pub kernel: bool,
    /// Write the operator as `coeff word` lines instead of JSON.
    #[arg(long)]
    pub text: bool,
}

/// Lowest diagonal value and how many strings attain it.
struct Ground {
    energy: f64,
    degeneracy: u64,
}

fn diagonal_ground(op: &OperatorSum) -> Ground {
    let d = op.diagonal();
    let energy = d.iter().copied().fold(f64::INFINITY, f64::min);
    let degeneracy = d.iter().filter(|&&v| (v - energy).abs() < 1e-9).count() as u64;
    Ground { energy, degeneracy }
}

pub fn run(args: &EmbedArgs, out: Option<&Path>) -> CliResult<bool> {
    let (op, ground, input) = if let Some(path) = &args.dimacs {
        let inst = parse_dimacs(&read_input(path)?).map_err(|e| located(path, e))?;
        let ground = if inst.n <= ENUMERATION_LIMIT {
            let hist = energy_histogram(&inst)?;
            hist.iter().enumerate().find(|(_, &c)| c > 0).map(|(e, &c)| Ground { energy: e as f64, degeneracy: c })
        } else {
            None
        };
        (cnf_to_hamiltonian(&inst), ground, path.clone())
    } else {
        let path = args.formula.as_ref().expect("clap enforces one input");
        let text = read_input(path)?;
        let formula: BooleanFormula = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: line {}: {e}", path.display(), e.line())))?;
        let formula = BooleanFormula::new(formula.n, formula.expr)?;
        let op = if args.kernel { kernel_embed(&formula)? } else { embed_formula(&formula)? };
        let ground = (op.n() <= ENUMERATION_LIMIT).then(|| diagonal_ground(&op));
        (op, ground, path.clone())
    };

    let mut summary = format!("n {}\ncardinality {}\n", op.n(), op.cardinality());
    match ground {
        Some(g) => summary.push_str(&format!("ground_energy {}\nground_degeneracy {}\n", sig12(g.energy), g.degeneracy)),
        None => summary.push_str(&format!("ground_energy skipped (n > {ENUMERATION_LIMIT})\n")),
    }
    if op.cardinality() <= 32 {
        summary.push_str("terms\n");
        summary.push_str(&io::to_text(&op));
    }

    let body = if args.text { io::to_text(&op) } else { io::to_json(&op) + "\n" };
    let manifest = RunManifest::new("embed", args, None, vec![input]);
    emit(manifest, out, Body::Raw(body))?;
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(true)
}

fn located(path: &Path, e: hamlab::Error) -> CliError {
    let mut c = CliError::from(e);
    c.msg = format!("{}: {}", path.display(), c.msg);
    c
}
