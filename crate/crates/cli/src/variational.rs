use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use hamlab::boolean::{cnf_to_hamiltonian, parse_dimacs};
use hamlab::circuit::Circuit;
use hamlab::clock::{clock_hamiltonian, clock_report, ClockEncoding};
use hamlab::io::sig12;
use hamlab::optimize::OptimizerConfig;
use hamlab::variational::{canonical_angle, deficit_csv, deficit_sweep, qaoa_optimize, variational_grover, GroverMode};
use hamlab::walks::ENUMERATION_LIMIT;
use serde::Serialize;
use serde_json::json;

use crate::manifest::{emit, read_input, row, Body, CliError, CliResult, RunManifest};
use crate::parse_grid;

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Optimize a depth-p QAOA state against a CNF instance.
    Qaoa(QaoaArgs),
    /// Variational search on n qubits, one row per depth.
    Grover(GroverArgs),
    /// Mean reachability deficit of random 3-SAT over a density grid.
    Deficit(DeficitArgs),
    /// History-state overlap and gap report for a circuit.
    Clock(ClockArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OptimizerArgs {
    /// Nelder–Mead restarts.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Evaluation budget per restart.
    #[arg(long, default_value_t = 4000)]
    pub max_evals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptimizerArgs {
    fn config(&self, keep_trace: bool) -> CliResult<OptimizerConfig> {
        if self.restarts == 0 || self.max_evals == 0 {
            return Err(CliError::usage("--restarts and --max-evals must be positive"));
        }
        Ok(OptimizerConfig {
            restarts: self.restarts,
            max_evals: self.max_evals,
            seed: self.seed,
            keep_trace,
            ..Default::default()
        })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct QaoaArgs {
    #[arg(long)]
    pub dimacs: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// CSV of every evaluation of the winning restart.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    VarDiffusion,
    RestrictedDiffusion,
    Matched,
    TwoLevel,
}

impl From<ModeArg> for GroverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::VarDiffusion => GroverMode::VarDiffusion,
            ModeArg::RestrictedDiffusion => GroverMode::RestrictedDiffusion,
            ModeArg::Matched => GroverMode::Matched,
            ModeArg::TwoLevel => GroverMode::TwoLevel,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GroverArgs {
    #[arg(long)]
    pub n: usize,
    /// One or more depths.
    #[arg(long, num_args = 1.., required = true)]
    pub p: Vec<usize>,
    #[arg(long, value_enum, default_value = "two_level")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DeficitArgs {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_min: f64,
    #[arg(long)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_step: f64,
    #[arg(long, num_args = 1.., required = true)]
    pub p: Vec<usize>,
    /// Instances per density.
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ClockArgs {
    /// Circuit JSON `{n, gates: [{kind, qubits, params}]}`.
    #[arg(long)]
    pub circuit: PathBuf,
    /// Identity padding steps after the circuit.
    #[arg(long = "M", default_value_t = 0)]
    pub m: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = ClockEncoding::Binary)]
    pub encoding: ClockEncoding,
    /// Also write the clock Hamiltonian as operator JSON.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

pub fn run(mode: &Mode, out: Option<&Path>) -> CliResult<bool> {
    match mode {
        Mode::Qaoa(a) => qaoa(a, out),
        Mode::Grover(a) => grover(a, out),
        Mode::Deficit(a) => deficit(a, out),
        Mode::Clock(a) => clock(a, out),
    }
}

fn budget_warning(hit: bool) {
    if hit {
        eprintln!("warning: evaluation budget exhausted; reporting the best point found");
    }
}

fn qaoa(a: &QaoaArgs, out: Option<&Path>) -> CliResult<bool> {
    let inst = parse_dimacs(&read_input(&a.dimacs)?)?;
    if inst.n > ENUMERATION_LIMIT {
        return Err(hamlab::Error::TooManyVariables { n: inst.n, limit: ENUMERATION_LIMIT }.into());
    }
    let h = cnf_to_hamiltonian(&inst);
    let ground = h.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let best = qaoa_optimize(&h, a.p, &a.opt.config(a.trace.is_some())?)?;
    budget_warning(best.budget_exceeded);
    if let Some(path) = &a.trace {
        let mut csv = String::from("eval,theta,value\n");
        for t in &best.trace {
            csv.push_str(&format!("{},{},{}\n", t.eval, row(&t.theta, ";"), sig12(t.value)));
        }
        std::fs::write(path, csv).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = json!({
        "p": a.p,
        "energy": best.value,
        "ground_energy": ground,
        "deficit": best.value - ground,
        "gamma": &best.theta[..a.p],
        "beta": &best.theta[a.p..],
        "evaluations": best.evaluations,
        "budget_exceeded": best.budget_exceeded,
    });
    emit(RunManifest::new("variational qaoa", a, Some(a.opt.seed), vec![a.dimacs.clone()]), out, Body::Report(report))?;
    Ok(true)
}

fn grover(a: &GroverArgs, out: Option<&Path>) -> CliResult<bool> {
    if a.n == 0 || a.n > 30 {
        return Err(CliError::usage("--n must be between 1 and 30"));
    }
    let cfg = a.opt.config(false)?;
    let mut csv = String::from("N,p,p_max,p_grover,improvement_percent,angle\n");
    for &p in &a.p {
        let r = variational_grover(a.n, p, a.mode.into(), &cfg);
        let angle = r.alpha.first().map_or(0.0, |&t| canonical_angle(t));
        csv.push_str(&format!(
            "{},{p},{}\n",
            1u64 << a.n,
            row(&[r.probability, r.grover, r.improvement_percent, angle], ",")
        ));
    }
    emit(RunManifest::new("variational grover", a, Some(a.opt.seed), vec![]), out, Body::Table(csv))?;
    Ok(true)
}

fn deficit(a: &DeficitArgs, out: Option<&Path>) -> CliResult<bool> {
    if a.alpha_min > a.alpha_max {
        return Err(CliError::usage("--alpha-min exceeds --alpha-max"));
    }
    let alphas = parse_grid(&format!("{}:{}:{}", a.alpha_min, a.alpha_max, a.alpha_step))?;
    let rows = deficit_sweep(a.n, &alphas, &a.p, a.instances, a.opt.seed, &a.opt.config(false)?)?;
    emit(RunManifest::new("variational deficit", a, Some(a.opt.seed), vec![]), out, Body::Table(deficit_csv(&rows)))?;
    Ok(true)
}

fn clock(a: &ClockArgs, out: Option<&Path>) -> CliResult<bool> {
    let text = read_input(&a.circuit)?;
    let c: Circuit = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: line {}: {e}", a.circuit.display(), e.line())))?;
    let report = clock_report(&c, a.j, a.k, a.m, a.encoding)?;
    if let Some(path) = &a.export {
        let h = clock_hamiltonian(&c, a.j, a.k, a.m, a.encoding)?.total();
        std::fs::write(path, hamlab::io::to_json(&h) + "\n")
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let value = serde_json::to_value(&report).expect("report serializes");
    emit(RunManifest::new("variational clock", a, None, vec![a.circuit.clone()]), out, Body::Report(value))?;
    Ok(true)
}
