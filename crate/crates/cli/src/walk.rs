use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};
use hamlab::evolve::stochastic_propagate;
use hamlab::io::sig12;
use hamlab::walks::{
    build_generators, long_time_average, quantum_walk, sat_sweep, spectral_entropy, stationary_state, sweep_csv, Graph,
    ENUMERATION_LIMIT,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::manifest::{emit, read_input, row, Body, CliError, CliResult, RunManifest};
use crate::parse_grid;

#[derive(Args, Debug, Serialize)]
#[command(group(
    ArgGroup::new("what")
        .required(true)
        .args(["stationary", "long_time", "entropy", "quantum", "classical"])
))]
pub struct WalkArgs {
    /// Graph as JSON `{n, edges: [{i, j, w}]}` (`.json`) or `i j w` lines.
    #[arg(long)]
    pub graph: PathBuf,
    /// Stationary distribution of the classical walk.
    #[arg(long)]
    pub stationary: bool,
    /// Long-time average of the quantum walk started at `--start`.
    #[arg(long)]
    pub long_time: bool,
    /// Spectral entropy of the Laplacian Gibbs state at each `--beta`.
    #[arg(long, requires = "beta")]
    pub entropy: bool,
    /// Probability at `--node` over `--times` for the quantum walk.
    #[arg(long, requires = "times")]
    pub quantum: bool,
    /// Probability at `--node` over `--times` for the classical walk.
    #[arg(long, requires = "times")]
    pub classical: bool,
    /// Node the walk starts from.
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    /// Node whose probability is tracked (default: the start node).
    #[arg(long)]
    pub node: Option<usize>,
    /// Time grid `start:stop:step`.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long, num_args = 1..)]
    pub beta: Vec<f64>,
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    let text = read_input(path)?;
    let g = if path.extension().is_some_and(|e| e == "json") { Graph::from_json(&text) } else { Graph::from_text(&text) };
    g.map_err(|e| {
        let mut c = CliError::from(e);
        c.msg = format!("{}: {}", path.display(), c.msg);
        c
    })
}

pub fn run_walk(a: &WalkArgs, out: Option<&Path>) -> CliResult<bool> {
    let g = load_graph(&a.graph)?;
    let gen = build_generators(&g)?;
    let n = gen.n();
    let node = a.node.unwrap_or(a.start);
    if a.start >= n || node >= n {
        return Err(CliError::usage(format!("node index out of range for {n} nodes")));
    }
    let basis = |k: usize| -> Vec<f64> { (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect() };
    let mut data = String::new();
    if a.stationary {
        data.push_str("# node pi\n");
        for (i, p) in stationary_state(&gen).iter().enumerate() {
            data.push_str(&format!("{i} {}\n", sig12(*p)));
        }
    } else if a.long_time {
        let psi: Vec<Complex64> = basis(a.start).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        let lta = long_time_average(&gen, &psi)?;
        data.push_str(&format!("# eta {}\n# node p pi\n", sig12(lta.eta)));
        for i in 0..n {
            data.push_str(&format!("{i} {}\n", row(&[lta.p[i], lta.pi[i]], " ")));
        }
    } else if a.entropy {
        data.push_str("# beta entropy_bits\n");
        let l = g.laplacian();
        for &b in &a.beta {
            data.push_str(&format!("{}\n", row(&[b, spectral_entropy(&l, b)?], " ")));
        }
    } else {
        let times = parse_grid(a.times.as_deref().expect("clap requires --times"))?;
        data.push_str(&format!("# t p{node}\n"));
        for t in times {
            let p = if a.quantum {
                let psi: Vec<Complex64> = basis(a.start).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                quantum_walk(&gen, &psi, t)?[node].norm_sqr()
            } else {
                stochastic_propagate(&gen.s, t, &basis(a.start))?[node]
            };
            data.push_str(&format!("{}\n", row(&[t, p], " ")));
        }
    }
    emit(RunManifest::new("walk", a, None, vec![a.graph.clone()]), out, Body::Table(data))?;
    Ok(true)
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// Variables per instance.
    #[arg(long)]
    pub n: usize,
    /// Clause densities `start:stop:step`.
    #[arg(long)]
    pub alpha: String,
    #[arg(long, num_args = 1.., required = true)]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run_sweep(a: &SweepArgs, out: Option<&Path>) -> CliResult<bool> {
    if a.n > ENUMERATION_LIMIT {
        return Err(hamlab::Error::TooManyVariables { n: a.n, limit: ENUMERATION_LIMIT }.into());
    }
    if a.n < 3 || a.instances == 0 {
        return Err(CliError::usage("--n must be at least 3 and --instances positive"));
    }
    let alphas = parse_grid(&a.alpha)?;
    let rows = sat_sweep(a.n, &alphas, a.instances, &a.beta, a.seed)?;
    emit(RunManifest::new("sweep", a, Some(a.seed), vec![]), out, Body::Table(sweep_csv(&rows)))?;
    Ok(true)
}
