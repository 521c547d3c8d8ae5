//! Seeded multi-start Nelder–Mead.

use std::cell::{Cell, RefCell};

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals: usize,
    /// Standard deviation of simplex values at which a run stops.
    pub tol: f64,
    pub seed: u64,
    /// Edge length of the initial simplex as a fraction of each bound width.
    pub step: f64,
    pub keep_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 16, max_evals: 4000, tol: 1e-12, seed: 0, step: 0.1, keep_trace: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eval: usize,
    pub theta: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub budget_exceeded: bool,
    pub restart: usize,
    pub trace: Vec<TracePoint>,
}

struct Counted<'a> {
    f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    budget: usize,
    evals: Cell<usize>,
    best: RefCell<(Vec<f64>, f64)>,
    trace: Option<RefCell<Vec<TracePoint>>>,
}

#[derive(Debug)]
struct BudgetHit;

impl std::fmt::Display for BudgetHit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("evaluation budget exhausted")
    }
}

impl std::error::Error for BudgetHit {}

impl CostFunction for &Counted<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        if self.evals.get() >= self.budget {
            return Err(BudgetHit.into());
        }
        let v = (self.f)(p);
        self.evals.set(self.evals.get() + 1);
        if v < self.best.borrow().1 {
            *self.best.borrow_mut() = (p.clone(), v);
        }
        if let Some(t) = &self.trace {
            t.borrow_mut().push(TracePoint { eval: self.evals.get(), theta: p.clone(), value: v });
        }
        Ok(v)
    }
}

/// One Nelder–Mead run from `x0` with an axis-aligned initial simplex.
pub fn nelder_mead(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x0: &[f64],
    steps: &[f64],
    cfg: &OptimizerConfig,
) -> OptimizeResult {
    let mut simplex = vec![x0.to_vec()];
    for (i, s) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += s;
        simplex.push(v);
    }
    let problem = Counted {
        f,
        budget: cfg.max_evals,
        evals: Cell::new(0),
        best: RefCell::new((x0.to_vec(), f64::INFINITY)),
        trace: cfg.keep_trace.then(|| RefCell::new(Vec::new())),
    };
    let solver = NelderMead::new(simplex).with_sd_tolerance(cfg.tol).expect("tolerance is non-negative");
    let outcome = Executor::new(&problem, solver)
        .configure(|s| s.max_iters(cfg.max_evals as u64))
        .timer(false)
        .run();
    let budget_exceeded = match &outcome {
        Err(_) => true,
        Ok(res) => matches!(
            res.state().termination_status,
            argmin::core::TerminationStatus::Terminated(argmin::core::TerminationReason::MaxItersReached)
        ),
    };
    let (theta, value) = problem.best.borrow().clone();
    OptimizeResult {
        theta,
        value,
        evaluations: problem.evals.get(),
        budget_exceeded,
        restart: 0,
        trace: problem.trace.map(RefCell::into_inner).unwrap_or_default(),
    }
}

/// Best of `cfg.restarts` runs started uniformly inside `bounds`. Restart `r`
/// draws from its own stream, so results do not depend on thread count.
pub fn optimize(f: &(dyn Fn(&[f64]) -> f64 + Sync), bounds: &[(f64, f64)], cfg: &OptimizerConfig) -> OptimizeResult {
    let steps: Vec<f64> = bounds.iter().map(|(lo, hi)| cfg.step * (hi - lo)).collect();
    let runs: Vec<OptimizeResult> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let x0: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
            let mut res = nelder_mead(f, &x0, &steps, cfg);
            res.restart = r;
            res
        })
        .collect();
    let total = runs.iter().map(|r| r.evaluations).sum();
    let mut best = runs
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart");
    best.evaluations = total;
    best
}

pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut s = String::from("eval,theta,value\n");
    for t in trace {
        let theta: Vec<String> = t.theta.iter().map(|v| format!("{v:.12e}")).collect();
        s.push_str(&format!("{},{},{:.12e}\n", t.eval, theta.join(";"), t.value));
    }
    s
}
