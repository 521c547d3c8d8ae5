//! Walks on graphs, Laplacian Gibbs states, PageRank, phase estimation and
//! thermal occupancy of random 3-SAT.
//!
//! Stochastic states are column vectors and generators have zero column sums.

use crate::io::sig12;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::brent::BrentOpt;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean::{random_ksat, CnfInstance};
use crate::circuit::{apply_gate, FixedGate, Gate};
use crate::dense::{real_eigh, realize_dense, unitary_exp, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::pauli::{bitpos, OperatorSum};
use crate::state::StateVector;

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Symmetric weighted adjacency with an empty diagonal.
    pub fn new(adjacency: DMatrix<f64>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: adjacency.ncols() });
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::Parse { line: 0, msg: format!("self-loop at node {i}") });
            }
            for j in 0..i {
                if (adjacency[(i, j)] - adjacency[(j, i)]).abs() > TOL {
                    return Err(Error::Parse { line: 0, msg: format!("asymmetric weight between {i} and {j}") });
                }
            }
        }
        Ok(Graph { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut a = DMatrix::zeros(n, n);
        for e in edges {
            if e.i >= n || e.j >= n {
                return Err(Error::IndexOutOfRange { index: e.i.max(e.j), n });
            }
            if e.i == e.j {
                return Err(Error::Parse { line: 0, msg: format!("self-loop at node {}", e.i) });
            }
            a[(e.i, e.j)] += e.w;
            a[(e.j, e.i)] += e.w;
        }
        Graph::new(a)
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.adjacency.row_iter().map(|r| r.sum()).collect()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adjacency[(i, j)] != 0.0 {
                    out.push(Edge { i, j, w: self.adjacency[(i, j)] });
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.adjacency[(i, j)] != 0.0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Laplacian `D − A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.degrees())) - &self.adjacency
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphRecord { n: self.n(), edges: self.edges() }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: GraphRecord = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        Graph::from_edges(r.n, &r.edges)
    }

    /// One `i j w` edge per line. `#` starts a comment and an optional
    /// `n <count>` line fixes the node count.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: k + 1, msg: msg.into() };
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["n", c] => n = Some(c.parse().map_err(|_| bad("bad node count"))?),
                [i, j, w] => edges.push(Edge {
                    i: i.parse().map_err(|_| bad("bad node index"))?,
                    j: j.parse().map_err(|_| bad("bad node index"))?,
                    w: w.parse().map_err(|_| bad("bad weight"))?,
                }),
                _ => return Err(bad("expected `i j w`")),
            }
        }
        let inferred = edges.iter().map(|e| e.i.max(e.j) + 1).max().unwrap_or(0);
        Graph::from_edges(n.unwrap_or(inferred).max(inferred), &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n());
        for e in self.edges() {
            s.push_str(&format!("{} {} {}\n", e.i, e.j, e.w));
        }
        s
    }
}

/// The five-node graph with edges 0–1, 0–3, 1–2, 2–3, 2–4, 3–4.
pub fn five_node_example() -> Graph {
    let e = |i, j| Edge { i, j, w: 1.0 };
    Graph::from_edges(5, &[e(0, 1), e(0, 3), e(1, 2), e(2, 3), e(2, 4), e(3, 4)]).expect("valid edges")
}

/// A random spanning tree plus each remaining edge with probability `p`,
/// weights uniform in `[0.1, 2)`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut a = DMatrix::zeros(n, n);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let w = rng.random_range(0.1..2.0);
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[(i, j)] == 0.0 && rng.random::<f64>() < p {
                let w = rng.random_range(0.1..2.0);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
    }
    Graph { adjacency: a }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkGenerators {
    pub a: DMatrix<f64>,
    pub degrees: Vec<f64>,
    pub l: DMatrix<f64>,
    /// `L D^{-1}`, generator of the uniform-escape stochastic walk.
    pub s: DMatrix<f64>,
    /// `D^{-1/2} L D^{-1/2}`, the matching quantum walk Hamiltonian.
    pub q: DMatrix<f64>,
}

impl WalkGenerators {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// `max |S − D^{1/2} Q D^{−1/2}|`.
    pub fn similarity_residual(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = self.degrees[i].sqrt() * self.q[(i, j)] / self.degrees[j].sqrt();
                worst = worst.max((v - self.s[(i, j)]).abs());
            }
        }
        worst
    }
}

pub fn build_generators(g: &Graph) -> Result<WalkGenerators> {
    let degrees = g.degrees();
    if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegreeNode(i));
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = g.n();
    let l = g.laplacian();
    let s = DMatrix::from_fn(n, n, |i, j| l[(i, j)] / degrees[j]);
    let q = DMatrix::from_fn(n, n, |i, j| l[(i, j)] / (degrees[i] * degrees[j]).sqrt());
    Ok(WalkGenerators { a: g.adjacency.clone(), degrees, l, s, q })
}

/// `π_i = D_ii / Σ_j D_jj`, the kernel of `S`.
pub fn stationary_state(gen: &WalkGenerators) -> Vec<f64> {
    let total: f64 = gen.degrees.iter().sum();
    gen.degrees.iter().map(|d| d / total).collect()
}

/// `e^{−iQt}ψ`.
pub fn quantum_walk(gen: &WalkGenerators, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if psi.len() != gen.n() {
        return Err(Error::DimensionMismatch { expected: gen.n(), got: psi.len() });
    }
    let u = unitary_exp(&gen.q.map(|v| Complex64::new(v, 0.0)), t);
    Ok((u * DVector::from_column_slice(psi)).iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAverage {
    pub p: Vec<f64>,
    pub pi: Vec<f64>,
    /// Weight outside the zero-energy eigenspace of `Q`.
    pub eta: f64,
    /// High-energy part, absent when `η = 0`.
    pub omega: Option<Vec<f64>>,
    /// Distinct eigenvalues of `Q`, ascending.
    pub energies: Vec<f64>,
}

/// `P_j = Σ_k |⟨j|Φ_k|ψ₀⟩|²` with `Φ_k` the eigenprojectors of `Q`; nearly
/// equal eigenvalues share one projector.
pub fn long_time_average(gen: &WalkGenerators, psi0: &[Complex64]) -> Result<LongTimeAverage> {
    let n = gen.n();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi0.len() });
    }
    let norm: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitNorm(norm.sqrt()));
    }
    let (vals, vecs) = real_eigh(&gen.q);
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some((e, ks)) if (v - *e).abs() < 1e-9 => ks.push(k),
            _ => groups.push((v, vec![k])),
        }
    }
    let mut p = vec![0.0; n];
    let mut high = vec![0.0; n];
    for (gi, (_, ks)) in groups.iter().enumerate() {
        // Φ ψ = Σ_{k∈group} v_k (v_kᵀ ψ)
        let mut proj = vec![Complex64::new(0.0, 0.0); n];
        for &k in ks {
            let col = vecs.column(k);
            let c: Complex64 = col.iter().zip(psi0).map(|(v, z)| z * v).sum();
            for j in 0..n {
                proj[j] += c * col[j];
            }
        }
        for j in 0..n {
            p[j] += proj[j].norm_sqr();
            if gi > 0 {
                high[j] += proj[j].norm_sqr();
            }
        }
    }
    let eta: f64 = high.iter().sum();
    let omega = (eta > 1e-12).then(|| high.iter().map(|h| h / eta).collect());
    Ok(LongTimeAverage { p, pi: stationary_state(gen), eta, omega, energies: groups.iter().map(|g| g.0).collect() })
}

/// Checks symmetry, zero row sums and non-positive off-diagonals.
pub fn check_laplacian(l: &DMatrix<f64>) -> Result<()> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::NotLaplacian);
    }
    for i in 0..n {
        if l.row(i).sum().abs() > 1e-9 {
            return Err(Error::NotLaplacian);
        }
        for j in 0..n {
            if (l[(i, j)] - l[(j, i)]).abs() > 1e-12 || (i != j && l[(i, j)] > 1e-12) {
                return Err(Error::NotLaplacian);
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianGibbs {
    pub beta: f64,
    /// `−Tr ρ log₂ ρ` for `ρ = e^{−βL}/Z`.
    pub entropy: f64,
    pub trace_l_rho: f64,
    pub log2_z: f64,
}

pub fn laplacian_gibbs(l: &DMatrix<f64>, beta: f64) -> Result<LaplacianGibbs> {
    check_laplacian(l)?;
    let (vals, _) = real_eigh(l);
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = vals.iter().map(|v| (-beta * (v - lo)).exp()).collect();
    let zs: f64 = w.iter().sum();
    let probs: Vec<f64> = w.iter().map(|x| x / zs).collect();
    let entropy = -probs.iter().filter(|&&q| q > 0.0).map(|q| q * q.log2()).sum::<f64>();
    let trace_l_rho = probs.iter().zip(&vals).map(|(q, v)| q * v).sum();
    let log2_z = zs.log2() - beta * lo / std::f64::consts::LN_2;
    Ok(LaplacianGibbs { beta, entropy: entropy.max(0.0), trace_l_rho, log2_z })
}

pub fn spectral_entropy(l: &DMatrix<f64>, beta: f64) -> Result<f64> {
    Ok(laplacian_gibbs(l, beta)?.entropy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subadditivity {
    pub s_a: f64,
    pub s_b: f64,
    pub s_c: f64,
    /// `S_C − S_A − S_B`, non-positive when subadditivity holds.
    pub excess: f64,
}

pub fn subadditivity(la: &DMatrix<f64>, lb: &DMatrix<f64>, beta: f64) -> Result<Subadditivity> {
    let s_a = spectral_entropy(la, beta)?;
    let s_b = spectral_entropy(lb, beta)?;
    let s_c = spectral_entropy(&(la + lb), beta)?;
    Ok(Subadditivity { s_a, s_b, s_c, excess: s_c - s_a - s_b })
}

/// Column-stochastic walk matrix `A D^{-1}` of a graph.
pub fn column_stochastic(g: &Graph) -> Result<DMatrix<f64>> {
    let d = g.degrees();
    if let Some(i) = d.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroDegreeNode(i));
    }
    Ok(DMatrix::from_fn(g.n(), g.n(), |i, j| g.adjacency[(i, j)] / d[j]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank {
    /// `(𝟙 − G)ᵀ(𝟙 − G)` for the damped matrix `G`.
    pub hamiltonian: DMatrix<f64>,
    pub rank: Vec<f64>,
    pub ground_energy: f64,
}

/// PageRank as the ground state of `(𝟙 − G)ᵀ(𝟙 − G)` with
/// `G = d·G₀ + (1 − d)/n · 𝟙𝟙ᵀ`.
pub fn pagerank_hamiltonian(g0: &DMatrix<f64>, damping: f64) -> Result<PageRank> {
    let n = g0.nrows();
    if g0.ncols() != n || !(0.0..=1.0).contains(&damping) {
        return Err(Error::NotStochastic);
    }
    for j in 0..n {
        let col = g0.column(j);
        if col.iter().any(|&v| v < -TOL) || (col.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::NotStochastic);
        }
    }
    let g = g0 * damping + DMatrix::from_element(n, n, (1.0 - damping) / n as f64);
    let m = DMatrix::identity(n, n) - g;
    let h = m.transpose() * &m;
    let (vals, vecs) = real_eigh(&h);
    let v = vecs.column(0);
    let s: f64 = v.sum();
    Ok(PageRank { rank: v.iter().map(|x| x / s).collect(), ground_energy: vals[0], hamiltonian: h })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub lambda: f64,
    pub times: Vec<f64>,
    /// Ancilla `Prob(0)` at each time.
    pub prob_zero: Vec<f64>,
    pub fit_residual: f64,
    pub eigen_residual: f64,
}

/// 32 times evenly spaced in `(0, 2π/λ_max]`.
pub fn default_times(lambda_max: f64) -> Vec<f64> {
    let top = 2.0 * PI / lambda_max;
    (1..=32).map(|i| top * i as f64 / 32.0).collect()
}

/// Ancilla in `|+⟩`, evolution under `|1⟩⟨1| ⊗ H`, then `S^{†s}` and a
/// Hadamard on the ancilla; returns `Prob(ancilla = 0)`.
fn control_protocol(controlled: &nalgebra::DMatrix<Complex64>, phi: &StateVector, t: f64, sine: bool) -> f64 {
    let n = phi.n() + 1;
    let plus = StateVector::plus(1).tensor(phi);
    let u = unitary_exp(controlled, t);
    let mut amps: Vec<Complex64> = (u * DVector::from_column_slice(plus.amplitudes())).iter().copied().collect();
    if sine {
        apply_gate(&mut amps, n, &Gate::Fixed { gate: FixedGate::Pdg, qubit: 0 });
    }
    apply_gate(&mut amps, n, &Gate::Fixed { gate: FixedGate::H, qubit: 0 });
    let half = 1usize << bitpos(n, 0);
    amps[..half].iter().map(|a| a.norm_sqr()).sum()
}

struct CosineFit<'a> {
    times: &'a [f64],
    probs: &'a [f64],
}

impl CosineFit<'_> {
    fn residual(&self, lambda: f64) -> f64 {
        self.times.iter().zip(self.probs).map(|(t, p)| (p - 0.5 * (1.0 + (lambda * t).cos())).powi(2)).sum()
    }
}

impl CostFunction for CosineFit<'_> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, lambda: &f64) -> std::result::Result<f64, ArgminError> {
        Ok(self.residual(*lambda))
    }
}

/// Recovers the eigenvalue of `φ` from `Prob(0) = ½(1 + cos λt)`. The cosine
/// fixes `|λ|`; one sine-quadrature shot at the first time fixes the sign.
pub fn phase_estimate(h: &OperatorSum, phi: &StateVector, times: Option<&[f64]>) -> Result<PhaseEstimate> {
    if h.n() != phi.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), got: phi.n() });
    }
    if h.n() + 1 > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n: h.n() + 1, limit: DENSE_LIMIT });
    }
    let hm = realize_dense(h)?.matrix;
    let v = DVector::from_column_slice(phi.amplitudes());
    let hv = &hm * &v;
    let mean = (v.adjoint() * &hv)[(0, 0)].re;
    let eigen_residual = (hv - v * Complex64::new(mean, 0.0)).norm();
    if eigen_residual > 1e-8 {
        return Err(Error::NotEigenvector(eigen_residual));
    }
    let lambda_max = if h.one_norm() > 0.0 { h.one_norm() } else { 1.0 };
    let times = times.map(<[f64]>::to_vec).unwrap_or_else(|| default_times(lambda_max));
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    let max_step = sorted.iter().scan(0.0, |prev, &t| {
        let d = t - *prev;
        *prev = t;
        Some(d)
    });
    let widest = max_step.fold(0.0, f64::max);
    if lambda_max * widest > PI {
        return Err(Error::AliasRisk(lambda_max * widest));
    }

    let controlled = crate::pauli::OperatorSum::p1(1, 0).tensor(h);
    let cm = realize_dense(&controlled)?.matrix;
    let prob_zero: Vec<f64> = times.iter().map(|&t| control_protocol(&cm, phi, t, false)).collect();

    let fit = CosineFit { times: &times, probs: &prob_zero };
    let grid = 4096;
    let top = 1.05 * lambda_max;
    let step = top / grid as f64;
    let best = (0..=grid).map(|i| i as f64 * step).min_by(|a, b| fit.residual(*a).total_cmp(&fit.residual(*b))).unwrap_or(0.0);
    let (lo, hi) = ((best - step).max(0.0), best + step);
    let mut lambda = best;
    if let Ok(res) = Executor::new(CosineFit { times: &times, probs: &prob_zero }, BrentOpt::new(lo, hi).set_tolerance(1e-14, 1e-14))
        .configure(|s| s.max_iters(200))
        .timer(false)
        .run()
    {
        if let Some(p) = res.state().best_param {
            if fit.residual(p) <= fit.residual(lambda) {
                lambda = p;
            }
        }
    }
    let fit_residual = (fit.residual(lambda) / times.len() as f64).sqrt();
    if fit_residual > 1e-6 {
        return Err(Error::AliasRisk(fit_residual));
    }
    if lambda > 0.0 && sorted.first().is_some_and(|&t| t > 0.0) {
        let t0 = sorted[0];
        if lambda * t0 < PI && control_protocol(&cm, phi, t0, true) > 0.5 {
            lambda = -lambda;
        }
    }
    Ok(PhaseEstimate { lambda, times, prob_zero, fit_residual, eigen_residual })
}

pub const ENUMERATION_LIMIT: usize = 24;

/// Lane masks of the six lowest index bits across a 64-assignment block.
const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Number of assignments violating exactly `e` clauses, indexed by `e`.
/// Sixty-four assignments are evaluated per word and per-lane counts are kept
/// in a bit-sliced adder.
pub fn energy_histogram(inst: &CnfInstance) -> Result<Vec<u64>> {
    let n = inst.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyVariables { n, limit: ENUMERATION_LIMIT });
    }
    let m = inst.m();
    let planes = (usize::BITS - m.leading_zeros()).max(1) as usize;
    // Each clause as (variable bit position, literal is positive).
    let clauses: Vec<Vec<(usize, bool)>> =
        inst.clauses.iter().map(|c| c.iter().map(|l| (bitpos(n, l.var), l.positive)).collect()).collect();
    let blocks = 1usize << n.saturating_sub(6);
    let valid = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };

    let count_block = |block: usize, hist: &mut Vec<u64>| {
        let base = block << 6;
        let mut counter = [0u64; 32];
        for clause in &clauses {
            let mut violated = valid;
            for &(b, positive) in clause {
                let ones = if b < 6 { LANES[b] } else if base >> b & 1 == 1 { u64::MAX } else { 0 };
                violated &= if positive { !ones } else { ones };
            }
            let mut carry = violated;
            for plane in counter.iter_mut().take(planes) {
                let next = *plane & carry;
                *plane ^= carry;
                carry = next;
                if carry == 0 {
                    break;
                }
            }
        }
        let mut lanes = valid;
        while lanes != 0 {
            let lane = lanes.trailing_zeros();
            lanes &= lanes - 1;
            let e = (0..planes).fold(0usize, |acc, k| acc | ((counter[k] >> lane & 1) as usize) << k);
            hist[e] += 1;
        }
    };

    let hist = (0..blocks)
        .into_par_iter()
        .with_min_len(64)
        .fold(
            || vec![0u64; m + 1],
            |mut h, b| {
                count_block(b, &mut h);
                h
            },
        )
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsState {
    pub beta: f64,
    /// Energy level to multiplicity.
    pub histogram: Vec<(f64, u64)>,
    /// `Σ counts·e^{−β(λ − λ_min)}`, shifted so the ground level counts once per state.
    pub z_shifted: f64,
}

impl GibbsState {
    pub fn from_histogram(beta: f64, histogram: Vec<(f64, u64)>) -> Self {
        let lo = histogram.iter().filter(|h| h.1 > 0).map(|h| h.0).fold(f64::INFINITY, f64::min);
        let z_shifted = histogram.iter().map(|&(e, c)| c as f64 * (-beta * (e - lo)).exp()).sum();
        GibbsState { beta, histogram, z_shifted }
    }

    pub fn lambda_min(&self) -> f64 {
        self.histogram.iter().filter(|h| h.1 > 0).map(|h| h.0).fold(f64::INFINITY, f64::min)
    }

    pub fn degeneracy(&self) -> u64 {
        let lo = self.lambda_min();
        self.histogram.iter().filter(|h| h.0 == lo).map(|h| h.1).sum()
    }

    /// Probability of a single state at energy `e`.
    pub fn state_probability(&self, e: f64) -> f64 {
        (-self.beta * (e - self.lambda_min())).exp() / self.z_shifted
    }

    /// `(energy, probability of the whole level)`; sums to one.
    pub fn level_probabilities(&self) -> Vec<(f64, f64)> {
        self.histogram.iter().map(|&(e, c)| (e, c as f64 * self.state_probability(e))).collect()
    }

    /// Ground-space occupancy `p(λ_min, β)`.
    pub fn ground_occupancy(&self) -> f64 {
        self.degeneracy() as f64 / self.z_shifted
    }
}

/// Gibbs weights of every basis state of a diagonal operator.
pub fn diagonal_gibbs(op: &OperatorSum, beta: f64) -> Result<Vec<f64>> {
    if !op.is_diagonal() {
        return Err(Error::NonDiagonalCost);
    }
    if op.n() > ENUMERATION_LIMIT {
        return Err(Error::TooManyVariables { n: op.n(), limit: ENUMERATION_LIMIT });
    }
    let diag = op.diagonal();
    let mut levels: BTreeMap<u64, (f64, u64)> = BTreeMap::new();
    for &e in &diag {
        levels.entry(e.to_bits()).or_insert((e, 0)).1 += 1;
    }
    let g = GibbsState::from_histogram(beta, levels.into_values().collect());
    Ok(diag.iter().map(|&e| g.state_probability(e)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Occupancy {
    pub lambda_min: usize,
    pub degeneracy: u64,
    pub p: f64,
}

pub fn gibbs_state(inst: &CnfInstance, beta: f64) -> Result<GibbsState> {
    let hist = energy_histogram(inst)?;
    Ok(GibbsState::from_histogram(beta, hist.into_iter().enumerate().map(|(e, c)| (e as f64, c)).collect()))
}

/// `p(λ_min, β) = d·e^{−βλ_min} / Σ_x e^{−βf(x)}` for the clause-violation count `f`.
pub fn gibbs_occupancy(inst: &CnfInstance, beta: f64) -> Result<Occupancy> {
    let g = gibbs_state(inst, beta)?;
    Ok(Occupancy { lambda_min: g.lambda_min() as usize, degeneracy: g.degeneracy(), p: g.ground_occupancy() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub frac_sat: f64,
    pub mean_p: f64,
    pub stderr_p: f64,
    pub mean_lambda_min: f64,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Random 3-SAT with `round(αn)` clauses. Cell `(a, i)` draws from stream
/// `a·instances + i` of `seed`, so rows do not depend on thread count.
pub fn sat_sweep(n: usize, alphas: &[f64], instances: usize, betas: &[f64], seed: u64) -> Result<Vec<SweepRow>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyVariables { n, limit: ENUMERATION_LIMIT });
    }
    let cells: Vec<(usize, usize)> = (0..alphas.len()).flat_map(|a| (0..instances).map(move |i| (a, i))).collect();
    let hists: Vec<Vec<u64>> = cells
        .par_iter()
        .map(|&(a, i)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((a * instances + i) as u64);
            let m = (alphas[a] * n as f64).round() as usize;
            energy_histogram(&random_ksat(n, m, 3.min(n), &mut rng))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(alphas.len() * betas.len());
    for (a, &alpha) in alphas.iter().enumerate() {
        let hs = &hists[a * instances..(a + 1) * instances];
        let lmins: Vec<f64> = hs.iter().map(|h| h.iter().position(|&c| c > 0).unwrap_or(0) as f64).collect();
        let frac_sat = lmins.iter().filter(|&&l| l == 0.0).count() as f64 / instances.max(1) as f64;
        let mean_lambda_min = lmins.iter().sum::<f64>() / instances.max(1) as f64;
        for &beta in betas {
            let ps: Vec<f64> = hs
                .iter()
                .map(|h| GibbsState::from_histogram(beta, h.iter().enumerate().map(|(e, &c)| (e as f64, c)).collect()).ground_occupancy())
                .collect();
            let (mean_p, stderr_p) = mean_stderr(&ps);
            rows.push(SweepRow { alpha, beta, frac_sat, mean_p, stderr_p, mean_lambda_min });
        }
    }
    Ok(rows)
}

/// `α` where the satisfiable fraction first falls through one half, by
/// linear interpolation.
pub fn sat_crossing(rows: &[SweepRow]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        if pts.last().is_none_or(|p| p.0 != r.alpha) {
            pts.push((r.alpha, r.frac_sat));
        }
    }
    pts.windows(2).find(|w| w[0].1 >= 0.5 && w[1].1 < 0.5).map(|w| {
        let (a0, f0) = w[0];
        let (a1, f1) = w[1];
        a0 + (f0 - 0.5) / (f0 - f1) * (a1 - a0)
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,beta,frac_sat,mean_p,stderr_p,mean_lambda_min\n");
    for r in rows {
        let cols = [r.alpha, r.beta, r.frac_sat, r.mean_p, r.stderr_p, r.mean_lambda_min].map(sig12);
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}
