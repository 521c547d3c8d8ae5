//! Variational algorithms on exact statevectors: QAOA and its reachability
//! deficit, variational search, multi-control factorization, entanglement
//! bounds and discretized adiabatic evolution.

use crate::io::sig12;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean::{cnf_to_hamiltonian, random_ksat, CnfInstance};
use crate::circuit::{apply_1q, simulate, Circuit, Gate, TargetU};
use crate::dense::{eigh, operator_norm, realize_dense, unitary_exp, CMatrix};
use crate::error::{Error, Result};
use crate::optimize::{optimize, OptimizeResult, OptimizerConfig};
use crate::pauli::OperatorSum;
use crate::state::{StateVector, STATE_LIMIT};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------- ansatz

#[derive(Clone, Debug, PartialEq)]
pub enum TemplateGate {
    Fixed(Gate),
    /// `e^{−i·scale·θ_slot(n̂·σ)}`.
    Rotation { qubit: usize, axis: [f64; 3], slot: usize, scale: f64 },
    Phase { controls: Vec<usize>, slot: usize, scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub n: usize,
    pub slots: usize,
    pub template: Vec<TemplateGate>,
    pub initial: StateVector,
}

impl Ansatz {
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.slots {
            return Err(Error::ParameterCount { expected: self.slots, got: theta.len() });
        }
        let gates = self
            .template
            .iter()
            .map(|t| match t {
                TemplateGate::Fixed(g) => g.clone(),
                TemplateGate::Rotation { qubit, axis, slot, scale } => {
                    Gate::LocalRotation { qubit: *qubit, axis: *axis, theta: scale * theta[*slot] }
                }
                TemplateGate::Phase { controls, slot, scale } => {
                    Gate::ControlledPhase { controls: controls.clone(), phase: scale * theta[*slot] }
                }
            })
            .collect();
        Circuit::new(self.n, gates)
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        simulate(&self.bind(theta)?, &self.initial)
    }
}

// ---------------------------------------------------------------- QAOA

fn diagonal_of(v: &OperatorSum) -> Result<Vec<f64>> {
    if !v.is_diagonal() {
        return Err(Error::NonDiagonalCost);
    }
    if v.n() > STATE_LIMIT {
        return Err(Error::DimensionTooLarge { n: v.n(), limit: STATE_LIMIT });
    }
    Ok(v.diagonal())
}

/// `∏_k e^{−iβ_k H_x} e^{−iγ_k V} |+⟩^⊗n` for a cost given by its diagonal.
pub fn qaoa_state_diag(n: usize, diag: &[f64], gamma: &[f64], beta: &[f64]) -> Vec<Complex64> {
    let mut amps = StateVector::plus(n).into_amplitudes();
    for (&g, &b) in gamma.iter().zip(beta) {
        for (a, d) in amps.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -g * d);
        }
        let (s, c) = b.sin_cos();
        let m = [[cx(c, 0.0), cx(0.0, -s)], [cx(0.0, -s), cx(c, 0.0)]];
        for q in 0..n {
            apply_1q(&mut amps, n, q, &m, 0);
        }
    }
    amps
}

pub fn qaoa_energy_diag(n: usize, diag: &[f64], gamma: &[f64], beta: &[f64]) -> f64 {
    qaoa_state_diag(n, diag, gamma, beta).iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum()
}

pub fn qaoa_energy(v: &OperatorSum, p: usize, gamma: &[f64], beta: &[f64]) -> Result<f64> {
    if gamma.len() != p || beta.len() != p {
        return Err(Error::ParameterCount { expected: p, got: gamma.len().min(beta.len()) });
    }
    Ok(qaoa_energy_diag(v.n(), &diagonal_of(v)?, gamma, beta))
}

/// Lowest depth-`p` QAOA energy found by the optimizer. Parameters are laid
/// out as `(γ₁..γ_p, β₁..β_p)` with `γ ∈ [0, 2π]` and `β ∈ [0, π]`.
pub fn qaoa_optimize(v: &OperatorSum, p: usize, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    let diag = diagonal_of(v)?;
    let n = v.n();
    let f = |x: &[f64]| qaoa_energy_diag(n, &diag, &x[..p], &x[p..]);
    let mut bounds = vec![(0.0, 2.0 * PI); p];
    bounds.extend(vec![(0.0, PI); p]);
    if p == 0 {
        let e = f(&[]);
        return Ok(OptimizeResult { theta: vec![], value: e, evaluations: 1, budget_exceeded: false, restart: 0, trace: vec![] });
    }
    Ok(optimize(&f, &bounds, cfg))
}

/// `f = E_QAOA − min diag(H_SAT)`.
pub fn reachability_deficit(inst: &CnfInstance, p: usize, cfg: &OptimizerConfig) -> Result<f64> {
    let h = cnf_to_hamiltonian(inst);
    let diag = diagonal_of(&h)?;
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(qaoa_optimize(&h, p, cfg)?.value - min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub alpha: f64,
    pub p: usize,
    pub mean_f: f64,
    pub stderr: f64,
    pub seeds: usize,
}

/// Mean deficit over `seeds` random 3-SAT instances at each `(α, p)`.
/// Instance `s` at density `α` is drawn from stream `s` of the base seed.
pub fn deficit_sweep(n: usize, alphas: &[f64], ps: &[usize], seeds: usize, base_seed: u64, cfg: &OptimizerConfig) -> Result<Vec<DeficitRow>> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        let m = (alpha * n as f64).round() as usize;
        let instances: Vec<CnfInstance> = (0..seeds)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ alpha.to_bits());
                rng.set_stream(s as u64);
                random_ksat(n, m, 3, &mut rng)
            })
            .collect();
        for &p in ps {
            let fs: Vec<f64> = instances.par_iter().map(|inst| reachability_deficit(inst, p, cfg)).collect::<Result<_>>()?;
            let (mean, stderr) = mean_stderr(&fs);
            rows.push(DeficitRow { alpha, p, mean_f: mean, stderr, seeds });
        }
    }
    Ok(rows)
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

pub fn deficit_csv(rows: &[DeficitRow]) -> String {
    let mut s = String::from("alpha,p,mean_f,stderr,seeds\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", sig12(r.alpha), r.p, sig12(r.mean_f), sig12(r.stderr), r.seeds));
    }
    s
}

// ---------------------------------------------------------------- search

/// Success probability after `steps` Grover iterations, from the amplitude
/// recursion on `(A, B)` where `B` is the marked amplitude.
pub fn grover_reference(n: usize, steps: usize) -> f64 {
    let nn = (1u64 << n) as f64;
    let (d, o) = (1.0 - 2.0 / nn, 2.0 * (nn - 1.0).sqrt() / nn);
    let (mut a, mut b) = (((nn - 1.0) / nn).sqrt(), 1.0 / nn.sqrt());
    for _ in 0..steps {
        (a, b) = (d * a - o * b, o * a + d * b);
    }
    b * b
}

/// One step `K(β)V(α)` on `(A, B)`, with `a = e^{iα} − 1`, `b = e^{iβ} − 1`.
pub fn transfer_matrix(n: usize, a: Complex64, b: Complex64) -> [[Complex64; 2]; 2] {
    let nn = (1u64 << n) as f64;
    let (c2, cd, d2) = ((nn - 1.0) / nn, (nn - 1.0).sqrt() / nn, 1.0 / nn);
    let one = cx(1.0, 0.0);
    [[one + b * c2, b * cd * (one + a)], [b * cd, (one + a) * (one + b * d2)]]
}

/// Probability of the marked string after `K(β_p)V(α_p)⋯K(β₁)V(α₁)|s⟩`.
pub fn search_probability(n: usize, alpha: &[f64], beta: &[f64]) -> f64 {
    let nn = (1u64 << n) as f64;
    let mut v = [cx(((nn - 1.0) / nn).sqrt(), 0.0), cx(1.0 / nn.sqrt(), 0.0)];
    for (&al, &be) in alpha.iter().zip(beta) {
        let m = transfer_matrix(n, Complex64::from_polar(1.0, al) - 1.0, Complex64::from_polar(1.0, be) - 1.0);
        v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    }
    v[1].norm_sqr()
}

/// Same sequence on the full register with marked string `omega`.
pub fn search_state(n: usize, omega: usize, alpha: &[f64], beta: &[f64]) -> StateVector {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    let mut amps = StateVector::plus(n).into_amplitudes();
    for (&al, &be) in alpha.iter().zip(beta) {
        amps[omega] *= Complex64::from_polar(1.0, al);
        let overlap: Complex64 = amps.iter().sum::<Complex64>() * s;
        let kick = (Complex64::from_polar(1.0, be) - 1.0) * overlap * s;
        for a in amps.iter_mut() {
            *a += kick;
        }
    }
    StateVector::from_normalized(n, amps)
}

/// `V(α) = X^{1−ω}(𝟙 ⊕ e^{iα})X^{1−ω}` and `K(β) = H X (𝟙 ⊕ e^{iβ}) X H`
/// as gates, repeated for each angle pair.
pub fn search_circuit(n: usize, omega: usize, alpha: &[f64], beta: &[f64]) -> Result<Circuit> {
    use crate::circuit::FixedGate;
    let all: Vec<usize> = (0..n).collect();
    let zeros: Vec<usize> = (0..n).filter(|&q| !crate::boolean::bit_of(omega, n, q)).collect();
    let layer = |g: FixedGate, qs: &[usize]| qs.iter().map(|&q| Gate::Fixed { gate: g, qubit: q }).collect::<Vec<_>>();
    let mut gates = layer(FixedGate::H, &all);
    for (&al, &be) in alpha.iter().zip(beta) {
        gates.extend(layer(FixedGate::X, &zeros));
        gates.push(Gate::ControlledPhase { controls: all.clone(), phase: al });
        gates.extend(layer(FixedGate::X, &zeros));
        gates.extend(layer(FixedGate::H, &all));
        gates.extend(layer(FixedGate::X, &all));
        gates.push(Gate::ControlledPhase { controls: all.clone(), phase: be });
        gates.extend(layer(FixedGate::X, &all));
        gates.extend(layer(FixedGate::H, &all));
    }
    Circuit::new(n, gates)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroverMode {
    /// Oracle fixed at π, `p` free diffusion angles.
    VarDiffusion,
    /// Oracle fixed at π, one shared diffusion angle.
    RestrictedDiffusion,
    /// One angle shared by every oracle and diffusion step.
    Matched,
    /// `2p` free angles.
    TwoLevel,
}

impl GroverMode {
    pub fn dims(self, p: usize) -> usize {
        match self {
            GroverMode::VarDiffusion => p,
            GroverMode::RestrictedDiffusion | GroverMode::Matched => 1,
            GroverMode::TwoLevel => 2 * p,
        }
    }

    pub fn expand(self, p: usize, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self {
            GroverMode::VarDiffusion => (vec![PI; p], x.to_vec()),
            GroverMode::RestrictedDiffusion => (vec![PI; p], vec![x[0]; p]),
            GroverMode::Matched => (vec![x[0]; p], vec![x[0]; p]),
            GroverMode::TwoLevel => (x[..p].to_vec(), x[p..].to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverResult {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub probability: f64,
    pub grover: f64,
    /// `100·(P_var − P_Grover)/P_Grover`.
    pub improvement_percent: f64,
}

/// `θ ↦ min(θ mod 2π, 2π − θ mod 2π)`; both give the same probability.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    t.min(2.0 * PI - t)
}

pub fn variational_grover(n: usize, p: usize, mode: GroverMode, cfg: &OptimizerConfig) -> GroverResult {
    let f = |x: &[f64]| {
        let (a, b) = mode.expand(p, x);
        1.0 - search_probability(n, &a, &b)
    };
    let bounds = vec![(0.0, 2.0 * PI); mode.dims(p)];
    let best = optimize(&f, &bounds, cfg);
    let (alpha, beta) = mode.expand(p, &best.theta);
    let probability = 1.0 - best.value;
    let grover = grover_reference(n, p);
    GroverResult { alpha, beta, probability, grover, improvement_percent: 100.0 * (probability - grover) / grover }
}

// ---------------------------------------------------------------- k-controlled factorization

/// `(W, S, φ)` with `W S W† S† = φ·U`.
fn commutator_split(u: TargetU) -> (TargetU, TargetU, Complex64) {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    match u {
        TargetU::X => (TargetU::V, TargetU::Z, cx(0.0, -1.0)),
        TargetU::V => (TargetU::Rx(FRAC_PI_4), TargetU::Z, e(-FRAC_PI_4)),
        TargetU::Vdg => (TargetU::Rx(-FRAC_PI_4), TargetU::Z, e(FRAC_PI_4)),
        TargetU::Z => (TargetU::SqrtZ, TargetU::X, cx(0.0, -1.0)),
        TargetU::SqrtZ => (TargetU::Rz(FRAC_PI_4), TargetU::X, e(-FRAC_PI_4)),
        TargetU::SqrtZdg => (TargetU::Rz(-FRAC_PI_4), TargetU::X, e(FRAC_PI_4)),
        TargetU::Rx(t) => (TargetU::Rx(t / 2.0), TargetU::Z, cx(1.0, 0.0)),
        TargetU::Rz(t) => (TargetU::Rz(t / 2.0), TargetU::X, cx(1.0, 0.0)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KControlled {
    pub circuit: Circuit,
    /// The circuit equals `𝟙 ⊕ phase·U` on the all-controls block.
    pub block_phase: Complex64,
}

fn decompose_into(controls: &[usize], target: usize, u: TargetU, out: &mut Vec<Gate>) {
    if controls.len() == 1 {
        out.push(Gate::KControlled { controls: controls.to_vec(), target, u });
        return;
    }
    let (a, b) = controls.split_at(controls.len() / 2);
    let (w, s, _) = commutator_split(u);
    let sub = |cs: &[usize], g: TargetU| {
        let mut v = Vec::new();
        decompose_into(cs, target, g, &mut v);
        v
    };
    let (dw, ds) = (sub(a, w), sub(b, s));
    let adj = |v: &[Gate]| v.iter().rev().map(Gate::adjoint).collect::<Vec<_>>();
    // operator W S W† S†: S† acts first
    out.extend(adj(&ds));
    out.extend(adj(&dw));
    out.extend(ds);
    out.extend(dw);
}

/// Factorizes a `k`-controlled `U` on `k + 1` qubits (controls `0..k`,
/// target `k`) into singly-controlled gates by nested group commutators.
pub fn k_controlled_decompose(k: usize, u: TargetU) -> Result<KControlled> {
    if k == 0 {
        return Err(Error::UnsupportedGate("k-controlled gate needs k >= 1".into()));
    }
    let controls: Vec<usize> = (0..k).collect();
    let mut gates = Vec::new();
    decompose_into(&controls, k, u, &mut gates);
    let block_phase = if k == 1 { cx(1.0, 0.0) } else { commutator_split(u).2 };
    Ok(KControlled { circuit: Circuit::new(k + 1, gates)?, block_phase })
}

/// `g(k) = 2g(⌊k/2⌋) + 2g(⌈k/2⌉)`, `g(1) = 1`.
pub fn gate_count(k: usize) -> u64 {
    fn rec(k: usize, memo: &mut HashMap<usize, u64>) -> u64 {
        if k <= 1 {
            return 1;
        }
        if let Some(&v) = memo.get(&k) {
            return v;
        }
        let v = 2 * rec(k / 2, memo) + 2 * rec(k.div_ceil(2), memo);
        memo.insert(k, v);
        v
    }
    rec(k, &mut HashMap::new())
}

/// `f(k) = 3k·2^⌊log₂k⌋ − 2^{1+2⌊log₂k⌋}`.
pub fn gate_count_closed(k: usize) -> u64 {
    let l = k.ilog2();
    3 * k as u64 * (1u64 << l) - (1u64 << (1 + 2 * l))
}

// ---------------------------------------------------------------- entanglement

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schmidt {
    pub rank: usize,
    pub ebits: f64,
}

pub const SCHMIDT_TOL: f64 = 1e-10;

pub fn schmidt_ebits(psi: &StateVector, part: &[usize]) -> Result<Schmidt> {
    let n = psi.n();
    let mut inside = vec![false; n];
    for &q in part {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        inside[q] = true;
    }
    let a: Vec<usize> = (0..n).filter(|&q| inside[q]).collect();
    let b: Vec<usize> = (0..n).filter(|&q| !inside[q]).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::BadBipartition);
    }
    let sub = |idx: usize, qs: &[usize]| qs.iter().fold(0usize, |m, &q| (m << 1) | crate::boolean::bit_of(idx, n, q) as usize);
    let mut m = CMatrix::zeros(1 << a.len(), 1 << b.len());
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        m[(sub(i, &a), sub(i, &b))] = *amp;
    }
    let rank = m.singular_values().iter().filter(|&&s| s > SCHMIDT_TOL).count();
    Ok(Schmidt { rank, ebits: (rank as f64).log2() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLawReport {
    /// Layers of multi-qubit gates.
    pub c: usize,
    pub bound: f64,
    pub max_ebits: f64,
    pub cuts_checked: usize,
    pub violations: Vec<Vec<usize>>,
}

/// Runs `c` on `|0…0⟩` and checks every bipartition against
/// `min{⌈n/2⌉, c}` ebits.
pub fn area_law_check(c: &Circuit) -> Result<AreaLawReport> {
    let n = c.n();
    let psi = simulate(c, &StateVector::zero(n))?;
    let layers = c.two_qubit_depth();
    let bound = (n.div_ceil(2).min(layers)) as f64;
    let mut max_ebits = 0.0f64;
    let mut violations = Vec::new();
    let mut cuts = 0;
    // subsets containing qubit 0 cover each bipartition once
    for mask in 0..(1usize << (n - 1)) {
        let part: Vec<usize> = std::iter::once(0).chain((1..n).filter(|&q| mask >> (q - 1) & 1 == 1)).collect();
        if part.len() == n {
            continue;
        }
        let s = schmidt_ebits(&psi, &part)?;
        cuts += 1;
        max_ebits = max_ebits.max(s.ebits);
        if s.ebits > bound + 1e-9 {
            violations.push(part);
        }
    }
    Ok(AreaLawReport { c: layers, bound, max_ebits, cuts_checked: cuts, violations })
}

// ---------------------------------------------------------------- overlap bounds

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: f64,
    pub energy: f64,
    pub gap: f64,
    pub trace: f64,
}

pub const DEGENERACY_TOL: f64 = 1e-9;

/// `1 − E/Δ ≤ |⟨φ|ψ₀⟩|² ≤ 1 − E/Tr H` for `H` shifted so `λ₀ = 0`.
pub fn energy_overlap_bounds(h: &OperatorSum, phi: &StateVector) -> Result<OverlapBounds> {
    overlap_bounds_dense(&realize_dense(h)?.matrix, phi)
}

pub fn overlap_bounds_dense(h: &CMatrix, phi: &StateVector) -> Result<OverlapBounds> {
    if phi.dim() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: phi.dim() });
    }
    let e = eigh(h);
    let l0 = e.values[0];
    let gap = e.values[1] - l0;
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateGround);
    }
    let trace: f64 = e.values.iter().map(|l| l - l0).sum();
    let v = crate::dense::to_dvector(phi.amplitudes());
    let energy = (v.adjoint() * h * &v)[(0, 0)].re - l0;
    if energy >= gap {
        return Err(Error::EnergyAboveGap { energy, gap });
    }
    let exact = (e.vectors.column(0).adjoint() * &v)[(0, 0)].norm_sqr();
    Ok(OverlapBounds { lower: 1.0 - energy / gap, upper: 1.0 - energy / trace, exact, energy, gap, trace })
}

// ---------------------------------------------------------------- adiabatic discretization

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    /// `W(x) = e^{−ixH₀}`.
    W(f64),
    /// `V(x) = e^{−ixH_f}`.
    V(f64),
}

/// `U′_j = W((1 − jΔs)τ)·V(jΔs·τ)` for `j = 1..r`, `Δs = 1/r`, `τ = T/r`,
/// listed in the order they act.
pub fn adiabatic_discretize(h0: &OperatorSum, hf: &OperatorSum, r: usize, total_time: f64) -> Result<Vec<Factor>> {
    if h0.n() != hf.n() {
        return Err(Error::DimensionMismatch { expected: h0.n(), got: hf.n() });
    }
    if r == 0 {
        return Err(Error::InvalidSteps);
    }
    let tau = total_time / r as f64;
    let mut seq = Vec::with_capacity(2 * r);
    for j in 1..=r {
        let s = j as f64 / r as f64;
        seq.push(Factor::V(s * tau));
        seq.push(Factor::W((1.0 - s) * tau));
    }
    Ok(seq)
}

pub fn factors_unitary(h0: &OperatorSum, hf: &OperatorSum, seq: &[Factor]) -> Result<CMatrix> {
    let (a, b) = (realize_dense(h0)?.matrix, realize_dense(hf)?.matrix);
    let dim = a.nrows();
    let mut u = CMatrix::identity(dim, dim);
    for f in seq {
        let step = match *f {
            Factor::W(x) => unitary_exp(&a, x),
            Factor::V(x) => unitary_exp(&b, x),
        };
        u = step * u;
    }
    Ok(u)
}

/// Time-ordered propagator of `H(t) = (1 − t/T)H₀ + (t/T)H_f` by the
/// midpoint rule on `steps` slices.
pub fn interpolated_unitary(h0: &OperatorSum, hf: &OperatorSum, total_time: f64, steps: usize) -> Result<CMatrix> {
    let (a, b) = (realize_dense(h0)?.matrix, realize_dense(hf)?.matrix);
    let dim = a.nrows();
    let dt = total_time / steps as f64;
    let mut u = CMatrix::identity(dim, dim);
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        let h = &a * cx(1.0 - s, 0.0) + &b * cx(s, 0.0);
        u = unitary_exp(&h, dt) * u;
    }
    Ok(u)
}

/// Propagator of the piecewise-constant schedule `H′_j = (1 − j/r)H₀ + (j/r)H_f`.
pub fn piecewise_unitary(h0: &OperatorSum, hf: &OperatorSum, total_time: f64, r: usize) -> Result<CMatrix> {
    let (a, b) = (realize_dense(h0)?.matrix, realize_dense(hf)?.matrix);
    let dim = a.nrows();
    let mut u = CMatrix::identity(dim, dim);
    for j in 1..=r {
        let s = j as f64 / r as f64;
        let h = &a * cx(1.0 - s, 0.0) + &b * cx(s, 0.0);
        u = unitary_exp(&h, total_time / r as f64) * u;
    }
    Ok(u)
}

/// `sup_t ‖H(t) − H′(t)‖ = ‖H_f − H₀‖/r` for the piecewise schedule.
pub fn schedule_deviation(h0: &OperatorSum, hf: &OperatorSum, r: usize) -> Result<f64> {
    let d = realize_dense(&hf.minus(h0))?.matrix;
    Ok(operator_norm(&d) / r as f64)
}

pub fn real_matrix(m: &CMatrix) -> DMatrix<f64> {
    m.map(|v| v.re)
}
