//! Circuits as ground states: telescoping objectives and clock Hamiltonians.
//!
//! System qubits come first, clock qubits after them. A unary clock holds time
//! `t` as `1^t 0^{L−t}`; a binary clock holds it as the integer `t`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boolean::bit_of;
use crate::circuit::{apply_gate, Circuit, FixedGate, Gate};
use crate::clifford::{clifford_conjugate, CliffordCircuit, CliffordGate};
use crate::dense::{eigvalsh, realize_dense, CMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::pauli::{Letter, OperatorSum, PauliString, PauliSum};
use crate::state::{StateVector, STATE_LIMIT};

const PRUNE: f64 = 1e-12;

/// `P_φ = Σ_i |1⟩⟨1|^{(i)}`, whose unique ground state is `|0…0⟩`.
pub fn projector_sum(n: usize) -> OperatorSum {
    (0..n).fold(OperatorSum::zero(n), |acc, q| acc.plus(&OperatorSum::p1(n, q)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Telescope {
    pub op: OperatorSum,
    pub cardinality: usize,
    pub non_clifford: usize,
}

/// Non-Clifford gates a telescope may absorb on `n` qubits: `⌈log₂(n+1)⌉`.
pub fn default_non_clifford_bound(n: usize) -> usize {
    ((n + 1) as f64).log2().ceil().max(1.0) as usize
}

fn clifford_form(g: &Gate) -> Option<CliffordCircuit> {
    use CliffordGate as C;
    let gates = match *g {
        Gate::Fixed { gate, qubit: q } => match gate {
            FixedGate::H => vec![C::H(q)],
            FixedGate::P => vec![C::P(q)],
            FixedGate::Pdg => vec![C::P(q); 3],
            FixedGate::Z => vec![C::P(q); 2],
            FixedGate::X => vec![C::H(q), C::P(q), C::P(q), C::H(q)],
            FixedGate::Y => vec![C::P(q), C::P(q), C::H(q), C::P(q), C::P(q), C::H(q)],
        },
        Gate::CN { control, target } => vec![C::CN(control, target)],
        _ => return None,
    };
    Some(CliffordCircuit::new(gates))
}

/// Pauli expansion of one gate acting on `n` qubits.
pub fn gate_operator(n: usize, g: &Gate) -> Result<PauliSum> {
    if let Gate::LocalRotation { qubit, axis, theta } = *g {
        let (s, c) = theta.sin_cos();
        let mut out = PauliSum::zero(n);
        out.add_term(Complex64::new(c, 0.0), &PauliString::identity(n));
        for (w, l) in axis.iter().zip([Letter::X, Letter::Y, Letter::Z]) {
            out.add_term(Complex64::new(0.0, -s * w), &PauliString::single(n, qubit, l));
        }
        return Ok(out.pruned(PRUNE));
    }
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let u = Circuit::new(n, vec![g.clone()])?.unitary()?;
    Ok(PauliSum::from_dense(n, &u).pruned(PRUNE))
}

fn conjugate(h: &OperatorSum, u: &PauliSum) -> Result<OperatorSum> {
    u.product(&PauliSum::from(h)).product(&u.adjoint()).pruned(PRUNE).hermitian(1e-10)
}

pub fn telescope(c: &Circuit, k: usize) -> Result<Telescope> {
    telescope_with_bound(c, k, default_non_clifford_bound(c.n()))
}

/// `h(k) = (U_k⋯U_1) P_φ (U_k⋯U_1)†`.
pub fn telescope_with_bound(c: &Circuit, k: usize, bound: usize) -> Result<Telescope> {
    let n = c.n();
    if k > c.len() {
        return Err(Error::IndexOutOfRange { index: k, n: c.len() });
    }
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let prefix = &c.gates()[..k];
    let non_clifford = prefix.iter().filter(|g| clifford_form(g).is_none()).count();
    if non_clifford > bound {
        return Err(Error::CardinalityBlowup { count: non_clifford, bound });
    }
    let mut h = projector_sum(n);
    for g in prefix {
        h = match clifford_form(g) {
            Some(cc) => clifford_conjugate(&h, &cc)?,
            None => conjugate(&h, &gate_operator(n, g)?)?,
        };
    }
    Ok(Telescope { cardinality: h.cardinality(), op: h, non_clifford })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockEncoding {
    Unary,
    Binary,
}

impl ClockEncoding {
    pub fn clock_qubits(self, l: usize) -> usize {
        match self {
            ClockEncoding::Unary => l,
            ClockEncoding::Binary => (usize::BITS - l.leading_zeros()) as usize,
        }
    }

    /// Index of clock value `t` within the clock register.
    pub fn clock_index(self, l: usize, t: usize) -> usize {
        match self {
            ClockEncoding::Unary => ((1usize << t) - 1) << (l - t),
            ClockEncoding::Binary => t,
        }
    }
}

impl fmt::Display for ClockEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClockEncoding::Unary => "unary",
            ClockEncoding::Binary => "binary",
        })
    }
}

impl FromStr for ClockEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unary" => Ok(ClockEncoding::Unary),
            "binary" => Ok(ClockEncoding::Binary),
            other => Err(Error::UnsupportedGate(format!("unknown clock encoding {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockHamiltonian {
    pub n_system: usize,
    /// Gate count including identity padding.
    pub l: usize,
    pub m: usize,
    pub encoding: ClockEncoding,
    pub j: f64,
    pub k: f64,
    pub input: usize,
    pub h_in: OperatorSum,
    pub h_prop: OperatorSum,
    /// Penalty on clock states that encode no time: broken domain walls in
    /// unary, values above `L` in binary.
    pub h_clock: OperatorSum,
    /// `|1⟩⟨1|` on the first unary clock qubit. It pins the clock to `t = 0`
    /// and so belongs to the initial Hamiltonian, not to `total`.
    pub h_clockinit: Option<OperatorSum>,
    pub terms: Vec<OperatorSum>,
}

impl ClockHamiltonian {
    pub fn clock_qubits(&self) -> usize {
        self.encoding.clock_qubits(self.l)
    }

    pub fn n_total(&self) -> usize {
        self.n_system + self.clock_qubits()
    }

    /// `J·H_in + K·H_prop + J·H_clock`; the history state spans its kernel.
    pub fn total(&self) -> OperatorSum {
        self.h_in.scaled(self.j).plus(&self.h_prop.scaled(self.k)).plus(&self.h_clock.scaled(self.j))
    }

    /// `J·(H_in + H_clock + H_clockinit)`, whose kernel is `|x⟩ ⊗ |t=0⟩`.
    pub fn initial(&self) -> Option<OperatorSum> {
        let init = self.h_clockinit.as_ref()?;
        Some(self.h_in.plus(&self.h_clock).plus(init).scaled(self.j))
    }

    pub fn cardinality(&self) -> usize {
        self.total().cardinality()
    }
}

struct ClockLayout {
    n: usize,
    cq: usize,
    l: usize,
    encoding: ClockEncoding,
}

impl ClockLayout {
    fn total(&self) -> usize {
        self.n + self.cq
    }

    fn clock(&self, j: usize, a: u8, b: u8) -> PauliSum {
        PauliSum::ketbra(self.total(), self.n + j, a, b)
    }

    /// `|a⟩⟨b|` on the binary clock register.
    fn binary_ketbra(&self, a: usize, b: usize) -> PauliSum {
        let bit = |t: usize, j: usize| (t >> (self.cq - 1 - j) & 1) as u8;
        (0..self.cq).fold(PauliSum::identity(self.total()), |acc, j| acc.product(&self.clock(j, bit(a, j), bit(b, j))))
    }

    /// Projector onto clock time `0`.
    fn start(&self) -> PauliSum {
        match self.encoding {
            ClockEncoding::Unary if self.l > 0 => self.clock(0, 0, 0),
            ClockEncoding::Unary => PauliSum::identity(self.total()),
            ClockEncoding::Binary => self.binary_ketbra(0, 0),
        }
    }

    /// `(diag, up)` with `diag` covering clock values `t−1, t` and `up = |t⟩⟨t−1|`.
    fn transition(&self, t: usize) -> (PauliSum, PauliSum) {
        match self.encoding {
            ClockEncoding::Unary => {
                let mut q = PauliSum::identity(self.total());
                if t >= 2 {
                    q = q.product(&self.clock(t - 2, 1, 1));
                }
                if t < self.l {
                    q = q.product(&self.clock(t, 0, 0));
                }
                let up = q.product(&self.clock(t - 1, 1, 0));
                (q, up)
            }
            ClockEncoding::Binary => {
                let diag = self.binary_ketbra(t, t).plus(&self.binary_ketbra(t - 1, t - 1));
                (diag, self.binary_ketbra(t, t - 1))
            }
        }
    }

    fn validity_penalty(&self) -> PauliSum {
        let mut out = PauliSum::zero(self.total());
        match self.encoding {
            ClockEncoding::Unary => {
                for j in 0..self.l.saturating_sub(1) {
                    out = out.plus(&self.clock(j, 0, 0).product(&self.clock(j + 1, 1, 1)));
                }
            }
            ClockEncoding::Binary => {
                for t in self.l + 1..1usize << self.cq {
                    out = out.plus(&self.binary_ketbra(t, t));
                }
            }
        }
        out
    }
}

fn check_weights(j: f64, k: f64) -> Result<()> {
    if !(j > 0.0 && k > 0.0 && j.is_finite() && k.is_finite()) {
        return Err(Error::InvalidWeights);
    }
    Ok(())
}

pub fn clock_hamiltonian(c: &Circuit, j: f64, k: f64, m: usize, encoding: ClockEncoding) -> Result<ClockHamiltonian> {
    clock_hamiltonian_for_input(c, 0, j, k, m, encoding)
}

/// Clock Hamiltonian for `c` followed by `m` identities, started from basis
/// state `input`.
pub fn clock_hamiltonian_for_input(
    c: &Circuit,
    input: usize,
    j: f64,
    k: f64,
    m: usize,
    encoding: ClockEncoding,
) -> Result<ClockHamiltonian> {
    check_weights(j, k)?;
    let n = c.n();
    if input >= 1usize << n {
        return Err(Error::IndexOutOfRange { index: input, n: 1 << n });
    }
    let l = c.len() + m;
    let lay = ClockLayout { n, cq: encoding.clock_qubits(l), l, encoding };
    let nt = lay.total();
    if nt > crate::pauli::MAX_QUBITS || n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n: nt, limit: DENSE_LIMIT });
    }

    let start = lay.start();
    let mut wrong_input = PauliSum::zero(nt);
    for i in 0..n {
        let p = if bit_of(input, n, i) { PauliSum::ketbra(nt, i, 0, 0) } else { PauliSum::ketbra(nt, i, 1, 1) };
        wrong_input = wrong_input.plus(&p);
    }
    let h_in = wrong_input.product(&start).hermitian(PRUNE)?;

    let mut terms = Vec::with_capacity(l);
    let mut h_prop = OperatorSum::zero(nt);
    for t in 1..=l {
        let u = match c.gates().get(t - 1) {
            Some(g) => gate_operator(n, g)?.embed(nt, 0),
            None => PauliSum::identity(nt),
        };
        let (diag, up) = lay.transition(t);
        let hop = u.product(&up).plus(&u.adjoint().product(&up.adjoint()));
        let h_t = diag.plus(&hop.scaled(Complex64::new(-1.0, 0.0))).scaled(Complex64::new(0.5, 0.0));
        let h_t = h_t.pruned(PRUNE).hermitian(PRUNE)?;
        h_prop = h_prop.plus(&h_t);
        terms.push(h_t);
    }

    let h_clock = lay.validity_penalty().hermitian(PRUNE)?;
    let h_clockinit = match encoding {
        ClockEncoding::Unary if l > 0 => Some(OperatorSum::p1(nt, n)),
        _ => None,
    };
    Ok(ClockHamiltonian { n_system: n, l, m, encoding, j, k, input, h_in, h_prop, h_clock, h_clockinit, terms })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryState {
    pub state: StateVector,
    pub n_system: usize,
    pub l: usize,
    pub m: usize,
    pub encoding: ClockEncoding,
    /// `U_t⋯U_1|x⟩` for `t = 0..=L`.
    pub sectors: Vec<StateVector>,
}

impl HistoryState {
    /// Weight of `|φ⟩ ⊗ |t⟩` summed over the padding times `t = L−M+1 ..= L`.
    pub fn output_overlap(&self, phi: &StateVector) -> Result<f64> {
        if phi.n() != self.n_system {
            return Err(Error::DimensionMismatch { expected: self.n_system, got: phi.n() });
        }
        let cq = self.encoding.clock_qubits(self.l);
        let amps = self.state.amplitudes();
        let mut total = 0.0;
        for t in self.l - self.m + 1..=self.l {
            let ci = self.encoding.clock_index(self.l, t);
            let a: Complex64 =
                phi.amplitudes().iter().enumerate().map(|(s, p)| p.conj() * amps[s << cq | ci]).sum();
            total += a.norm_sqr();
        }
        Ok(total)
    }
}

pub fn history_state(c: &Circuit, m: usize, encoding: ClockEncoding) -> Result<HistoryState> {
    history_state_for_input(c, 0, m, encoding)
}

/// `(L+1)^{-1/2} Σ_t U_t⋯U_1|x⟩ ⊗ |t⟩` over the padded circuit.
pub fn history_state_for_input(c: &Circuit, input: usize, m: usize, encoding: ClockEncoding) -> Result<HistoryState> {
    let n = c.n();
    let l = c.len() + m;
    let cq = encoding.clock_qubits(l);
    if n + cq > STATE_LIMIT {
        return Err(Error::DimensionTooLarge { n: n + cq, limit: STATE_LIMIT });
    }
    if input >= 1usize << n {
        return Err(Error::IndexOutOfRange { index: input, n: 1 << n });
    }
    let mut psi = StateVector::basis(n, input).into_amplitudes();
    let mut sectors = vec![StateVector::from_normalized(n, psi.clone())];
    for t in 1..=l {
        if let Some(g) = c.gates().get(t - 1) {
            apply_gate(&mut psi, n, g);
        }
        sectors.push(StateVector::from_normalized(n, psi.clone()));
    }
    let w = 1.0 / ((l + 1) as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << (n + cq)];
    for (t, sec) in sectors.iter().enumerate() {
        let ci = encoding.clock_index(l, t);
        for (s, a) in sec.amplitudes().iter().enumerate() {
            amps[s << cq | ci] = a * w;
        }
    }
    Ok(HistoryState { state: StateVector::from_normalized(n + cq, amps), n_system: n, l, m, encoding, sectors })
}

/// `M/(L+M+1) = 1/(1 + (L+1)/M)`.
pub fn acceptance_closed_form(l: usize, m: usize) -> f64 {
    m as f64 / (l + m + 1) as f64
}

/// Weight of the circuit output on the `M` padding sectors of the history state.
pub fn acceptance_overlap(c: &Circuit, m: usize) -> Result<f64> {
    let hist = history_state(c, m, ClockEncoding::Binary)?;
    let out = hist.sectors[c.len()].clone();
    hist.output_overlap(&out)
}

/// `max{J, Kπ²/(2(L+1)²)}`.
pub fn gap_bound(l: usize, j: f64, k: f64) -> f64 {
    j.max(k * PI * PI / (2.0 * ((l + 1) as f64).powi(2)))
}

/// `1 − cos(πk/(L+1))` for `k = 0..=L`.
pub fn chain_eigenvalues(l: usize) -> Vec<f64> {
    (0..=l).map(|k| 1.0 - (PI * k as f64 / (l + 1) as f64).cos()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapAnalysis {
    pub l: usize,
    pub j: f64,
    pub k: f64,
    /// Eigenvalues of `H_prop` on valid clock states, ascending.
    pub prop_spectrum: Vec<f64>,
    /// `λ_k`, each repeated once per system basis state.
    pub predicted: Vec<f64>,
    pub max_deviation: f64,
    pub gap_exact: f64,
    pub gap_bound: f64,
    pub bound_holds: bool,
}

/// Valid-clock eigenvalues of `H_prop` and the exact gap of the full operator.
pub fn clock_spectrum(ch: &ClockHamiltonian) -> Result<(Vec<f64>, f64)> {
    let nt = ch.n_total();
    if nt > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n: nt, limit: DENSE_LIMIT });
    }
    let cq = ch.clock_qubits();
    let valid: Vec<usize> = (0..1usize << ch.n_system)
        .flat_map(|s| (0..=ch.l).map(move |t| s << cq | ch.encoding.clock_index(ch.l, t)))
        .collect();
    let prop = realize_dense(&ch.h_prop)?.matrix;
    let sub = CMatrix::from_fn(valid.len(), valid.len(), |a, b| prop[(valid[a], valid[b])]);
    let total = eigvalsh(&realize_dense(&ch.total())?.matrix);
    Ok((eigvalsh(&sub), total[1] - total[0]))
}

/// Spectral check on a one-qubit Hadamard chain of length `L` with a unary clock.
pub fn gap_analysis(l: usize, j: f64, k: f64) -> Result<GapAnalysis> {
    let gates = vec![Gate::Fixed { gate: FixedGate::H, qubit: 0 }; l];
    let ch = clock_hamiltonian(&Circuit::new(1, gates)?, j, k, 0, ClockEncoding::Unary)?;
    let (prop_spectrum, gap_exact) = clock_spectrum(&ch)?;
    let predicted: Vec<f64> = chain_eigenvalues(l).into_iter().flat_map(|v| [v, v]).collect();
    let max_deviation = prop_spectrum.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bound = gap_bound(l, j, k);
    Ok(GapAnalysis {
        l,
        j,
        k,
        prop_spectrum,
        predicted,
        max_deviation,
        gap_exact,
        gap_bound: bound,
        bound_holds: gap_exact >= bound - 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockReport {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub encoding: ClockEncoding,
    pub cardinality: usize,
    pub gap_exact: Option<f64>,
    pub gap_bound: f64,
    pub overlap: f64,
}

/// The exact gap is left out when the register exceeds the dense limit.
pub fn clock_report(c: &Circuit, j: f64, k: f64, m: usize, encoding: ClockEncoding) -> Result<ClockReport> {
    let ch = clock_hamiltonian(c, j, k, m, encoding)?;
    let gap_exact = match clock_spectrum(&ch) {
        Ok((_, g)) => Some(g),
        Err(Error::DimensionTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ClockReport {
        l: ch.l,
        m,
        encoding,
        cardinality: ch.cardinality(),
        gap_exact,
        gap_bound: gap_bound(ch.l, j, k),
        overlap: acceptance_overlap(c, m)?,
    })
}

/// Axis of `R(θ) = X sin θ + Z cos θ`.
pub fn r_axis(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

/// `R_ij(φ) = |0⟩⟨0|_i ⊗ 𝟙 + |1⟩⟨1|_i ⊗ (sin φ X_j + cos φ Z_j)`.
pub fn r_ij(i: usize, j: usize, phi: f64) -> Gate {
    Gate::ControlledReflection { control: i, target: j, axis: r_axis(phi) }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Axes `(m₁, m₂)` with `(m₂·σ)(m₁·σ) = e^{−iθ n̂·σ}`. Both are orthogonal to
/// `n̂` and `m₁` is `m₂` turned by `−θ` about `n̂`. For `n̂ = ŷ` this gives
/// `m₂ = x̂`, i.e. `R(π/2)·R(θ')`.
pub fn rotation_reflections(axis: [f64; 3], theta: f64) -> ([f64; 3], [f64; 3]) {
    let e = if axis[0].abs() <= 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
    let d = e[0] * axis[0] + e[1] * axis[1] + e[2] * axis[2];
    let mut m2 = [e[0] - d * axis[0], e[1] - d * axis[1], e[2] - d * axis[2]];
    let norm = m2.iter().map(|v| v * v).sum::<f64>().sqrt();
    m2.iter_mut().for_each(|v| *v /= norm);
    let nx = cross(axis, m2);
    let (s, c) = theta.sin_cos();
    let m1 = [c * m2[0] - s * nx[0], c * m2[1] - s * nx[1], c * m2[2] - s * nx[2]];
    (m1, m2)
}

/// Rewrites local rotations and CN gates as Hermitian self-inverse gates,
/// equal to the input up to a global phase.
pub fn self_inverse_compile(c: &Circuit) -> Result<Circuit> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Circuit::empty(c.n());
    let rot = |out: &mut Circuit, qubit: usize, axis: [f64; 3], theta: f64| -> Result<()> {
        if theta.sin().abs() < 1e-15 {
            return Ok(());
        }
        let (m1, m2) = rotation_reflections(axis, theta);
        out.push(Gate::Reflection { qubit, axis: m1 })?;
        out.push(Gate::Reflection { qubit, axis: m2 })
    };
    for g in c.gates() {
        match *g {
            Gate::LocalRotation { qubit, axis, theta } => rot(&mut out, qubit, axis, theta)?,
            Gate::Fixed { gate, qubit } => match gate {
                FixedGate::H => out.push(Gate::Reflection { qubit, axis: [inv_sqrt2, 0.0, inv_sqrt2] })?,
                FixedGate::X => out.push(Gate::Reflection { qubit, axis: [1.0, 0.0, 0.0] })?,
                FixedGate::Y => out.push(Gate::Reflection { qubit, axis: [0.0, 1.0, 0.0] })?,
                FixedGate::Z => out.push(Gate::Reflection { qubit, axis: [0.0, 0.0, 1.0] })?,
                FixedGate::P => rot(&mut out, qubit, [0.0, 0.0, 1.0], PI / 4.0)?,
                FixedGate::Pdg => rot(&mut out, qubit, [0.0, 0.0, 1.0], -PI / 4.0)?,
            },
            Gate::CN { .. } | Gate::Reflection { .. } | Gate::ControlledReflection { .. } => out.push(g.clone())?,
            _ => return Err(Error::UnsupportedGate(format!("{g:?} is not a local rotation or CN"))),
        }
    }
    Ok(out)
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotUnitary);
    }
    let dev = (u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols())).norm();
    if dev > 1e-10 {
        return Err(Error::NotUnitary);
    }
    Ok(())
}

/// `Ũ = Re U ⊗ 𝟙 + Im U ⊗ (|1⟩⟨0| − |0⟩⟨1|)` on one extra trailing qubit.
pub fn realify_gate(u: &CMatrix) -> Result<DMatrix<f64>> {
    check_unitary(u)?;
    let d = u.nrows();
    Ok(DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let (i, a, j, b) = (r / 2, r % 2, c / 2, c % 2);
        let z = u[(i, j)];
        let re = if a == b { z.re } else { 0.0 };
        let im = match (a, b) {
            (1, 0) => z.im,
            (0, 1) => -z.im,
            _ => 0.0,
        };
        re + im
    }))
}

/// `Σ_x a_x|x⟩|0⟩ + b_x|x⟩|1⟩` for amplitudes `a_x + i b_x`.
pub fn realify_encode(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn realify_decode(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// `R_k = diag(1, e^{2πi/2^k})`.
pub fn phase_gate(k: u32) -> CMatrix {
    let mut m = CMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::from_polar(1.0, 2.0 * PI / 2f64.powi(k as i32));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(q: usize) -> Gate {
        Gate::Fixed { gate: FixedGate::H, qubit: q }
    }

    #[test]
    fn empty_telescope_is_projector_sum() {
        let t = telescope(&Circuit::empty(4), 0).unwrap();
        assert_eq!(t.cardinality, 5);
        assert_eq!(t.op.coeff_of("IIII"), 2.0);
        assert_eq!(t.op.coeff_of("ZIII"), -0.5);
    }

    #[test]
    fn clifford_prefix_keeps_cardinality() {
        let c = Circuit::new(3, vec![h(0), Gate::CN { control: 0, target: 1 }, Gate::Fixed { gate: FixedGate::P, qubit: 2 }]).unwrap();
        let t = telescope(&c, 3).unwrap();
        assert_eq!(t.cardinality, 4);
        assert_eq!(t.non_clifford, 0);
    }

    #[test]
    fn too_many_rotations_rejected() {
        let r = Gate::LocalRotation { qubit: 0, axis: [0.0, 1.0, 0.0], theta: 0.3 };
        let c = Circuit::new(2, vec![r.clone(), r.clone(), r]).unwrap();
        assert_eq!(telescope(&c, 3), Err(Error::CardinalityBlowup { count: 3, bound: 2 }));
        assert!(telescope(&c, 2).is_ok());
    }

    #[test]
    fn clock_sizes() {
        assert_eq!(ClockEncoding::Binary.clock_qubits(0), 0);
        assert_eq!(ClockEncoding::Binary.clock_qubits(1), 1);
        assert_eq!(ClockEncoding::Binary.clock_qubits(3), 2);
        assert_eq!(ClockEncoding::Binary.clock_qubits(4), 3);
        assert_eq!(ClockEncoding::Unary.clock_index(3, 2), 0b110);
        assert_eq!(ClockEncoding::Unary.clock_index(3, 0), 0);
    }

    #[test]
    fn weights_checked() {
        let c = Circuit::new(1, vec![h(0)]).unwrap();
        assert_eq!(clock_hamiltonian(&c, 0.0, 1.0, 0, ClockEncoding::Unary), Err(Error::InvalidWeights));
        assert_eq!(clock_hamiltonian(&c, 1.0, f64::NAN, 0, ClockEncoding::Binary), Err(Error::InvalidWeights));
    }

    #[test]
    fn small_chain_eigenvalues() {
        let e = chain_eigenvalues(1);
        assert!(e[0].abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        assert!((chain_eigenvalues(3)[1] - 0.29289321881345).abs() < 1e-12);
    }

    #[test]
    fn closed_form_overlap() {
        assert_eq!(acceptance_closed_form(1, 2), 0.5);
        assert_eq!(acceptance_closed_form(3, 0), 0.0);
        assert!(acceptance_closed_form(100, 10_000) >= 0.99);
        assert!(acceptance_closed_form(5, 500) < 0.99);
    }

    #[test]
    fn real_gate_stays_real() {
        let x = Circuit::new(1, vec![h(0)]).unwrap().unitary().unwrap();
        let r = realify_gate(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i % 2 == j % 2 { x[(i / 2, j / 2)].re } else { 0.0 };
                assert_eq!(r[(i, j)], expect);
            }
        }
        assert_eq!(realify_gate(&CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0))), Err(Error::NotUnitary));
    }
}
