//! Gate-level circuits and in-place statevector simulation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::pauli::bitpos;
use crate::state::{StateVector, STATE_LIMIT};

pub type Mat2 = [[Complex64; 2]; 2];

const AXIS_TOL: f64 = 1e-12;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedGate {
    H,
    P,
    Pdg,
    X,
    Y,
    Z,
}

impl FixedGate {
    pub fn matrix(self) -> Mat2 {
        let (o, z) = (cx(1.0, 0.0), cx(0.0, 0.0));
        let h = cx(FRAC_1_SQRT_2, 0.0);
        match self {
            FixedGate::H => [[h, h], [h, -h]],
            FixedGate::P => [[o, z], [z, cx(0.0, 1.0)]],
            FixedGate::Pdg => [[o, z], [z, cx(0.0, -1.0)]],
            FixedGate::X => [[z, o], [o, z]],
            FixedGate::Y => [[z, cx(0.0, -1.0)], [cx(0.0, 1.0), z]],
            FixedGate::Z => [[o, z], [z, -o]],
        }
    }

    fn name(self) -> &'static str {
        match self {
            FixedGate::H => "h",
            FixedGate::P => "p",
            FixedGate::Pdg => "pdg",
            FixedGate::X => "x",
            FixedGate::Y => "y",
            FixedGate::Z => "z",
        }
    }

    fn adjoint(self) -> Self {
        match self {
            FixedGate::P => FixedGate::Pdg,
            FixedGate::Pdg => FixedGate::P,
            g => g,
        }
    }
}

/// Single-qubit unitaries allowed under a multi-control.
/// `Rx(θ) = e^{−iθX/2}`, `Rz(φ) = e^{−iφZ/2}`, `V = √X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetU {
    X,
    V,
    Vdg,
    Z,
    SqrtZ,
    SqrtZdg,
    Rx(f64),
    Rz(f64),
}

impl TargetU {
    pub fn matrix(self) -> Mat2 {
        let z = cx(0.0, 0.0);
        let (p, m) = (cx(0.5, 0.5), cx(0.5, -0.5));
        let half = |t: f64| (t / 2.0).sin_cos();
        match self {
            TargetU::X => FixedGate::X.matrix(),
            TargetU::V => [[p, m], [m, p]],
            TargetU::Vdg => [[m, p], [p, m]],
            TargetU::Z => FixedGate::Z.matrix(),
            TargetU::SqrtZ => FixedGate::P.matrix(),
            TargetU::SqrtZdg => FixedGate::Pdg.matrix(),
            TargetU::Rx(t) => {
                let (s, c) = half(t);
                [[cx(c, 0.0), cx(0.0, -s)], [cx(0.0, -s), cx(c, 0.0)]]
            }
            TargetU::Rz(t) => {
                let (s, c) = half(t);
                [[cx(c, -s), z], [z, cx(c, s)]]
            }
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            TargetU::V => TargetU::Vdg,
            TargetU::Vdg => TargetU::V,
            TargetU::SqrtZ => TargetU::SqrtZdg,
            TargetU::SqrtZdg => TargetU::SqrtZ,
            TargetU::Rx(t) => TargetU::Rx(-t),
            TargetU::Rz(t) => TargetU::Rz(-t),
            g => g,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TargetU::X => "x",
            TargetU::V => "v",
            TargetU::Vdg => "vdg",
            TargetU::Z => "z",
            TargetU::SqrtZ => "sqrtz",
            TargetU::SqrtZdg => "sqrtzdg",
            TargetU::Rx(_) => "rx",
            TargetU::Rz(_) => "rz",
        }
    }

    fn param(self) -> Option<f64> {
        match self {
            TargetU::Rx(t) | TargetU::Rz(t) => Some(t),
            _ => None,
        }
    }

    fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let angle = || params.first().copied().ok_or_else(|| Error::UnsupportedGate(format!("{name} needs an angle")));
        Ok(match name {
            "x" => TargetU::X,
            "v" => TargetU::V,
            "vdg" => TargetU::Vdg,
            "z" => TargetU::Z,
            "sqrtz" => TargetU::SqrtZ,
            "sqrtzdg" => TargetU::SqrtZdg,
            "rx" => TargetU::Rx(angle()?),
            "rz" => TargetU::Rz(angle()?),
            other => return Err(Error::UnsupportedGate(other.into())),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `e^{−iθ(n̂·σ)}`.
    LocalRotation { qubit: usize, axis: [f64; 3], theta: f64 },
    Fixed { gate: FixedGate, qubit: usize },
    CN { control: usize, target: usize },
    /// Multiplies the all-controls-set amplitudes by `e^{iφ}`.
    ControlledPhase { controls: Vec<usize>, phase: f64 },
    KControlled { controls: Vec<usize>, target: usize, u: TargetU },
    /// `m̂·σ`, Hermitian and self-inverse.
    Reflection { qubit: usize, axis: [f64; 3] },
    /// `|0⟩⟨0| ⊗ 𝟙 + |1⟩⟨1| ⊗ (m̂·σ)`.
    ControlledReflection { control: usize, target: usize, axis: [f64; 3] },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::LocalRotation { qubit, .. } | Gate::Fixed { qubit, .. } | Gate::Reflection { qubit, .. } => vec![*qubit],
            Gate::CN { control, target } | Gate::ControlledReflection { control, target, .. } => vec![*control, *target],
            Gate::ControlledPhase { controls, .. } => controls.clone(),
            Gate::KControlled { controls, target, .. } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
        }
    }

    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::LocalRotation { qubit, axis, theta } => Gate::LocalRotation { qubit: *qubit, axis: *axis, theta: -theta },
            Gate::Fixed { gate, qubit } => Gate::Fixed { gate: gate.adjoint(), qubit: *qubit },
            Gate::CN { .. } | Gate::Reflection { .. } | Gate::ControlledReflection { .. } => self.clone(),
            Gate::ControlledPhase { controls, phase } => Gate::ControlledPhase { controls: controls.clone(), phase: -phase },
            Gate::KControlled { controls, target, u } => Gate::KControlled { controls: controls.clone(), target: *target, u: u.adjoint() },
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n });
            }
            if qs[..i].contains(&q) {
                return Err(Error::UnsupportedGate(format!("qubit {q} repeated in one gate")));
            }
        }
        if let Gate::LocalRotation { axis, .. } | Gate::Reflection { axis, .. } | Gate::ControlledReflection { axis, .. } = self {
            let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > AXIS_TOL {
                return Err(Error::BadAxis);
            }
        }
        Ok(())
    }

    /// Number of qubits the gate couples; one for local gates.
    pub fn arity(&self) -> usize {
        self.qubits().len()
    }
}

pub fn reflection_matrix(axis: [f64; 3]) -> Mat2 {
    let [x, y, z] = axis;
    [[cx(z, 0.0), cx(x, -y)], [cx(x, y), cx(-z, 0.0)]]
}

pub fn rotation_matrix(axis: [f64; 3], theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let [x, y, z] = axis;
    [[cx(c, -s * z), cx(-s * y, -s * x)], [cx(s * y, -s * x), cx(c, s * z)]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Circuit { n, gates })
    }

    pub fn empty(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit { n: self.n, gates: self.gates.iter().rev().map(Gate::adjoint).collect() }
    }

    /// Depth counting only multi-qubit gates, scheduled as early as possible.
    pub fn two_qubit_depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            if qs.len() < 2 {
                continue;
            }
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    /// Dense unitary, column `j` being the image of basis state `j`.
    pub fn unitary(&self) -> Result<CMatrix> {
        if self.n > crate::dense::DENSE_LIMIT {
            return Err(Error::DimensionTooLarge { n: self.n, limit: crate::dense::DENSE_LIMIT });
        }
        let dim = 1usize << self.n;
        let mut u = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            let out = simulate(self, &StateVector::basis(self.n, j))?;
            for (i, a) in out.amplitudes().iter().enumerate() {
                u[(i, j)] = *a;
            }
        }
        Ok(u)
    }
}

fn mask(n: usize, qs: &[usize]) -> usize {
    qs.iter().fold(0, |m, &q| m | 1 << bitpos(n, q))
}

/// Applies `m` to `target` on amplitudes whose `ctrl` bits are all set.
pub fn apply_1q(amps: &mut [Complex64], n: usize, target: usize, m: &Mat2, ctrl: usize) {
    let t = 1usize << bitpos(n, target);
    for i in 0..amps.len() {
        if i & t != 0 || i & ctrl != ctrl {
            continue;
        }
        let (a, b) = (amps[i], amps[i | t]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[i | t] = m[1][0] * a + m[1][1] * b;
    }
}

pub fn apply_gate(amps: &mut [Complex64], n: usize, g: &Gate) {
    match g {
        Gate::LocalRotation { qubit, axis, theta } => apply_1q(amps, n, *qubit, &rotation_matrix(*axis, *theta), 0),
        Gate::Fixed { gate, qubit } => apply_1q(amps, n, *qubit, &gate.matrix(), 0),
        Gate::CN { control, target } => apply_1q(amps, n, *target, &FixedGate::X.matrix(), mask(n, &[*control])),
        Gate::ControlledPhase { controls, phase } => {
            let m = mask(n, controls);
            let f = Complex64::from_polar(1.0, *phase);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m == m {
                    *a *= f;
                }
            }
        }
        Gate::KControlled { controls, target, u } => apply_1q(amps, n, *target, &u.matrix(), mask(n, controls)),
        Gate::Reflection { qubit, axis } => apply_1q(amps, n, *qubit, &reflection_matrix(*axis), 0),
        Gate::ControlledReflection { control, target, axis } => {
            apply_1q(amps, n, *target, &reflection_matrix(*axis), mask(n, &[*control]))
        }
    }
}

pub fn simulate(c: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    if c.n > STATE_LIMIT {
        return Err(Error::DimensionTooLarge { n: c.n, limit: STATE_LIMIT });
    }
    if psi0.n() != c.n {
        return Err(Error::DimensionMismatch { expected: c.n, got: psi0.n() });
    }
    let mut amps = psi0.amplitudes().to_vec();
    for g in &c.gates {
        apply_gate(&mut amps, c.n, g);
    }
    Ok(StateVector::from_normalized(c.n, amps))
}

/// `len` gates drawn from `{H, P, CN}`, of which `rotations` randomly placed
/// ones are replaced by local rotations about random axes.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, len: usize, rotations: usize, rng: &mut R) -> Result<Circuit> {
    let rotations = rotations.min(len);
    let mut slots: Vec<usize> = (0..len).collect();
    slots.shuffle(rng);
    slots.truncate(rotations);
    let mut gates = Vec::with_capacity(len);
    for i in 0..len {
        let q = rng.random_range(0..n);
        let g = if slots.contains(&i) {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() - 0.5);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            Gate::LocalRotation { qubit: q, axis: v.map(|x| x / norm), theta: rng.random_range(-PI..PI) }
        } else {
            match rng.random_range(0..3) {
                0 => Gate::Fixed { gate: FixedGate::H, qubit: q },
                1 => Gate::Fixed { gate: FixedGate::P, qubit: q },
                _ if n > 1 => {
                    let t = (q + rng.random_range(1..n)) % n;
                    Gate::CN { control: q, target: t }
                }
                _ => Gate::Fixed { gate: FixedGate::H, qubit: q },
            }
        };
        gates.push(g);
    }
    Circuit::new(n, gates)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub n: usize,
    pub gates: Vec<GateRecord>,
}

impl From<Circuit> for CircuitRecord {
    fn from(c: Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match g {
                Gate::LocalRotation { qubit, axis, theta } => {
                    GateRecord { kind: "rot".into(), qubits: vec![*qubit], params: vec![axis[0], axis[1], axis[2], *theta] }
                }
                Gate::Fixed { gate, qubit } => GateRecord { kind: gate.name().into(), qubits: vec![*qubit], params: vec![] },
                Gate::CN { control, target } => GateRecord { kind: "cn".into(), qubits: vec![*control, *target], params: vec![] },
                Gate::ControlledPhase { controls, phase } => {
                    GateRecord { kind: "cphase".into(), qubits: controls.clone(), params: vec![*phase] }
                }
                Gate::KControlled { u, .. } => {
                    GateRecord { kind: format!("c-{}", u.name()), qubits: g.qubits(), params: u.param().into_iter().collect() }
                }
                Gate::Reflection { axis, .. } => GateRecord { kind: "refl".into(), qubits: g.qubits(), params: axis.to_vec() },
                Gate::ControlledReflection { axis, .. } => {
                    GateRecord { kind: "crefl".into(), qubits: g.qubits(), params: axis.to_vec() }
                }
            })
            .collect();
        CircuitRecord { n: c.n, gates }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        let mut gates = Vec::with_capacity(r.gates.len());
        for g in r.gates {
            let bad = || Error::UnsupportedGate(format!("{} on {:?} with {:?}", g.kind, g.qubits, g.params));
            let single = || if g.qubits.len() == 1 { Ok(g.qubits[0]) } else { Err(bad()) };
            let gate = match g.kind.as_str() {
                "rot" => {
                    let [x, y, z, theta] = <[f64; 4]>::try_from(g.params.as_slice()).map_err(|_| bad())?;
                    Gate::LocalRotation { qubit: single()?, axis: [x, y, z], theta }
                }
                "h" | "p" | "pdg" | "x" | "y" | "z" => {
                    let gate = match g.kind.as_str() {
                        "h" => FixedGate::H,
                        "p" => FixedGate::P,
                        "pdg" => FixedGate::Pdg,
                        "x" => FixedGate::X,
                        "y" => FixedGate::Y,
                        _ => FixedGate::Z,
                    };
                    Gate::Fixed { gate, qubit: single()? }
                }
                "cn" => match g.qubits.as_slice() {
                    [c, t] => Gate::CN { control: *c, target: *t },
                    _ => return Err(bad()),
                },
                "refl" => {
                    let axis = <[f64; 3]>::try_from(g.params.as_slice()).map_err(|_| bad())?;
                    Gate::Reflection { qubit: single()?, axis }
                }
                "crefl" => match (g.qubits.as_slice(), <[f64; 3]>::try_from(g.params.as_slice())) {
                    ([c, t], Ok(axis)) => Gate::ControlledReflection { control: *c, target: *t, axis },
                    _ => return Err(bad()),
                },
                "cphase" => Gate::ControlledPhase { controls: g.qubits.clone(), phase: *g.params.first().ok_or_else(bad)? },
                k if k.starts_with("c-") => {
                    let (target, controls) = g.qubits.split_last().ok_or_else(bad)?;
                    Gate::KControlled { controls: controls.to_vec(), target: *target, u: TargetU::parse(&k[2..], &g.params)? }
                }
                _ => return Err(bad()),
            };
            gates.push(gate);
        }
        Circuit::new(r.n, gates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_makes_plus() {
        let c = Circuit::new(1, vec![Gate::Fixed { gate: FixedGate::H, qubit: 0 }]).unwrap();
        let out = simulate(&c, &StateVector::zero(1)).unwrap();
        assert!(out.fidelity(&StateVector::plus(1)) > 1.0 - 1e-12);
    }

    #[test]
    fn cnot_flips_target() {
        let c = Circuit::new(2, vec![Gate::CN { control: 0, target: 1 }]).unwrap();
        let out = simulate(&c, &StateVector::basis(2, 0b10)).unwrap();
        assert!(close(out.amplitudes()[0b11], cx(1.0, 0.0)));
    }

    #[test]
    fn z_rotation_phase() {
        let theta = 0.37;
        let c = Circuit::new(1, vec![Gate::LocalRotation { qubit: 0, axis: [0.0, 0.0, 1.0], theta }]).unwrap();
        let out = simulate(&c, &StateVector::zero(1)).unwrap();
        assert!(close(out.amplitudes()[0], Complex64::from_polar(1.0, -theta)));
    }

    #[test]
    fn axis_must_be_unit() {
        let g = Gate::LocalRotation { qubit: 0, axis: [1.0, 1.0, 0.0], theta: 0.1 };
        assert_eq!(Circuit::new(1, vec![g]), Err(Error::BadAxis));
    }

    #[test]
    fn v_squares_to_x() {
        let v = TargetU::V.matrix();
        let x = FixedGate::X.matrix();
        for i in 0..2 {
            for j in 0..2 {
                let s = v[i][0] * v[0][j] + v[i][1] * v[1][j];
                assert!(close(s, x[i][j]));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c = Circuit::new(
            3,
            vec![
                Gate::LocalRotation { qubit: 2, axis: [0.0, 1.0, 0.0], theta: 0.5 },
                Gate::Fixed { gate: FixedGate::P, qubit: 0 },
                Gate::CN { control: 1, target: 0 },
                Gate::ControlledPhase { controls: vec![0, 1, 2], phase: 1.25 },
                Gate::KControlled { controls: vec![0, 2], target: 1, u: TargetU::Rx(0.3) },
                Gate::Reflection { qubit: 1, axis: [0.6, 0.0, 0.8] },
                Gate::ControlledReflection { control: 2, target: 0, axis: [0.0, 1.0, 0.0] },
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Circuit>(&text).unwrap(), c);
    }

    #[test]
    fn adjoint_inverts() {
        let c = Circuit::new(
            2,
            vec![
                Gate::Fixed { gate: FixedGate::P, qubit: 1 },
                Gate::KControlled { controls: vec![1], target: 0, u: TargetU::V },
                Gate::LocalRotation { qubit: 0, axis: [0.6, 0.0, 0.8], theta: 0.9 },
            ],
        )
        .unwrap();
        let mut both = c.clone();
        both.extend(&c.adjoint()).unwrap();
        let u = both.unitary().unwrap();
        assert!((u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }
}
