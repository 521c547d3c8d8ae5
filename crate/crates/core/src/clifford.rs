//! Clifford conjugation of Pauli operators by tableau rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{bitpos, OperatorSum, PauliString, Phase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliffordGate {
    H(usize),
    P(usize),
    CN(usize, usize),
}

impl CliffordGate {
    fn max_index(&self) -> usize {
        match *self {
            CliffordGate::H(q) | CliffordGate::P(q) => q,
            CliffordGate::CN(c, t) => c.max(t),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(gates: Vec<CliffordGate>) -> Self {
        CliffordCircuit { gates }
    }
}

/// `G P G†` for a single gate.
pub fn conjugate_string(p: &PauliString, g: CliffordGate) -> PauliString {
    let n = p.n();
    let (mut x, mut z) = (p.x_mask(), p.z_mask());
    let flip = match g {
        CliffordGate::H(q) => {
            let b = bitpos(n, q);
            let (xq, zq) = ((x >> b) & 1, (z >> b) & 1);
            x = (x & !(1 << b)) | (zq << b);
            z = (z & !(1 << b)) | (xq << b);
            xq & zq == 1
        }
        CliffordGate::P(q) => {
            let b = bitpos(n, q);
            let (xq, zq) = ((x >> b) & 1, (z >> b) & 1);
            z ^= xq << b;
            xq & zq == 1
        }
        CliffordGate::CN(c, t) => {
            let (bc, bt) = (bitpos(n, c), bitpos(n, t));
            let (xc, zc) = ((x >> bc) & 1, (z >> bc) & 1);
            let (xt, zt) = ((x >> bt) & 1, (z >> bt) & 1);
            x ^= xc << bt;
            z ^= zt << bc;
            xc & zt & (xt ^ zc ^ 1) == 1
        }
    };
    let phase = if flip { p.phase() * Phase::MINUS_ONE } else { p.phase() };
    PauliString::from_masks(n, x, z, phase)
}

/// `C P C†` where `C` applies `gates[0]` first.
pub fn conjugate_by(p: &PauliString, c: &CliffordCircuit) -> PauliString {
    c.gates.iter().fold(*p, |acc, &g| conjugate_string(&acc, g))
}

pub fn clifford_conjugate(op: &OperatorSum, c: &CliffordCircuit) -> Result<OperatorSum> {
    let n = op.n();
    if let Some(g) = c.gates.iter().find(|g| g.max_index() >= n) {
        return Err(Error::IndexOutOfRange { index: g.max_index(), n });
    }
    if let Some(CliffordGate::CN(a, b)) = c.gates.iter().find(|g| matches!(g, CliffordGate::CN(a, b) if a == b)) {
        return Err(Error::IndexOutOfRange { index: (*a).max(*b), n });
    }
    let mut out = OperatorSum::zero(n);
    for (w, p) in op.terms() {
        out.add_term(w, &conjugate_by(&p, c));
    }
    Ok(out)
}
