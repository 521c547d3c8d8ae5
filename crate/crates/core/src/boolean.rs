//! Pseudo-Boolean polynomials, Boolean formulas and CNF instances, and their
//! embedding as diagonal Pauli operators.
//!
//! Variable `i` is qubit `i`; a basis index holds `x_i` at bit `n - 1 - i`.
//! The embedding maps `x_i ↦ |1⟩⟨1|_i = ½(1 − Z_i)` and spins are
//! `s_i = 1 − 2x_i`, the eigenvalue of `Z_i`.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{bitpos, OperatorSum, PauliString, Phase};

/// Largest variable count handled by truth-table routines.
pub const TABLE_LIMIT: usize = 20;

fn vars_to_mask(n: usize, vars: &[usize]) -> u64 {
    vars.iter().fold(0, |m, &v| m | 1 << bitpos(n, v))
}

fn mask_to_vars(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|&v| mask >> bitpos(n, v) & 1 == 1).collect()
}

/// Value of `x_i` in a basis index.
#[inline]
pub fn bit_of(index: usize, n: usize, i: usize) -> bool {
    index >> bitpos(n, i) & 1 == 1
}

/// Basis index of an assignment `x_0 … x_{n-1}`.
pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// Multilinear polynomial `Σ_S a_S ∏_{i∈S} x_i` over 0/1 variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoBooleanPoly {
    pub n: usize,
    #[serde(with = "subset_map")]
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl PseudoBooleanPoly {
    pub fn zero(n: usize) -> Self {
        PseudoBooleanPoly { n, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = PseudoBooleanPoly::zero(n);
        p.add_monomial(&[], c);
        p
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut p = PseudoBooleanPoly::zero(n);
        p.add_monomial(&[i], 1.0);
        p
    }

    /// Adds `c ∏ x_i`; repeated indices collapse since `x² = x`.
    pub fn add_monomial(&mut self, vars: &[usize], c: f64) {
        let mut key: Vec<usize> = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        assert!(key.iter().all(|&v| v < self.n), "variable index out of range");
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(key.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of nonzero coefficients of each degree.
    pub fn grading(&self) -> Vec<usize> {
        let mut g = vec![0; self.n + 1];
        for k in self.coeffs.keys() {
            g[k.len()] += 1;
        }
        g
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        assert_eq!(bits.len(), self.n);
        self.coeffs.iter().filter(|(k, _)| k.iter().all(|&v| bits[v])).map(|(_, c)| c).sum()
    }

    pub fn evaluate_index(&self, index: usize) -> f64 {
        self.coeffs
            .iter()
            .filter(|(k, _)| k.iter().all(|&v| bit_of(index, self.n, v)))
            .map(|(_, c)| c)
            .sum()
    }

    pub fn plus(&self, other: &PseudoBooleanPoly) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (k, c) in other.monomials() {
            out.add_monomial(k, c);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = PseudoBooleanPoly::zero(self.n);
        for (k, c) in self.monomials() {
            out.add_monomial(k, c * s);
        }
        out
    }

    /// Multilinear product.
    pub fn times(&self, other: &PseudoBooleanPoly) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = PseudoBooleanPoly::zero(self.n);
        for (a, ca) in self.monomials() {
            for (b, cb) in other.monomials() {
                let mut k = a.to_vec();
                k.extend_from_slice(b);
                out.add_monomial(&k, ca * cb);
            }
        }
        out
    }

    /// `1 − f`.
    pub fn complement(&self) -> Self {
        PseudoBooleanPoly::constant(self.n, 1.0).plus(&self.scaled(-1.0))
    }
}

mod subset_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        vars: Vec<usize>,
        c: f64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<usize>, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(k, &c)| Entry { vars: k.clone(), c }).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Vec<usize>, f64>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        let mut m = BTreeMap::new();
        for mut e in v {
            e.vars.sort_unstable();
            e.vars.dedup();
            *m.entry(e.vars).or_insert(0.0) += e.c;
        }
        m.retain(|_, c| *c != 0.0);
        Ok(m)
    }
}

/// Unique multilinear polynomial through a complete truth table indexed by
/// basis index.
pub fn canonical_expand(n: usize, table: &[f64]) -> Result<PseudoBooleanPoly> {
    if n > TABLE_LIMIT {
        return Err(Error::TooManyVariables { n, limit: TABLE_LIMIT });
    }
    let dim = 1usize << n;
    if table.len() != dim {
        return Err(Error::IncompleteTable { expected: dim, got: table.len() });
    }
    // Möbius inversion over the subset lattice.
    let mut a = table.to_vec();
    for b in 0..n {
        let bit = 1usize << b;
        for s in 0..dim {
            if s & bit != 0 {
                a[s] -= a[s ^ bit];
            }
        }
    }
    let mut p = PseudoBooleanPoly::zero(n);
    for (mask, &c) in a.iter().enumerate() {
        if c != 0.0 {
            p.add_monomial(&mask_to_vars(n, mask as u64), c);
        }
    }
    Ok(p)
}

/// Diagonal operator with `⟨x|H|x⟩ = f(x)`.
pub fn pseudo_to_operator(f: &PseudoBooleanPoly) -> OperatorSum {
    let n = f.n;
    let mut op = OperatorSum::zero(n);
    for (vars, c) in f.monomials() {
        // ∏ ½(1 − Z_i) = 2^{-k} Σ_{T⊆S} (−1)^{|T|} Z_T
        let k = vars.len();
        let w = c / (1u64 << k) as f64;
        for sub in 0..1u64 << k {
            let t: Vec<usize> = (0..k).filter(|&j| sub >> j & 1 == 1).map(|j| vars[j]).collect();
            let sign = if t.len() % 2 == 0 { 1.0 } else { -1.0 };
            op.add_term(w * sign, &PauliString::from_masks(n, 0, vars_to_mask(n, &t), Phase::ONE));
        }
    }
    op.pruned(0.0)
}

/// Polynomial over spins `s_i ∈ {±1}` with `s_i = 1 − 2x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinPoly {
    pub n: usize,
    #[serde(with = "subset_map")]
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl SpinPoly {
    pub fn zero(n: usize) -> Self {
        SpinPoly { n, coeffs: BTreeMap::new() }
    }

    /// Adds `c ∏ s_i`; repeated indices cancel since `s² = 1`.
    pub fn add_monomial(&mut self, vars: &[usize], c: f64) {
        let mut key: Vec<usize> = Vec::new();
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        for v in sorted {
            assert!(v < self.n, "spin index out of range");
            if key.last() == Some(&v) {
                key.pop();
            } else {
                key.push(v);
            }
        }
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(key.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.n);
        self.coeffs
            .iter()
            .map(|(k, c)| c * k.iter().map(|&v| spins[v] as f64).product::<f64>())
            .sum()
    }

    pub fn evaluate_index(&self, index: usize) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let flips = k.iter().filter(|&&v| bit_of(index, self.n, v)).count();
                if flips % 2 == 0 {
                    *c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// `Σ c ∏ Z_i`.
    pub fn to_operator(&self) -> OperatorSum {
        let mut op = OperatorSum::zero(self.n);
        for (k, c) in self.monomials() {
            op.add_term(c, &PauliString::from_masks(self.n, 0, vars_to_mask(self.n, k), Phase::ONE));
        }
        op
    }
}

/// Rewrites in spins via `x_i = ½(1 − s_i)`.
pub fn to_spin(f: &PseudoBooleanPoly) -> SpinPoly {
    let mut s = SpinPoly::zero(f.n);
    for (vars, c) in f.monomials() {
        let k = vars.len();
        let w = c / (1u64 << k) as f64;
        for sub in 0..1u64 << k {
            let t: Vec<usize> = (0..k).filter(|&j| sub >> j & 1 == 1).map(|j| vars[j]).collect();
            let sign = if t.len() % 2 == 0 { 1.0 } else { -1.0 };
            s.add_monomial(&t, w * sign);
        }
    }
    s
}

/// Inverse of [`to_spin`], via `s_i = 1 − 2x_i`.
pub fn from_spin(s: &SpinPoly) -> PseudoBooleanPoly {
    let mut f = PseudoBooleanPoly::zero(s.n);
    for (vars, c) in s.monomials() {
        let k = vars.len();
        for sub in 0..1u64 << k {
            let t: Vec<usize> = (0..k).filter(|&j| sub >> j & 1 == 1).map(|j| vars[j]).collect();
            f.add_monomial(&t, c * (-2.0f64).powi(t.len() as i32));
        }
    }
    f
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    Var(usize),
    Const(bool),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Xor(Vec<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        match self {
            Expr::Var(i) => bits[*i],
            Expr::Const(b) => *b,
            Expr::Not(e) => !e.eval(bits),
            Expr::And(es) => es.iter().all(|e| e.eval(bits)),
            Expr::Or(es) => es.iter().any(|e| e.eval(bits)),
            Expr::Xor(es) => es.iter().filter(|e| e.eval(bits)).count() % 2 == 1,
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Not(e) => e.max_var(),
            Expr::And(es) | Expr::Or(es) | Expr::Xor(es) => es.iter().filter_map(Expr::max_var).max(),
        }
    }

    fn find_xor(&self) -> bool {
        match self {
            Expr::Xor(_) => true,
            Expr::Var(_) | Expr::Const(_) => false,
            Expr::Not(e) => e.find_xor(),
            Expr::And(es) | Expr::Or(es) => es.iter().any(Expr::find_xor),
        }
    }

    /// Negation normal form: negations only on variables.
    pub fn nnf(&self) -> Expr {
        match self {
            Expr::Not(inner) => match inner.as_ref() {
                Expr::Var(i) => Expr::not(Expr::Var(*i)),
                Expr::Const(b) => Expr::Const(!b),
                Expr::Not(e) => e.nnf(),
                Expr::And(es) => Expr::Or(es.iter().map(|e| Expr::not(e.clone()).nnf()).collect()),
                Expr::Or(es) => Expr::And(es.iter().map(|e| Expr::not(e.clone()).nnf()).collect()),
                Expr::Xor(es) => Expr::not(Expr::Xor(es.clone())),
            },
            Expr::And(es) => Expr::And(es.iter().map(Expr::nnf).collect()),
            Expr::Or(es) => Expr::Or(es.iter().map(Expr::nnf).collect()),
            e => e.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanFormula {
    pub n: usize,
    pub expr: Expr,
}

impl BooleanFormula {
    pub fn new(n: usize, expr: Expr) -> Result<Self> {
        let f = BooleanFormula { n, expr };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        match self.expr.max_var() {
            Some(v) if v >= self.n => Err(Error::IndexOutOfRange { index: v, n: self.n }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.expr.eval(bits)
    }

    pub fn eval_index(&self, index: usize) -> bool {
        let bits: Vec<bool> = (0..self.n).map(|i| bit_of(index, self.n, i)).collect();
        self.expr.eval(&bits)
    }
}

/// Spectrum map `∧ ↦ ·`, `∨ ↦ +`, `x ↦ x`, `¬x ↦ 1 − x` applied to the
/// negation normal form. Disjunctions count satisfied disjuncts.
pub fn formula_poly(g: &BooleanFormula) -> Result<PseudoBooleanPoly> {
    g.validate()?;
    if g.expr.find_xor() {
        return Err(Error::UnsupportedNode("xor".into()));
    }
    fn go(n: usize, e: &Expr) -> PseudoBooleanPoly {
        match e {
            Expr::Var(i) => PseudoBooleanPoly::var(n, *i),
            Expr::Const(b) => PseudoBooleanPoly::constant(n, if *b { 1.0 } else { 0.0 }),
            Expr::Not(inner) => go(n, inner).complement(),
            Expr::And(es) => es.iter().fold(PseudoBooleanPoly::constant(n, 1.0), |acc, e| acc.times(&go(n, e))),
            Expr::Or(es) => es.iter().fold(PseudoBooleanPoly::zero(n), |acc, e| acc.plus(&go(n, e))),
            Expr::Xor(_) => unreachable!("rejected above"),
        }
    }
    Ok(go(g.n, &g.expr.nnf()))
}

pub fn embed_formula(g: &BooleanFormula) -> Result<OperatorSum> {
    Ok(pseudo_to_operator(&formula_poly(g)?))
}

/// Non-negative diagonal penalty, zero exactly on satisfying strings and 1
/// on every other string.
pub fn kernel_embed(g: &BooleanFormula) -> Result<OperatorSum> {
    g.validate()?;
    if g.expr.find_xor() {
        return Err(Error::UnsupportedNode("xor".into()));
    }
    if g.n > TABLE_LIMIT {
        return Err(Error::TooManyVariables { n: g.n, limit: TABLE_LIMIT });
    }
    let table: Vec<f64> = (0..1usize << g.n).map(|x| if g.eval_index(x) { 0.0 } else { 1.0 }).collect();
    Ok(pseudo_to_operator(&canonical_expand(g.n, &table)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub n: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfInstance {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (ci, cl) in clauses.iter().enumerate() {
            for (j, l) in cl.iter().enumerate() {
                if l.var >= n {
                    return Err(Error::IndexOutOfRange { index: l.var, n });
                }
                if cl[..j].iter().any(|o| o.var == l.var) {
                    return Err(Error::RepeatedVariable { line: ci + 1, var: l.var });
                }
            }
        }
        Ok(CnfInstance { n, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Number of clauses violated by the basis index.
    pub fn violations(&self, index: usize) -> usize {
        self.clauses
            .iter()
            .filter(|cl| cl.iter().all(|l| bit_of(index, self.n, l.var) != l.positive))
            .count()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.m());
        for cl in &self.clauses {
            for l in cl {
                s.push_str(&format!("{} ", l.dimacs()));
            }
            s.push_str("0\n");
        }
        s
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::MalformedHeader { line: line_no });
            }
            let n = parts[2].parse().map_err(|_| Error::MalformedHeader { line: line_no })?;
            let m = parts[3].parse().map_err(|_| Error::MalformedHeader { line: line_no })?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::MalformedHeader { line: line_no });
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad literal `{tok}`") })?;
            if v == 0 {
                clauses.push((std::mem::take(&mut current), current_line));
                continue;
            }
            if v.unsigned_abs() as usize > n {
                return Err(Error::VariableOutOfRange { line: line_no, var: v });
            }
            if current.is_empty() {
                current_line = line_no;
            }
            let lit = Literal::new(v.unsigned_abs() as usize - 1, v > 0);
            if current.iter().any(|l| l.var == lit.var) {
                return Err(Error::RepeatedVariable { line: line_no, var: lit.var });
            }
            current.push(lit);
        }
    }
    let Some((n, _)) = header else {
        return Err(Error::EmptyInstance);
    };
    if !current.is_empty() {
        return Err(Error::UnterminatedClause);
    }
    Ok(CnfInstance { n, clauses: clauses.into_iter().map(|(c, _)| c).collect() })
}

/// Uniform random k-SAT: each clause draws `k` distinct variables and
/// independent polarities.
pub fn random_ksat<R: Rng + ?Sized>(n: usize, m: usize, k: usize, rng: &mut R) -> CnfInstance {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let clauses = (0..m)
        .map(|_| {
            let mut vars = sample(rng, n, k).into_vec();
            vars.sort_unstable();
            vars.into_iter().map(|v| Literal::new(v, rng.random::<bool>())).collect()
        })
        .collect();
    CnfInstance { n, clauses }
}

/// Diagonal operator counting violated clauses; each clause is a rank-1
/// projector onto its unique falsifying assignment.
pub fn cnf_to_hamiltonian(inst: &CnfInstance) -> OperatorSum {
    let n = inst.n;
    let mut op = OperatorSum::zero(n);
    for cl in &inst.clauses {
        let k = cl.len();
        let w = 1.0 / (1u64 << k) as f64;
        for sub in 0..1u64 << k {
            let mut mask = 0u64;
            let mut sign = 1.0;
            for (j, l) in cl.iter().enumerate() {
                if sub >> j & 1 == 1 {
                    mask |= 1 << bitpos(n, l.var);
                    // falsified by x = 0 for a positive literal: P₀ = ½(1 + Z)
                    if !l.positive {
                        sign = -sign;
                    }
                }
            }
            op.add_term(w * sign, &PauliString::from_masks(n, 0, mask, Phase::ONE));
        }
    }
    op
}

/// `(Σ nᵢ sᵢ)²`, zero iff a balanced split exists.
pub fn number_partition(values: &[u64]) -> SpinPoly {
    assert!(!values.is_empty(), "need at least one value");
    let n = values.len();
    let mut s = SpinPoly::zero(n);
    s.add_monomial(&[], values.iter().map(|&v| (v * v) as f64).sum());
    for i in 0..n {
        for j in i + 1..n {
            s.add_monomial(&[i, j], 2.0 * (values[i] * values[j]) as f64);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliSum;

    #[test]
    fn bell_indicator_expansion() {
        let table = [1.0, 0.0, 0.0, 1.0];
        let p = canonical_expand(2, &table).unwrap();
        assert_eq!(p.coeff(&[]), 1.0);
        assert_eq!(p.coeff(&[0]), -1.0);
        assert_eq!(p.coeff(&[1]), -1.0);
        assert_eq!(p.coeff(&[0, 1]), 2.0);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn graph_state_amplitudes() {
        let table: Vec<f64> = (0..8)
            .map(|i| {
                let (x, y, z) = (bit_of(i, 3, 0) as u8, bit_of(i, 3, 1) as u8, bit_of(i, 3, 2) as u8);
                if (x * y + y * z) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let p = canonical_expand(3, &table).unwrap();
        assert_eq!(p.coeff(&[]), 1.0);
        assert_eq!(p.coeff(&[0, 1]), -2.0);
        assert_eq!(p.coeff(&[1, 2]), -2.0);
        assert_eq!(p.coeff(&[0, 1, 2]), 4.0);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn zero_table_and_incomplete_table() {
        assert!(canonical_expand(3, &[0.0; 8]).unwrap().is_empty());
        assert!(matches!(canonical_expand(3, &[0.0; 7]), Err(Error::IncompleteTable { expected: 8, got: 7 })));
    }

    #[test]
    fn single_variable_is_p1() {
        let op = pseudo_to_operator(&PseudoBooleanPoly::var(1, 0));
        assert_eq!(op, OperatorSum::p1(1, 0));
        assert!(pseudo_to_operator(&PseudoBooleanPoly::zero(2)).is_empty());
    }

    #[test]
    fn bell_polynomial_operator() {
        let mut f = PseudoBooleanPoly::constant(2, 1.0);
        f.add_monomial(&[0], -1.0);
        f.add_monomial(&[1], -1.0);
        f.add_monomial(&[0, 1], 2.0);
        let op = pseudo_to_operator(&f);
        let p10 = OperatorSum::p1(2, 0);
        let p11 = OperatorSum::p1(2, 1);
        let expect = OperatorSum::identity(2, 1.0)
            .minus(&p10)
            .minus(&p11)
            .plus(&p10.product(&p11).hermitian(1e-15).unwrap().scaled(2.0));
        assert_eq!(op.diagonal(), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(op.pruned(1e-15), expect.pruned(1e-15));
    }

    #[test]
    fn and_formula_spectrum() {
        let g = BooleanFormula::new(2, Expr::And(vec![Expr::var(0), Expr::var(1)])).unwrap();
        let d = embed_formula(&g).unwrap().diagonal();
        assert_eq!(d, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn negated_variable_is_p0() {
        let g = BooleanFormula::new(1, Expr::not(Expr::var(0))).unwrap();
        assert_eq!(embed_formula(&g).unwrap(), OperatorSum::p0(1, 0));
    }

    #[test]
    fn or_counts_satisfied_disjuncts() {
        let g = BooleanFormula::new(2, Expr::Or(vec![Expr::var(0), Expr::var(1)])).unwrap();
        assert_eq!(embed_formula(&g).unwrap().diagonal(), vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn clause_kernel_penalty_is_rank_one() {
        // x0 ∨ ¬x1 ∨ x2 is violated only by 010
        let g = BooleanFormula::new(3, Expr::Or(vec![Expr::var(0), Expr::not(Expr::var(1)), Expr::var(2)])).unwrap();
        let op = kernel_embed(&g).unwrap();
        let expect = OperatorSum::p0(3, 0)
            .product(&OperatorSum::p1(3, 1))
            .product(&PauliSum::from(&OperatorSum::p0(3, 2)))
            .hermitian(1e-15)
            .unwrap();
        assert_eq!(op.pruned(1e-15), expect.pruned(1e-15));
    }

    #[test]
    fn kernel_embed_examples() {
        let x = BooleanFormula::new(1, Expr::var(0)).unwrap();
        assert_eq!(kernel_embed(&x).unwrap(), OperatorSum::p0(1, 0));
        let and = BooleanFormula::new(2, Expr::And(vec![Expr::var(0), Expr::var(1)])).unwrap();
        assert_eq!(kernel_embed(&and).unwrap().diagonal(), vec![1.0, 1.0, 1.0, 0.0]);
        let taut = BooleanFormula::new(1, Expr::Or(vec![Expr::var(0), Expr::not(Expr::var(0))])).unwrap();
        assert!(kernel_embed(&taut).unwrap().is_empty());
    }

    #[test]
    fn xor_nodes_rejected() {
        let g = BooleanFormula::new(2, Expr::Xor(vec![Expr::var(0), Expr::var(1)])).unwrap();
        assert!(matches!(embed_formula(&g), Err(Error::UnsupportedNode(_))));
        assert!(matches!(kernel_embed(&g), Err(Error::UnsupportedNode(_))));
    }

    #[test]
    fn and_gadget_spin_form() {
        // Δ(x3 + x1x2 − 2x1x2x3) with Δ = 4 → 2 − s3 − s1s3 − s2s3 + s1s2s3
        let mut f = PseudoBooleanPoly::zero(3);
        f.add_monomial(&[2], 4.0);
        f.add_monomial(&[0, 1], 4.0);
        f.add_monomial(&[0, 1, 2], -8.0);
        let s = to_spin(&f);
        assert_eq!(s.coeff(&[]), 2.0);
        assert_eq!(s.coeff(&[2]), -1.0);
        assert_eq!(s.coeff(&[0, 2]), -1.0);
        assert_eq!(s.coeff(&[1, 2]), -1.0);
        assert_eq!(s.coeff(&[0, 1, 2]), 1.0);
        assert_eq!(s.len(), 5);
        assert_eq!(from_spin(&s), f);
    }

    #[test]
    fn single_variable_spin() {
        let s = to_spin(&PseudoBooleanPoly::var(1, 0));
        assert_eq!(s.coeff(&[]), 0.5);
        assert_eq!(s.coeff(&[0]), -0.5);
    }

    #[test]
    fn dimacs_examples() {
        let inst = parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(inst.n, 2);
        assert_eq!(inst.clauses, vec![vec![Literal::new(0, true), Literal::new(1, false)]]);
        assert_eq!(parse_dimacs("c only\nc comments\n"), Err(Error::EmptyInstance));
        assert!(matches!(parse_dimacs("p cnf 2 1\n3 0\n"), Err(Error::VariableOutOfRange { line: 2, var: 3 })));
        assert_eq!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(Error::UnterminatedClause));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(Error::MalformedHeader { line: 1 })));
        assert!(matches!(parse_dimacs("p dnf 2 1\n"), Err(Error::MalformedHeader { line: 1 })));
        let rt = parse_dimacs(&inst.to_dimacs()).unwrap();
        assert_eq!(rt, inst);
    }

    #[test]
    fn dimacs_clauses_may_span_lines() {
        let inst = parse_dimacs("c x\np cnf 3 2\n1 -2\n3 0 -1 2 3 0\n%\n0\n").unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.clauses[0].len(), 3);
    }

    #[test]
    fn cnf_hamiltonian_counts_violations() {
        let inst = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 -2 0\n").unwrap();
        let d = cnf_to_hamiltonian(&inst).diagonal();
        for (x, v) in d.iter().enumerate() {
            assert!((v - inst.violations(x) as f64).abs() < 1e-12);
        }
        assert!(cnf_to_hamiltonian(&CnfInstance::new(3, vec![]).unwrap()).is_empty());
    }

    #[test]
    fn number_partition_examples() {
        let min = |vals: &[u64]| {
            let s = number_partition(vals);
            (0..1usize << vals.len()).map(|x| s.evaluate_index(x)).fold(f64::INFINITY, f64::min)
        };
        assert_eq!(min(&[1, 1]), 0.0);
        assert_eq!(min(&[1, 2, 3]), 0.0);
        assert_eq!(min(&[1, 2]), 1.0);
        let s = number_partition(&[1, 1]);
        assert_eq!(s.evaluate(&[1, -1]), 0.0);
    }

    #[test]
    fn poly_json_round_trip() {
        let mut f = PseudoBooleanPoly::zero(3);
        f.add_monomial(&[0, 2], 1.5);
        f.add_monomial(&[], -0.25);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"coeffs\""));
        assert_eq!(serde_json::from_str::<PseudoBooleanPoly>(&s).unwrap(), f);
    }
}
