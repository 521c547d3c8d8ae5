//! Exact quadratic penalties over 0/1 variables: closed-form gadgets, the
//! XOR chain for k-body parity, and LP-based penalty synthesis.
//!
//! Assignments are bit masks with bit `i` holding variable `i`; logical
//! variables come first, then slack. Bitstrings in JSON are written with
//! character `i` equal to `x_i`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boolean::{pseudo_to_operator, PseudoBooleanPoly};
use crate::error::{Error, Result};
use crate::lp::{check_farkas, rat, solve_feasibility, Constraint, LpOutcome, Sense};
use crate::pauli::OperatorSum;

/// Largest `n_logical + n_slack` accepted by [`synthesize_penalty`].
pub const SYNTH_LIMIT: usize = 5;
/// Largest variable count for exhaustive slack minimization.
pub const ENUM_LIMIT: usize = 24;

mod rational_str {
    use super::*;
    use std::str::FromStr;

    pub fn ser<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        BigRational::from_str(s.trim()).map_err(serde::de::Error::custom)
    }

    pub fn ser_vec<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|r| r.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn de_vec<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| BigRational::from_str(s.trim()).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadTerm {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "rational_str::ser", deserialize_with = "rational_str::de")]
    pub c: BigRational,
}

/// `k₀ + Σ l_i x_i + Σ_{i<j} q_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPenalty {
    pub n_logical: usize,
    pub n_slack: usize,
    #[serde(serialize_with = "rational_str::ser", deserialize_with = "rational_str::de")]
    pub k0: BigRational,
    #[serde(serialize_with = "rational_str::ser_vec", deserialize_with = "rational_str::de_vec")]
    pub linear: Vec<BigRational>,
    #[serde(with = "quad_map")]
    pub quadratic: BTreeMap<(usize, usize), BigRational>,
    #[serde(serialize_with = "rational_str::ser", deserialize_with = "rational_str::de")]
    pub delta: BigRational,
}

mod quad_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(usize, usize), BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        m.iter().map(|(&(i, j), c)| QuadTerm { i, j, c: c.clone() }).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<(usize, usize), BigRational>, D::Error> {
        let mut m: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for t in Vec::<QuadTerm>::deserialize(d)? {
            if t.i == t.j {
                return Err(serde::de::Error::custom("quadratic term on a single variable"));
            }
            *m.entry((t.i.min(t.j), t.i.max(t.j))).or_insert_with(BigRational::zero) += t.c;
        }
        m.retain(|_, c| !c.is_zero());
        Ok(m)
    }
}

fn bits_of(mask: u64, n: usize) -> String {
    (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Option<u64> {
    s.chars().enumerate().try_fold(0u64, |m, (i, ch)| match ch {
        '0' => Some(m),
        '1' => Some(m | 1 << i),
        _ => None,
    })
}

impl QuadraticPenalty {
    pub fn zero(n_logical: usize, n_slack: usize) -> Self {
        QuadraticPenalty {
            n_logical,
            n_slack,
            k0: BigRational::zero(),
            linear: vec![BigRational::zero(); n_logical + n_slack],
            quadratic: BTreeMap::new(),
            delta: rat(1),
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_logical + self.n_slack
    }

    pub fn add_linear(&mut self, i: usize, c: i64) {
        self.linear[i] += rat(c);
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: i64) {
        assert_ne!(i, j);
        let key = (i.min(j), i.max(j));
        let e = self.quadratic.entry(key).or_insert_with(BigRational::zero);
        *e += rat(c);
        if e.is_zero() {
            self.quadratic.remove(&key);
        }
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        let mut out = self.clone();
        out.k0 *= s;
        out.linear.iter_mut().for_each(|v| *v *= s);
        out.quadratic.values_mut().for_each(|v| *v *= s);
        out
    }

    /// Exact energy of a full assignment.
    pub fn energy(&self, assignment: u64) -> BigRational {
        let mut e = self.k0.clone();
        for (i, l) in self.linear.iter().enumerate() {
            if assignment >> i & 1 == 1 {
                e += l;
            }
        }
        for (&(i, j), q) in &self.quadratic {
            if assignment >> i & 1 == 1 && assignment >> j & 1 == 1 {
                e += q;
            }
        }
        e
    }

    /// Minimum energy over slack with the argmin slack mask (lowest on ties).
    pub fn min_over_slack(&self, logical: u64) -> (BigRational, u64) {
        (0..1u64 << self.n_slack)
            .map(|s| (self.energy(logical | s << self.n_logical), s))
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("at least one slack assignment")
    }

    /// Float copy for fast exhaustive minimization.
    pub fn to_compiled(&self) -> CompiledPenalty {
        CompiledPenalty {
            n_logical: self.n_logical,
            n_slack: self.n_slack,
            k0: self.k0.to_f64().unwrap_or(f64::NAN),
            linear: self.linear.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|(&(i, j), c)| (i, j, c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    /// Logical strings whose slack-minimized energy is exactly zero.
    pub fn kernel(&self) -> BTreeSet<u64> {
        (0..1u64 << self.n_logical).filter(|&x| self.min_over_slack(x).0.is_zero()).collect()
    }

    /// Substitutes `x_i → 1 − x_i` on every variable.
    pub fn flip_all(&self) -> Self {
        let mut out = QuadraticPenalty::zero(self.n_logical, self.n_slack);
        out.delta = self.delta.clone();
        out.k0 = self.k0.clone() + self.linear.iter().sum::<BigRational>();
        for (i, l) in self.linear.iter().enumerate() {
            out.linear[i] -= l;
        }
        for (&(i, j), q) in &self.quadratic {
            // q(1 − x_i)(1 − x_j) = q − q x_i − q x_j + q x_i x_j
            out.k0 += q;
            out.linear[i] -= q;
            out.linear[j] -= q;
            out.quadratic.insert((i, j), q.clone());
        }
        out
    }

    pub fn to_poly(&self) -> PseudoBooleanPoly {
        let c = self.to_compiled();
        let mut p = PseudoBooleanPoly::constant(self.n_total(), c.k0);
        for (i, &l) in c.linear.iter().enumerate() {
            p.add_monomial(&[i], l);
        }
        for &(i, j, q) in &c.quadratic {
            p.add_monomial(&[i, j], q);
        }
        p
    }

    /// Diagonal operator over logical then slack qubits.
    pub fn to_operator(&self) -> OperatorSum {
        pseudo_to_operator(&self.to_poly())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: QuadraticPenalty =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let n = p.n_total();
        if p.linear.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.linear.len() });
        }
        if let Some(&(_, j)) = p.quadratic.keys().find(|&&(_, j)| j >= n) {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        Ok(p)
    }
}

/// Float evaluation of a [`QuadraticPenalty`].
#[derive(Clone, Debug)]
pub struct CompiledPenalty {
    pub n_logical: usize,
    pub n_slack: usize,
    pub k0: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl CompiledPenalty {
    pub fn energy(&self, a: u64) -> f64 {
        let mut e = self.k0;
        for (i, l) in self.linear.iter().enumerate() {
            if a >> i & 1 == 1 {
                e += l;
            }
        }
        for &(i, j, q) in &self.quadratic {
            if a >> i & a >> j & 1 == 1 {
                e += q;
            }
        }
        e
    }

    pub fn min_over_slack(&self, logical: u64) -> (f64, u64) {
        let mut best = (f64::INFINITY, 0);
        for s in 0..1u64 << self.n_slack {
            let e = self.energy(logical | s << self.n_logical);
            if e < best.0 {
                best = (e, s);
            }
        }
        best
    }
}

/// `δ(3z + x₁x₂ − 2zx₁ − 2zx₂)` over `(x₁, x₂, z)`.
pub fn and_gadget(delta: f64) -> Result<QuadraticPenalty> {
    if delta.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NonpositiveDelta);
    }
    let d = BigRational::from_float(delta).ok_or(Error::NonpositiveDelta)?;
    let mut p = QuadraticPenalty::zero(3, 0);
    p.add_linear(2, 3);
    p.add_quadratic(0, 1, 1);
    p.add_quadratic(2, 0, -2);
    p.add_quadratic(2, 1, -2);
    let mut p = p.scaled(&d);
    p.delta = d;
    Ok(p)
}

/// Pairwise equality penalties on a triangle.
pub fn copy_gadget() -> QuadraticPenalty {
    let mut p = QuadraticPenalty::zero(3, 0);
    for i in 0..3 {
        p.add_linear(i, 2);
    }
    p.add_quadratic(1, 2, -2);
    p.add_quadratic(1, 0, -2);
    p.add_quadratic(2, 0, -2);
    p.delta = rat(2);
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicVariant {
    A,
    B,
}

/// Penalties whose slack minimum is `−x₁x₂x₃`; slack `z` is variable 3.
pub fn cubic_product_gadget(variant: CubicVariant) -> QuadraticPenalty {
    let mut p = QuadraticPenalty::zero(3, 1);
    match variant {
        CubicVariant::A => {
            // z(2 − x₁ − x₂ − x₃)
            p.add_linear(3, 2);
            for i in 0..3 {
                p.add_quadratic(3, i, -1);
            }
        }
        CubicVariant::B => {
            // z(−x₁ + x₂ + x₃) − x₁x₂ − x₁x₃ + x₁
            p.add_quadratic(3, 0, -1);
            p.add_quadratic(3, 1, 1);
            p.add_quadratic(3, 2, 1);
            p.add_quadratic(0, 1, -1);
            p.add_quadratic(0, 2, -1);
            p.add_linear(0, 1);
        }
    }
    p
}

/// Parity network for `k` logical bits.
#[derive(Clone, Debug, PartialEq)]
pub struct XorChain {
    pub k: usize,
    pub penalty: QuadraticPenalty,
    /// Slack indices (relative to the slack block) of the running parities.
    pub auxiliaries: Vec<usize>,
    pub mediators: Vec<usize>,
    /// Logical bit constrained to the parity of the others.
    pub output: usize,
}

/// `(a + b + c − 2m)²` expanded with `x² = x`; slack-minimum 0 on even
/// parity of `(a, b, c)` and 1 on odd.
fn add_xor_block(p: &mut QuadraticPenalty, a: usize, b: usize, c: usize, m: usize) {
    for v in [a, b, c] {
        p.add_linear(v, 1);
        p.add_quadratic(v, m, -4);
    }
    p.add_linear(m, 4);
    p.add_quadratic(a, b, 2);
    p.add_quadratic(a, c, 2);
    p.add_quadratic(b, c, 2);
}

/// Chain `y₁ = s₁⊕s₂`, `y_j = y_{j−1}⊕s_{j+1}`, closed by
/// `s_k = y_{k−3}⊕s_{k−1}`. Its slack-minimized energy is the parity of
/// all `k` bits, so `Z₁⋯Z_k = 1 − 2E`.
pub fn xor_chain(k: usize) -> Result<XorChain> {
    if k < 3 {
        return Err(Error::KTooSmall);
    }
    let n_aux = k - 3;
    let n_med = k - 2;
    let mut p = QuadraticPenalty::zero(k, n_aux + n_med);
    let aux = |j: usize| k + j;
    let med = |j: usize| k + n_aux + j;
    if k == 3 {
        add_xor_block(&mut p, 0, 1, 2, med(0));
    } else {
        add_xor_block(&mut p, 0, 1, aux(0), med(0));
        for j in 1..n_aux {
            add_xor_block(&mut p, aux(j - 1), j + 1, aux(j), med(j));
        }
        add_xor_block(&mut p, aux(n_aux - 1), k - 2, k - 1, med(n_med - 1));
    }
    p.delta = rat(1);
    Ok(XorChain {
        k,
        penalty: p,
        auxiliaries: (0..n_aux).collect(),
        mediators: (n_aux..n_aux + n_med).collect(),
        output: k - 1,
    })
}

/// Logical strings that must sit at zero; everything else needs `≥ δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetKernel {
    pub n_logical: usize,
    pub accepted: BTreeSet<u64>,
    pub delta: BigRational,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    n: usize,
    accepted: Vec<String>,
    #[serde(default)]
    delta: Option<String>,
}

impl TargetKernel {
    pub fn new(n_logical: usize, accepted: impl IntoIterator<Item = u64>) -> Result<Self> {
        let accepted: BTreeSet<u64> = accepted.into_iter().collect();
        if accepted.is_empty() {
            return Err(Error::InvalidKernel("accepted set is empty".into()));
        }
        if n_logical > 20 {
            return Err(Error::TooManyVariables { n: n_logical, limit: 20 });
        }
        if accepted.len() as u64 == 1u64 << n_logical {
            return Err(Error::InvalidKernel("accepted set is every string".into()));
        }
        if let Some(&x) = accepted.iter().find(|&&x| x >> n_logical != 0) {
            return Err(Error::InvalidKernel(format!("string {x:#b} has more than {n_logical} bits")));
        }
        Ok(TargetKernel { n_logical, accepted, delta: rat(1) })
    }

    /// Kernel of a Boolean relation given as a predicate on logical masks.
    pub fn from_predicate(n_logical: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        TargetKernel::new(n_logical, (0..1u64 << n_logical).filter(|&x| f(x)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: KernelJson =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let mut accepted = Vec::new();
        for s in &doc.accepted {
            if s.len() != doc.n {
                return Err(Error::InvalidKernel(format!("bitstring `{s}` is not {} long", doc.n)));
            }
            accepted.push(parse_bits(s).ok_or_else(|| Error::InvalidKernel(format!("bad bitstring `{s}`")))?);
        }
        let mut k = TargetKernel::new(doc.n, accepted)?;
        if let Some(d) = doc.delta {
            k.delta = d.parse().map_err(|_| Error::InvalidKernel(format!("bad delta `{d}`")))?;
            if k.delta <= BigRational::zero() {
                return Err(Error::NonpositiveDelta);
            }
        }
        Ok(k)
    }

    pub fn to_json(&self) -> String {
        let doc = KernelJson {
            n: self.n_logical,
            accepted: self.accepted.iter().map(|&x| bits_of(x, self.n_logical)).collect(),
            delta: Some(self.delta.to_string()),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn rejected(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.n_logical).filter(|x| !self.accepted.contains(x))
    }
}

/// One refuted slack pattern: `choice[i]` is the slack mask at which the
/// `i`-th accepted string attains its zero minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternRefutation {
    pub choice: Vec<u64>,
    pub multipliers: Vec<BigRational>,
}

/// Refutation of every pattern with the first accepted string's slack
/// fixed at zero. Flipping a slack bit maps quadratic penalties to
/// quadratic penalties, so this covers all patterns.
#[derive(Clone, Debug, PartialEq)]
pub struct InfeasibilityCertificate {
    pub n_slack: usize,
    pub refutations: Vec<PatternRefutation>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Synthesis {
    Feasible(QuadraticPenalty),
    Infeasible(InfeasibilityCertificate),
}

/// Unknown order: `k₀`, `l_0 … l_{N−1}`, then `q_ij` for `i < j` in
/// lexicographic order.
pub fn monomial_row(n_total: usize, assignment: u64) -> Vec<BigRational> {
    let on = |i: usize| assignment >> i & 1 == 1;
    let mut row = vec![rat(1)];
    row.extend((0..n_total).map(|i| rat(on(i) as i64)));
    for i in 0..n_total {
        for j in i + 1..n_total {
            row.push(rat((on(i) && on(j)) as i64));
        }
    }
    row
}

/// Constraints for one slack pattern.
pub fn pattern_constraints(target: &TargetKernel, n_slack: usize, choice: &[u64]) -> Vec<Constraint> {
    let nl = target.n_logical;
    let n = nl + n_slack;
    let mut cs = Vec::new();
    for (a, &sa) in target.accepted.iter().zip(choice) {
        for s in 0..1u64 << n_slack {
            cs.push(Constraint {
                coeffs: monomial_row(n, a | s << nl),
                sense: if s == sa { Sense::Eq } else { Sense::Ge },
                rhs: rat(0),
            });
        }
    }
    for r in target.rejected() {
        for s in 0..1u64 << n_slack {
            cs.push(Constraint { coeffs: monomial_row(n, r | s << nl), sense: Sense::Ge, rhs: target.delta.clone() });
        }
    }
    cs
}

fn penalty_from_unknowns(nl: usize, ns: usize, v: &[BigRational], delta: &BigRational) -> QuadraticPenalty {
    let n = nl + ns;
    let mut p = QuadraticPenalty::zero(nl, ns);
    p.k0 = v[0].clone();
    p.linear = v[1..=n].to_vec();
    let mut idx = n + 1;
    for i in 0..n {
        for j in i + 1..n {
            if !v[idx].is_zero() {
                p.quadratic.insert((i, j), v[idx].clone());
            }
            idx += 1;
        }
    }
    p.delta = delta.clone();
    p
}

fn pattern_of(index: u64, count: usize, n_slack: usize) -> Vec<u64> {
    // First accepted string pinned to slack 0; the rest read from `index`.
    let mask = (1u64 << n_slack) - 1;
    std::iter::once(0).chain((0..count - 1).map(|i| index >> (i * n_slack) & mask)).collect()
}

/// Searches for a quadratic penalty realizing the kernel with `n_slack`
/// extra variables, or refutes every slack pattern.
pub fn synthesize_penalty(target: &TargetKernel, n_slack: usize) -> Result<Synthesis> {
    let nl = target.n_logical;
    if nl + n_slack > SYNTH_LIMIT {
        return Err(Error::TooLarge(format!("{} variables exceeds {SYNTH_LIMIT}", nl + n_slack)));
    }
    let n = nl + n_slack;
    let nvars = 1 + n + n * (n - 1) / 2;
    let count = target.accepted.len();
    let n_patterns = 1u64 << (n_slack * (count - 1));
    let outcomes: Vec<(Vec<u64>, LpOutcome)> = (0..n_patterns)
        .into_par_iter()
        .map(|idx| {
            let choice = pattern_of(idx, count, n_slack);
            let cs = pattern_constraints(target, n_slack, &choice);
            let out = solve_feasibility(nvars, &cs, true);
            (choice, out)
        })
        .collect();
    let mut refutations = Vec::new();
    for (choice, out) in outcomes {
        match out {
            LpOutcome::Feasible(v) => {
                return Ok(Synthesis::Feasible(penalty_from_unknowns(nl, n_slack, &v, &target.delta)));
            }
            LpOutcome::Infeasible(mu) => refutations.push(PatternRefutation { choice, multipliers: mu }),
        }
    }
    Ok(Synthesis::Infeasible(InfeasibilityCertificate { n_slack, refutations }))
}

impl InfeasibilityCertificate {
    /// Re-derives each pattern's constraints and checks its multipliers.
    pub fn verify(&self, target: &TargetKernel) -> bool {
        let n = target.n_logical + self.n_slack;
        let nvars = 1 + n + n * (n - 1) / 2;
        let expected = 1u64 << (self.n_slack * (target.accepted.len() - 1));
        self.refutations.len() as u64 == expected
            && self.refutations.iter().all(|r| {
                let cs = pattern_constraints(target, self.n_slack, &r.choice);
                check_farkas(nvars, &cs, &r.multipliers)
            })
    }
}

/// Exhaustive check that a penalty realizes a kernel with margin `δ`.
pub fn realizes(p: &QuadraticPenalty, target: &TargetKernel) -> bool {
    p.n_logical == target.n_logical
        && (0..1u64 << p.n_logical).all(|x| {
            let (e, _) = p.min_over_slack(x);
            if target.accepted.contains(&x) {
                e.is_zero()
            } else {
                e >= target.delta
            }
        })
}
