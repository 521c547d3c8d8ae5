//! Bit-packed Pauli strings and weighted sums of them.
//!
//! Qubit `q` of an `n`-qubit register lives at bit `n - 1 - q` of a basis
//! index, so qubit 0 is the leftmost tensor factor and the leftmost letter
//! of a word such as `"ZXI"`. The same alignment is used for the `x`/`z`
//! masks of a [`PauliString`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[inline]
pub(crate) fn bitpos(n: usize, q: usize) -> usize {
    n - 1 - q
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | 'i' | '_' => Some(Letter::I),
            'X' | 'x' => Some(Letter::X),
            'Y' | 'y' => Some(Letter::Y),
            'Z' | 'z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }
}

/// A power of the imaginary unit, `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n, x: 0, z: 0, phase: Phase::ONE }
    }

    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        assert!(q < n, "qubit {q} out of range for {n} qubits");
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Builds from raw masks aligned with basis-index bits.
    pub fn from_masks(n: usize, x: u64, z: u64, phase: Phase) -> Self {
        assert!(n <= MAX_QUBITS);
        let m = full_mask(n);
        assert!(x & !m == 0 && z & !m == 0, "mask bits beyond n");
        PauliString { n, x, z, phase }
    }

    pub fn from_word(word: &str) -> Result<Self> {
        let letters: Vec<Letter> = word
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::BadWord(word.to_string())))
            .collect::<Result<_>>()?;
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::BadWord(word.to_string()));
        }
        let mut p = PauliString::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            p.set_letter(q, l);
        }
        Ok(p)
    }

    pub fn word(&self) -> String {
        (0..self.n).map(|q| self.letter(q).to_char()).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn key(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    pub fn letter(&self, q: usize) -> Letter {
        let b = bitpos(self.n, q);
        Letter::from_bits((self.x >> b) & 1 == 1, (self.z >> b) & 1 == 1)
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let b = bitpos(self.n, q);
        let (lx, lz) = letter.bits();
        self.x = (self.x & !(1 << b)) | ((lx as u64) << b);
        self.z = (self.z & !(1 << b)) | ((lz as u64) << b);
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Letters in the support, as (qubit, letter) pairs.
    pub fn support(&self) -> Vec<(usize, Letter)> {
        (0..self.n)
            .map(|q| (q, self.letter(q)))
            .filter(|(_, l)| *l != Letter::I)
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n);
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Operator product `self * other`, phase included.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "qubit counts differ");
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = self.phase.0 as i64
            + other.phase.0 as i64
            + (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        PauliString { n: self.n, x, z, phase: Phase::from_power(k) }
    }

    /// `P|b⟩ = c|b'⟩`; returns `(b', c)`.
    #[inline]
    pub fn apply_basis(&self, b: usize) -> (usize, Complex64) {
        let k = self.phase.0 as u32
            + (self.x & self.z).count_ones()
            + 2 * ((b as u64) & self.z).count_ones();
        (b ^ self.x as usize, Phase::from_power(k as i64).to_complex())
    }

    /// Sign of `⟨b|P|b⟩` for a diagonal phase-one string, as ±1.
    #[inline]
    pub fn diagonal_sign(&self, b: usize) -> f64 {
        if ((b as u64) & self.z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Places this string on qubits `offset..offset+n` of a larger register.
    pub fn embed(&self, n_total: usize, offset: usize) -> PauliString {
        assert!(offset + self.n <= n_total && n_total <= MAX_QUBITS);
        let shift = n_total - self.n - offset;
        PauliString { n: n_total, x: self.x << shift, z: self.z << shift, phase: self.phase }
    }

    /// `self ⊗ other` with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let n = self.n + other.n;
        assert!(n <= MAX_QUBITS);
        PauliString {
            n,
            x: (self.x << other.n) | other.x,
            z: (self.z << other.n) | other.z,
            phase: self.phase * other.phase,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.phase.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{p}{}", self.word())
    }
}

/// Hermitian operator: real weights on phase-one Pauli strings.
///
/// Equal strings are always merged and exact zeros dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    n: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

impl OperatorSum {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        OperatorSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, c: f64) -> Self {
        let mut s = OperatorSum::zero(n);
        s.add_term(c, &PauliString::identity(n));
        s
    }

    pub fn single(n: usize, q: usize, letter: Letter, c: f64) -> Self {
        let mut s = OperatorSum::zero(n);
        s.add_term(c, &PauliString::single(n, q, letter));
        s
    }

    /// `|0⟩⟨0|` on qubit `q`.
    pub fn p0(n: usize, q: usize) -> Self {
        let mut s = OperatorSum::identity(n, 0.5);
        s.add_term(0.5, &PauliString::single(n, q, Letter::Z));
        s
    }

    /// `|1⟩⟨1|` on qubit `q`.
    pub fn p1(n: usize, q: usize) -> Self {
        let mut s = OperatorSum::identity(n, 0.5);
        s.add_term(-0.5, &PauliString::single(n, q, Letter::Z));
        s
    }

    pub fn from_words<'a, I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a str)>,
    {
        let mut s = OperatorSum::zero(n);
        for (c, w) in terms {
            let p = PauliString::from_word(w)?;
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.n() });
            }
            s.add_term(c, &p);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `c * p`. A ±1 phase on `p` is folded into `c`.
    ///
    /// Panics on an imaginary phase, which would break hermiticity.
    pub fn add_term(&mut self, c: f64, p: &PauliString) {
        assert_eq!(p.n(), self.n, "qubit counts differ");
        assert!(p.phase().is_real(), "imaginary phase in a Hermitian sum");
        let c = if p.phase() == Phase::MINUS_ONE { -c } else { c };
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(p.key()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&p.key());
        }
    }

    pub fn add_word(&mut self, c: f64, word: &str) -> Result<()> {
        let p = PauliString::from_word(word)?;
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.n() });
        }
        self.add_term(c, &p);
        Ok(())
    }

    /// Number of nonzero terms.
    pub fn cardinality(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, PauliString)> + '_ {
        let n = self.n;
        self.terms
            .iter()
            .map(move |(&(x, z), &c)| (c, PauliString::from_masks(n, x, z, Phase::ONE)))
    }

    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(&p.key()).copied().unwrap_or(0.0)
    }

    pub fn coeff_of(&self, word: &str) -> f64 {
        PauliString::from_word(word).map(|p| self.coeff(&p)).unwrap_or(0.0)
    }

    /// Drops terms with `|c| <= tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.abs() > tol);
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = OperatorSum::zero(self.n);
        for (c, p) in self.terms() {
            out.add_term(c * s, &p);
        }
        out
    }

    pub fn plus(&self, other: &OperatorSum) -> Self {
        assert_eq!(self.n, other.n, "qubit counts differ");
        let mut out = self.clone();
        for (c, p) in other.terms() {
            out.add_term(c, &p);
        }
        out
    }

    pub fn minus(&self, other: &OperatorSum) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn embed(&self, n_total: usize, offset: usize) -> Self {
        let mut out = OperatorSum::zero(n_total);
        for (c, p) in self.terms() {
            out.add_term(c, &p.embed(n_total, offset));
        }
        out
    }

    pub fn tensor(&self, other: &OperatorSum) -> Self {
        let mut out = OperatorSum::zero(self.n + other.n);
        for (a, p) in self.terms() {
            for (b, r) in other.terms() {
                out.add_term(a * b, &p.tensor(&r));
            }
        }
        out
    }

    pub fn product(&self, other: &OperatorSum) -> PauliSum {
        PauliSum::from(self).product(&PauliSum::from(other))
    }

    /// `self²`, which stays Hermitian.
    pub fn square(&self) -> OperatorSum {
        self.product(self)
            .hermitian(1e-12)
            .expect("square of a Hermitian operator is Hermitian")
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|&(x, _)| x == 0)
    }

    /// Sum of absolute weights, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// `⟨b|H|b⟩`.
    pub fn diagonal_entry(&self, b: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(&(x, _), _)| x == 0)
            .map(|(&(_, z), &c)| if ((b as u64) & z).count_ones() % 2 == 0 { c } else { -c })
            .sum()
    }

    /// All diagonal entries, computed by a Walsh–Hadamard pass.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n;
        let mut d = vec![0.0; dim];
        for (&(x, z), &c) in &self.terms {
            if x == 0 {
                d[z as usize] += c;
            }
        }
        let mut h = 1;
        while h < dim {
            for i in (0..dim).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (d[j], d[j + h]);
                    d[j] = a + b;
                    d[j + h] = a - b;
                }
            }
            h *= 2;
        }
        d
    }

    /// `H·v` without forming a matrix.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), 1usize << self.n, "vector length");
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (c, p) in self.terms() {
            for (b, amp) in v.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let (b2, ph) = p.apply_basis(b);
                out[b2] += ph * amp * c;
            }
        }
        out
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, p) in self.terms() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{c:+} {}", p.word())?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Complex-weighted Pauli sum, used for non-Hermitian intermediates such as
/// transition operators `|1⟩⟨0|` and gate unitaries.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl From<&OperatorSum> for PauliSum {
    fn from(op: &OperatorSum) -> Self {
        let mut s = PauliSum::zero(op.n());
        for (c, p) in op.terms() {
            s.add_term(Complex64::new(c, 0.0), &p);
        }
        s
    }
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = PauliSum::zero(n);
        s.add_term(Complex64::new(1.0, 0.0), &PauliString::identity(n));
        s
    }

    /// Single-qubit `|a⟩⟨b|` on qubit `q`.
    pub fn ketbra(n: usize, q: usize, a: u8, b: u8) -> Self {
        let h = Complex64::new(0.5, 0.0);
        let ih = Complex64::new(0.0, 0.5);
        let i = PauliString::identity(n);
        let x = PauliString::single(n, q, Letter::X);
        let y = PauliString::single(n, q, Letter::Y);
        let z = PauliString::single(n, q, Letter::Z);
        let mut s = PauliSum::zero(n);
        match (a, b) {
            (0, 0) => {
                s.add_term(h, &i);
                s.add_term(h, &z);
            }
            (1, 1) => {
                s.add_term(h, &i);
                s.add_term(-h, &z);
            }
            (0, 1) => {
                s.add_term(h, &x);
                s.add_term(ih, &y);
            }
            (1, 0) => {
                s.add_term(h, &x);
                s.add_term(-ih, &y);
            }
            _ => panic!("ketbra labels must be 0 or 1"),
        }
        s
    }

    /// Pauli expansion of a dense `2^n × 2^n` matrix, `c_P = Tr(P M) / 2^n`.
    pub fn from_dense(n: usize, m: &nalgebra::DMatrix<Complex64>) -> Self {
        let dim = 1usize << n;
        assert_eq!(m.nrows(), dim);
        let mut s = PauliSum::zero(n);
        let norm = 1.0 / dim as f64;
        for x in 0..dim as u64 {
            for z in 0..dim as u64 {
                let p = PauliString::from_masks(n, x, z, Phase::ONE);
                // Tr(P M) = Σ_b ⟨b|P M|b⟩ = Σ_b Σ_b' P[b,b'] M[b',b]; P has one entry per column.
                let mut tr = Complex64::new(0.0, 0.0);
                for b in 0..dim {
                    let (b2, ph) = p.apply_basis(b);
                    tr += ph * m[(b, b2)];
                }
                let c = tr * norm;
                if c.norm() > 1e-15 {
                    s.add_term(c, &p);
                }
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, c: Complex64, p: &PauliString) {
        assert_eq!(p.n(), self.n, "qubit counts differ");
        let c = c * p.phase().to_complex();
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(p.key()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.terms.remove(&p.key());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Complex64, PauliString)> + '_ {
        let n = self.n;
        self.terms
            .iter()
            .map(move |(&(x, z), &c)| (c, PauliString::from_masks(n, x, z, Phase::ONE)))
    }

    pub fn cardinality(&self) -> usize {
        self.terms.len()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = PauliSum::zero(self.n);
        for (c, p) in self.terms() {
            out.add_term(c * s, &p);
        }
        out
    }

    pub fn plus(&self, other: &PauliSum) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (c, p) in other.terms() {
            out.add_term(c, &p);
        }
        out
    }

    pub fn product(&self, other: &PauliSum) -> Self {
        assert_eq!(self.n, other.n, "qubit counts differ");
        let mut out = PauliSum::zero(self.n);
        for (a, p) in self.terms() {
            for (b, r) in other.terms() {
                out.add_term(a * b, &p.mul(&r));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = PauliSum::zero(self.n);
        for (c, p) in self.terms() {
            out.add_term(c.conj(), &p);
        }
        out
    }

    pub fn embed(&self, n_total: usize, offset: usize) -> Self {
        let mut out = PauliSum::zero(n_total);
        for (c, p) in self.terms() {
            out.add_term(c, &p.embed(n_total, offset));
        }
        out
    }

    pub fn tensor(&self, other: &PauliSum) -> Self {
        let mut out = PauliSum::zero(self.n + other.n);
        for (a, p) in self.terms() {
            for (b, r) in other.terms() {
                out.add_term(a * b, &p.tensor(&r));
            }
        }
        out
    }

    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > tol);
        self
    }

    /// Converts to an [`OperatorSum`] if every weight is real within `tol`.
    pub fn hermitian(&self, tol: f64) -> Result<OperatorSum> {
        let mut out = OperatorSum::zero(self.n);
        for (c, p) in self.terms() {
            if c.im.abs() > tol {
                return Err(Error::NotHermitian);
            }
            if c.re.abs() > tol {
                out.add_term(c.re, &p);
            }
        }
        Ok(out)
    }
}
