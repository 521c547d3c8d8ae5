use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::OperatorSum;

/// Largest register simulated without materializing a matrix.
pub const STATE_LIMIT: usize = 20;

/// Unit vector of `2^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        StateVector::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    /// `|+⟩^⊗n`.
    pub fn plus(n: usize) -> Self {
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        StateVector { n, amps: vec![Complex64::new(a, 0.0); 1 << n] }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << n, "amplitude count");
        let mut s = StateVector { n, amps };
        s.normalize();
        s
    }

    /// Wraps amplitudes that are already normalized.
    pub fn from_normalized(n: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << n, "amplitude count");
        StateVector { n, amps }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        StateVector::from_amplitudes(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm();
        assert!(nrm > 0.0, "zero vector");
        for a in &mut self.amps {
            *a /= nrm;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { n: self.n + other.n, amps }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `⟨ψ|H|ψ⟩`.
pub fn expectation(op: &OperatorSum, psi: &StateVector) -> Result<f64> {
    if op.n() != psi.n() {
        return Err(Error::DimensionMismatch { expected: op.n(), got: psi.n() });
    }
    let amps = psi.amplitudes();
    let mut total = Complex64::new(0.0, 0.0);
    for (c, p) in op.terms() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in amps.iter().enumerate() {
            let (b2, ph) = p.apply_basis(b);
            acc += amps[b2].conj() * ph * a;
        }
        total += acc * c;
    }
    Ok(total.re)
}
