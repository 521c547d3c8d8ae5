//! Quantum (`e^{-itH}`) and stochastic (`e^{-tH}`) time evolution.
//!
//! Stochastic generators follow the column convention: off-diagonal entries
//! are non-positive and every column sums to zero, acting on column
//! probability vectors. [`to_column_convention`] converts a row-sum-zero
//! generator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dense::{realize_dense, unitary_exp, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::OperatorSum;
use crate::state::StateVector;

const GENERATOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Quantum,
    Stochastic,
}

/// `e^{-itH}|ψ⟩`.
pub fn evolve(op: &OperatorSum, t: f64, psi: &StateVector) -> Result<StateVector> {
    if op.n() != psi.n() {
        return Err(Error::DimensionMismatch { expected: op.n(), got: psi.n() });
    }
    let m = realize_dense(op)?.matrix;
    Ok(apply_matrix(&unitary_exp(&m, t), psi))
}

/// `e^{-tH} p` for an operator whose dense form is a stochastic generator.
pub fn evolve_stochastic(op: &OperatorSum, t: f64, p: &[f64]) -> Result<Vec<f64>> {
    let m = realize_dense(op)?.matrix;
    if m.iter().any(|v| v.im.abs() > GENERATOR_TOL) {
        return Err(Error::NotStochasticGenerator("complex entries".into()));
    }
    let real = m.map(|v| v.re);
    stochastic_propagate(&real, t, p)
}

/// Checks the column convention.
pub fn check_generator(h: &DMatrix<f64>) -> Result<()> {
    let n = h.nrows();
    for j in 0..n {
        let mut sum = 0.0;
        for i in 0..n {
            if i != j && h[(i, j)] > GENERATOR_TOL {
                return Err(Error::NotStochasticGenerator(format!("positive off-diagonal at ({i}, {j})")));
            }
            sum += h[(i, j)];
        }
        if sum.abs() > GENERATOR_TOL {
            return Err(Error::NotStochasticGenerator(format!("column {j} sums to {sum}")));
        }
    }
    Ok(())
}

pub fn to_column_convention(row_generator: &DMatrix<f64>) -> DMatrix<f64> {
    row_generator.transpose()
}

pub fn stochastic_propagate(h: &DMatrix<f64>, t: f64, p: &[f64]) -> Result<Vec<f64>> {
    check_generator(h)?;
    if p.len() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: p.len() });
    }
    if p.iter().any(|&v| v < 0.0) {
        return Err(Error::NotStochasticGenerator("negative input entry".into()));
    }
    let u = (h * (-t)).exp();
    let out = u * DVector::from_column_slice(p);
    Ok(out.iter().copied().collect())
}

pub fn apply_matrix(m: &CMatrix, psi: &StateVector) -> StateVector {
    let v = m * DVector::from_column_slice(psi.amplitudes());
    StateVector::from_normalized(psi.n(), v.iter().copied().collect())
}

/// `(e^{-iAt/s} e^{-iBt/s})^s |ψ⟩`.
pub fn trotter_evolve(
    a: &OperatorSum,
    b: &OperatorSum,
    t: f64,
    steps: usize,
    psi: &StateVector,
) -> Result<StateVector> {
    if steps == 0 {
        return Err(Error::InvalidSteps);
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: b.n() });
    }
    if a.n() != psi.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: psi.n() });
    }
    let dt = t / steps as f64;
    let ua = unitary_exp(&realize_dense(a)?.matrix, dt);
    let ub = unitary_exp(&realize_dense(b)?.matrix, dt);
    let step = ua * ub;
    let mut v = DVector::from_column_slice(psi.amplitudes());
    for _ in 0..steps {
        v = &step * v;
    }
    Ok(StateVector::from_normalized(psi.n(), v.iter().copied().collect::<Vec<Complex64>>()))
}
