//! Dense matrices for exact small-register numerics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::OperatorSum;
use crate::state::StateVector;

/// Largest register realized as a full matrix.
pub const DENSE_LIMIT: usize = 14;

/// Eigenvalues closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub n: usize,
    pub matrix: CMatrix,
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn realize_dense(op: &OperatorSum) -> Result<DenseOperator> {
    realize_with_limit(op, DENSE_LIMIT)
}

pub fn realize_with_limit(op: &OperatorSum, limit: usize) -> Result<DenseOperator> {
    let n = op.n();
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (w, p) in op.terms() {
        for b in 0..dim {
            let (b2, ph) = p.apply_basis(b);
            m[(b2, b)] += ph * w;
        }
    }
    Ok(DenseOperator { n, matrix: m })
}

/// Sorted spectrum with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Full Hermitian eigendecomposition, ascending.
pub fn eigh(m: &CMatrix) -> Eigh {
    let se = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), idx.len(), |r, k| se.eigenvectors[(r, idx[k])]);
    Eigh { values, vectors }
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn real_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let se = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), idx.len(), |r, k| se.eigenvectors[(r, idx[k])]);
    (values, vectors)
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// `λ₁ − λ₀` of the sorted spectrum, 0 when the ground space is degenerate.
    pub gap: f64,
    /// Distance to the first eigenvalue above `λ₀ + 1e-10`.
    pub distinct_gap: f64,
    pub degeneracy: usize,
}

pub fn ground(op: &OperatorSum) -> Result<GroundState> {
    let d = realize_dense(op)?;
    Ok(ground_of_matrix(op.n(), &d.matrix))
}

pub fn ground_of_matrix(n: usize, m: &CMatrix) -> GroundState {
    let e = eigh(m);
    let e0 = e.values[0];
    let degeneracy = e.values.iter().take_while(|&&v| v <= e0 + DEGENERACY_TOL).count();
    let distinct_gap = e.values.get(degeneracy).map(|v| v - e0).unwrap_or(0.0);
    let gap = if degeneracy > 1 { 0.0 } else { distinct_gap };
    let amps: Vec<Complex64> = e.vectors.column(0).iter().copied().collect();
    GroundState { energy: e0, state: StateVector::from_amplitudes(n, amps), gap, distinct_gap, degeneracy }
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().fold(0.0, |a: f64, &b| a.max(b))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (i..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Real, non-positive off-diagonal entries.
pub fn is_stoquastic(op: &OperatorSum) -> Result<bool> {
    let d = realize_dense(op)?;
    let m = &d.matrix;
    let dim = m.nrows();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                let v = m[(i, j)];
                if v.im.abs() > 1e-12 || v.re > 1e-12 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `V f(Λ) V†` for a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let e = eigh(m);
    let dim = m.nrows();
    let mut scaled = e.vectors.clone();
    for k in 0..dim {
        let fk = f(e.values[k]);
        for r in 0..dim {
            scaled[(r, k)] *= fk;
        }
    }
    scaled * e.vectors.adjoint()
}

/// `e^{-itH}` for Hermitian `H`.
pub fn unitary_exp(m: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(m, |l| Complex64::from_polar(1.0, -t * l))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn to_dvector(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// Entrywise maximum distance.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
