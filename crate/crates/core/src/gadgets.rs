//! Perturbative gadgets: a penalty `Δ|1⟩⟨1|_w` on one slack qubit plus a
//! perturbation `V` whose low-energy self-energy reproduces a target.
//!
//! The system occupies qubits `0..n` and the slack is qubit `n`, the last
//! one, so the low subspace `w = 0` is the even basis indices.

use crate::io::sig12;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{eigh, operator_norm, realize_dense, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::{Letter, OperatorSum};

const UNIT_NORM_TOL: f64 = 1e-10;

/// Target `H_else + α·A⊗B` on an `n`-qubit system.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetSpec {
    pub alpha: f64,
    pub a: OperatorSum,
    pub b: OperatorSum,
    pub h_else: OperatorSum,
    pub epsilon: f64,
}

impl GadgetSpec {
    pub fn new(alpha: f64, a: OperatorSum, b: OperatorSum, h_else: OperatorSum, epsilon: f64) -> Result<Self> {
        let n = a.n();
        for op in [&b, &h_else] {
            if op.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: op.n() });
            }
        }
        for op in [&a, &b] {
            let norm = operator_norm(&realize_dense(op)?.matrix);
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::NotUnitNorm(norm));
            }
        }
        Ok(GadgetSpec { alpha, a, b, h_else, epsilon })
    }

    /// `α Z₁Z₂` with `H_else = 0`.
    pub fn zz(alpha: f64, epsilon: f64) -> Self {
        GadgetSpec {
            alpha,
            a: OperatorSum::single(2, 0, Letter::Z, 1.0),
            b: OperatorSum::single(2, 1, Letter::Z, 1.0),
            h_else: OperatorSum::zero(2),
            epsilon,
        }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn h_else_norm(&self) -> Result<f64> {
        Ok(operator_norm(&realize_dense(&self.h_else)?.matrix))
    }

    pub fn target(&self) -> Result<OperatorSum> {
        let ab = self.a.product(&self.b).hermitian(1e-12)?;
        Ok(self.h_else.plus(&ab.scaled(self.alpha)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetRealization {
    pub n_system: usize,
    pub delta: f64,
    /// `Δ|1⟩⟨1|_w`.
    pub penalty: OperatorSum,
    pub v: OperatorSum,
    /// Target on the system alone.
    pub target: OperatorSum,
    pub slack: usize,
    pub v_norm: f64,
    /// `‖V‖ ≤ Δ/2`.
    pub hypothesis_ok: bool,
}

impl GadgetRealization {
    fn new(n: usize, delta: f64, v: OperatorSum, target: OperatorSum) -> Result<Self> {
        let penalty = OperatorSum::identity(n, 1.0).tensor(&OperatorSum::p1(1, 0)).scaled(delta);
        let v_norm = operator_norm(&realize_dense(&v)?.matrix);
        Ok(GadgetRealization {
            n_system: n,
            delta,
            penalty,
            v,
            target,
            slack: n,
            v_norm,
            hypothesis_ok: v_norm <= delta / 2.0,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.delta / 2.0
    }

    pub fn hamiltonian(&self) -> OperatorSum {
        self.penalty.plus(&self.v)
    }
}

/// `Δ ≥ (2|α|/ε + 1)(|α| + ε + 2‖H_else‖)`.
pub fn analytic_delta(alpha: f64, epsilon: f64, h_else_norm: f64) -> f64 {
    (2.0 * alpha.abs() / epsilon + 1.0) * (alpha.abs() + epsilon + 2.0 * h_else_norm)
}

fn on_system(op: &OperatorSum, slack: OperatorSum) -> OperatorSum {
    op.tensor(&slack)
}

fn slack_identity() -> OperatorSum {
    OperatorSum::identity(1, 1.0)
}

/// Subdivision gadget with `Δ` from the analytic bound.
pub fn subdivision_gadget(spec: &GadgetSpec) -> Result<GadgetRealization> {
    if spec.alpha == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let delta = analytic_delta(spec.alpha, spec.epsilon, spec.h_else_norm()?);
    subdivision_with_delta(spec, delta)
}

/// `V = H_else + (κ²A² + λ²B²)/Δ ⊗ |0⟩⟨0|_w + (κA + λB) ⊗ X_w` with
/// `κ = sgn(α)(|α|Δ/2)^½`, `λ = −(|α|Δ/2)^½`. `α = 0` is allowed here.
pub fn subdivision_with_delta(spec: &GadgetSpec, delta: f64) -> Result<GadgetRealization> {
    if !(delta > 0.0) {
        return Err(Error::NonpositiveDelta);
    }
    let r = (spec.alpha.abs() * delta / 2.0).sqrt();
    let kappa = spec.alpha.signum() * r;
    let lambda = -r;
    let n = spec.n();
    let squares = spec.a.square().scaled(kappa * kappa).plus(&spec.b.square().scaled(lambda * lambda)).scaled(1.0 / delta);
    let coupling = spec.a.scaled(kappa).plus(&spec.b.scaled(lambda));
    let v = on_system(&spec.h_else, slack_identity())
        .plus(&on_system(&squares, OperatorSum::p0(1, 0)))
        .plus(&on_system(&coupling, OperatorSum::single(1, 0, Letter::X, 1.0)))
        .pruned(0.0);
    GadgetRealization::new(n, delta, v, spec.target()?)
}

/// YY creation gadget on a two-qubit system targeting `H_else + α Y₁Y₂`,
/// with `κ = (|α|Δ³/4)^¼`:
/// `V₀ = H_else + κ(Z₁+Z₂)⊗|1⟩⟨1|_w + κ(X₁ − sgn α X₂)⊗X_w`,
/// `V₁ = 2κ²/Δ [|0⟩⟨0|_w − sgn α X₁X₂]`, `V₂ = −4κ⁴/Δ³ Z₁Z₂`.
pub fn yy_gadget_with_delta(alpha: f64, h_else: &OperatorSum, delta: f64) -> Result<GadgetRealization> {
    if alpha == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if !(delta > 0.0) {
        return Err(Error::NonpositiveDelta);
    }
    if h_else.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: h_else.n() });
    }
    let s = alpha.signum();
    let kappa = (alpha.abs() * delta.powi(3) / 4.0).powf(0.25);
    let k2 = kappa * kappa;
    let z12 = OperatorSum::from_words(2, [(1.0, "ZI"), (1.0, "IZ")])?;
    let x12 = OperatorSum::from_words(2, [(1.0, "XI"), (-s, "IX")])?;
    let xx = OperatorSum::from_words(2, [(1.0, "XX")])?;
    let zz = OperatorSum::from_words(2, [(1.0, "ZZ")])?;
    let v0 = on_system(h_else, slack_identity())
        .plus(&on_system(&z12.scaled(kappa), OperatorSum::p1(1, 0)))
        .plus(&on_system(&x12.scaled(kappa), OperatorSum::single(1, 0, Letter::X, 1.0)));
    let v1 = on_system(&OperatorSum::identity(2, 1.0), OperatorSum::p0(1, 0))
        .minus(&on_system(&xx.scaled(s), slack_identity()))
        .scaled(2.0 * k2 / delta);
    let v2 = on_system(&zz, slack_identity()).scaled(-4.0 * k2 * k2 / delta.powi(3));
    let v = v0.plus(&v1).plus(&v2).pruned(0.0);
    let yy = OperatorSum::from_words(2, [(alpha, "YY")])?;
    GadgetRealization::new(2, delta, v, h_else.plus(&yy))
}

/// YY gadget at the smallest `Δ` meeting `ε` (found by bisection).
pub fn yy_gadget(alpha: f64, h_else: &OperatorSum, epsilon: f64) -> Result<GadgetRealization> {
    let search = minimal_delta_search(&|d| yy_gadget_with_delta(alpha, h_else, d), epsilon, None)?;
    yy_gadget_with_delta(alpha, h_else, search.delta)
}

fn low_indices(n: usize) -> Vec<usize> {
    (0..1usize << n).map(|i| i << 1).collect()
}

fn block(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// Exact and series self-energy at one `z`, as matrices on the system.
#[derive(Clone, Debug)]
pub struct SelfEnergy {
    pub z: f64,
    pub exact: CMatrix,
    pub series: CMatrix,
    pub order: usize,
}

/// `Σ₋(z) = z − (Π₋G̃(z)Π₋)⁻¹` and the series
/// `V₋ + Σ_{j≥2} V₋₊ V₊^{j−2} V₊₋ / (z − Δ)^{j−1}` through `order`.
pub fn self_energy(real: &GadgetRealization, z: f64, order: usize) -> Result<SelfEnergy> {
    let limit = real.cutoff();
    if z.abs() >= limit {
        return Err(Error::ZNearPole { z, limit });
    }
    let h = realize_dense(&real.hamiltonian())?.matrix;
    let lo = low_indices(real.n_system);
    let hi: Vec<usize> = lo.iter().map(|i| i + 1).collect();
    // Schur complement form of z − (Π₋G̃Π₋)⁻¹, regular at eigenvalues of H̃
    let k = lo.len();
    let inv_pp = (CMatrix::identity(k, k) * Complex64::new(z, 0.0) - block(&h, &hi, &hi))
        .try_inverse()
        .ok_or(Error::SingularProjection)?;
    let exact = block(&h, &lo, &lo) + block(&h, &lo, &hi) * inv_pp * block(&h, &hi, &lo);

    let v = realize_dense(&real.v)?.matrix;
    let v_mm = block(&v, &lo, &lo);
    let v_mp = block(&v, &lo, &hi);
    let v_pm = block(&v, &hi, &lo);
    let v_pp = block(&v, &hi, &hi);
    let g = Complex64::new(1.0 / (z - real.delta), 0.0);
    let mut series = v_mm;
    // running = (G₊V₊)^{j−2} G₊ V₊₋
    let mut running = &v_pm * g;
    for _ in 2..=order {
        series += &v_mp * &running;
        running = (&v_pp * &running) * g;
    }
    Ok(SelfEnergy { z, exact, series, order })
}

/// Grid of `points` values spanning `[−max z, max z]`.
pub fn z_grid(max_z: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|i| -max_z + 2.0 * max_z * i as f64 / (points - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub delta: f64,
    pub max_spectral_error: f64,
    pub sup_self_energy_error: f64,
    pub max_leakage: f64,
    pub hypothesis_ok: bool,
    pub pass: bool,
}

/// Lowest `2ⁿ` eigenvalues of `H̃` against the target spectrum.
pub fn spectral_error(real: &GadgetRealization) -> Result<(f64, f64)> {
    let h = realize_dense(&real.hamiltonian())?.matrix;
    let e = eigh(&h);
    let t = eigh(&realize_dense(&real.target)?.matrix).values;
    let err = t.iter().zip(&e.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let leak = (0..t.len())
        .map(|k| (0..h.nrows()).filter(|r| r & 1 == 1).map(|r| e.vectors[(r, k)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok((err, leak))
}

/// Spectral test plus `sup_z ‖Σ₋(z) − H_targ‖` over the grid.
pub fn verify_gadget(real: &GadgetRealization, epsilon: f64, zs: &[f64]) -> Result<GadgetReport> {
    let (err, leak) = spectral_error(real)?;
    let target = realize_dense(&real.target)?.matrix;
    let mut sup = 0.0f64;
    for &z in zs {
        let se = self_energy(real, z, 0)?;
        sup = sup.max(operator_norm(&(se.exact - &target)));
    }
    Ok(GadgetReport {
        delta: real.delta,
        max_spectral_error: err,
        sup_self_energy_error: sup,
        max_leakage: leak,
        hypothesis_ok: real.hypothesis_ok,
        pass: err <= epsilon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSearch {
    pub delta: f64,
    pub error: f64,
    /// Sampled points inside the final bracket where the error rose with Δ.
    pub non_monotone: Vec<f64>,
}

/// Bisection in `log Δ` for the smallest `Δ` with spectral error `≤ ε`.
/// `upper` is a Δ known to pass; without one the bracket is grown upward.
pub fn minimal_delta_search(
    build: &(dyn Fn(f64) -> Result<GadgetRealization> + Sync),
    epsilon: f64,
    upper: Option<f64>,
) -> Result<DeltaSearch> {
    let err = |d: f64| -> Result<f64> { Ok(spectral_error(&build(d)?)?.0) };
    let mut hi = match upper {
        Some(u) => {
            if err(u)? > epsilon {
                return Err(Error::NoBracket(format!("Δ = {u} does not meet ε = {epsilon}")));
            }
            u
        }
        None => {
            let mut d = 1.0;
            while err(d)? > epsilon {
                d *= 4.0;
                if d > 1e14 {
                    return Err(Error::NoBracket(format!("no Δ ≤ 1e14 meets ε = {epsilon}")));
                }
            }
            d
        }
    };
    let mut lo = hi / 2.0;
    while err(lo)? <= epsilon {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-9 {
            return Ok(DeltaSearch { delta: hi, error: err(hi)?, non_monotone: vec![] });
        }
    }
    while (hi - lo) / hi > 1e-4 {
        let mid = (lo * hi).sqrt();
        if err(mid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let samples: Vec<f64> = (0..=8).map(|i| lo * (hi / lo).powf(i as f64 / 8.0)).collect();
    let errs: Vec<f64> = samples.iter().map(|&d| err(d)).collect::<Result<_>>()?;
    let non_monotone = samples
        .windows(2)
        .zip(errs.windows(2))
        .filter(|(_, e)| e[1] > e[0] + 1e-12)
        .map(|(d, _)| d[1])
        .collect();
    Ok(DeltaSearch { delta: hi, error: err(hi)?, non_monotone })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub max_spectral_error: f64,
    pub sup_self_energy_error: f64,
    pub pass: bool,
}

/// Subdivision gadget for `α Z₁Z₂` over a grid of couplings at a fixed Δ.
pub fn subdivision_alpha_sweep(alphas: &[f64], epsilon: f64, delta: f64, z_points: usize) -> Result<Vec<SweepRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let spec = GadgetSpec::zz(alpha, epsilon);
            let real = subdivision_with_delta(&spec, delta)?;
            let max_z = alpha.abs() + epsilon;
            let rep = verify_gadget(&real, epsilon, &z_grid(max_z, z_points))?;
            Ok(SweepRow {
                alpha,
                epsilon,
                delta,
                max_spectral_error: rep.max_spectral_error,
                sup_self_energy_error: rep.sup_self_energy_error,
                pass: rep.pass,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,epsilon,delta,max_spectral_error,sup_self_energy_error,pass\n");
    for r in rows {
        let cols = [r.alpha, r.epsilon, r.delta, r.max_spectral_error, r.sup_self_energy_error].map(sig12);
        s.push_str(&format!("{},{}\n", cols.join(","), r.pass));
    }
    s
}

/// `‖M − N‖` for the system block of two self-energies.
pub fn block_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    operator_norm(&(a - b))
}

/// Real part of a complex matrix, for reporting.
pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|v| v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_delta_value() {
        assert!((analytic_delta(1.0, 0.05, 0.0) - 43.05).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_rejected() {
        assert_eq!(subdivision_gadget(&GadgetSpec::zz(0.0, 0.05)), Err(Error::ZeroCoupling));
        assert_eq!(yy_gadget_with_delta(0.0, &OperatorSum::zero(2), 100.0), Err(Error::ZeroCoupling));
    }

    #[test]
    fn unit_norm_enforced() {
        let a = OperatorSum::single(2, 0, Letter::Z, 2.0);
        let b = OperatorSum::single(2, 1, Letter::Z, 1.0);
        assert!(matches!(GadgetSpec::new(1.0, a, b, OperatorSum::zero(2), 0.1), Err(Error::NotUnitNorm(_))));
    }

    #[test]
    fn leading_cross_term_is_target() {
        // −2κλ/Δ = +α for both signs
        for alpha in [0.7, -0.4] {
            let delta = 50.0;
            let r = (f64::abs(alpha) * delta / 2.0).sqrt();
            let (kappa, lambda) = (f64::signum(alpha) * r, -r);
            assert!((-2.0 * kappa * lambda / delta - alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn order_zero_series_is_v_minus() {
        let real = subdivision_gadget(&GadgetSpec::zz(1.0, 0.05)).unwrap();
        let se = self_energy(&real, 0.3, 0).unwrap();
        let v = realize_dense(&real.v).unwrap().matrix;
        let lo = low_indices(2);
        assert!(block_distance(&se.series, &block(&v, &lo, &lo)) < 1e-12);
        assert_eq!(se.series, self_energy(&real, 0.3, 1).unwrap().series);
    }

    #[test]
    fn pole_guard() {
        let real = subdivision_gadget(&GadgetSpec::zz(1.0, 0.05)).unwrap();
        assert!(matches!(self_energy(&real, 30.0, 2), Err(Error::ZNearPole { .. })));
    }

    #[test]
    fn hypothesis_flag_tracks_norm() {
        let spec = GadgetSpec::zz(1.0, 0.05);
        assert!(subdivision_gadget(&spec).unwrap().hypothesis_ok);
        assert!(!subdivision_with_delta(&spec, 2.0).unwrap().hypothesis_ok);
    }
}
