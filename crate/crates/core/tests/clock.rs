use std::f64::consts::PI;

use hamlab::circuit::{random_circuit, simulate, Circuit, FixedGate, Gate};
use hamlab::clock::*;
use hamlab::dense::{eigh, eigvalsh, realize_dense, CMatrix};
use hamlab::{Error, OperatorSum, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dense(op: &OperatorSum) -> CMatrix {
    realize_dense(op).unwrap().matrix
}

fn h(q: usize) -> Gate {
    Gate::Fixed { gate: FixedGate::H, qubit: q }
}

fn prefix(c: &Circuit, k: usize) -> Circuit {
    Circuit::new(c.n(), c.gates()[..k].to_vec()).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Ground vector of a dense Hermitian matrix, plus its gap.
fn ground(m: &CMatrix) -> (Vec<Complex64>, f64) {
    let e = eigh(m);
    (e.vectors.column(0).iter().copied().collect(), e.values[1] - e.values[0])
}

fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// Product of the 2×2 Pauli combination `m·σ` written out by hand.
fn sigma(m: [f64; 3]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cx(m[2], 0.0), cx(m[0], -m[1]), cx(m[0], m[1]), cx(-m[2], 0.0)])
}

fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if b[(i, j)].norm() > best {
                best = b[(i, j)].norm();
                idx = (i, j);
            }
        }
    }
    let phase = a[idx] / b[idx];
    (a - b * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn telescope_isospectral_on_random_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..12 {
        let n = 2 + trial % 4;
        let c = random_circuit(n, 10, rng.random_range(0..=default_non_clifford_bound(n)), &mut rng).unwrap();
        let reference = sorted(eigvalsh(&dense(&projector_sum(n))));
        let p0 = dense(&projector_sum(n));
        for k in 0..=c.len() {
            let t = telescope(&c, k).unwrap();
            let hk = dense(&t.op);
            assert!(max_dev(&sorted(eigvalsh(&hk)), &reference) < 1e-9);
            // Independent route: conjugate the dense projector sum by the prefix unitary.
            let u = prefix(&c, k).unitary().unwrap();
            assert!((&u * &p0 * u.adjoint() - &hk).norm() < 1e-9);
            let (g, _) = ground(&hk);
            let out = simulate(&prefix(&c, k), &StateVector::zero(n)).unwrap();
            assert!(fidelity(&g, out.amplitudes()) > 1.0 - 1e-9);
        }
    }
}

#[test]
fn one_rotation_grows_cardinality_only() {
    let r = Gate::LocalRotation { qubit: 0, axis: [0.6, 0.0, 0.8], theta: 0.7 };
    let c = Circuit::new(3, vec![r, h(1)]).unwrap();
    let t = telescope(&c, 1).unwrap();
    assert!(t.cardinality > 4);
    assert_eq!(t.non_clifford, 1);
    let spec = sorted(eigvalsh(&dense(&t.op)));
    assert!(max_dev(&spec, &sorted(eigvalsh(&dense(&projector_sum(3))))) < 1e-10);
    assert_eq!(telescope(&c, 3), Err(Error::IndexOutOfRange { index: 3, n: 2 }));
}

#[test]
fn identity_step_binary_ground() {
    let ch = clock_hamiltonian(&Circuit::empty(2), 1.0, 1.0, 1, ClockEncoding::Binary).unwrap();
    assert_eq!(ch.n_total(), 3);
    let (g, gap) = ground(&dense(&ch.total()));
    assert!(gap > 1e-6);
    let mut expect = vec![cx(0.0, 0.0); 8];
    expect[0b000] = cx(0.5f64.sqrt(), 0.0);
    expect[0b001] = cx(0.5f64.sqrt(), 0.0);
    assert!(fidelity(&g, &expect) > 1.0 - 1e-12);
}

#[test]
fn unary_validity_kernel_is_domain_walls() {
    let c = Circuit::new(1, vec![h(0); 4]).unwrap();
    let ch = clock_hamiltonian(&c, 1.0, 1.0, 0, ClockEncoding::Unary).unwrap();
    let diag = ch.h_clock.diagonal();
    let walls = [0b0000, 0b1000, 0b1100, 0b1110, 0b1111];
    for (i, d) in diag.iter().enumerate() {
        let clock = i & 0b1111;
        assert_eq!(walls.contains(&clock), d.abs() < 1e-12, "clock {clock:04b}");
    }
}

#[test]
fn input_term_annihilates_designated_input() {
    let c = Circuit::new(3, vec![h(0), Gate::CN { control: 0, target: 2 }]).unwrap();
    for enc in [ClockEncoding::Unary, ClockEncoding::Binary] {
        for x in 0..8 {
            let ch = clock_hamiltonian_for_input(&c, x, 1.0, 1.0, 0, enc).unwrap();
            let m = dense(&ch.h_in);
            let cq = ch.clock_qubits();
            for s in 0..8 {
                let idx = s << cq | enc.clock_index(ch.l, 0);
                let e = m[(idx, idx)].re;
                let wrong = (s ^ x).count_ones() as f64;
                assert!((e - wrong).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn hadamard_history_state() {
    let c = Circuit::new(1, vec![h(0)]).unwrap();
    let hist = history_state(&c, 0, ClockEncoding::Binary).unwrap();
    let r = 0.5f64.sqrt();
    // |0⟩|0⟩ + |+⟩|1⟩ over √2, system bit leading.
    let expect = [cx(r, 0.0), cx(r * r, 0.0), cx(0.0, 0.0), cx(r * r, 0.0)];
    for (a, b) in hist.state.amplitudes().iter().zip(expect) {
        assert!((a - b).norm() < 1e-12);
    }
    let empty = history_state(&Circuit::empty(2), 0, ClockEncoding::Unary).unwrap();
    assert_eq!(empty.state.n(), 2);
    assert!((empty.state.amplitudes()[0] - cx(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn history_state_is_the_ground_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..6 {
        let c = random_circuit(2, 3 + trial % 2, 1, &mut rng).unwrap();
        for enc in [ClockEncoding::Unary, ClockEncoding::Binary] {
            let m = trial % 2;
            let ch = clock_hamiltonian(&c, 1.0, 1.0, m, enc).unwrap();
            let hist = history_state(&c, m, enc).unwrap();
            let total = dense(&ch.total());
            let e = eigvalsh(&total);
            assert!(e[0].abs() < 1e-10, "shifted ground energy {}", e[0]);
            let (g, gap) = ground(&total);
            assert!(gap > 1e-4);
            assert!(fidelity(&g, hist.state.amplitudes()) > 1.0 - 1e-9);
            let v = hamlab::dense::to_dvector(hist.state.amplitudes());
            assert!((v.adjoint() * dense(&ch.h_prop) * &v)[(0, 0)].norm() < 1e-12);
            for (t, sec) in hist.sectors.iter().enumerate() {
                let k = t.min(c.len());
                let direct = simulate(&prefix(&c, k), &StateVector::zero(2)).unwrap();
                assert!(sec.fidelity(&direct) > 1.0 - 1e-12);
            }
        }
    }
}

#[test]
fn propagation_terms_are_projectors() {
    let c = Circuit::new(2, vec![h(0), Gate::CN { control: 0, target: 1 }, Gate::Fixed { gate: FixedGate::P, qubit: 1 }]).unwrap();
    for enc in [ClockEncoding::Unary, ClockEncoding::Binary] {
        let ch = clock_hamiltonian(&c, 1.0, 1.0, 1, enc).unwrap();
        let ms: Vec<CMatrix> = ch.terms.iter().map(dense).collect();
        for m in &ms {
            assert!((m * m - m).norm() < 1e-10);
            assert!(eigvalsh(m)[0] > -1e-10);
        }
        if enc == ClockEncoding::Binary {
            for (a, ma) in ms.iter().enumerate() {
                for mb in ms.iter().skip(a + 2) {
                    assert!((ma * mb).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn w_rotation_gives_free_chain() {
    let c = Circuit::new(2, vec![h(0), Gate::CN { control: 0, target: 1 }, Gate::LocalRotation { qubit: 1, axis: [0.0, 1.0, 0.0], theta: 0.4 }]).unwrap();
    let l = c.len();
    let enc = ClockEncoding::Unary;
    let ch = clock_hamiltonian(&c, 1.0, 1.0, 0, enc).unwrap();
    let prop = dense(&ch.h_prop);
    let cq = ch.clock_qubits();
    let valid: Vec<usize> = (0..4).flat_map(|s| (0..=l).map(move |t| s << cq | enc.clock_index(l, t))).collect();
    // W = Σ_t U_t⋯U_1 ⊗ |t⟩⟨t| on the valid clock states.
    let mut w = CMatrix::zeros(prop.nrows(), prop.ncols());
    for t in 0..=l {
        let u = prefix(&c, t).unitary().unwrap();
        let ci = enc.clock_index(l, t);
        for a in 0..4 {
            for b in 0..4 {
                w[(a << cq | ci, b << cq | ci)] = u[(a, b)];
            }
        }
    }
    let rotated = w.adjoint() * &prop * &w;
    for &r in &valid {
        for &s in &valid {
            let (sr, tr) = (r >> cq, (0..=l).find(|&t| enc.clock_index(l, t) == r & ((1 << cq) - 1)).unwrap());
            let (ss, ts) = (s >> cq, (0..=l).find(|&t| enc.clock_index(l, t) == s & ((1 << cq) - 1)).unwrap());
            let chain = if sr != ss {
                0.0
            } else if tr == ts {
                if tr == 0 || tr == l { 0.5 } else { 1.0 }
            } else if tr.abs_diff(ts) == 1 {
                -0.5
            } else {
                0.0
            };
            assert!((rotated[(r, s)] - cx(chain, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn input_term_lifts_degeneracy() {
    let c = Circuit::new(2, vec![h(0), h(1), Gate::CN { control: 1, target: 0 }]).unwrap();
    let ch = clock_hamiltonian(&c, 1.0, 1.0, 0, ClockEncoding::Binary).unwrap();
    let without = eigvalsh(&dense(&ch.h_prop.scaled(ch.k).plus(&ch.h_clock.scaled(ch.j))));
    assert_eq!(without.iter().filter(|v| v.abs() < 1e-9).count(), 4);
    let with = eigvalsh(&dense(&ch.total()));
    assert_eq!(with.iter().filter(|v| v.abs() < 1e-9).count(), 1);
}

#[test]
fn clock_init_pins_time_zero() {
    let c = Circuit::new(1, vec![h(0), h(0)]).unwrap();
    let ch = clock_hamiltonian_for_input(&c, 1, 2.0, 1.0, 0, ClockEncoding::Unary).unwrap();
    let (g, gap) = ground(&dense(&ch.initial().unwrap()));
    assert!(gap > 1.0);
    let mut expect = vec![cx(0.0, 0.0); 8];
    expect[0b100] = cx(1.0, 0.0);
    assert!(fidelity(&g, &expect) > 1.0 - 1e-12);
    assert!(clock_hamiltonian(&c, 1.0, 1.0, 0, ClockEncoding::Binary).unwrap().initial().is_none());
}

#[test]
fn binary_cardinality_quadratic() {
    for l in [3usize, 7, 12, 20] {
        let c = Circuit::new(1, vec![h(0); l]).unwrap();
        let ch = clock_hamiltonian(&c, 1.0, 1.0, 0, ClockEncoding::Binary).unwrap();
        assert!(ch.h_prop.cardinality() <= 4 * (l + 1) * (l + 1), "L = {l}: {}", ch.h_prop.cardinality());
        assert_eq!(ch.clock_qubits(), (l as f64 + 1.0).log2().ceil() as usize);
    }
}

#[test]
fn chain_spectrum_matches_cosines() {
    let g = gap_analysis(1, 1.0, 1.0).unwrap();
    assert!(max_dev(&g.prop_spectrum, &[0.0, 0.0, 1.0, 1.0]) < 1e-12);
    let g = gap_analysis(3, 1.0, 1.0).unwrap();
    assert!((g.prop_spectrum[2] - (1.0 - (PI / 4.0).cos())).abs() < 1e-12);
    for l in 1..=8 {
        let g = gap_analysis(l, 1.0, 1.0).unwrap();
        assert!(g.max_deviation < 1e-10);
        // The first excited chain mode on the correct input is always available.
        assert!(g.gap_exact <= chain_eigenvalues(l)[1] + 1e-10);
    }
}

#[test]
fn overlap_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for m in 0..6 {
        let c = random_circuit(3, 1 + m % 3, 1, &mut rng).unwrap();
        let got = acceptance_overlap(&c, m).unwrap();
        assert!((got - acceptance_closed_form(c.len(), m)).abs() < 1e-10);
    }
    let c = Circuit::new(1, vec![h(0)]).unwrap();
    assert!((acceptance_overlap(&c, 2).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn printed_y_identity_is_shifted() {
    let theta = PI / 3.0;
    let y = |a: f64| CMatrix::from_row_slice(2, 2, &[cx(a.cos(), 0.0), cx(a.sin(), 0.0), cx(-a.sin(), 0.0), cx(a.cos(), 0.0)]);
    // R(π/2)R(θ) rotates by θ − π/2 about Y.
    assert!((sigma(r_axis(PI / 2.0)) * sigma(r_axis(theta)) - y(theta - PI / 2.0)).norm() < 1e-12);
    let c = Circuit::new(1, vec![Gate::LocalRotation { qubit: 0, axis: [0.0, 1.0, 0.0], theta: -theta }]).unwrap();
    let out = self_inverse_compile(&c).unwrap();
    let axes: Vec<[f64; 3]> = out
        .gates()
        .iter()
        .map(|g| match g {
            Gate::Reflection { axis, .. } => *axis,
            other => panic!("unexpected {other:?}"),
        })
        .collect();
    assert_eq!(axes.len(), 2);
    let target = r_axis(theta + PI / 2.0);
    assert!((0..3).all(|i| (axes[0][i] - target[i]).abs() < 1e-12));
    assert!((0..3).all(|i| (axes[1][i] - r_axis(PI / 2.0)[i]).abs() < 1e-12));
    assert!((sigma(axes[1]) * sigma(axes[0]) - y(theta)).norm() < 1e-12);
}

#[test]
fn compiled_circuits_are_self_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let mut c = random_circuit(3, 8, 4, &mut rng).unwrap();
        c.push(Gate::Fixed { gate: FixedGate::Pdg, qubit: 2 }).unwrap();
        c.push(Gate::Fixed { gate: FixedGate::Y, qubit: 0 }).unwrap();
        let out = self_inverse_compile(&c).unwrap();
        assert!(out.len() <= 3 * c.len());
        for g in out.gates() {
            let u = Circuit::new(3, vec![g.clone()]).unwrap().unitary().unwrap();
            assert!((&u - u.adjoint()).norm() < 1e-10);
            assert!((&u * &u - CMatrix::identity(8, 8)).norm() < 1e-10);
        }
        assert!(equal_up_to_phase(&out.unitary().unwrap(), &c.unitary().unwrap()) < 1e-10);
    }
    let cn = Circuit::new(2, vec![Gate::CN { control: 0, target: 1 }]).unwrap();
    assert_eq!(self_inverse_compile(&cn).unwrap(), cn);
    let bad = Circuit::new(2, vec![Gate::ControlledPhase { controls: vec![0, 1], phase: 0.3 }]).unwrap();
    assert!(matches!(self_inverse_compile(&bad), Err(Error::UnsupportedGate(_))));
}

#[test]
fn two_reflections_make_a_universal_gate() {
    let phi = 0.9;
    let c = Circuit::new(2, vec![r_ij(0, 1, PI / 2.0), r_ij(0, 1, phi)]).unwrap();
    let u = c.unitary().unwrap();
    assert!((u.adjoint() * &u - CMatrix::identity(4, 4)).norm() < 1e-12);
    assert!((&u - u.adjoint()).norm() > 0.1);
    let cn = Circuit::new(2, vec![Gate::CN { control: 0, target: 1 }]).unwrap().unitary().unwrap();
    let r = Circuit::new(2, vec![r_ij(0, 1, PI / 2.0)]).unwrap().unitary().unwrap();
    assert!((cn - r).norm() < 1e-12);
}

#[test]
fn realified_phase_gate_blocks() {
    for k in 1..6 {
        let r = realify_gate(&phase_gate(k)).unwrap();
        let (s, c) = (2.0 * PI / 2f64.powi(k as i32)).sin_cos();
        // |0⟩⟨0| ⊗ 𝟙 + cos|1⟩⟨1| ⊗ 𝟙 + sin|1⟩⟨1| ⊗ (|1⟩⟨0| − |0⟩⟨1|)
        let expect = nalgebra::DMatrix::from_row_slice(4, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, c, -s, 0.0, 0.0, s, c]);
        assert!((r - expect).norm() < 1e-14);
    }
}

#[test]
fn report_json_fields() {
    let c = Circuit::new(1, vec![h(0)]).unwrap();
    let r = clock_report(&c, 1.0, 1.0, 2, ClockEncoding::Binary).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["L", "M", "encoding", "cardinality", "gap_exact", "gap_bound", "overlap"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["L"], 3);
    assert_eq!(v["encoding"], "binary");
    assert!((r.overlap - 0.5).abs() < 1e-12);
}

fn unitary_2x2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
    let e = cx(0.0, a).exp();
    let (s, co) = b.sin_cos();
    let u = CMatrix::from_row_slice(2, 2, &[cx(co, 0.0) * cx(0.0, c).exp(), cx(s, 0.0) * cx(0.0, d).exp(), -cx(s, 0.0) * cx(0.0, -d).exp(), cx(co, 0.0) * cx(0.0, -c).exp()]);
    u * e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realify_round_trip(a in -PI..PI, b in -PI..PI, c in -PI..PI, d in -PI..PI, re in prop::array::uniform4(-1.0f64..1.0)) {
        let u = unitary_2x2(a, b, c, d);
        let r = realify_gate(&u).unwrap();
        prop_assert!((r.transpose() * &r - nalgebra::DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);
        let psi = [cx(re[0], re[1]), cx(re[2], re[3])];
        let out = &r * nalgebra::DVector::from_vec(realify_encode(&psi));
        let back = realify_decode(out.as_slice());
        for i in 0..2 {
            let want = u[(i, 0)] * psi[0] + u[(i, 1)] * psi[1];
            prop_assert!((back[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_pairs_reproduce_rotations(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, theta in -PI..PI) {
        let norm = (x * x + y * y + z * z).sqrt();
        prop_assume!(norm > 1e-3);
        let axis = [x / norm, y / norm, z / norm];
        let (m1, m2) = rotation_reflections(axis, theta);
        let (s, c) = theta.sin_cos();
        let want = CMatrix::identity(2, 2) * cx(c, 0.0) - sigma(axis) * cx(0.0, s);
        prop_assert!((sigma(m2) * sigma(m1) - want).norm() < 1e-12);
    }
}
