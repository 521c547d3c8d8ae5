//! End-to-end acceptance gates. Each test prints one PASS/FAIL line to the
//! real stderr, so the lines survive output capture.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use hamlab::circuit::{random_circuit, simulate, Circuit, FixedGate, Gate, TargetU};
use hamlab::clock::{acceptance_overlap, gap_analysis, projector_sum, telescope};
use hamlab::dense::{eigh, eigvalsh, realize_dense, CMatrix};
use hamlab::gadgets::{
    analytic_delta, loglog_slope, minimal_delta_search, subdivision_alpha_sweep, subdivision_with_delta, yy_gadget_with_delta,
    GadgetSpec,
};
use hamlab::optimize::OptimizerConfig;
use hamlab::reductions::{
    and_gadget, copy_gadget, cubic_product_gadget, realizes, synthesize_penalty, CubicVariant, InfeasibilityCertificate,
    Synthesis, TargetKernel,
};
use hamlab::variational::{
    area_law_check, canonical_angle, deficit_sweep, energy_overlap_bounds, gate_count, gate_count_closed,
    k_controlled_decompose, variational_grover, GroverMode,
};
use hamlab::walks::{
    build_generators, five_node_example, laplacian_gibbs, long_time_average, phase_estimate, random_connected_graph,
    sat_crossing, sat_sweep, stationary_state, subadditivity,
};
use hamlab::{OperatorSum, StateVector};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "acceptance {id:>2} {name:<28} {verdict}  {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn dense(op: &OperatorSum) -> CMatrix {
    realize_dense(op).unwrap().matrix
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn c01_variational_grover() {
    let start = Instant::now();
    let cfg = OptimizerConfig { restarts: 32, ..Default::default() };
    let n3 = variational_grover(3, 2, GroverMode::TwoLevel, &cfg);
    let n4 = variational_grover(4, 3, GroverMode::TwoLevel, &cfg);
    // Two-level angles are not unique; the tabulated angle is the shared
    // angle of the matched family, which reaches the same probability.
    let m3 = variational_grover(3, 2, GroverMode::Matched, &cfg);
    let angle = canonical_angle(m3.alpha[0]);
    let secs = start.elapsed().as_secs_f64();
    let pass = (n3.improvement_percent - 5.77).abs() <= 0.3
        && (n4.improvement_percent - 3.95).abs() <= 0.3
        && (angle - 2.12).abs() <= 0.05
        && (m3.probability - n3.probability).abs() < 1e-6
        && secs < 60.0;
    let detail = format!(
        "N=8 p=2 {:.3}%, N=16 p=3 {:.3}%, angle {angle:.4} rad, {secs:.1} s",
        n3.improvement_percent, n4.improvement_percent
    );
    report(1, "variational grover", pass, &detail);
}

#[test]
fn c02_subdivision_grid() {
    let start = Instant::now();
    let eps = 0.05;
    let delta = analytic_delta(1.0, eps, 0.0);
    let alphas: Vec<f64> = (0..41).map(|i| -1.0 + 0.05 * i as f64).collect();
    let rows = subdivision_alpha_sweep(&alphas, eps, delta, 21).unwrap();
    let worst = rows.iter().map(|r| r.max_spectral_error).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let pass = rows.iter().all(|r| r.max_spectral_error <= eps)
        && rows[0].max_spectral_error < eps
        && rows[40].max_spectral_error < eps
        && secs < 120.0;
    report(2, "subdivision grid", pass, &format!("Δ = {delta:.2}, worst error {worst:.4}, {secs:.1} s"));
}

const EPSILONS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];

#[test]
fn c03a_subdivision_gap_scaling() {
    let deltas: Vec<f64> = EPSILONS
        .iter()
        .map(|&eps| {
            let spec = GadgetSpec::zz(1.0, eps);
            let upper = analytic_delta(1.0, eps, 0.0);
            minimal_delta_search(&|d| subdivision_with_delta(&spec, d), eps, Some(upper)).unwrap().delta
        })
        .collect();
    let inv: Vec<f64> = EPSILONS.iter().map(|e| 1.0 / e).collect();
    let slope = loglog_slope(&inv, &deltas);
    report(3, "subdivision slope", (0.8..=1.2).contains(&slope), &format!("slope {slope:.3}, Δ_min {deltas:.1?}"));
}

#[test]
fn c03b_yy_gap_scaling() {
    let h = OperatorSum::zero(2);
    let deltas: Vec<f64> = EPSILONS
        .iter()
        .map(|&eps| minimal_delta_search(&|d| yy_gadget_with_delta(1.0, &h, d), eps, None).unwrap().delta)
        .collect();
    let inv: Vec<f64> = EPSILONS.iter().map(|e| 1.0 / e).collect();
    let slope = loglog_slope(&inv, &deltas);
    report(3, "yy slope", (3.5..=4.5).contains(&slope), &format!("slope {slope:.3}, Δ_min {:?}", deltas.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()));
}

#[test]
fn c04a_clock_chain_spectrum() {
    let worst = (1..=8).map(|l| gap_analysis(l, 1.0, 1.0).unwrap().max_deviation).fold(0.0, f64::max);
    report(4, "clock chain spectrum", worst <= 1e-10, &format!("max deviation {worst:.2e}"));
}

#[test]
fn c04b_clock_gap_bound() {
    let rows: Vec<_> = (1..=8).map(|l| gap_analysis(l, 1.0, 1.0).unwrap()).collect();
    let pass = rows.iter().all(|g| g.gap_exact >= g.gap_bound - 1e-9);
    let gaps: Vec<String> = rows.iter().map(|g| format!("L={} {:.4}<{:.4}", g.l, g.gap_exact, g.gap_bound)).collect();
    report(4, "clock gap bound", pass, &gaps.join(" "));
}

#[test]
fn c04c_clock_acceptance_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for l in 1..=6 {
        let c = random_circuit(2, l, l.min(2), &mut rng).unwrap();
        for m in [1, 2, 3, 4, 8, 16, 32, 64] {
            let got = acceptance_overlap(&c, m).unwrap();
            let want = 1.0 / (1.0 + (l + 1) as f64 / m as f64);
            worst = worst.max((got - want).abs());
            cases += 1;
        }
    }
    report(4, "clock acceptance overlap", worst <= 1e-10, &format!("{cases} (L, M) cases, max deviation {worst:.2e}"));
}

/// Identity with the all-controls block replaced by `phase·X`; controls are
/// qubits `0..k` and the target is qubit `k`, the last index bit.
fn direct_controlled_x(k: usize, phase: Complex64) -> CMatrix {
    let dim = 1usize << (k + 1);
    let mut m = CMatrix::identity(dim, dim);
    m[(dim - 2, dim - 2)] = cx(0.0);
    m[(dim - 1, dim - 1)] = cx(0.0);
    m[(dim - 2, dim - 1)] = phase;
    m[(dim - 1, dim - 2)] = phase;
    m
}

#[test]
fn c05_gate_counting() {
    let mut counts_ok = true;
    for k in 1..=1024usize {
        let g = gate_count(k);
        let k2 = (k * k) as u64;
        counts_ok &= g == gate_count_closed(k) && k2 <= g && 2 * g <= 5 * k2;
    }
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let d = k_controlled_decompose(k, TargetU::X).unwrap();
        let got = d.circuit.unitary().unwrap();
        worst = worst.max((got - direct_controlled_x(k, d.block_phase)).norm());
    }
    let detail = format!("g(k) checks {}, k ≤ 4 max deviation {worst:.2e}", if counts_ok { "ok" } else { "broken" });
    report(5, "gate counting", counts_ok && worst <= 1e-10, &detail);
}

/// Bit `i` of the mask is variable `i`.
fn mask(bits: &[u8]) -> u64 {
    bits.iter().enumerate().fold(0, |m, (i, &b)| m | (b as u64) << i)
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[test]
fn c06_exact_gadget_tables() {
    let delta = 3.0;
    let and = and_gadget(delta).unwrap();
    let rows: [[u8; 3]; 8] = [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1], [1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]];
    let expected = [0, 3, 0, 1, 0, 1, 1, 0];
    let and_ok = rows.iter().zip(expected).all(|(r, e)| and.energy(mask(r)) == rat(e * delta as i64));

    let copy_ok = copy_gadget().kernel() == BTreeSet::from([mask(&[0, 0, 0]), mask(&[1, 1, 1])]);

    let mut cubic_ok = true;
    for v in [CubicVariant::A, CubicVariant::B] {
        let p = cubic_product_gadget(v);
        for x in 0..8u64 {
            let prod = (x & 1) * (x >> 1 & 1) * (x >> 2 & 1);
            cubic_ok &= p.min_over_slack(x).0 == rat(-(prod as i64));
        }
    }
    let detail = format!("AND {and_ok}, COPY {copy_ok}, cubic {cubic_ok}");
    report(6, "exact gadget tables", and_ok && copy_ok && cubic_ok, &detail);
}

/// Rebuilds every pattern's system from the kernel and checks that the
/// multipliers cancel each monomial while the right-hand side stays positive.
fn farkas_holds(target: &TargetKernel, cert: &InfeasibilityCertificate) -> bool {
    let nl = target.n_logical;
    let ns = cert.n_slack;
    let n = nl + ns;
    let accepted: Vec<u64> = target.accepted.iter().copied().collect();
    let rejected: Vec<u64> = (0..1u64 << nl).filter(|x| !target.accepted.contains(x)).collect();
    let monomials: Vec<Vec<usize>> = std::iter::once(vec![])
        .chain((0..n).map(|i| vec![i]))
        .chain((0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])))
        .collect();
    let patterns = 1usize << (ns * accepted.len());
    if cert.refutations.len() != patterns {
        return false;
    }
    for refu in &cert.refutations {
        let mut rows: Vec<(u64, bool, BigRational)> = Vec::new();
        for (a, &sa) in accepted.iter().zip(&refu.choice) {
            for s in 0..1u64 << ns {
                rows.push((a | s << nl, s == sa, rat(0)));
            }
        }
        for &x in &rejected {
            for s in 0..1u64 << ns {
                rows.push((x | s << nl, false, target.delta.clone()));
            }
        }
        if rows.len() != refu.multipliers.len() {
            return false;
        }
        if rows.iter().zip(&refu.multipliers).any(|((_, eq, _), mu)| !eq && mu.is_negative()) {
            return false;
        }
        for mono in &monomials {
            let total: BigRational = rows
                .iter()
                .zip(&refu.multipliers)
                .filter(|((a, _, _), _)| mono.iter().all(|&v| a >> v & 1 == 1))
                .map(|(_, mu)| mu.clone())
                .sum();
            if !total.is_zero() {
                return false;
            }
        }
        let rhs: BigRational = rows.iter().zip(&refu.multipliers).map(|((_, _, b), mu)| b * mu).sum();
        if !rhs.is_positive() {
            return false;
        }
    }
    true
}

#[test]
fn c07_xor_synthesis() {
    // z = x XOR y over (x, y, z)
    let k = TargetKernel::from_predicate(3, |x| (x >> 2 & 1) == ((x ^ x >> 1) & 1)).unwrap();
    let refuted = match synthesize_penalty(&k, 0).unwrap() {
        Synthesis::Infeasible(cert) => cert.verify(&k) && farkas_holds(&k, &cert),
        Synthesis::Feasible(_) => false,
    };
    let mediated = match synthesize_penalty(&k, 1).unwrap() {
        Synthesis::Feasible(p) => {
            let exhaustive = (0..8u64).all(|x| {
                let (e, _) = p.min_over_slack(x);
                if k.accepted.contains(&x) {
                    e.is_zero()
                } else {
                    e >= k.delta
                }
            });
            realizes(&p, &k) && exhaustive
        }
        Synthesis::Infeasible(_) => false,
    };
    report(7, "xor penalty synthesis", refuted && mediated, &format!("no-slack refuted {refuted}, one mediator {mediated}"));
}

#[test]
fn c08_sat_transition() {
    let start = Instant::now();
    let alphas: Vec<f64> = (0..=16).map(|i| 2.0 + 0.25 * i as f64).collect();
    let rows = sat_sweep(16, &alphas, 200, &[3.0], 7).unwrap();
    let crossing = sat_crossing(&rows);
    let p_at = |a: f64| rows.iter().find(|r| (r.alpha - a).abs() < 1e-12).unwrap().mean_p;
    let drop = p_at(2.0) - p_at(6.0);
    let monotone = rows.windows(2).all(|w| w[1].mean_p <= w[0].mean_p + 2.0 * (w[0].stderr_p + w[1].stderr_p));
    let secs = start.elapsed().as_secs_f64();
    let in_window = crossing.is_some_and(|c| (3.5..=5.5).contains(&c));
    let pass = in_window && drop >= 0.2 && monotone && secs < 600.0;
    let detail = format!(
        "crossing {crossing:.3?}, p(2) = {:.3}, p(6) = {:.3}, drop {drop:.3}, monotone {monotone}, {secs:.1} s",
        p_at(2.0),
        p_at(6.0)
    );
    report(8, "sat transition", pass, &detail);
}

#[test]
fn c09_subadditivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let mut props = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(2..=12);
        let la = random_connected_graph(n, 0.3, &mut rng).laplacian();
        let lb = random_connected_graph(n, 0.3, &mut rng).laplacian();
        let beta = rng.random_range(0.05..5.0);
        let s = subadditivity(&la, &lb, beta).unwrap();
        worst = worst.max(s.excess);
        if s.excess > 1e-9 {
            violations += 1;
        }
        for l in [&la, &lb, &(&la + &lb)] {
            let g = laplacian_gibbs(l, beta).unwrap();
            if g.trace_l_rho < -1e-10 || g.log2_z < 0.0 {
                props += 1;
            }
        }
    }
    let detail = format!("{violations} violations, {props} trace/partition failures, max excess {worst:.3e}");
    report(9, "subadditivity", violations == 0 && props == 0, &detail);
}

/// Riemann time average of `|⟨j|e^{−iQt}ψ⟩|²`, stepping with a Padé exponential.
fn numeric_time_average(q: &DMatrix<f64>, psi0: &[Complex64], t_max: f64, dt: f64) -> Vec<f64> {
    let step = (q.map(cx) * Complex64::new(0.0, -dt)).exp();
    let mut psi = DVector::from_column_slice(psi0);
    let steps = (t_max / dt).round() as usize;
    let mut acc = vec![0.0; psi0.len()];
    for _ in 0..steps {
        for (a, z) in acc.iter_mut().zip(psi.iter()) {
            *a += z.norm_sqr();
        }
        psi = &step * psi;
    }
    acc.iter().map(|a| a / steps as f64).collect()
}

#[test]
fn c10_walks() {
    let gen = build_generators(&five_node_example()).unwrap();
    let pi = stationary_state(&gen);
    let stationary_dev = max_dev(&pi, &[1.0 / 6.0, 1.0 / 6.0, 0.25, 0.25, 1.0 / 6.0]);

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut iso = 0.0f64;
    for g in std::iter::once(five_node_example()).chain((0..20).map(|_| {
        let n = rng.random_range(2..10);
        random_connected_graph(n, 0.3, &mut rng)
    })) {
        let gen = build_generators(&g).unwrap();
        let mut s: Vec<f64> = gen.s.complex_eigenvalues().iter().map(|z| z.re).collect();
        s.sort_by(f64::total_cmp);
        let mut q: Vec<f64> = gen.q.symmetric_eigenvalues().iter().copied().collect();
        q.sort_by(f64::total_cmp);
        iso = iso.max(max_dev(&s, &q));
    }

    let mut psi = vec![cx(0.0); 5];
    psi[0] = cx(1.0);
    let lta = long_time_average(&gen, &psi).unwrap();
    let numeric = numeric_time_average(&gen.q, &psi, 1e4, 0.05);
    let lta_dev = max_dev(&lta.p, &numeric);

    let pass = stationary_dev <= 1e-12 && iso <= 1e-10 && lta_dev <= 2e-3;
    let detail = format!("stationary {stationary_dev:.1e}, S/Q spectra {iso:.1e}, time average {lta_dev:.1e}");
    report(10, "walks", pass, &detail);
}

#[test]
fn c11_reachability_deficit() {
    let cfg = OptimizerConfig { restarts: 16, seed: 11, ..Default::default() };
    let rows = deficit_sweep(6, &[1.0, 8.0], &[1, 2, 3], 20, 11, &cfg).unwrap();
    let at = |a: f64, p: usize| rows.iter().find(|r| (r.alpha - a).abs() < 1e-12 && r.p == p).unwrap();
    let low = at(1.0, 1).mean_f;
    let high = at(8.0, 1).mean_f;
    let nonincreasing = [1.0, 8.0].iter().all(|&a| {
        (1..3).all(|p| {
            let (x, y) = (at(a, p), at(a, p + 1));
            y.mean_f <= x.mean_f + x.stderr + y.stderr
        })
    });
    let summary: Vec<String> = rows.iter().map(|r| format!("f({},{})={:.4}", r.alpha, r.p, r.mean_f)).collect();
    let pass = low < 0.05 && high > 0.1 && nonincreasing;
    report(11, "reachability deficit", pass, &format!("{} nonincreasing {nonincreasing}", summary.join(" ")));
}

fn prefix(c: &Circuit, k: usize) -> Circuit {
    Circuit::new(c.n(), c.gates()[..k].to_vec()).unwrap()
}

fn random_word(n: usize, rng: &mut ChaCha8Rng) -> String {
    (0..n).map(|_| *['I', 'X', 'Y', 'Z'].choose(rng).unwrap()).collect()
}

#[test]
fn c12_telescoping_and_overlap() {
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p0 = dense(&projector_sum(n));
    let reference = eigvalsh(&p0);
    let mut iso = 0.0f64;
    let mut fid = 1.0f64;
    let mut circuits = Vec::new();
    for _ in 0..50 {
        let c = random_circuit(n, 14, rng.random_range(0..=3), &mut rng).unwrap();
        for k in 0..=c.len() {
            let hk = dense(&telescope(&c, k).unwrap().op);
            iso = iso.max(max_dev(&eigvalsh(&hk), &reference));
            let e = eigh(&hk);
            let out = simulate(&prefix(&c, k), &StateVector::zero(n)).unwrap();
            let overlap: Complex64 = e.vectors.column(0).iter().zip(out.amplitudes()).map(|(g, o)| g.conj() * o).sum();
            fid = fid.min(overlap.norm_sqr());
        }
        circuits.push(c);
    }

    // Sandwich trials: perturbed telescoped operators, probed with the
    // unperturbed prefix output.
    let mut held = 0;
    for trial in 0..100 {
        let c = &circuits[trial % circuits.len()];
        let k = rng.random_range(0..=c.len());
        let mut h = telescope(c, k).unwrap().op;
        for _ in 0..4 {
            h.add_word(rng.random_range(-0.08..0.08), &random_word(n, &mut rng)).unwrap();
        }
        let phi = simulate(&prefix(c, k), &StateVector::zero(n)).unwrap();
        if let Ok(b) = energy_overlap_bounds(&h, &phi) {
            if b.lower <= b.exact + 1e-12 && b.exact <= b.upper + 1e-12 {
                held += 1;
            }
        }
    }
    let pass = iso <= 1e-9 && fid >= 1.0 - 1e-9 && held == 100;
    let detail = format!("spectral deviation {iso:.1e}, min fidelity 1 - {:.1e}, sandwich {held}/100", 1.0 - fid);
    report(12, "telescoping and overlap", pass, &detail);
}

#[test]
fn c13_phase_estimation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..20 {
        let mut h = OperatorSum::zero(3);
        for w in ["ZII", "IZI", "IIZ", "ZZI", "IZZ", "ZIZ", "ZZZ"] {
            h.add_word(rng.random_range(-1.0..1.0), w).unwrap();
        }
        for (x, &lambda) in h.diagonal().iter().enumerate() {
            match phase_estimate(&h, &StateVector::basis(3, x), None) {
                Ok(est) => worst = worst.max((est.lambda - lambda).abs()),
                Err(_) => failures += 1,
            }
        }
    }
    let pass = worst <= 1e-3 && failures == 0;
    report(13, "phase estimation", pass, &format!("160 eigenvalues, max error {worst:.2e}, {failures} failures"));
}

/// `layers` rounds of random single-qubit rotations followed by CNOTs on a
/// random pairing.
fn layered_circuit(n: usize, layers: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut gates = Vec::new();
    for _ in 0..layers {
        for q in 0..n {
            let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            gates.push(Gate::LocalRotation { qubit: q, axis: v.map(|x| x / norm), theta: rng.random_range(0.0..PI) });
        }
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(rng);
        for pair in qs.chunks(2).filter(|p| p.len() == 2) {
            gates.push(Gate::CN { control: pair[0], target: pair[1] });
        }
    }
    if gates.is_empty() {
        gates.push(Gate::Fixed { gate: FixedGate::H, qubit: 0 });
    }
    Circuit::new(n, gates).unwrap()
}

#[test]
fn c14_area_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut circuits = 0;
    let mut cuts = 0;
    let mut violations = 0;
    let mut tight = 0;
    let mut first = None;
    for n in 2..=8 {
        for layers in 0..=12 {
            for _ in 0..3 {
                let rep = area_law_check(&layered_circuit(n, layers, &mut rng)).unwrap();
                circuits += 1;
                cuts += rep.cuts_checked;
                violations += rep.violations.len();
                if first.is_none() && !rep.violations.is_empty() {
                    first = Some(format!("n={n} c={} cut {:?} at {:.2} ebits", rep.c, rep.violations[0], rep.max_ebits));
                }
                if rep.max_ebits > rep.bound - 1e-3 && rep.bound > 0.0 {
                    tight += 1;
                }
            }
        }
    }
    let mut detail = format!("{circuits} circuits, {cuts} bipartitions, {violations} violations, {tight} near the bound");
    if let Some(f) = first {
        detail.push_str(&format!(", first: {f}"));
    }
    report(14, "area law", violations == 0, &detail);
}
