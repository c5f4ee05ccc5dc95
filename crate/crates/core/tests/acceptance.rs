//! Acceptance gate: runs every criterion and prints one line per criterion.
//!
//! Runs without the libtest harness so the lines appear in the test log;
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qhmetric::chain::{build_chain, lemma1_observable, verify_chain, verify_theorem1, ObservableChain};
use qhmetric::dieudonne::{check_quasi_hermitian, metric_from_weights, solve_metric_space, span_distance, DEFAULT_TOL};
use qhmetric::evolution::{norm_trajectory, propagate, propagate_dual, uniform_times};
use qhmetric::matrix::ComplexMatrix;
use qhmetric::models::{parity, pt_chain, random_qh, sweep_exceptional, toy_2x2, toy_metric};
use qhmetric::random::SeededRng;
use qhmetric::spectral::eigenvalues;
use qhmetric::symmetry::check_pct_symmetry;

const SEEDS_PER_CELL: u64 = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Chain from the random protocol: `random_qh` Hamiltonian, metric with
/// random positive weights, random Hermitian invertible parameters.
fn random_chain(n: usize, dim: usize, seed: u64) -> ObservableChain {
    let (h, _) = random_qh(dim, seed).expect("random_qh");
    let family = solve_metric_space(&h, DEFAULT_TOL).expect("metric space");
    let mut rng = SeededRng::new(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (n as u64) << 8 ^ dim as u64);
    let theta = metric_from_weights(&family, &rng.weights(dim)).expect("metric");
    let params: Vec<ComplexMatrix> = (1..n).map(|_| rng.hermitian_invertible(dim)).collect();
    build_chain(&h, &theta, &params).expect("chain")
}

fn all_chains() -> Vec<(usize, usize, u64, ObservableChain)> {
    let cells: Vec<(usize, usize)> = (1..=5).flat_map(|n| (2..=8).map(move |dim| (n, dim))).collect();
    std::thread::scope(|s| {
        let workers: Vec<_> = cells
            .iter()
            .map(|&(n, dim)| {
                s.spawn(move || {
                    (0..SEEDS_PER_CELL)
                        .map(|seed| (n, dim, seed, random_chain(n, dim, seed)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("chain worker")).collect()
    })
}

fn criterion1(chains: &[(usize, usize, u64, ObservableChain)]) -> Outcome {
    let (mut worst_qh, mut worst_im) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for (_, _, _, chain) in chains {
        let mut ok = true;
        for lk in chain.observables() {
            let qh = check_quasi_hermitian(lk, chain.theta()).unwrap();
            let im = eigenvalues(lk).iter().map(|z| z.im.abs()).fold(0.0, f64::max) / lk.norm();
            worst_qh = worst_qh.max(qh);
            worst_im = worst_im.max(im);
            ok &= qh <= 1e-8 && im <= 1e-8;
        }
        failures += usize::from(!ok);
    }
    outcome(
        failures == 0,
        format!(
            "{} chains, max QH residual {worst_qh:.2e} (≤ 1e-8), max |Im λ|/‖Λ‖ {worst_im:.2e} (≤ 1e-8), {failures} failing",
            chains.len()
        ),
    )
}

fn expected_failures(n: usize, j: usize) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    set.insert("kamenK".to_string());
    for k in 1..n.min(j + 1) {
        set.insert(qhmetric::chain::ladder_label(n, k));
    }
    if j == n {
        set.insert(qhmetric::chain::top_factor_label(n).to_string());
    }
    for i in 1..n.min(j + 1) {
        set.insert(format!("hermitian({})", qhmetric::chain::suffix_name(n, i)));
    }
    set
}

fn criterion2(chains: &[(usize, usize, u64, ObservableChain)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut clean_failures = 0;
    for (_, _, _, chain) in chains {
        let report = verify_chain(chain, 1e-9);
        worst = worst.max(report.max_residual());
        clean_failures += usize::from(!report.overall_pass);
    }
    let mut injections = 0;
    let mut mismatches = Vec::new();
    for (n, dim, seed, chain) in chains.iter().filter(|c| c.2 < 4) {
        for j in 1..=*n {
            let mut corrupted = chain.clone();
            let mut rng = SeededRng::new(1000 + seed * 10 + j as u64);
            let noise = rng.matrix(*dim);
            let z = chain.factor(j);
            let delta = noise.scale_real(1e-3 * z.norm() / noise.norm());
            corrupted.replace_factor(j, z + &delta);
            let report = verify_chain(&corrupted, 1e-9);
            let got: BTreeSet<String> = report.failing().into_iter().map(String::from).collect();
            let want = expected_failures(*n, j);
            injections += 1;
            if got != want {
                mismatches.push(format!("N={n} dim={dim} seed={seed} j={j}: got {got:?}, want {want:?}"));
            }
        }
    }
    let pass = clean_failures == 0 && mismatches.is_empty();
    let mut detail = format!(
        "{} clean chains max residual {worst:.2e} (≤ 1e-9); {injections} corruptions, {} mismatched",
        chains.len(),
        mismatches.len()
    );
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(pass, detail)
}

fn criterion3() -> Outcome {
    let h = toy_2x2(2.0).unwrap();
    let p = parity(2).unwrap();
    let theta = toy_metric(2.0);
    let chain = build_chain(&h, &theta, std::slice::from_ref(&p)).unwrap();
    let expected_c = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap();
    let c = chain.factor(1);
    let c_err = (c - &expected_c).max_abs();
    let lambda_err = (chain.observable(1) - &expected_c).max_abs();
    let uhols = verify_theorem1(&chain, 1e-12).get("uhols").unwrap().residual;
    let pct = check_pct_symmetry(&h, &p, c).unwrap();
    let pass = c_err <= 1e-12 && lambda_err <= 1e-12 && uhols <= 1e-12 && pct <= 1e-12;
    outcome(
        pass,
        format!("|C − [[0,1],[4,0]]| {c_err:.2e}, |Λ₁ − C| {lambda_err:.2e}, uhols {uhols:.2e}, PCT {pct:.2e} (all ≤ 1e-12)"),
    )
}

fn criterion4() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad_rank = Vec::new();
    for i in 0..20u64 {
        let dim = 2 + (i % 5) as usize;
        let (h, _) = random_qh(dim, 4000 + i).unwrap();
        let family = solve_metric_space(&h, DEFAULT_TOL).unwrap();
        if family.oracle_basis.len() != dim || family.degenerate {
            bad_rank.push((dim, family.oracle_basis.len()));
            continue;
        }
        worst = worst.max(span_distance(&family.oracle_basis, &family.basis));
    }
    outcome(
        bad_rank.is_empty() && worst <= 1e-8,
        format!("20 systems dim 2–6, rank mismatches {bad_rank:?}, max span distance {worst:.2e} (≤ 1e-8)"),
    )
}

struct Triple {
    h: ComplexMatrix,
    theta: ComplexMatrix,
    psi0: qhmetric::CVector,
}

fn triples() -> Vec<Triple> {
    (0..20u64)
        .map(|i| {
            let dim = 2 + (i % 5) as usize;
            let (h, _) = random_qh(dim, 5000 + i).unwrap();
            let family = solve_metric_space(&h, DEFAULT_TOL).unwrap();
            let mut rng = SeededRng::new(6000 + i);
            let theta = metric_from_weights(&family, &rng.weights(dim)).unwrap();
            let psi0 = rng.state(dim);
            Triple { h, theta, psi0 }
        })
        .collect()
}

fn criterion5(triples: &[Triple]) -> Outcome {
    let times = uniform_times(10.0, 101);
    let mut worst = 0.0f64;
    for t in triples {
        worst = worst.max(norm_trajectory(&t.h, &t.theta, &t.psi0, &times).unwrap().norm_drift);
    }
    let h = toy_2x2(2.0).unwrap();
    let psi0 = qhmetric::matrix::real_vector(&[1.0, 0.0]);
    let control = norm_trajectory(&h, &ComplexMatrix::identity(2), &psi0, &times).unwrap().norm_drift;
    outcome(
        worst <= 1e-8 && control >= 1e-2,
        format!("20 triples max drift {worst:.2e} (≤ 1e-8); control Θ = I drift {control:.2e} (≥ 1e-2)"),
    )
}

fn criterion6(triples: &[Triple]) -> Outcome {
    let mut worst = 0.0f64;
    for tr in triples {
        for &t in &uniform_times(10.0, 101) {
            let dual = propagate_dual(&tr.h, &tr.theta, &tr.psi0, t).unwrap();
            let direct = tr.theta.mul_vec(&propagate(&tr.h, &tr.psi0, t).unwrap()).unwrap();
            worst = worst.max(relative((&dual - &direct).norm(), direct.norm()));
        }
    }
    outcome(worst <= 1e-9, format!("20 triples × 101 times, max relative difference {worst:.2e} (≤ 1e-9)"))
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let res = sweep_exceptional(|g| pt_chain(2, g), 0.0, 2.0, 21, 1e-9).unwrap();
    let elapsed = start.elapsed();
    let est = res.critical_estimate;
    let err = est.map_or(f64::INFINITY, |g| (g - 1.0).abs());
    outcome(
        err <= 1e-5 && elapsed < Duration::from_secs(5),
        format!(
            "γ_c = {} (|γ_c − 1| = {err:.2e} ≤ 1e-5) in {:.3} s (< 5 s)",
            est.map_or("none".into(), |g| format!("{g:.9}")),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion8() -> Outcome {
    let (mut worst_herm, mut least_non) = (0.0f64, f64::INFINITY);
    for i in 0..100u64 {
        let dim = 2 + (i % 5) as usize;
        let (_, theta) = random_qh(dim, 7000 + i).unwrap();
        let mut rng = SeededRng::new(8000 + i);
        let m = rng.hermitian(dim);
        let lambda = lemma1_observable(&m, &theta).unwrap();
        worst_herm = worst_herm.max(check_quasi_hermitian(&lambda, &theta).unwrap());
        let g = rng.matrix(dim);
        least_non = least_non.min(check_quasi_hermitian(&(&g * &theta), &theta).unwrap());
    }
    outcome(
        worst_herm <= 1e-10 && least_non > 1e-4,
        format!("Hermitian M max residual {worst_herm:.2e} (≤ 1e-10); non-Hermitian M min residual {least_non:.2e} (> 1e-4)"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((id, name, o, start.elapsed()));
    };

    // criterion 1 is timed including chain construction
    let start = Instant::now();
    let chains = all_chains();
    timed(1, "observability of every Λ_k", &mut || {
        let mut o = criterion1(&chains);
        let total = start.elapsed();
        o.pass &= total < Duration::from_secs(60);
        o.detail.push_str(&format!(", {:.1} s incl. construction (< 60 s)", total.as_secs_f64()));
        o
    });
    timed(2, "ladder relations and corruption", &mut || criterion2(&chains));
    timed(3, "N = 2 toy reduction", &mut criterion3);
    timed(4, "metric-space dimension", &mut criterion4);
    let triples = triples();
    timed(5, "unitarity", &mut || criterion5(&triples));
    timed(6, "dual-equation identity", &mut || criterion6(&triples));
    timed(7, "exceptional-point sweep", &mut criterion7);
    timed(8, "Hermitian-parameter observables", &mut criterion8);

    let mut all = true;
    for (id, name, o, elapsed) in &results {
        all &= o.pass;
        println!(
            "criterion {id} {:<4} {name}: {} [{:.2} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
