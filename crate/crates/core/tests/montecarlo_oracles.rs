//! Monte Carlo output checked against exhaustive enumeration and exact
//! formulas.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use pairwise_core::montecarlo::trial_table;
use pairwise_core::theory::{
    connectivity_union_bound, isolation_event_prob, isolation_prob_exact, maxring_scaled_bound, r_gamma,
};
use pairwise_core::{
    run_keyring_census, run_sweep, ExperimentPlan, Gamma, KeyGraph, PairingTable, SchemeParams, SweepKind,
};

fn gammas(v: &[f64]) -> Vec<Gamma> {
    v.iter().map(|&g| Gamma::new(g).unwrap()).collect()
}

fn within_3se(p_hat: f64, p: f64, trials: usize) -> bool {
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    (p_hat - p).abs() <= 3.0 * se
}

/// Every table for n = 4, K = 1 (3^4 of them, all equally likely).
fn all_tables_n4() -> Vec<PairingTable> {
    let params = SchemeParams::new(4, 1).unwrap();
    (0..81u32)
        .map(|code| {
            let mut c = code;
            let sets: Vec<Vec<usize>> = (1..=4usize)
                .map(|i| {
                    let others: Vec<usize> = (1..=4).filter(|&j| j != i).collect();
                    let pick = others[(c % 3) as usize];
                    c /= 3;
                    vec![pick]
                })
                .collect();
            PairingTable::from_sets(params, &sets).unwrap()
        })
        .collect()
}

#[test]
fn exhaustive_n4_matches_monte_carlo() {
    let tables = all_tables_n4();
    let half = Gamma::new(0.5).unwrap();
    let connected = tables.iter().filter(|t| KeyGraph::build(t).full().is_connected()).count();
    let no_isolated_half = tables
        .iter()
        .filter(|t| KeyGraph::build(t).restrict_to(half).unwrap().count_isolated() == 0)
        .count();
    let p_connected = connected as f64 / 81.0;
    let p_no_isolated = no_isolated_half as f64 / 81.0;

    let trials = 100_000;
    let plan = ExperimentPlan::new(4, vec![1], gammas(&[0.5, 1.0]), trials, 4242);
    let sweep = run_sweep(&plan).unwrap();
    let mc_no_iso = sweep.cell(0.5, 1).unwrap().no_isolated.p_hat;
    let mc_connected = sweep.cell(1.0, 1).unwrap().connected.p_hat;
    assert!(within_3se(mc_connected, p_connected, trials), "{mc_connected} vs {p_connected}");
    assert!(within_3se(mc_no_iso, p_no_isolated, trials), "{mc_no_iso} vs {p_no_isolated}");

    // With m = 2 the view is one possible edge: no isolated node iff connected.
    assert_eq!(
        no_isolated_half,
        tables.iter().filter(|t| KeyGraph::build(t).restrict_to(half).unwrap().is_connected()).count()
    );
    // Node 1 and node 2 are each isolated with probability 4/9, jointly so
    // exactly when the edge {1, 2} is missing.
    assert_eq!(81 - no_isolated_half, 36);
    let e_iso = sweep.cell(0.5, 1).unwrap().isolated.mean();
    assert!((e_iso - 8.0 / 9.0).abs() < 0.02);
    assert!((isolation_prob_exact(4, 1, half).unwrap() - 4.0 / 9.0).abs() < 1e-15);
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// The isolation probability from exact rational arithmetic.
fn isolation_rational(n: usize, k: usize, m: usize) -> BigRational {
    let denom = binomial(n - 1, k);
    let first = BigRational::new(binomial(n - m, k).into(), denom.clone().into());
    let rest = BigRational::new(binomial(n - 2, k).into(), denom.into());
    (0..m - 1).fold(first, |acc, _| acc * rest.clone())
}

#[test]
fn isolation_formula_matches_rational_arithmetic() {
    for n in [4usize, 6, 10, 25, 60] {
        for k in 1..n.min(8) {
            for g in [0.25, 0.5, 0.75, 0.9] {
                let gamma = Gamma::new(g).unwrap();
                let m = gamma.retained(n);
                if m < 2 {
                    continue;
                }
                let exact = isolation_rational(n, k, m).to_f64().unwrap();
                let got = isolation_prob_exact(n, k, gamma).unwrap();
                if exact == 0.0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(((got - exact) / exact).abs() < 1e-12, "n={n} K={k} γ={g}");
                }
            }
        }
    }
}

#[test]
fn isolation_event_matches_frequency() {
    let (n, k, r) = (20, 2, 3);
    let gamma = Gamma::new(0.5).unwrap();
    let m = gamma.retained(n);
    let p = isolation_event_prob(n, k, gamma, r).unwrap();
    assert!(p > 0.0 && p < 1.0);
    let params = SchemeParams::new(n, k).unwrap();
    let trials = 1_000_000;
    let hits = (0..trials)
        .filter(|&t| {
            let table = trial_table(params, 99, t);
            KeyGraph::build(&table)
                .restrict_to(gamma)
                .unwrap()
                .edges()
                .iter()
                .all(|&(i, j)| !(i <= r && j > r && j <= m))
        })
        .count();
    let p_hat = hits as f64 / trials as f64;
    assert!(within_3se(p_hat, p, trials), "{p_hat} vs {p}");
}

#[test]
fn union_bound_dominates_observed_disconnection() {
    let (n, gamma) = (200, Gamma::new(0.5).unwrap());
    let plan = ExperimentPlan::new(n, vec![6, 8, 10], vec![gamma], 2000, 17);
    let sweep = run_sweep(&plan).unwrap();
    for cell in &sweep.cells {
        let bound = connectivity_union_bound(n, cell.k, gamma).unwrap();
        assert!(1.0 - cell.connected.ci_high <= bound, "K={}: bound {bound}", cell.k);
    }
}

#[test]
fn sweeps_reproduce_threshold_shape() {
    let plan = ExperimentPlan::new(1000, (1..=20).collect(), gammas(&[0.4]), 200, 2024);
    let sweep = run_sweep(&plan).unwrap();
    let conn = sweep.curve(SweepKind::Connected, 0.4);
    assert!(conn[3].1.p_hat < 0.15, "K=4: {}", conn[3].1.p_hat);
    assert!(conn[11].1.p_hat > 0.9, "K=12: {}", conn[11].1.p_hat);
    let threshold = r_gamma(0.4).unwrap() * 1000f64.ln() / 0.4;
    let iso = sweep.curve(SweepKind::NoIsolated, 0.4);
    let cross = iso.iter().find(|(_, e)| e.p_hat >= 0.5).unwrap().0 as f64;
    assert!((cross - threshold).abs() <= 2.0, "{cross} vs {threshold}");
}

#[test]
fn sweep_reproducible_across_runs_and_workers() {
    let plan = ExperimentPlan::new(500, vec![2, 5, 9], gammas(&[0.25, 0.5, 1.0]), 64, 31337);
    let a = run_sweep(&plan).unwrap();
    let b = run_sweep(&plan.clone().with_workers(3)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn ring_ratio_concentrates_as_n_grows() {
    let mut prev = f64::INFINITY;
    for (n, trials) in [(1_000, 200), (10_000, 20), (100_000, 2)] {
        let k = (3.0 * (n as f64).ln()).ceil() as usize;
        let census = run_keyring_census(n, k, trials, 8, None).unwrap();
        let outside = census.fraction_outside(0.8, 1.2);
        assert!(outside < prev, "n={n}: {outside} !< {prev}");
        prev = outside;
    }
}

#[test]
fn max_ring_deviation_below_scaled_bound() {
    for (n, trials) in [(1_000, 1000), (10_000, 200)] {
        let ln_n = (n as f64).ln();
        let k = (3.0 * ln_n).ceil() as usize;
        let census = run_keyring_census(n, k, trials, 5, None).unwrap();
        let freq = census.max_deviation_frequency(2.9 * ln_n);
        let bound = maxring_scaled_bound(n, 3.0, 2.9).unwrap();
        assert!(freq <= bound, "n={n}: {freq} > {bound}");
    }
}
