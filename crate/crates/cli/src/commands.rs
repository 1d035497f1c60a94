use std::io::Write;

use pairwise_core::theory;
use pairwise_core::{
    run_keyring_census, run_phased_experiment, run_sweep, ExperimentPlan, Gamma, KeyGraph, PairingTable,
    SchemeParams, SweepKind,
};
use serde::Serialize;

use crate::args::{CensusArgs, Command, EdgesArgs, Format, PairingArgs, PhasedArgs, SweepArgs, TheoryArgs};
use crate::format::num;
use crate::{open_output, CliError};

pub(crate) fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Phased(a) => cmd_phased(a),
        Command::Census(a) => cmd_census(a),
        Command::Theory(a) => cmd_theory(a),
        Command::Pairing(a) => cmd_pairing(a),
        Command::Edges(a) => cmd_edges(a),
    }
}

fn workers(w: Option<u64>) -> Option<usize> {
    w.map(|w| w as usize)
}

#[derive(Serialize)]
struct SweepRow {
    kind: SweepKind,
    gamma: f64,
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    trials: u64,
    successes: u64,
    p_hat: f64,
    ci_low: f64,
    ci_high: f64,
}

pub const SWEEP_HEADER: [&str; 9] = ["kind", "gamma", "K", "n", "trials", "successes", "p_hat", "ci_low", "ci_high"];

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    let mut plan = ExperimentPlan::new(a.n, a.k.0, a.gamma.0, a.trials, a.run.seed);
    plan.workers = workers(a.run.workers);
    plan.validate()?;
    let result = run_sweep(&plan)?;

    let mut rows = Vec::with_capacity(2 * result.cells.len());
    for kind in [SweepKind::Connected, SweepKind::NoIsolated] {
        for cell in &result.cells {
            let e = cell.estimate(kind);
            rows.push(SweepRow {
                kind,
                gamma: cell.gamma.value(),
                k: cell.k,
                n: result.n,
                trials: e.trials,
                successes: e.successes,
                p_hat: e.p_hat,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
            });
        }
    }

    let mut out = open_output(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(SWEEP_HEADER)?;
            for r in &rows {
                w.write_record([
                    r.kind.to_string(),
                    r.gamma.to_string(),
                    r.k.to_string(),
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    num(r.p_hat),
                    num(r.ci_low),
                    num(r.ci_high),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                n: usize,
                trials: usize,
                seed: u64,
                rows: &'a [SweepRow],
            }
            let doc = Doc { n: result.n, trials: result.trials, seed: result.base_seed, rows: &rows };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const PHASED_HEADER: [&str; 8] = ["n", "K", "schedule", "trials", "successes", "p_hat", "ci_low", "ci_high"];

fn cmd_phased(a: PhasedArgs) -> Result<(), CliError> {
    let result = run_phased_experiment(a.n, a.k, &a.schedule, a.trials, a.run.seed, workers(a.run.workers))?;
    let mut out = open_output(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(PHASED_HEADER)?;
            let joint = std::iter::once((result.schedule.to_string(), result.joint));
            let phases = result.per_phase.iter().map(|(g, e)| (g.to_string(), *e));
            for (schedule, e) in joint.chain(phases) {
                w.write_record([
                    result.n.to_string(),
                    result.k.to_string(),
                    schedule,
                    e.trials.to_string(),
                    e.successes.to_string(),
                    num(e.p_hat),
                    num(e.ci_low),
                    num(e.ci_high),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &result)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const CENSUS_HEADER: [&str; 3] = ["size", "count", "is_max_histogram"];

fn cmd_census(a: CensusArgs) -> Result<(), CliError> {
    let census = run_keyring_census(a.n, a.k, a.trials, a.run.seed, workers(a.run.workers))?;
    let mut out = open_output(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(CENSUS_HEADER)?;
                for (flag, hist) in [("false", &census.histogram), ("true", &census.max_histogram)] {
                    for (size, count) in hist {
                        w.write_record([size.to_string(), count.to_string(), flag.to_string()])?;
                    }
                }
                w.flush()?;
            }
            writeln!(
                out,
                "# summary,n={},K={},trials={},mean={},frac_over_3k={},over_3k={},largest={}",
                census.n,
                census.k,
                census.trials,
                num(census.mean_size),
                num(census.frac_over_3k),
                census.over_3k,
                census.largest
            )?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &census)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TheoryRow {
    quantity: &'static str,
    parameters: String,
    value: f64,
}

pub const THEORY_HEADER: [&str; 3] = ["quantity", "parameters", "value"];

const DEFAULT_GAMMA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn cmd_theory(a: TheoryArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut push = |quantity, parameters: String, value| rows.push(TheoryRow { quantity, parameters, value });

    let nothing_requested = a.r_gamma.is_empty()
        && !a.lambda_star
        && a.c_of_lambda.is_empty()
        && a.tail.is_empty()
        && a.n.is_none();
    let r_grid: Vec<f64> = if nothing_requested { DEFAULT_GAMMA_GRID.to_vec() } else { a.r_gamma.clone() };

    for g in r_grid {
        push("r_gamma", format!("gamma={g}"), theory::r_gamma(g)?);
        if let Some(n) = a.n {
            let value = theory::r_gamma(g)? * (n as f64).ln() / g;
            push("isolation_threshold_k", format!("n={n};gamma={g}"), value);
        }
    }
    if a.lambda_star || nothing_requested {
        push("lambda_star", String::new(), theory::lambda_star());
    }
    for &lambda in &a.c_of_lambda {
        push("x_of_lambda", format!("lambda={lambda}"), theory::solve_x_of_lambda(lambda)?);
        push("c_of_lambda", format!("lambda={lambda}"), theory::solve_c_of_lambda(lambda)?);
    }
    for &(lambda, c) in &a.tail {
        let e = theory::h_exponent(lambda, c)?;
        let p = format!("lambda={lambda};c={c}");
        push("a", p.clone(), e.a);
        push("b", p.clone(), e.b);
        push("h", p.clone(), e.h);
        if let Some(n) = a.n {
            push("maxring_bound", format!("n={n};{p}"), theory::maxring_scaled_bound(n, lambda, c)?);
        }
    }
    if let Some(n) = a.n {
        push("full_connectivity_lower_bound", format!("n={n}"), theory::connectivity_lower_bound_full(n));
        let ks = a.k.as_ref().map(|k| k.0.clone()).unwrap_or_default();
        let gammas = a.gamma.as_ref().map(|g| g.0.clone()).unwrap_or_default();
        for &k in &ks {
            for &g in &gammas {
                finite_n_rows(n, k, g, &mut push)?;
            }
        }
    }

    let mut out = open_output(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(THEORY_HEADER)?;
            for r in &rows {
                w.write_record([r.quantity.to_string(), r.parameters.clone(), num(r.value)])?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn finite_n_rows(
    n: usize,
    k: usize,
    gamma: Gamma,
    push: &mut impl FnMut(&'static str, String, f64),
) -> Result<(), CliError> {
    let p = format!("n={n};K={k};gamma={gamma}");
    push("isolation_prob", p.clone(), theory::isolation_prob_exact(n, k, gamma)?);
    push("expected_isolated", p.clone(), theory::expected_isolated(n, k, gamma)?);
    // The union bound only applies away from degenerate sizes.
    if theory::check_one_law_conditions(n, k, gamma).is_ok() {
        push("connectivity_union_bound", p, theory::connectivity_union_bound(n, k, gamma)?);
    }
    Ok(())
}

fn cmd_pairing(a: PairingArgs) -> Result<(), CliError> {
    let table = PairingTable::generate(SchemeParams::new(a.n, a.k)?, a.seed);
    let mut out = open_output(a.out.as_deref())?;
    writeln!(out, "{}", table.to_json())?;
    out.flush()?;
    Ok(())
}

fn cmd_edges(a: EdgesArgs) -> Result<(), CliError> {
    let table = PairingTable::generate(SchemeParams::new(a.n, a.k)?, a.seed);
    let graph = KeyGraph::build(&table);
    let view = graph.restrict(a.gamma)?;
    let mut out = open_output(a.out.as_deref())?;
    out.write_all(view.edge_list().as_bytes())?;
    out.flush()?;
    Ok(())
}
