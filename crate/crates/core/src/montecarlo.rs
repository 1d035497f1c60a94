//! Repeated-trial experiments over random pairing tables.
//!
//! Trial `t` for pairing size `K` always uses the table generated from
//! `derive_seed(base_seed, [K, t])`, and all deployment fractions of a sweep
//! are evaluated on that one table. Work is spread over a rayon pool, and
//! per-trial outcomes are collected in `(K, trial)` order before counting, so
//! results do not depend on the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::Gamma;
use crate::graph::KeyGraph;
use crate::model::{PairingTable, SchemeParams};
use crate::rng::derive_seed;
use crate::stats::{Estimate, Moments};

/// Trials per cell used for connectivity and isolation sweeps.
pub const DEFAULT_SWEEP_TRIALS: usize = 200;
/// Trials used for key-ring censuses.
pub const DEFAULT_CENSUS_TRIALS: usize = 1000;

/// Seed of the table used by trial `trial` at pairing size `k`.
pub fn trial_seed(base_seed: u64, k: usize, trial: usize) -> u64 {
    derive_seed(base_seed, &[k as u64, trial as u64])
}

/// The pairing table of one trial.
pub fn trial_table(params: SchemeParams, base_seed: u64, trial: usize) -> PairingTable {
    PairingTable::generate(params, trial_seed(base_seed, params.k(), trial))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub n: usize,
    pub k_values: Vec<usize>,
    pub gammas: Vec<Gamma>,
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(n: usize, k_values: Vec<usize>, gammas: Vec<Gamma>, trials: usize, base_seed: u64) -> Self {
        Self { n, k_values, gammas, trials, base_seed, workers: None }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Plan("trials must be at least 1".into()));
        }
        if self.k_values.is_empty() {
            return Err(Error::Plan("K list is empty".into()));
        }
        for &k in &self.k_values {
            SchemeParams::new(self.n, k).map_err(|e| Error::Plan(e.to_string()))?;
        }
        if self.gammas.is_empty() {
            return Err(Error::Plan("gamma list is empty".into()));
        }
        if self.gammas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Plan("gammas must be strictly increasing".into()));
        }
        for &g in &self.gammas {
            if g.retained(self.n) == 0 {
                return Err(Error::Plan(format!("gamma {g} keeps no node out of {}", self.n)));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Plan("workers must be at least 1".into()));
        }
        Ok(())
    }
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Plan(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// The property a sweep estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Connected,
    NoIsolated,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Connected => "connected",
            SweepKind::NoIsolated => "no_isolated",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one `(γ, K)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub gamma: Gamma,
    pub k: usize,
    pub connected: Estimate,
    pub no_isolated: Estimate,
    /// Per-trial number of isolated nodes in the view.
    pub isolated: Moments,
}

impl SweepCell {
    pub fn estimate(&self, kind: SweepKind) -> &Estimate {
        match kind {
            SweepKind::Connected => &self.connected,
            SweepKind::NoIsolated => &self.no_isolated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
    /// Ordered by `γ`, then `K`, following the plan's lists.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, gamma: f64, k: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.k == k && c.gamma.value() == gamma)
    }

    /// `(K, estimate)` pairs of one curve, in plan order.
    pub fn curve(&self, kind: SweepKind, gamma: f64) -> Vec<(usize, Estimate)> {
        self.cells
            .iter()
            .filter(|c| c.gamma.value() == gamma)
            .map(|c| (c.k, *c.estimate(kind)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct ViewOutcome {
    connected: bool,
    isolated: u32,
}

fn evaluate_views(table: &PairingTable, gammas: &[Gamma]) -> Vec<ViewOutcome> {
    let graph = KeyGraph::build(table);
    gammas
        .iter()
        .map(|&g| {
            let view = graph.restrict_to(g).expect("plan validated non-empty views");
            let isolated = view.count_isolated() as u32;
            // A view with an isolated node and m >= 2 cannot be connected.
            let connected = if isolated > 0 && view.m() >= 2 { false } else { view.is_connected() };
            ViewOutcome { connected, isolated }
        })
        .collect()
}

/// Connectivity and isolation estimates for every `(γ, K)` of the plan,
/// both measured on the same trials.
pub fn run_sweep(plan: &ExperimentPlan) -> Result<SweepResult> {
    plan.validate()?;
    let jobs: Vec<(usize, usize)> = plan
        .k_values
        .iter()
        .flat_map(|&k| (0..plan.trials).map(move |t| (k, t)))
        .collect();
    let outcomes: Vec<Vec<ViewOutcome>> = with_pool(plan.workers, || {
        jobs.par_iter()
            .map(|&(k, t)| {
                let params = SchemeParams::new(plan.n, k).expect("validated");
                evaluate_views(&trial_table(params, plan.base_seed, t), &plan.gammas)
            })
            .collect()
    })?;

    let trials = plan.trials as u64;
    let mut cells = Vec::with_capacity(plan.gammas.len() * plan.k_values.len());
    for (gi, &gamma) in plan.gammas.iter().enumerate() {
        for (ki, &k) in plan.k_values.iter().enumerate() {
            let rows = &outcomes[ki * plan.trials..(ki + 1) * plan.trials];
            let mut connected = 0;
            let mut no_isolated = 0;
            let mut isolated = Moments::default();
            for row in rows {
                let o = row[gi];
                connected += o.connected as u64;
                no_isolated += (o.isolated == 0) as u64;
                isolated.push(o.isolated as f64);
            }
            cells.push(SweepCell {
                gamma,
                k,
                connected: Estimate::new(connected, trials)?,
                no_isolated: Estimate::new(no_isolated, trials)?,
                isolated,
            });
        }
    }
    Ok(SweepResult { n: plan.n, trials: plan.trials, base_seed: plan.base_seed, cells })
}

/// Estimates `P[H_γ(n;K) is connected]` over the plan's grid.
pub fn run_connectivity_sweep(plan: &ExperimentPlan) -> Result<Vec<(Gamma, usize, Estimate)>> {
    Ok(run_sweep(plan)?.cells.into_iter().map(|c| (c.gamma, c.k, c.connected)).collect())
}

/// Estimates `P[H_γ(n;K) has no isolated node]` over the plan's grid.
pub fn run_isolation_sweep(plan: &ExperimentPlan) -> Result<Vec<(Gamma, usize, Estimate)>> {
    Ok(run_sweep(plan)?.cells.into_iter().map(|c| (c.gamma, c.k, c.no_isolated)).collect())
}

/// Fractions `γ_1 < … < γ_ℓ` at which successive deployment waves end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentSchedule {
    gammas: Vec<Gamma>,
}

impl DeploymentSchedule {
    pub fn new(gammas: Vec<Gamma>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::Schedule("a schedule needs at least one phase".into()));
        }
        if let Some(w) = gammas.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Schedule(format!(
                "phases must be strictly increasing, but {} is followed by {}",
                w[0], w[1]
            )));
        }
        Ok(Self { gammas })
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let gammas = values
            .iter()
            .map(|&v| Gamma::new(v).map_err(|_| Error::Schedule(format!("phase {v} is outside (0, 1]"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(gammas)
    }

    pub fn phases(&self) -> &[Gamma] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

impl FromStr for DeploymentSchedule {
    type Err = Error;

    /// Comma-separated fractions, e.g. `0.25,0.5,1.0`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<f64>()
                    .map_err(|_| Error::Schedule(format!("cannot parse phase {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(&values)
    }
}

impl fmt::Display for DeploymentSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gammas.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasedResult {
    pub n: usize,
    pub k: usize,
    pub schedule: DeploymentSchedule,
    /// Every phase connected.
    pub joint: Estimate,
    pub per_phase: Vec<(Gamma, Estimate)>,
}

/// Estimates the probability that the network is connected at the end of
/// every deployment phase.
pub fn run_phased_experiment(
    n: usize,
    k: usize,
    schedule: &DeploymentSchedule,
    trials: usize,
    base_seed: u64,
    workers: Option<usize>,
) -> Result<PhasedResult> {
    let plan = ExperimentPlan { n, k_values: vec![k], gammas: schedule.gammas.clone(), trials, base_seed, workers };
    plan.validate()?;
    let params = SchemeParams::new(n, k)?;
    let outcomes: Vec<Vec<ViewOutcome>> = with_pool(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| evaluate_views(&trial_table(params, base_seed, t), &plan.gammas))
            .collect()
    })?;
    let joint = outcomes.iter().filter(|row| row.iter().all(|o| o.connected)).count() as u64;
    let per_phase = plan
        .gammas
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let s = outcomes.iter().filter(|row| row[i].connected).count() as u64;
            Ok((g, Estimate::new(s, trials as u64)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhasedResult {
        n,
        k,
        schedule: schedule.clone(),
        joint: Estimate::new(joint, trials as u64)?,
        per_phase,
    })
}

/// Key-ring size statistics over repeated tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingCensus {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    /// Ring size → number of rings, over all `trials · n` rings.
    pub histogram: BTreeMap<u32, u64>,
    /// Largest ring size of a table → number of tables.
    pub max_histogram: BTreeMap<u32, u64>,
    /// Rings strictly larger than `3K`.
    pub over_3k: u64,
    pub frac_over_3k: f64,
    pub mean_size: f64,
    pub largest: u32,
}

impl RingCensus {
    /// Fraction of rings whose size over `2K` falls outside `[lo, hi]`.
    pub fn fraction_outside(&self, lo: f64, hi: f64) -> f64 {
        let two_k = 2.0 * self.k as f64;
        let total: u64 = self.histogram.values().sum();
        let outside: u64 = self
            .histogram
            .iter()
            .filter(|(&s, _)| {
                let ratio = s as f64 / two_k;
                ratio < lo || ratio > hi
            })
            .map(|(_, &c)| c)
            .sum();
        outside as f64 / total as f64
    }

    /// Fraction of tables whose largest ring `M_n` has `|M_n − 2K| >= dev`.
    pub fn max_deviation_frequency(&self, dev: f64) -> f64 {
        let two_k = 2.0 * self.k as f64;
        let hits: u64 = self
            .max_histogram
            .iter()
            .filter(|(&s, _)| (s as f64 - two_k).abs() >= dev)
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.trials as f64
    }
}

/// Collects ring sizes and per-table maxima over `trials` tables.
pub fn run_keyring_census(
    n: usize,
    k: usize,
    trials: usize,
    base_seed: u64,
    workers: Option<usize>,
) -> Result<RingCensus> {
    let params = SchemeParams::new(n, k)?;
    if trials == 0 {
        return Err(Error::Plan("trials must be at least 1".into()));
    }
    if workers == Some(0) {
        return Err(Error::Plan("workers must be at least 1".into()));
    }
    // Sizes never exceed K + n - 1, so a dense per-trial count suffices.
    let per_trial: Vec<Vec<u32>> = with_pool(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| trial_table(params, base_seed, t).ring_sizes())
            .collect()
    })?;

    let mut histogram = BTreeMap::new();
    let mut max_histogram = BTreeMap::new();
    let mut total: u64 = 0;
    let mut over_3k = 0;
    for sizes in &per_trial {
        let mut max = 0;
        for &s in sizes {
            *histogram.entry(s).or_insert(0u64) += 1;
            total += s as u64;
            if s as usize > 3 * k {
                over_3k += 1;
            }
            max = max.max(s);
        }
        *max_histogram.entry(max).or_insert(0u64) += 1;
    }
    let rings = (trials * n) as f64;
    Ok(RingCensus {
        n,
        k,
        trials,
        largest: histogram.keys().next_back().copied().unwrap_or(0),
        histogram,
        max_histogram,
        over_3k,
        frac_over_3k: over_3k as f64 / rings,
        mean_size: total as f64 / rings,
    })
}
