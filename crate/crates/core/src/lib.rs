//! Random pairwise key predistribution for sensor networks deployed in
//! phases.
//!
//! The crate generates the offline random pairing of the scheme, derives the
//! key rings and the induced key graph, restricts the graph to the nodes
//! deployed so far, and estimates connectivity and isolation probabilities
//! by Monte Carlo. The [`theory`] module evaluates the matching closed-form
//! thresholds and bounds so simulated and exact values can be compared.

pub mod error;
pub mod gamma;
pub mod graph;
pub mod model;
pub mod montecarlo;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod theory;
pub mod unionfind;

pub use error::{Error, Result};
pub use gamma::Gamma;
pub use graph::{KeyGraph, PhaseView};
pub use model::{KeyRing, NodeId, PairingDump, PairingTable, PairwiseKeyId, SchemeParams};
pub use montecarlo::{
    run_connectivity_sweep, run_isolation_sweep, run_keyring_census, run_phased_experiment, run_sweep,
    DeploymentSchedule, ExperimentPlan, PhasedResult, RingCensus, SweepCell, SweepKind, SweepResult,
};
pub use stats::{wilson_interval, Estimate, Moments};
pub use theory::TailExponents;

/// Seed used when none is given, so documented commands are reproducible.
pub const DEFAULT_SEED: u64 = 20_100_601;
