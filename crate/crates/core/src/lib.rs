//! Benchmarking engine for distributed quantum computing over entanglement
//! networks.
//!
//! The crate models a network by its no-swap pair rates, per-node swap
//! efficiencies, and effective gate error, enumerates candidate node
//! coalitions for heavy-output-generation tasks, encodes the swap rate
//! region as linear constraints, and solves for the task allocation that
//! maximizes quantum-volume throughput.

pub mod engine;
pub mod error;
pub mod lp;
pub mod netmodel;
pub mod rate_region;
pub mod tasks;

pub use engine::{
    assemble, compute_utility, coalition_size_cap, coalition_size_lower_bound_noisy,
    coalition_size_lower_bound_perfect, max_active_coalition_size, EntanglementGraph,
    UtilityReport, UtilityResult, ACTIVE_RATE_THRESHOLD,
};
pub use error::{Error, Result};
pub use netmodel::{load_network, save_network, NetworkSpec, NodeId, Pair};
pub use rate_region::{
    build_rate_constraints, check_feasible, noswap_utility, reroute_rate, RateVector, SwapFlow,
};
pub use tasks::{
    build_tasks, demand_coefficient, enumerate_coalitions, optimal_depth, volume, Coalition,
    EnumerationConfig, EnumerationMode, TaskSpec, UtilityModel,
};
