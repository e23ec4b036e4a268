//! Seeded agent-based auction marketplace.
//!
//! Each round, sellers join or post one listing, buyers each inspect one
//! listing and decide whether to buy from the opinion the active mechanism
//! gives them, deliveries succeed or fail according to the seller's
//! strategy, and both parties rate each other. All randomness is keyed by
//! (seed, round, agent), so runs are reproducible and variants sharing a
//! seed see common random numbers.

mod compare;
mod report;
mod rng;
mod scenario;
mod world;

use thiserror::Error;

pub use compare::{
    compare_ensemble, compare_variants, render_comparison, render_ensemble, run_ensemble,
    run_scenario, run_scenario_traced, summarize_ensemble, ComparisonReport, EnsembleSummary,
    VariantDelta,
};
pub use report::{Money, RoundCounts, SellerReport, SimMetrics, SimReport};
pub use scenario::{
    BuyerGroup, BuyerPolicy, ListingParams, Scenario, SellerSpec, SellerStrategy, Variant,
};
pub use world::{step, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
