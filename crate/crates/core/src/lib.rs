//! Trust engine for consumer-to-consumer auction marketplaces.
//!
//! Credential-based profile tiers ([`identity`]) bootstrap new sellers, a
//! latest-only rating repository ([`ratings`]) feeds a scoped, cost-weighted
//! reputation ([`engine`]), and a seeded marketplace simulator ([`sim`])
//! measures the mechanism against attack strategies. [`stats`] holds the
//! Likert summary and Kruskal-Wallis tooling used to evaluate survey data,
//! and [`eventlog`] persists everything as replayable JSON lines.

pub mod engine;
pub mod eventlog;
pub mod identity;
pub mod parallel;
pub mod ratings;
pub mod sim;
pub mod stats;

pub use engine::{EngineConfig, Mode, TrustEngine, TrustOpinion};
pub use identity::{AccountId, ProfileTier, Registry};
pub use ratings::{Rating, RatingStore, RatingValue, Scope};
