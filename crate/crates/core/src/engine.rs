//! Composite trust opinions.
//!
//! An opinion combines three inputs for a (buyer, seller, listing) query:
//!
//! * the seller's profile tier, which supplies an initial trust value while
//!   the seller has no ratings in the listing's scope;
//! * the recommended reputation, a normalized weighted mean of the latest
//!   ratings the seller received in that scope, each weighted by the rater's
//!   own standing and by the cost of the rated deal;
//! * the buyer's direct experience with the seller, and listing-time
//!   advisories such as slow or impossible delivery.
//!
//! Opinions can be served fresh ([`Mode::Dtc`]) or from a cache keyed by the
//! store revision at which they were computed ([`Mode::Atc`]).

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::{initial_trust, AccountId, IdentityError, PolicyConfig, ProfileTier, Registry};
use crate::ratings::{KeyConvention, NeutralConvention, Rating, RatingStore, RatingValue, Scope};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown account {0}")]
    UnknownAccount(AccountId),
    #[error("buyer and seller are the same account ({0})")]
    SelfQuery(AccountId),
    #[error("invalid engine config: {0}")]
    InvalidConfig(String),
    #[error("invalid listing: {0}")]
    InvalidListing(&'static str),
}

impl From<IdentityError> for EngineError {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::UnknownAccount(id) => EngineError::UnknownAccount(id),
            other => EngineError::InvalidConfig(other.to_string()),
        }
    }
}

/// How ratings are weighted when forming the recommended reputation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Rater standing times deal-cost weight.
    #[default]
    Weighted,
    /// Every latest rating counts equally.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub policy: PolicyConfig,
    /// Lower bound on a rater's weight.
    pub rater_floor: f64,
    /// Deal cost at which the cost weight reaches one half.
    pub cost_half: f64,
    /// Lower bound on the cost weight.
    pub cost_floor: f64,
    /// Unit scores at or below this are labelled Low.
    pub low_max: f64,
    /// Unit scores at or below this (and above `low_max`) are labelled Medium.
    pub med_max: f64,
    pub max_delivery_days: u32,
    pub neutral: NeutralConvention,
    pub key_convention: KeyConvention,
    pub aggregation: Aggregation,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            policy: PolicyConfig::default(),
            rater_floor: 0.1,
            cost_half: 100.0,
            cost_floor: 0.1,
            low_max: 0.15,
            med_max: 0.5,
            max_delivery_days: 14,
            neutral: NeutralConvention::Exclude,
            key_convention: KeyConvention::PerScope,
            aggregation: Aggregation::Weighted,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.policy.validate()?;
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.rater_floor) {
            return Err(EngineError::InvalidConfig("rater_floor must lie in (0, 1)".into()));
        }
        if !open_unit(self.cost_floor) {
            return Err(EngineError::InvalidConfig("cost_floor must lie in (0, 1)".into()));
        }
        if !(self.cost_half.is_finite() && self.cost_half > 0.0) {
            return Err(EngineError::InvalidConfig("cost_half must be positive".into()));
        }
        if !(0.0 <= self.low_max && self.low_max < self.med_max && self.med_max <= 1.0) {
            return Err(EngineError::InvalidConfig(
                "label thresholds need 0 <= low_max < med_max <= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn label(&self, unit_score: f64) -> TrustLabel {
        if unit_score <= self.low_max {
            TrustLabel::Low
        } else if unit_score <= self.med_max {
            TrustLabel::Medium
        } else {
            TrustLabel::High
        }
    }
}

/// Weight of a rating by the cost of the deal it rates: `c / (c + c_half)`,
/// floored at `cost_floor`.
pub fn cost_weight(cost: f64, config: &EngineConfig) -> f64 {
    let c = cost.max(0.0);
    (c / (c + config.cost_half)).max(config.cost_floor)
}

/// Standing of a rater, in `[rater_floor, 1]`.
///
/// Maps the mean of the rater's own received latest ratings from `[-1, 1]`
/// onto `[0, 1]`. A rater nobody has rated yet borrows the initial trust of
/// its profile tier.
pub fn rater_weight(
    rater: AccountId,
    store: &RatingStore,
    registry: &Registry,
    config: &EngineConfig,
) -> Result<f64, EngineError> {
    let account = registry.account(rater)?;
    let (sum, n) = store
        .received(rater)
        .fold((0.0, 0usize), |(s, n), r| (s + r.value.as_f64(), n + 1));
    let unit = if n == 0 {
        initial_trust(account.tier, &config.policy)
    } else {
        (sum / n as f64 + 1.0) / 2.0
    };
    Ok(unit.max(config.rater_floor))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reputation {
    /// Weighted mean of latest ratings, in `[-1, 1]`.
    Score(f64),
    /// No ratings in the queried scope.
    NewInScope,
}

impl Reputation {
    pub fn score(self) -> Option<f64> {
        match self {
            Reputation::Score(s) => Some(s),
            Reputation::NewInScope => None,
        }
    }
}

/// Normalized weighted mean over `(weight, value)` terms.
fn weighted_mean(terms: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    let (num, den) = terms
        .into_iter()
        .fold((0.0, 0.0), |(n, d), (w, v)| (n + w * v, d + w));
    (den > 0.0).then(|| (num / den).clamp(-1.0, 1.0))
}

fn rating_weight(
    r: &Rating,
    store: &RatingStore,
    registry: &Registry,
    config: &EngineConfig,
) -> Result<f64, EngineError> {
    Ok(match config.aggregation {
        Aggregation::Weighted => {
            rater_weight(r.rater, store, registry, config)? * cost_weight(r.cost, config)
        }
        Aggregation::Uniform => 1.0,
    })
}

pub fn weighted_reputation(
    seller: AccountId,
    scope: &Scope,
    store: &RatingStore,
    registry: &Registry,
    config: &EngineConfig,
) -> Result<Reputation, EngineError> {
    registry.account(seller)?;
    let ratings = store.latest_ratings_for(seller, scope);
    let terms = ratings
        .iter()
        .map(|r| Ok((rating_weight(r, store, registry, config)?, r.value.as_f64())))
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(weighted_mean(terms).map_or(Reputation::NewInScope, Reputation::Score))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectTrust {
    pub value: RatingValue,
    /// Scope the rating was given in.
    pub scope: Scope,
    /// True when no rating existed in the queried scope and this one came
    /// from another scope.
    pub cross_scope: bool,
}

/// The buyer's own latest rating of the seller: in-scope if present,
/// otherwise the most recent one in any scope.
pub fn direct_trust(
    buyer: AccountId,
    seller: AccountId,
    scope: &Scope,
    store: &RatingStore,
) -> Option<DirectTrust> {
    if let Some(r) = store.get(buyer, seller, scope) {
        return Some(DirectTrust {
            value: r.value,
            scope: r.scope.clone(),
            cross_scope: false,
        });
    }
    store
        .between(buyer, seller)
        .max_by_key(|r| r.at)
        .map(|r| DirectTrust {
            value: r.value,
            scope: r.scope.clone(),
            cross_scope: true,
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListingContext {
    pub scope: Scope,
    pub price: f64,
    pub delivery_days: u32,
    pub deliverable: bool,
}

impl ListingContext {
    pub fn new(scope: Scope, price: f64, delivery_days: u32) -> Self {
        Self {
            scope,
            price,
            delivery_days,
            deliverable: true,
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if !(self.price.is_finite() && self.price >= 0.0) {
            return Err(EngineError::InvalidListing("price must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Advisory {
    /// The seller has no ratings in any scope.
    NewSeller,
    /// The seller has ratings, but none in the listing's scope.
    NewInScope,
    /// Delivery is too slow or not possible to the buyer's location.
    AvoidDelivery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustLabel {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommendedSource {
    Ratings,
    InitialTrustFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustOpinion {
    pub buyer: AccountId,
    pub seller: AccountId,
    pub scope: Scope,
    /// Rating-sourced values lie in `[-1, 1]`; fallback values are the raw
    /// initial trust in `[0, 1]`.
    pub recommended: f64,
    pub recommended_source: RecommendedSource,
    /// `recommended` mapped onto `[0, 1]`.
    pub unit_score: f64,
    pub direct: Option<DirectTrust>,
    pub tier: ProfileTier,
    pub display_score: u32,
    pub label: TrustLabel,
    pub advisories: BTreeSet<Advisory>,
}

impl TrustOpinion {
    pub fn has(&self, advisory: Advisory) -> bool {
        self.advisories.contains(&advisory)
    }
}

/// Compute a fresh opinion.
pub fn trust_opinion(
    buyer: AccountId,
    seller: AccountId,
    listing: &ListingContext,
    store: &RatingStore,
    registry: &Registry,
    config: &EngineConfig,
) -> Result<TrustOpinion, EngineError> {
    if buyer == seller {
        return Err(EngineError::SelfQuery(buyer));
    }
    registry.account(buyer)?;
    let tier = registry.account(seller)?.tier;
    listing.validate()?;

    let mut advisories = BTreeSet::new();
    let (recommended, source, unit) =
        match weighted_reputation(seller, &listing.scope, store, registry, config)? {
            Reputation::Score(s) => (s, RecommendedSource::Ratings, (s + 1.0) / 2.0),
            Reputation::NewInScope => {
                let rated_elsewhere = store.received(seller).next().is_some();
                advisories.insert(if rated_elsewhere {
                    Advisory::NewInScope
                } else {
                    Advisory::NewSeller
                });
                let t = initial_trust(tier, &config.policy);
                (t, RecommendedSource::InitialTrustFallback, t)
            }
        };
    if !listing.deliverable || listing.delivery_days > config.max_delivery_days {
        advisories.insert(Advisory::AvoidDelivery);
    }
    let unit = unit.max(0.0);
    Ok(TrustOpinion {
        buyer,
        seller,
        scope: listing.scope.clone(),
        recommended,
        recommended_source: source,
        unit_score: unit,
        direct: direct_trust(buyer, seller, &listing.scope, store),
        tier,
        display_score: (100.0 * unit).round() as u32,
        label: config.label(unit),
        advisories,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Approximate: serve a cached opinion if one survives invalidation.
    Atc,
    /// Dynamic: always recompute.
    #[default]
    Dtc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct QueryKey {
    buyer: AccountId,
    seller: AccountId,
    scope: Scope,
    price_bits: u64,
    delivery_days: u32,
    deliverable: bool,
}

#[derive(Debug, Clone)]
struct CachedOpinion {
    revision: u64,
    opinion: TrustOpinion,
}

/// Opinion service with an approximate-mode cache.
#[derive(Debug, Clone)]
pub struct TrustEngine {
    config: EngineConfig,
    cache: HashMap<QueryKey, CachedOpinion>,
}

impl TrustEngine {
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        Ok(Self {
            config,
            cache: HashMap::new(),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn cached_len(&self) -> usize {
        self.cache.len()
    }

    pub fn opinion(
        &mut self,
        buyer: AccountId,
        seller: AccountId,
        listing: &ListingContext,
        store: &RatingStore,
        registry: &Registry,
        mode: Mode,
    ) -> Result<TrustOpinion, EngineError> {
        if mode == Mode::Dtc {
            return trust_opinion(buyer, seller, listing, store, registry, &self.config);
        }
        let key = QueryKey {
            buyer,
            seller,
            scope: listing.scope.clone(),
            price_bits: listing.price.to_bits(),
            delivery_days: listing.delivery_days,
            deliverable: listing.deliverable,
        };
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.opinion.clone());
        }
        let opinion = trust_opinion(buyer, seller, listing, store, registry, &self.config)?;
        self.cache.insert(
            key,
            CachedOpinion {
                revision: store.revision(),
                opinion: opinion.clone(),
            },
        );
        Ok(opinion)
    }

    /// Drop every cached opinion computed before `revision`.
    pub fn invalidate(&mut self, revision: u64) {
        self.cache.retain(|_, c| c.revision >= revision);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::{fixtures, Roles};
    use RatingValue::*;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn scope(s: &str) -> Scope {
        Scope::new(s).unwrap()
    }

    #[test]
    fn cost_weight_shape() {
        let c = cfg();
        assert_eq!(cost_weight(0.0, &c), 0.1);
        assert_eq!(cost_weight(c.cost_half, &c), 0.5);
        assert!((cost_weight(9.0 * c.cost_half, &c) - 0.9).abs() < 1e-15);
        assert!(cost_weight(1e12, &c) < 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        for bad in [
            EngineConfig { rater_floor: 0.0, ..cfg() },
            EngineConfig { cost_floor: 1.0, ..cfg() },
            EngineConfig { cost_half: 0.0, ..cfg() },
            EngineConfig { low_max: 0.5, med_max: 0.5, ..cfg() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    struct World {
        reg: Registry,
        store: RatingStore,
        t: u64,
    }

    impl World {
        fn new(tiers: &[ProfileTier]) -> Self {
            let mut reg = Registry::new();
            for (i, tier) in tiers.iter().enumerate() {
                let name = format!("u{i}");
                let creds = match tier {
                    ProfileTier::Low => fixtures::low(&name),
                    ProfileTier::Medium => fixtures::medium(&name, &format!("n{i}"), &format!("b{i}")),
                    ProfileTier::High => fixtures::high(&name, &format!("n{i}"), &format!("b{i}")),
                };
                reg.register(creds, Roles::BOTH, 0).unwrap();
            }
            World { reg, store: RatingStore::default(), t: 0 }
        }

        fn rate(&mut self, rater: u64, ratee: u64, s: &str, value: RatingValue, cost: f64) {
            self.t += 1;
            let r = Rating {
                rater: AccountId(rater),
                ratee: AccountId(ratee),
                scope: scope(s),
                value,
                cost,
                at: self.t,
            };
            self.store.record_rating(r, &self.reg).unwrap();
        }
    }

    #[test]
    fn rater_weight_examples() {
        use ProfileTier::*;
        let mut w = World::new(&[Low, Low, Low, Low, High]);
        w.rate(1, 0, "s", Positive, 10.0);
        w.rate(2, 0, "s", Positive, 10.0);
        assert_eq!(rater_weight(AccountId(0), &w.store, &w.reg, &cfg()), Ok(1.0));
        w.rate(1, 3, "s", Positive, 10.0);
        w.rate(2, 3, "s", Negative, 10.0);
        assert_eq!(rater_weight(AccountId(3), &w.store, &w.reg, &cfg()), Ok(0.5));
        assert_eq!(rater_weight(AccountId(1), &w.store, &w.reg, &cfg()), Ok(0.1));
        assert_eq!(rater_weight(AccountId(4), &w.store, &w.reg, &cfg()), Ok(0.30));
        assert_eq!(
            rater_weight(AccountId(99), &w.store, &w.reg, &cfg()),
            Err(EngineError::UnknownAccount(AccountId(99)))
        );
    }

    #[test]
    fn weighted_reputation_normalizes() {
        assert_eq!(weighted_mean([(1.0, 1.0)]), Some(1.0));
        assert_eq!(weighted_mean([(0.5, 1.0), (0.5, -1.0)]), Some(0.0));
        let v = weighted_mean([(0.9, 1.0), (0.3, 1.0), (0.3, -1.0)]).unwrap();
        assert!((v - 0.6).abs() < 1e-12);
        assert_eq!(weighted_mean(std::iter::empty()), None);
    }

    #[test]
    fn reputation_in_unrated_scope_is_new() {
        use ProfileTier::*;
        let mut w = World::new(&[High, Low]);
        w.rate(1, 0, "laptops", Positive, 50.0);
        let c = cfg();
        assert_eq!(
            weighted_reputation(AccountId(0), &scope("cars"), &w.store, &w.reg, &c),
            Ok(Reputation::NewInScope)
        );
        assert_eq!(
            weighted_reputation(AccountId(0), &scope("laptops"), &w.store, &w.reg, &c),
            Ok(Reputation::Score(1.0))
        );
    }

    #[test]
    fn direct_trust_prefers_scope_then_recency() {
        use ProfileTier::*;
        let mut w = World::new(&[Low, Low]);
        assert_eq!(direct_trust(AccountId(1), AccountId(0), &scope("laptops"), &w.store), None);
        w.rate(1, 0, "laptops", Negative, 1.0);
        w.rate(1, 0, "laptops", Positive, 1.0);
        let d = direct_trust(AccountId(1), AccountId(0), &scope("laptops"), &w.store).unwrap();
        assert_eq!((d.value, d.cross_scope), (Positive, false));

        let mut w = World::new(&[Low, Low]);
        w.rate(1, 0, "cars", Positive, 1.0);
        let d = direct_trust(AccountId(1), AccountId(0), &scope("laptops"), &w.store).unwrap();
        assert_eq!((d.value, d.cross_scope), (Positive, true));
        assert_eq!(d.scope, scope("cars"));
    }

    #[test]
    fn new_high_tier_seller_gets_fallback() {
        use ProfileTier::*;
        let w = World::new(&[High, Low]);
        let listing = ListingContext::new(scope("laptops"), 500.0, 3);
        let op = trust_opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, &cfg()).unwrap();
        assert_eq!(op.recommended, 0.30);
        assert_eq!(op.recommended_source, RecommendedSource::InitialTrustFallback);
        assert_eq!(op.advisories, BTreeSet::from([Advisory::NewSeller]));
        assert_eq!(op.display_score, 30);
        assert_eq!(op.label, TrustLabel::Medium);
        assert_eq!(op.tier, High);
    }

    #[test]
    fn slow_delivery_flags_avoidance_regardless_of_score() {
        use ProfileTier::*;
        let mut w = World::new(&[High, Low, Low]);
        w.rate(2, 0, "laptops", Positive, 900.0);
        let mut listing = ListingContext::new(scope("laptops"), 500.0, 30);
        let op = trust_opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, &cfg()).unwrap();
        assert_eq!(op.label, TrustLabel::High);
        assert_eq!(op.advisories, BTreeSet::from([Advisory::AvoidDelivery]));
        listing.delivery_days = 3;
        listing.deliverable = false;
        let op = trust_opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, &cfg()).unwrap();
        assert!(op.has(Advisory::AvoidDelivery));
    }

    #[test]
    fn rated_in_other_scope_is_new_in_scope() {
        use ProfileTier::*;
        let mut w = World::new(&[Medium, Low, Low]);
        w.rate(2, 0, "laptops", Positive, 900.0);
        let listing = ListingContext::new(scope("cars"), 500.0, 3);
        let op = trust_opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, &cfg()).unwrap();
        assert_eq!(op.recommended_source, RecommendedSource::InitialTrustFallback);
        assert_eq!(op.advisories, BTreeSet::from([Advisory::NewInScope]));
        assert_eq!(op.recommended, 0.15);
    }

    #[test]
    fn display_score_uses_unit_mapping() {
        use ProfileTier::*;
        let mut w = World::new(&[Low, High, High]);
        w.rate(1, 0, "s", Negative, 100.0);
        let listing = ListingContext::new(scope("s"), 1.0, 1);
        let op = trust_opinion(AccountId(2), AccountId(0), &listing, &w.store, &w.reg, &cfg()).unwrap();
        assert_eq!(op.recommended, -1.0);
        assert_eq!((op.unit_score, op.display_score, op.label), (0.0, 0, TrustLabel::Low));
    }

    #[test]
    fn query_errors() {
        use ProfileTier::*;
        let w = World::new(&[Low, Low]);
        let listing = ListingContext::new(scope("s"), 1.0, 1);
        assert_eq!(
            trust_opinion(AccountId(0), AccountId(0), &listing, &w.store, &w.reg, &cfg()),
            Err(EngineError::SelfQuery(AccountId(0)))
        );
        assert_eq!(
            trust_opinion(AccountId(0), AccountId(5), &listing, &w.store, &w.reg, &cfg()),
            Err(EngineError::UnknownAccount(AccountId(5)))
        );
    }

    #[test]
    fn atc_serves_stale_until_invalidated() {
        use ProfileTier::*;
        let mut w = World::new(&[High, Low, Low]);
        let mut engine = TrustEngine::new(cfg()).unwrap();
        let listing = ListingContext::new(scope("s"), 10.0, 1);
        engine.invalidate(3);
        assert_eq!(engine.cached_len(), 0);
        let first = engine
            .opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, Mode::Atc)
            .unwrap();
        w.rate(2, 0, "s", Negative, 500.0);
        let stale = engine
            .opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, Mode::Atc)
            .unwrap();
        assert_eq!(first, stale);
        engine.invalidate(w.store.revision());
        let fresh = engine
            .opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, Mode::Atc)
            .unwrap();
        let dtc = engine
            .opinion(AccountId(1), AccountId(0), &listing, &w.store, &w.reg, Mode::Dtc)
            .unwrap();
        assert_ne!(fresh, first);
        assert_eq!(fresh, dtc);
    }

    #[test]
    fn uniform_aggregation_ignores_cost() {
        use ProfileTier::*;
        let mut w = World::new(&[Low, Low, Low]);
        w.rate(1, 0, "s", Positive, 1.0);
        w.rate(2, 0, "s", Negative, 1000.0);
        let c = EngineConfig { aggregation: Aggregation::Uniform, ..cfg() };
        assert_eq!(
            weighted_reputation(AccountId(0), &scope("s"), &w.store, &w.reg, &c),
            Ok(Reputation::Score(0.0))
        );
        let r = weighted_reputation(AccountId(0), &scope("s"), &w.store, &w.reg, &cfg()).unwrap();
        assert!(r.score().unwrap() < -0.5);
    }
}
