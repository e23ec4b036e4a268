use std::collections::BTreeSet;

use rand::Rng;

use super::report::{Money, RoundCounts, SellerReport, SimMetrics, SimReport};
use super::rng::{keyed_rng, Stream};
use super::scenario::{agent_credentials, BuyerPolicy, Scenario, SellerStrategy, Variant};
use crate::engine::{self, Advisory, Aggregation, EngineConfig, ListingContext, Reputation};
use crate::eventlog::{Event, EventRecord};
use crate::identity::{initial_trust, AccountId, CredentialSet, IdentityError, Registry, Roles};
use crate::ratings::{FeedbackHistory, Rating, RatingStore, RatingValue, Scope};
use crate::stats::spearman;

#[derive(Debug, Clone)]
struct SellerState {
    account: Option<AccountId>,
    accounts: Vec<AccountId>,
    fakes: Vec<AccountId>,
    generation: u32,
    deals_on_identity: u32,
    wants_reset: bool,
    deals: u64,
    failed: u64,
    revenue: Money,
    fraud_gain: Money,
    first_sale_round: Option<u64>,
    registration_error: Option<String>,
    trajectory: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
struct BuyerState {
    account: Option<AccountId>,
    policy: BuyerPolicy,
}

#[derive(Debug, Clone)]
struct Listing {
    seller: usize,
    account: AccountId,
    scope: Scope,
    price: Money,
    delivery_days: u32,
    deliverable: bool,
    sold: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Delivered,
    Late,
    Failed,
}

/// Full simulation state between rounds.
#[derive(Debug, Clone)]
pub struct World {
    scenario: Scenario,
    round: u64,
    clock: u64,
    registry: Registry,
    store: RatingStore,
    history: FeedbackHistory,
    sellers: Vec<SellerState>,
    buyers: Vec<BuyerState>,
    rounds: Vec<RoundCounts>,
    current: RoundCounts,
    spend: Money,
    blocked_duplicates: u64,
    fakes_registered: u64,
    ratings_recorded: u64,
    trace: Option<Vec<EventRecord>>,
}

impl World {
    pub fn new(scenario: Scenario) -> Self {
        let registry = if scenario.enforce_uniqueness {
            Registry::new()
        } else {
            Registry::without_uniqueness()
        };
        let store = RatingStore::new(scenario.engine.key_convention);
        let sellers = scenario
            .sellers
            .iter()
            .map(|_| SellerState {
                account: None,
                accounts: Vec::new(),
                fakes: Vec::new(),
                generation: 0,
                deals_on_identity: 0,
                wants_reset: false,
                deals: 0,
                failed: 0,
                revenue: Money::ZERO,
                fraud_gain: Money::ZERO,
                first_sale_round: None,
                registration_error: None,
                trajectory: Vec::new(),
            })
            .collect();
        let buyers = scenario
            .buyers
            .iter()
            .flat_map(|g| {
                (0..g.count).map(|_| BuyerState {
                    account: None,
                    policy: g.policy.clone(),
                })
            })
            .collect();
        World {
            scenario,
            round: 0,
            clock: 0,
            registry,
            store,
            history: FeedbackHistory::default(),
            sellers,
            buyers,
            rounds: Vec::new(),
            current: RoundCounts::default(),
            spend: Money::ZERO,
            blocked_duplicates: 0,
            fakes_registered: 0,
            ratings_recorded: 0,
            trace: None,
        }
    }

    /// Record every event into an in-memory trace.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn store(&self) -> &RatingStore {
        &self.store
    }

    pub fn trace(&self) -> Option<&[EventRecord]> {
        self.trace.as_deref()
    }

    pub fn ratings_recorded(&self) -> u64 {
        self.ratings_recorded
    }

    /// Accounts held by seller `index`: current identity first, then fakes.
    pub fn seller_accounts(&self, index: usize) -> (Option<AccountId>, &[AccountId]) {
        let s = &self.sellers[index];
        (s.account, &s.fakes)
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    fn emit(&mut self, at: u64, event: Event) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(EventRecord { seq: at, at, event });
        }
    }

    fn seller_key(&self, index: usize) -> u64 {
        index as u64
    }

    fn buyer_key(&self, index: usize) -> u64 {
        (self.sellers.len() + index) as u64
    }

    fn try_register(&mut self, credentials: CredentialSet, roles: Roles) -> Result<AccountId, IdentityError> {
        let at = self.tick();
        self.current.registrations += 1;
        let result = self
            .registry
            .register(credentials.clone(), roles, at)
            .map(|a| a.id);
        if let Err(IdentityError::DuplicateIdentity { .. }) = result {
            self.blocked_duplicates += 1;
            self.current.registrations_blocked += 1;
        }
        self.emit(
            at,
            Event::Register {
                account: result.as_ref().ok().copied(),
                credentials,
                roles,
            },
        );
        result
    }

    fn join_sellers(&mut self) {
        let joining: Vec<usize> = (0..self.sellers.len())
            .filter(|&i| self.scenario.sellers[i].joins_at == self.round)
            .collect();
        for i in joining {
            let spec = self.scenario.sellers[i].clone();
            let creds = agent_credentials(&spec.name, &spec.name, spec.tier);
            match self.try_register(creds, Roles::BOTH) {
                Ok(id) => {
                    self.sellers[i].account = Some(id);
                    self.sellers[i].accounts.push(id);
                }
                Err(e) => self.sellers[i].registration_error = Some(e.to_string()),
            }
            if let SellerStrategy::BallotStuffing { fake_identities, .. } = spec.strategy {
                for k in 0..fake_identities {
                    let creds = agent_credentials(&format!("{}-fake{k}", spec.name), &spec.name, spec.tier);
                    let roles = Roles { seller: false, buyer: true };
                    if let Ok(id) = self.try_register(creds, roles) {
                        self.sellers[i].fakes.push(id);
                        self.fakes_registered += 1;
                    }
                }
            }
        }
    }

    fn join_buyers(&mut self) {
        if self.round != 0 {
            return;
        }
        let tiers: Vec<_> = self
            .scenario
            .buyers
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.tier, g.count as usize))
            .collect();
        for (j, tier) in tiers.into_iter().enumerate() {
            let name = format!("buyer#{j}");
            let roles = Roles { seller: false, buyer: true };
            if let Ok(id) = self.try_register(agent_credentials(&name, &name, tier), roles) {
                self.buyers[j].account = Some(id);
            }
        }
    }

    fn attempt_resets(&mut self) {
        for i in 0..self.sellers.len() {
            if !self.sellers[i].wants_reset {
                continue;
            }
            self.sellers[i].wants_reset = false;
            self.sellers[i].generation += 1;
            let spec = &self.scenario.sellers[i];
            let alias = format!("{}~{}", spec.name, self.sellers[i].generation);
            let creds = agent_credentials(&alias, &spec.name, spec.tier);
            if let Ok(id) = self.try_register(creds, Roles::BOTH) {
                let s = &mut self.sellers[i];
                s.account = Some(id);
                s.accounts.push(id);
                s.deals_on_identity = 0;
            }
        }
    }

    fn post_listings(&self) -> Vec<Listing> {
        let params = &self.scenario.listings;
        let mut listings = Vec::new();
        for (i, s) in self.sellers.iter().enumerate() {
            let Some(account) = s.account else { continue };
            let spec = &self.scenario.sellers[i];
            let mut rng = keyed_rng(self.scenario.seed, self.round, self.seller_key(i), Stream::Listing);
            let scopes = if spec.scopes.is_empty() { &params.scopes } else { &spec.scopes };
            let scope = scopes[rng.gen_range(0..scopes.len())].clone();
            let lo = Money::from_units(params.price_min).cents();
            let hi = Money::from_units(params.price_max).cents();
            let drawn = Money(rng.gen_range(lo..=hi));
            let delivery_days = rng.gen_range(params.delivery_min_days..=params.delivery_max_days);
            let deliverable = rng.gen::<f64>() >= params.undeliverable_prob;
            let price = match spec.strategy {
                SellerStrategy::ValueImbalance {
                    honest_phase,
                    low_cost,
                    defect_cost,
                } => Money::from_units(if s.deals_on_identity < honest_phase {
                    low_cost
                } else {
                    defect_cost
                }),
                _ => drawn,
            };
            listings.push(Listing {
                seller: i,
                account,
                scope,
                price,
                delivery_days,
                deliverable,
                sold: false,
            });
        }
        listings
    }

    fn record(&mut self, rater: AccountId, ratee: AccountId, scope: &Scope, value: RatingValue, cost: Money) {
        let at = self.tick();
        let rating = Rating {
            rater,
            ratee,
            scope: scope.clone(),
            value,
            cost: cost.units(),
            at,
        };
        if self.store.record_rating(rating.clone(), &self.registry).is_ok() {
            self.history.push(&rating);
            self.ratings_recorded += 1;
            self.current.ratings += 1;
            self.emit(
                at,
                Event::Rating {
                    rater,
                    ratee,
                    scope: scope.clone(),
                    value,
                    cost: rating.cost,
                },
            );
        }
    }

    fn stuff_ballots(&mut self) {
        for i in 0..self.sellers.len() {
            let SellerStrategy::BallotStuffing { target, claimed_cost, .. } =
                self.scenario.sellers[i].strategy.clone()
            else {
                continue;
            };
            let cost = Money::from_units(claimed_cost);
            let Some(t) = self.scenario.sellers.iter().position(|s| s.name == target) else {
                continue;
            };
            let Some(target_account) = self.sellers[t].account else { continue };
            let spec = &self.scenario.sellers[t];
            let scope = spec
                .scopes
                .first()
                .unwrap_or(&self.scenario.listings.scopes[0])
                .clone();
            let identities: Vec<AccountId> = self.sellers[i]
                .account
                .into_iter()
                .chain(self.sellers[i].fakes.iter().copied())
                .collect();
            for id in identities {
                // the same identity rates the target twice per round
                for _ in 0..2 {
                    self.record(id, target_account, &scope, RatingValue::Positive, cost);
                }
            }
        }
    }

    fn engine_config(&self) -> EngineConfig {
        let aggregation = match self.scenario.variant {
            Variant::UnweightedReputation => Aggregation::Uniform,
            _ => Aggregation::Weighted,
        };
        EngineConfig {
            aggregation,
            ..self.scenario.engine.clone()
        }
    }

    /// Unit score and advisories a buyer sees for a listing.
    fn assess(&self, buyer: AccountId, listing: &Listing, config: &EngineConfig) -> (f64, BTreeSet<Advisory>) {
        match self.scenario.variant {
            Variant::EbayBaseline => {
                let score = self.history.score(listing.account, config.neutral);
                (score.percent_positive.unwrap_or(0.0), BTreeSet::new())
            }
            Variant::Integrated | Variant::UnweightedReputation => {
                let ctx = ListingContext {
                    scope: listing.scope.clone(),
                    price: listing.price.units(),
                    delivery_days: listing.delivery_days,
                    deliverable: listing.deliverable,
                };
                let op = engine::trust_opinion(buyer, listing.account, &ctx, &self.store, &self.registry, config)
                    .expect("participants are registered and distinct");
                (op.unit_score, op.advisories)
            }
        }
    }

    fn delivery_outcome(&mut self, listing: &Listing) -> Outcome {
        let seller = listing.seller;
        let mut rng = keyed_rng(self.scenario.seed, self.round, self.seller_key(seller), Stream::Delivery);
        let draw: f64 = rng.gen();
        let s = &self.sellers[seller];
        let delivers = match self.scenario.sellers[seller].strategy {
            SellerStrategy::Honest { quality } => draw < quality,
            SellerStrategy::ValueImbalance { honest_phase, .. } => s.deals_on_identity < honest_phase,
            SellerStrategy::IdentityReset { defect_after } => s.deals_on_identity < defect_after,
            SellerStrategy::BallotStuffing { .. } => true,
        };
        if !delivers || !listing.deliverable {
            Outcome::Failed
        } else if listing.delivery_days > self.scenario.engine.max_delivery_days {
            Outcome::Late
        } else {
            Outcome::Delivered
        }
    }

    fn complete_deal(&mut self, buyer: AccountId, listing: &Listing) {
        let outcome = self.delivery_outcome(listing);
        let at = self.tick();
        self.emit(
            at,
            Event::Deal {
                buyer,
                seller: listing.account,
                scope: listing.scope.clone(),
                price: listing.price.units(),
                delivered: outcome != Outcome::Failed,
            },
        );
        self.spend += listing.price;
        let round = self.round;
        let s = &mut self.sellers[listing.seller];
        s.deals += 1;
        s.first_sale_round.get_or_insert(round);
        let value = match outcome {
            Outcome::Delivered => RatingValue::Positive,
            Outcome::Late => RatingValue::Neutral,
            Outcome::Failed => RatingValue::Negative,
        };
        if outcome == Outcome::Failed {
            s.failed += 1;
            s.fraud_gain += listing.price;
            self.current.deals_failed += 1;
            if matches!(self.scenario.sellers[listing.seller].strategy, SellerStrategy::IdentityReset { .. })
                && s.generation as usize + 1 == s.accounts.len()
            {
                s.wants_reset = true;
            }
        } else {
            s.revenue += listing.price;
            if outcome == Outcome::Late {
                self.current.deals_late += 1;
            } else {
                self.current.deals_delivered += 1;
            }
        }
        s.deals_on_identity += 1;
        // cross-rating: both parties rate each other
        self.record(buyer, listing.account, &listing.scope, value, listing.price);
        self.record(listing.account, buyer, &listing.scope, RatingValue::Positive, listing.price);
    }

    fn run_purchases(&mut self, listings: &mut [Listing]) {
        let config = self.engine_config();
        for j in 0..self.buyers.len() {
            let Some(buyer) = self.buyers[j].account else { continue };
            if listings.is_empty() {
                continue;
            }
            let mut rng = keyed_rng(self.scenario.seed, self.round, self.buyer_key(j), Stream::Purchase);
            let pick = rng.gen_range(0..listings.len());
            let explore: f64 = rng.gen();
            let listing = &listings[pick];
            if listing.sold {
                continue;
            }
            self.current.queries += 1;
            let policy = &self.buyers[j].policy;
            if policy.avoid_after_bad_experience {
                let bad = engine::direct_trust(buyer, listing.account, &listing.scope, &self.store)
                    .is_some_and(|d| d.value == RatingValue::Negative);
                if bad {
                    continue;
                }
            }
            let (unit, advisories) = self.assess(buyer, listing, &config);
            if policy.obey_delivery_advisory && advisories.contains(&Advisory::AvoidDelivery) {
                continue;
            }
            let effective = if advisories.contains(&Advisory::NewSeller) {
                unit * (1.0 - policy.new_seller_discount)
            } else {
                unit
            };
            if effective >= policy.threshold || explore < policy.risk_appetite {
                listings[pick].sold = true;
                let listing = listings[pick].clone();
                self.complete_deal(buyer, &listing);
            }
        }
    }

    /// Recommended unit score of a seller's current identity in its primary scope.
    fn seller_score(&self, index: usize) -> Option<f64> {
        let account = self.sellers[index].account?;
        let config = self.engine_config();
        match self.scenario.variant {
            Variant::EbayBaseline => Some(
                self.history
                    .score(account, config.neutral)
                    .percent_positive
                    .unwrap_or(0.0),
            ),
            _ => {
                let spec = &self.scenario.sellers[index];
                let scope = spec.scopes.first().unwrap_or(&self.scenario.listings.scopes[0]);
                let rep = engine::weighted_reputation(account, scope, &self.store, &self.registry, &config)
                    .expect("seller is registered");
                Some(match rep {
                    Reputation::Score(s) => (s + 1.0) / 2.0,
                    Reputation::NewInScope => {
                        let tier = self.registry.account(account).expect("registered").tier;
                        initial_trust(tier, &config.policy)
                    }
                })
            }
        }
    }

    /// Advance one round.
    pub fn step(&mut self) {
        self.current = RoundCounts {
            round: self.round,
            ..RoundCounts::default()
        };
        self.join_buyers();
        self.join_sellers();
        self.attempt_resets();
        let mut listings = self.post_listings();
        self.current.listings = listings.len() as u64;
        for l in &listings {
            let at = self.tick();
            self.emit(
                at,
                Event::Listing {
                    seller: l.account,
                    scope: l.scope.clone(),
                    price: l.price.units(),
                    delivery_days: l.delivery_days,
                    deliverable: l.deliverable,
                },
            );
        }
        self.stuff_ballots();
        self.run_purchases(&mut listings);
        for i in 0..self.sellers.len() {
            let score = self.seller_score(i);
            self.sellers[i].trajectory.push(score);
        }
        self.rounds.push(std::mem::take(&mut self.current));
        self.round += 1;
    }

    pub fn report(&self) -> SimReport {
        let sellers: Vec<SellerReport> = self
            .scenario
            .sellers
            .iter()
            .zip(&self.sellers)
            .map(|(spec, s)| SellerReport {
                name: spec.name.clone(),
                strategy: spec.strategy.kind().to_string(),
                tier: spec.tier,
                honesty: spec.strategy.honesty(),
                accounts: s.accounts.clone(),
                fake_accounts: s.fakes.clone(),
                joins_at: spec.joins_at,
                registration_error: s.registration_error.clone(),
                first_sale_round: s.first_sale_round,
                time_to_first_sale: s.first_sale_round.map(|r| r - spec.joins_at),
                deals: s.deals,
                failed_deliveries: s.failed,
                revenue: s.revenue,
                fraud_gain: s.fraud_gain,
                final_score: s.trajectory.last().copied().flatten(),
                trajectory: s.trajectory.clone(),
            })
            .collect();
        let (scores, honesty): (Vec<f64>, Vec<f64>) = sellers
            .iter()
            .filter_map(|s| s.final_score.map(|f| (f, s.honesty)))
            .unzip();
        let fraud_gain = sellers.iter().map(|s| s.fraud_gain).sum();
        let honest_revenue = sellers.iter().map(|s| s.revenue).sum();
        SimReport {
            seed: self.scenario.seed,
            variant: self.scenario.variant,
            horizon: self.scenario.horizon,
            rounds: self.rounds.clone(),
            sellers,
            metrics: SimMetrics {
                deals: self.rounds.iter().map(|r| r.deals()).sum(),
                ratings_recorded: self.ratings_recorded,
                total_spend: self.spend,
                honest_revenue,
                fraud_gain,
                trust_calibration: spearman(&scores, &honesty),
                blocked_duplicate_registrations: self.blocked_duplicates,
                fake_identities_registered: self.fakes_registered,
            },
        }
    }
}

/// One round transition.
pub fn step(mut world: World) -> World {
    world.step();
    world
}
