use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::engine::EngineConfig;
use crate::identity::{
    BusinessDetails, CredentialSet, EvidenceDetails, PersonalDetails, ProfileTier,
};
use crate::ratings::Scope;

/// Which reputation mechanism buyers consult.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Tier fallback, scoped latest-only ratings weighted by rater standing
    /// and deal cost, delivery advisories.
    Integrated,
    /// Net-score feedback over an append-only history. No tier fallback, no
    /// scopes, no cost weighting, no advisories.
    EbayBaseline,
    /// As `Integrated` but every latest rating weighs the same.
    UnweightedReputation,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::Integrated,
        Variant::EbayBaseline,
        Variant::UnweightedReputation,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SellerStrategy {
    /// Delivers with probability `quality`.
    Honest { quality: f64 },
    /// Delivers `honest_phase` deals priced at `low_cost`, then lists at
    /// `defect_cost` and never delivers.
    ValueImbalance {
        honest_phase: u32,
        low_cost: f64,
        defect_cost: f64,
    },
    /// Delivers `defect_after` deals, then stops delivering. After its first
    /// failed delivery it tries to re-register under a fresh name with the
    /// same identity documents.
    IdentityReset { defect_after: u32 },
    /// Sells honestly but tries to register `fake_identities` extra accounts
    /// with its own identity documents, then has every identity it holds
    /// rate `target` positively each round.
    BallotStuffing {
        fake_identities: u32,
        target: String,
        #[serde(default)]
        claimed_cost: f64,
    },
}

impl SellerStrategy {
    pub fn kind(&self) -> &'static str {
        match self {
            SellerStrategy::Honest { .. } => "honest",
            SellerStrategy::ValueImbalance { .. } => "value_imbalance",
            SellerStrategy::IdentityReset { .. } => "identity_reset",
            SellerStrategy::BallotStuffing { .. } => "ballot_stuffing",
        }
    }

    /// How trustworthy the strategy is, for calibration: delivery probability
    /// for honest sellers, zero for every attack.
    pub fn honesty(&self) -> f64 {
        match self {
            SellerStrategy::Honest { quality } => *quality,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellerSpec {
    pub name: String,
    pub tier: ProfileTier,
    #[serde(default)]
    pub joins_at: u64,
    /// Categories this seller lists in; defaults to the scenario's scopes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scopes: Vec<Scope>,
    pub strategy: SellerStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuyerPolicy {
    /// Minimum unit score for a purchase.
    pub threshold: f64,
    /// Chance of buying anyway when the score is below threshold.
    pub risk_appetite: f64,
    pub obey_delivery_advisory: bool,
    /// Multiplies the score by `1 - discount` while the seller is new.
    pub new_seller_discount: f64,
    /// Never buy again from a seller this buyer last rated negatively.
    pub avoid_after_bad_experience: bool,
}

impl Default for BuyerPolicy {
    fn default() -> Self {
        Self {
            threshold: 0.25,
            risk_appetite: 0.05,
            obey_delivery_advisory: true,
            new_seller_discount: 0.0,
            avoid_after_bad_experience: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyerGroup {
    pub count: u32,
    pub tier: ProfileTier,
    #[serde(default)]
    pub policy: BuyerPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ListingParams {
    pub scopes: Vec<Scope>,
    pub price_min: f64,
    pub price_max: f64,
    pub delivery_min_days: u32,
    pub delivery_max_days: u32,
    pub undeliverable_prob: f64,
}

impl Default for ListingParams {
    fn default() -> Self {
        Self {
            scopes: vec![Scope::new("general").expect("non-empty")],
            price_min: 10.0,
            price_max: 200.0,
            delivery_min_days: 1,
            delivery_max_days: 10,
            undeliverable_prob: 0.0,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub horizon: u64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_true")]
    pub enforce_uniqueness: bool,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub listings: ListingParams,
    pub sellers: Vec<SellerSpec>,
    #[serde(default)]
    pub buyers: Vec<BuyerGroup>,
}

fn default_variant() -> Variant {
    Variant::Integrated
}

fn invalid(msg: impl Into<String>) -> SimError {
    SimError::InvalidScenario(msg.into())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.horizon == 0 {
            return Err(invalid("horizon must be positive"));
        }
        if self.sellers.is_empty() && self.buyers.is_empty() {
            return Err(invalid("roster is empty"));
        }
        self.engine
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let money = |v: f64| v.is_finite() && v >= 0.0;
        let l = &self.listings;
        if l.scopes.is_empty() {
            return Err(invalid("listings.scopes must not be empty"));
        }
        if !(money(l.price_min) && money(l.price_max) && l.price_min <= l.price_max) {
            return Err(invalid("price range must satisfy 0 <= price_min <= price_max"));
        }
        if l.delivery_min_days > l.delivery_max_days {
            return Err(invalid("delivery_min_days exceeds delivery_max_days"));
        }
        if !unit(l.undeliverable_prob) {
            return Err(invalid("undeliverable_prob must lie in [0, 1]"));
        }
        let mut names = HashSet::new();
        for s in &self.sellers {
            if !names.insert(s.name.as_str()) {
                return Err(invalid(format!("duplicate seller name {:?}", s.name)));
            }
        }
        for s in &self.sellers {
            match &s.strategy {
                SellerStrategy::Honest { quality } if !unit(*quality) => {
                    return Err(invalid(format!("{}: quality must lie in [0, 1]", s.name)))
                }
                SellerStrategy::ValueImbalance { low_cost, defect_cost, .. }
                    if !(money(*low_cost) && money(*defect_cost)) =>
                {
                    return Err(invalid(format!("{}: costs must be non-negative", s.name)))
                }
                SellerStrategy::BallotStuffing { target, claimed_cost, .. } => {
                    if target == &s.name || !names.contains(target.as_str()) {
                        return Err(invalid(format!(
                            "{}: ballot-stuffing target must be another seller",
                            s.name
                        )));
                    }
                    if !money(*claimed_cost) {
                        return Err(invalid(format!("{}: claimed_cost must be non-negative", s.name)));
                    }
                }
                _ => {}
            }
            if s.joins_at >= self.horizon {
                return Err(invalid(format!("{}: joins after the horizon", s.name)));
            }
        }
        for b in &self.buyers {
            let p = &b.policy;
            if !(unit(p.threshold) && unit(p.risk_appetite) && unit(p.new_seller_discount)) {
                return Err(invalid("buyer policy values must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn with_variant(&self, variant: Variant) -> Scenario {
        Scenario {
            variant,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        Scenario {
            seed,
            ..self.clone()
        }
    }
}

/// Synthetic credentials for a simulated agent. The identity documents depend
/// only on `identity`, so re-registering the same person collides.
pub(crate) fn agent_credentials(display_name: &str, identity: &str, tier: ProfileTier) -> CredentialSet {
    let personal = PersonalDetails {
        full_name: display_name.to_string(),
        address: format!("{identity} street 1"),
        phone: format!("+1-{identity}"),
        city: "Springfield".into(),
        country: "US".into(),
    };
    let business = BusinessDetails {
        national_id: format!("NID-{identity}"),
        bank_or_card: format!("IBAN-{identity}"),
        business_phone: format!("+1-biz-{identity}"),
        business_address: format!("{identity} market 2"),
    };
    let evidence = EvidenceDetails {
        reference_account: format!("ref-{identity}"),
        id_document: format!("idscan-{identity}"),
        registration_document: format!("reg-{identity}"),
        signed_declaration: true,
    };
    match tier {
        ProfileTier::Low => CredentialSet {
            personal: Some(personal),
            ..Default::default()
        },
        ProfileTier::Medium => CredentialSet {
            personal: Some(personal),
            business: Some(business),
            evidence: None,
        },
        ProfileTier::High => CredentialSet {
            personal: Some(personal),
            business: Some(business),
            evidence: Some(evidence),
        },
    }
}
