#![allow(dead_code)]

use proptest::prelude::*;
use tradetrust::identity::{
    BusinessDetails, CredentialSet, EvidenceDetails, PersonalDetails, ProfileTier, Registry, Roles,
};
use tradetrust::ratings::{KeyConvention, Rating, RatingStore, RatingValue, Scope};
use tradetrust::AccountId;

pub const SCOPES: [&str; 3] = ["laptops", "cars", "books"];

pub fn scope(i: usize) -> Scope {
    Scope::new(SCOPES[i % SCOPES.len()]).unwrap()
}

pub fn credentials(name: &str, national_id: &str, bank: &str, tier: ProfileTier) -> CredentialSet {
    let personal = PersonalDetails {
        full_name: name.into(),
        address: "1 Main St".into(),
        phone: "555-0100".into(),
        city: "Springfield".into(),
        country: "SE".into(),
    };
    let business = BusinessDetails {
        national_id: national_id.into(),
        bank_or_card: bank.into(),
        business_phone: "555-0199".into(),
        business_address: "2 Market Sq".into(),
    };
    let evidence = EvidenceDetails {
        reference_account: "ref-1".into(),
        id_document: "id-scan".into(),
        registration_document: "reg-doc".into(),
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

pub fn tier_of(i: u8) -> ProfileTier {
    match i % 3 {
        0 => ProfileTier::Low,
        1 => ProfileTier::Medium,
        _ => ProfileTier::High,
    }
}

/// Registry with one account per tier code, ids `0..tiers.len()`.
pub fn registry(tiers: &[u8]) -> Registry {
    let mut reg = Registry::new();
    for (i, &t) in tiers.iter().enumerate() {
        let creds = credentials(&format!("user{i}"), &format!("NID-{i}"), &format!("BANK-{i}"), tier_of(t));
        reg.register(creds, Roles::BOTH, 0).unwrap();
    }
    reg
}

pub fn value(v: i8) -> RatingValue {
    match v {
        -1 => RatingValue::Negative,
        0 => RatingValue::Neutral,
        _ => RatingValue::Positive,
    }
}

/// One rating event before timestamps are assigned.
#[derive(Debug, Clone)]
pub struct Op {
    pub rater: u64,
    pub ratee: u64,
    pub scope: usize,
    pub value: i8,
    pub cost: f64,
}

pub fn op(accounts: u64) -> impl Strategy<Value = Op> {
    (0..accounts, 0..accounts, 0..SCOPES.len(), -1i8..=1, 0.0f64..1000.0).prop_map(
        |(rater, ratee, scope, value, cost)| Op {
            rater,
            ratee,
            scope,
            value,
            cost,
        },
    )
}

pub fn rating(o: &Op, at: u64) -> Rating {
    Rating {
        rater: AccountId(o.rater),
        ratee: AccountId(o.ratee),
        scope: scope(o.scope),
        value: value(o.value),
        cost: o.cost,
        at,
    }
}

/// Apply ops with increasing timestamps starting at `start`, skipping invalid ones.
pub fn fill(store: &mut RatingStore, registry: &Registry, ops: &[Op], start: u64) {
    for (i, o) in ops.iter().enumerate() {
        let _ = store.record_rating(rating(o, start + i as u64), registry);
    }
}

/// A random registry of 3 to 7 accounts plus a rating history over it.
pub fn world() -> impl Strategy<Value = (Vec<u8>, Vec<Op>)> {
    prop::collection::vec(0u8..3, 3..8).prop_flat_map(|tiers| {
        let n = tiers.len() as u64;
        (Just(tiers), prop::collection::vec(op(n), 0..40))
    })
}

pub fn build(tiers: &[u8], ops: &[Op]) -> (Registry, RatingStore) {
    let reg = registry(tiers);
    let mut store = RatingStore::new(KeyConvention::PerScope);
    fill(&mut store, &reg, ops, 1);
    (reg, store)
}
