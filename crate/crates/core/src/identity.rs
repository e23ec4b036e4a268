//! Credential classification, registration and initial trust.
//!
//! Registration is tiered: a complete personal block admits an account at
//! [`ProfileTier::Low`], a complete business block on top of it lifts the
//! account to [`ProfileTier::Medium`], and complete supporting evidence with a
//! signed declaration lifts it to [`ProfileTier::High`]. The [`Registry`]
//! refuses any registration whose national id or bank/card reference is
//! already held by another account, after normalization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("incomplete credentials: {0}")]
    IncompleteCredentials(&'static str),
    #[error("credential blocks are not cumulative: {0}")]
    InconsistentCredentials(&'static str),
    #[error("duplicate identity: {field} already registered to account {existing}")]
    DuplicateIdentity {
        field: IdentityField,
        existing: AccountId,
    },
    #[error("unknown account {0}")]
    UnknownAccount(AccountId),
    #[error("invalid policy config: {0}")]
    InvalidConfig(String),
}

/// Which unique identity string caused a registration to be refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityField {
    NationalId,
    BankOrCard,
}

impl fmt::Display for IdentityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityField::NationalId => f.write_str("national id"),
            IdentityField::BankOrCard => f.write_str("bank or card"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountId(pub u64);

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PersonalDetails {
    pub full_name: String,
    pub address: String,
    pub phone: String,
    pub city: String,
    pub country: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BusinessDetails {
    pub national_id: String,
    pub bank_or_card: String,
    pub business_phone: String,
    pub business_address: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvidenceDetails {
    pub reference_account: String,
    pub id_document: String,
    pub registration_document: String,
    pub signed_declaration: bool,
}

fn filled(s: &str) -> bool {
    !s.trim().is_empty()
}

impl PersonalDetails {
    pub fn is_complete(&self) -> bool {
        [
            &self.full_name,
            &self.address,
            &self.phone,
            &self.city,
            &self.country,
        ]
        .iter()
        .all(|s| filled(s))
    }
}

impl BusinessDetails {
    pub fn is_complete(&self) -> bool {
        [
            &self.national_id,
            &self.bank_or_card,
            &self.business_phone,
            &self.business_address,
        ]
        .iter()
        .all(|s| filled(s))
    }
}

impl EvidenceDetails {
    pub fn is_complete(&self) -> bool {
        filled(&self.reference_account)
            && filled(&self.id_document)
            && filled(&self.registration_document)
            && self.signed_declaration
    }
}

/// The credential blocks submitted at registration. Blocks are cumulative:
/// evidence requires business details and business details require personal
/// details.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CredentialSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub personal: Option<PersonalDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub business: Option<BusinessDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceDetails>,
}

impl CredentialSet {
    pub fn check_cumulative(&self) -> Result<(), IdentityError> {
        if self.evidence.is_some() && self.business.is_none() {
            return Err(IdentityError::InconsistentCredentials(
                "evidence supplied without business details",
            ));
        }
        if self.business.is_some() && self.personal.is_none() {
            return Err(IdentityError::InconsistentCredentials(
                "business details supplied without personal details",
            ));
        }
        Ok(())
    }

    /// Normalized national id, if a non-empty one is present.
    pub fn national_id_key(&self) -> Option<String> {
        self.business
            .as_ref()
            .and_then(|b| normalize_identity(&b.national_id))
    }

    pub fn bank_key(&self) -> Option<String> {
        self.business
            .as_ref()
            .and_then(|b| normalize_identity(&b.bank_or_card))
    }
}

/// Trim, case-fold and strip separators. Returns `None` when nothing is left.
pub fn normalize_identity(raw: &str) -> Option<String> {
    let key: String = raw
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect();
    (!key.is_empty()).then_some(key)
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ProfileTier {
    Low,
    Medium,
    High,
}

impl fmt::Display for ProfileTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileTier::Low => "Low",
            ProfileTier::Medium => "Medium",
            ProfileTier::High => "High",
        })
    }
}

/// Classify a credential set into a profile tier.
///
/// A business block only counts when every business field is present, and
/// evidence only counts on top of a complete business block.
pub fn classify_profile(credentials: &CredentialSet) -> Result<ProfileTier, IdentityError> {
    credentials.check_cumulative()?;
    match &credentials.personal {
        Some(p) if p.is_complete() => {}
        _ => {
            return Err(IdentityError::IncompleteCredentials(
                "a complete personal details block is required",
            ))
        }
    }
    let business = credentials
        .business
        .as_ref()
        .is_some_and(BusinessDetails::is_complete);
    if !business {
        return Ok(ProfileTier::Low);
    }
    let evidence = credentials
        .evidence
        .as_ref()
        .is_some_and(EvidenceDetails::is_complete);
    Ok(if evidence {
        ProfileTier::High
    } else {
        ProfileTier::Medium
    })
}

/// Initial trust granted per profile tier, each in `[0, 1]` and monotone in tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub low: f64,
    pub medium: f64,
    pub high: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            low: 0.0,
            medium: 0.15,
            high: 0.30,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), IdentityError> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(in_unit(self.low) && in_unit(self.medium) && in_unit(self.high)) {
            return Err(IdentityError::InvalidConfig(
                "initial trust must lie in [0, 1]".into(),
            ));
        }
        if !(self.low <= self.medium && self.medium <= self.high) {
            return Err(IdentityError::InvalidConfig(
                "initial trust must be monotone in tier".into(),
            ));
        }
        Ok(())
    }
}

pub fn initial_trust(tier: ProfileTier, config: &PolicyConfig) -> f64 {
    match tier {
        ProfileTier::Low => config.low,
        ProfileTier::Medium => config.medium,
        ProfileTier::High => config.high,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Roles {
    pub seller: bool,
    pub buyer: bool,
}

impl Roles {
    pub const BOTH: Roles = Roles {
        seller: true,
        buyer: true,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub id: AccountId,
    pub credentials: CredentialSet,
    pub tier: ProfileTier,
    pub registered_at: u64,
    pub roles: Roles,
}

/// Account registry with uniqueness indexes over national ids and bank or
/// card references.
///
/// Single writer: every mutation goes through `&mut self`. Readers take a
/// `clone` or a shared borrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    accounts: BTreeMap<AccountId, Account>,
    by_national_id: HashMap<String, AccountId>,
    by_bank: HashMap<String, AccountId>,
    next_id: u64,
    enforce_uniqueness: bool,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        Self {
            accounts: BTreeMap::new(),
            by_national_id: HashMap::new(),
            by_bank: HashMap::new(),
            next_id: 0,
            enforce_uniqueness: true,
        }
    }

    /// A registry that accepts reused identity strings. Only useful for
    /// measuring what the duplicate check prevents.
    pub fn without_uniqueness() -> Self {
        Self {
            enforce_uniqueness: false,
            ..Self::new()
        }
    }

    pub fn enforces_uniqueness(&self) -> bool {
        self.enforce_uniqueness
    }

    /// Check a request without mutating the registry.
    pub fn check(&self, credentials: &CredentialSet) -> Result<ProfileTier, IdentityError> {
        let tier = classify_profile(credentials)?;
        if self.enforce_uniqueness {
            if let Some(key) = credentials.national_id_key() {
                if let Some(&existing) = self.by_national_id.get(&key) {
                    return Err(IdentityError::DuplicateIdentity {
                        field: IdentityField::NationalId,
                        existing,
                    });
                }
            }
            if let Some(key) = credentials.bank_key() {
                if let Some(&existing) = self.by_bank.get(&key) {
                    return Err(IdentityError::DuplicateIdentity {
                        field: IdentityField::BankOrCard,
                        existing,
                    });
                }
            }
        }
        Ok(tier)
    }

    pub fn register(
        &mut self,
        credentials: CredentialSet,
        roles: Roles,
        at: u64,
    ) -> Result<&Account, IdentityError> {
        let tier = self.check(&credentials)?;
        let id = AccountId(self.next_id);
        self.next_id += 1;
        if let Some(key) = credentials.national_id_key() {
            self.by_national_id.entry(key).or_insert(id);
        }
        if let Some(key) = credentials.bank_key() {
            self.by_bank.entry(key).or_insert(id);
        }
        let account = Account {
            id,
            credentials,
            tier,
            registered_at: at,
            roles,
        };
        Ok(self.accounts.entry(id).or_insert(account))
    }

    pub fn get(&self, id: AccountId) -> Option<&Account> {
        self.accounts.get(&id)
    }

    pub fn account(&self, id: AccountId) -> Result<&Account, IdentityError> {
        self.get(id).ok_or(IdentityError::UnknownAccount(id))
    }

    pub fn contains(&self, id: AccountId) -> bool {
        self.accounts.contains_key(&id)
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiers_follow_completed_blocks() {
        assert_eq!(classify_profile(&low("a")), Ok(ProfileTier::Low));
        assert_eq!(
            classify_profile(&medium("a", "AB-1", "card-1")),
            Ok(ProfileTier::Medium)
        );
        assert_eq!(
            classify_profile(&high("a", "AB-1", "card-1")),
            Ok(ProfileTier::High)
        );
    }

    #[test]
    fn incomplete_personal_block_is_rejected() {
        let mut creds = low("a");
        creds.personal.as_mut().unwrap().city = "  ".into();
        assert!(matches!(
            classify_profile(&creds),
            Err(IdentityError::IncompleteCredentials(_))
        ));
        assert!(matches!(
            classify_profile(&CredentialSet::default()),
            Err(IdentityError::IncompleteCredentials(_))
        ));
    }

    #[test]
    fn partial_business_block_stays_low() {
        let mut creds = medium("a", "AB-1", "card");
        creds.business.as_mut().unwrap().business_phone.clear();
        assert_eq!(classify_profile(&creds), Ok(ProfileTier::Low));
    }

    #[test]
    fn unsigned_evidence_stays_medium() {
        let mut creds = high("a", "AB-1", "card");
        creds.evidence.as_mut().unwrap().signed_declaration = false;
        assert_eq!(classify_profile(&creds), Ok(ProfileTier::Medium));
    }

    #[test]
    fn non_cumulative_blocks_are_rejected() {
        let creds = CredentialSet {
            personal: None,
            business: Some(business("x", "y")),
            evidence: None,
        };
        assert!(matches!(
            classify_profile(&creds),
            Err(IdentityError::InconsistentCredentials(_))
        ));
        let creds = CredentialSet {
            personal: Some(personal("a")),
            business: None,
            evidence: Some(evidence()),
        };
        assert!(matches!(
            classify_profile(&creds),
            Err(IdentityError::InconsistentCredentials(_))
        ));
    }

    #[test]
    fn reused_national_id_is_refused() {
        let mut reg = Registry::new();
        let first = reg.register(medium("a", "AB-1", "card-1"), Roles::BOTH, 0).unwrap().id;
        let err = reg
            .register(medium("b", "AB-1", "card-2"), Roles::BOTH, 1)
            .unwrap_err();
        assert_eq!(
            err,
            IdentityError::DuplicateIdentity {
                field: IdentityField::NationalId,
                existing: first
            }
        );
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn normalization_defeats_cosmetic_variants() {
        let mut reg = Registry::new();
        reg.register(medium("a", "AB-1", "4111 1111"), Roles::BOTH, 0).unwrap();
        let err = reg
            .register(medium("b", " ab1 ", "other"), Roles::BOTH, 1)
            .unwrap_err();
        assert!(matches!(err, IdentityError::DuplicateIdentity { field: IdentityField::NationalId, .. }));
        let err = reg
            .register(medium("c", "CD-2", "4111-1111"), Roles::BOTH, 2)
            .unwrap_err();
        assert!(matches!(err, IdentityError::DuplicateIdentity { field: IdentityField::BankOrCard, .. }));
    }

    #[test]
    fn low_tier_requests_never_collide() {
        let mut reg = Registry::new();
        reg.register(low("a"), Roles::BOTH, 0).unwrap();
        let acct = reg.register(low("a"), Roles::BOTH, 1).unwrap();
        assert_eq!(acct.tier, ProfileTier::Low);
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn ids_follow_sequence() {
        let mut reg = Registry::new();
        assert_eq!(reg.register(low("a"), Roles::BOTH, 0).unwrap().id, AccountId(0));
        let _ = reg.register(CredentialSet::default(), Roles::BOTH, 1);
        assert_eq!(reg.register(low("b"), Roles::BOTH, 2).unwrap().id, AccountId(1));
    }

    #[test]
    fn initial_trust_lookup() {
        let cfg = PolicyConfig::default();
        assert_eq!(initial_trust(ProfileTier::High, &cfg), 0.30);
        assert_eq!(initial_trust(ProfileTier::Low, &cfg), 0.00);
        assert!(PolicyConfig { low: 0.2, medium: 0.1, high: 0.3 }.validate().is_err());
        assert!(PolicyConfig { low: 0.0, medium: 0.1, high: 1.3 }.validate().is_err());
    }

    fn arb_creds() -> impl Strategy<Value = CredentialSet> {
        (0u8..3, 0u8..4, 0u8..4, any::<bool>()).prop_map(|(level, nid, bank, signed)| {
            let nid = format!("N-{nid}");
            let bank = format!("B{bank}");
            let mut creds = match level {
                0 => low("x"),
                1 => medium("x", &nid, &bank),
                _ => high("x", &nid, &bank),
            };
            if let Some(ev) = creds.evidence.as_mut() {
                ev.signed_declaration = signed;
            }
            creds
        })
    }

    proptest! {
        #[test]
        fn adding_a_complete_block_never_lowers_tier(name in "[a-z]{1,8}", nid in "[A-Z0-9]{1,6}") {
            let l = classify_profile(&low(&name)).unwrap();
            let m = classify_profile(&medium(&name, &nid, "bank")).unwrap();
            let h = classify_profile(&high(&name, &nid, "bank")).unwrap();
            prop_assert!(l <= m && m <= h);
        }

        #[test]
        fn accepted_accounts_hold_unique_identities(reqs in prop::collection::vec(arb_creds(), 1..40)) {
            let mut reg = Registry::new();
            for (i, c) in reqs.into_iter().enumerate() {
                let _ = reg.register(c, Roles::BOTH, i as u64);
            }
            let mut nids = std::collections::HashSet::new();
            let mut banks = std::collections::HashSet::new();
            for a in reg.accounts() {
                if let Some(k) = a.credentials.national_id_key() { prop_assert!(nids.insert(k)); }
                if let Some(k) = a.credentials.bank_key() { prop_assert!(banks.insert(k)); }
                prop_assert_eq!(Ok(a.tier), classify_profile(&a.credentials));
            }
        }

        #[test]
        fn non_colliding_registration_is_order_insensitive(n in 1usize..12, seed in any::<u64>()) {
            let reqs: Vec<_> = (0..n).map(|i| medium("x", &format!("N{i}"), &format!("B{i}"))).collect();
            let mut shuffled = reqs.clone();
            // deterministic rotation + reversal as a cheap permutation
            shuffled.rotate_left((seed as usize) % n);
            if seed % 2 == 0 { shuffled.reverse(); }
            let contents = |reqs: Vec<CredentialSet>| {
                let mut reg = Registry::new();
                for c in reqs { reg.register(c, Roles::BOTH, 0).unwrap(); }
                let mut v: Vec<_> = reg.accounts().map(|a| (a.credentials.clone(), a.tier)).collect();
                v.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
                v
            };
            prop_assert_eq!(contents(reqs), contents(shuffled));
        }
    }
}
