//! Latest-only rating repository and the net-score baseline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::{AccountId, Registry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatingError {
    #[error("account {0} cannot rate itself")]
    SelfRating(AccountId),
    #[error("stale rating at t={at}: stored rating for this key is at t={stored}")]
    StaleTimestamp { at: u64, stored: u64 },
    #[error("unknown account {0}")]
    UnknownAccount(AccountId),
    #[error("invalid cost {0}: must be finite and non-negative")]
    InvalidCost(f64),
    #[error("invalid scope: must contain a non-blank category name")]
    InvalidScope,
    #[error("invalid rating value {0}: expected -1, 0 or +1")]
    InvalidValue(i64),
}

/// A product category. Stored trimmed and lowercased.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Scope(String);

impl Scope {
    pub fn new(raw: &str) -> Result<Self, RatingError> {
        let s = raw.trim().to_lowercase();
        if s.is_empty() {
            Err(RatingError::InvalidScope)
        } else {
            Ok(Scope(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl<'de> Deserialize<'de> for Scope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Scope::new(&raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatingValue {
    Negative,
    Neutral,
    Positive,
}

impl RatingValue {
    pub fn as_i8(self) -> i8 {
        match self {
            RatingValue::Negative => -1,
            RatingValue::Neutral => 0,
            RatingValue::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }
}

impl TryFrom<i64> for RatingValue {
    type Error = RatingError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(RatingValue::Negative),
            0 => Ok(RatingValue::Neutral),
            1 => Ok(RatingValue::Positive),
            other => Err(RatingError::InvalidValue(other)),
        }
    }
}

impl fmt::Display for RatingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatingValue::Negative => "-1",
            RatingValue::Neutral => "0",
            RatingValue::Positive => "+1",
        })
    }
}

impl Serialize for RatingValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for RatingValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        RatingValue::try_from(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub rater: AccountId,
    pub ratee: AccountId,
    pub scope: Scope,
    pub value: RatingValue,
    pub cost: f64,
    pub at: u64,
}

/// What "latest rating" replaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyConvention {
    /// One rating per (rater, ratee, scope).
    #[default]
    PerScope,
    /// One rating per (rater, ratee); a new rating in any scope evicts the
    /// pair's rating in every other scope.
    PairGlobal,
}

/// Whether neutral ratings count in the percent-positive denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeutralConvention {
    #[default]
    Exclude,
    Include,
}

pub type RatingKey = (AccountId, AccountId, Scope);

/// Latest-only rating repository.
///
/// Holds at most one rating per key. Every successful mutation bumps
/// [`RatingStore::revision`]; readers use it to tell snapshots apart.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingStore {
    entries: BTreeMap<RatingKey, Rating>,
    by_ratee: BTreeMap<AccountId, BTreeSet<RatingKey>>,
    revision: u64,
    convention: KeyConvention,
}

impl Default for RatingStore {
    fn default() -> Self {
        Self::new(KeyConvention::PerScope)
    }
}

impl RatingStore {
    pub fn new(convention: KeyConvention) -> Self {
        Self {
            entries: BTreeMap::new(),
            by_ratee: BTreeMap::new(),
            revision: 0,
            convention,
        }
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn convention(&self) -> KeyConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn pair_keys(&self, rater: AccountId, ratee: AccountId) -> Vec<RatingKey> {
        self.by_ratee
            .get(&ratee)
            .into_iter()
            .flatten()
            .filter(|k| k.0 == rater)
            .cloned()
            .collect()
    }

    /// Validate a rating against the store without applying it.
    pub fn check(&self, rating: &Rating, registry: &Registry) -> Result<(), RatingError> {
        if rating.rater == rating.ratee {
            return Err(RatingError::SelfRating(rating.rater));
        }
        for id in [rating.rater, rating.ratee] {
            if !registry.contains(id) {
                return Err(RatingError::UnknownAccount(id));
            }
        }
        if !rating.cost.is_finite() || rating.cost < 0.0 {
            return Err(RatingError::InvalidCost(rating.cost));
        }
        let stored = match self.convention {
            KeyConvention::PerScope => self
                .entries
                .get(&(rating.rater, rating.ratee, rating.scope.clone()))
                .map(|r| r.at),
            KeyConvention::PairGlobal => self
                .pair_keys(rating.rater, rating.ratee)
                .iter()
                .filter_map(|k| self.entries.get(k).map(|r| r.at))
                .max(),
        };
        match stored {
            Some(stored) if rating.at <= stored => Err(RatingError::StaleTimestamp {
                at: rating.at,
                stored,
            }),
            _ => Ok(()),
        }
    }

    /// Store `rating`, replacing whatever the key held before.
    pub fn record_rating(&mut self, rating: Rating, registry: &Registry) -> Result<(), RatingError> {
        self.check(&rating, registry)?;
        if self.convention == KeyConvention::PairGlobal {
            for key in self.pair_keys(rating.rater, rating.ratee) {
                self.entries.remove(&key);
                if let Some(keys) = self.by_ratee.get_mut(&key.1) {
                    keys.remove(&key);
                }
            }
        }
        let key = (rating.rater, rating.ratee, rating.scope.clone());
        self.by_ratee.entry(rating.ratee).or_default().insert(key.clone());
        self.entries.insert(key, rating);
        self.revision += 1;
        Ok(())
    }

    /// Latest rating from each rater of `ratee` within `scope`, ordered by rater.
    pub fn latest_ratings_for(&self, ratee: AccountId, scope: &Scope) -> Vec<&Rating> {
        self.received(ratee).filter(|r| &r.scope == scope).collect()
    }

    /// Every latest rating `ratee` has received, across all scopes.
    pub fn received(&self, ratee: AccountId) -> impl Iterator<Item = &Rating> {
        self.by_ratee
            .get(&ratee)
            .into_iter()
            .flatten()
            .filter_map(|k| self.entries.get(k))
    }

    pub fn get(&self, rater: AccountId, ratee: AccountId, scope: &Scope) -> Option<&Rating> {
        self.entries.get(&(rater, ratee, scope.clone()))
    }

    /// All latest ratings `rater` has given `ratee`, across scopes.
    pub fn between(&self, rater: AccountId, ratee: AccountId) -> impl Iterator<Item = &Rating> {
        self.received(ratee).filter(move |r| r.rater == rater)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rating> {
        self.entries.values()
    }

    pub fn ebay_score(&self, ratee: AccountId, neutral: NeutralConvention) -> EbayScore {
        EbayScore::tally(self.received(ratee).map(|r| r.value), neutral)
    }
}

/// Net feedback score: positives minus negatives, plus the positive share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EbayScore {
    pub net: i64,
    pub percent_positive: Option<f64>,
    pub positive: u64,
    pub neutral: u64,
    pub negative: u64,
}

impl EbayScore {
    pub fn tally(values: impl IntoIterator<Item = RatingValue>, neutral: NeutralConvention) -> Self {
        let (mut pos, mut neu, mut neg) = (0u64, 0u64, 0u64);
        for v in values {
            match v {
                RatingValue::Positive => pos += 1,
                RatingValue::Neutral => neu += 1,
                RatingValue::Negative => neg += 1,
            }
        }
        let denom = match neutral {
            NeutralConvention::Exclude => pos + neg,
            NeutralConvention::Include => pos + neu + neg,
        };
        EbayScore {
            net: pos as i64 - neg as i64,
            percent_positive: (denom > 0).then(|| pos as f64 / denom as f64),
            positive: pos,
            neutral: neu,
            negative: neg,
        }
    }

    pub fn counts(&self) -> (u64, u64, u64) {
        (self.positive, self.neutral, self.negative)
    }
}

/// Append-only feedback history, for the baseline where every rating counts
/// forever.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeedbackHistory {
    by_ratee: BTreeMap<AccountId, Vec<RatingValue>>,
}

impl FeedbackHistory {
    pub fn push(&mut self, rating: &Rating) {
        self.by_ratee.entry(rating.ratee).or_default().push(rating.value);
    }

    pub fn score(&self, ratee: AccountId, neutral: NeutralConvention) -> EbayScore {
        EbayScore::tally(
            self.by_ratee.get(&ratee).into_iter().flatten().copied(),
            neutral,
        )
    }
}
