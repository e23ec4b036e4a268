use std::fmt::{self, Write as _};
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::scenario::Variant;
use crate::identity::{AccountId, ProfileTier};

/// Currency amount in integer cents, so money totals add up exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub u64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_units(units: f64) -> Money {
        Money((units.max(0.0) * 100.0).round() as u64)
    }

    pub fn cents(self) -> u64 {
        self.0
    }

    pub fn units(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundCounts {
    pub round: u64,
    pub registrations: u64,
    pub registrations_blocked: u64,
    pub listings: u64,
    pub queries: u64,
    pub deals_delivered: u64,
    pub deals_late: u64,
    pub deals_failed: u64,
    pub ratings: u64,
}

impl RoundCounts {
    pub fn deals(&self) -> u64 {
        self.deals_delivered + self.deals_late + self.deals_failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellerReport {
    pub name: String,
    pub strategy: String,
    pub tier: ProfileTier,
    pub honesty: f64,
    /// Every identity the seller held, oldest first.
    pub accounts: Vec<AccountId>,
    pub fake_accounts: Vec<AccountId>,
    pub joins_at: u64,
    pub registration_error: Option<String>,
    pub first_sale_round: Option<u64>,
    /// Rounds from joining to the first sale; `None` if it never sold.
    pub time_to_first_sale: Option<u64>,
    pub deals: u64,
    pub failed_deliveries: u64,
    pub revenue: Money,
    pub fraud_gain: Money,
    pub final_score: Option<f64>,
    /// Recommended unit score at the end of each round, `None` before joining.
    pub trajectory: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub deals: u64,
    pub ratings_recorded: u64,
    pub total_spend: Money,
    /// Spend on deals that were delivered.
    pub honest_revenue: Money,
    /// Spend on deals that were never delivered.
    pub fraud_gain: Money,
    /// Spearman correlation between final score and strategy honesty.
    pub trust_calibration: Option<f64>,
    pub blocked_duplicate_registrations: u64,
    pub fake_identities_registered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub variant: Variant,
    pub horizon: u64,
    pub rounds: Vec<RoundCounts>,
    pub sellers: Vec<SellerReport>,
    pub metrics: SimMetrics,
}

impl SimReport {
    pub fn seller(&self, name: &str) -> Option<&SellerReport> {
        self.sellers.iter().find(|s| s.name == name)
    }

    /// Time to first sale, counting a seller that never sold as the full
    /// remaining horizon.
    pub fn censored_time_to_first_sale(&self, name: &str) -> Option<u64> {
        let s = self.seller(name)?;
        Some(s.time_to_first_sale.unwrap_or(self.horizon - s.joins_at))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn summary_table(&self) -> String {
        let m = &self.metrics;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "variant {:?}  seed {}  horizon {}",
            self.variant, self.seed, self.horizon
        );
        let _ = writeln!(
            out,
            "deals {}  ratings {}  spend {}  honest revenue {}  fraud gain {}",
            m.deals, m.ratings_recorded, m.total_spend, m.honest_revenue, m.fraud_gain
        );
        let _ = writeln!(
            out,
            "blocked duplicate registrations {}  fake identities registered {}  trust calibration {}",
            m.blocked_duplicate_registrations,
            m.fake_identities_registered,
            m.trust_calibration
                .map_or_else(|| "n/a".to_string(), |c| format!("{c:.3}"))
        );
        let _ = writeln!(
            out,
            "{:<16} {:<16} {:<6} {:>5} {:>6} {:>6} {:>12} {:>12} {:>6}",
            "seller", "strategy", "tier", "ttfs", "deals", "failed", "revenue", "fraud", "score"
        );
        for s in &self.sellers {
            let _ = writeln!(
                out,
                "{:<16} {:<16} {:<6} {:>5} {:>6} {:>6} {:>12} {:>12} {:>6}",
                s.name,
                s.strategy,
                s.tier.to_string(),
                s.time_to_first_sale.map_or("-".into(), |t| t.to_string()),
                s.deals,
                s.failed_deliveries,
                s.revenue.to_string(),
                s.fraud_gain.to_string(),
                s.final_score.map_or("-".into(), |f| format!("{f:.3}"))
            );
        }
        out
    }
}
