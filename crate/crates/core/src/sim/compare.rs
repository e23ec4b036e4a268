use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::report::SimReport;
use super::scenario::{Scenario, Variant};
use super::world::World;
use super::SimError;
use crate::eventlog::EventRecord;
use crate::parallel::{self, Execution};

pub fn run_scenario(scenario: &Scenario) -> Result<SimReport, SimError> {
    scenario.validate()?;
    let mut world = World::new(scenario.clone());
    for _ in 0..scenario.horizon {
        world.step();
    }
    Ok(world.report())
}

/// Run and also return the full event trace.
pub fn run_scenario_traced(scenario: &Scenario) -> Result<(SimReport, Vec<EventRecord>), SimError> {
    scenario.validate()?;
    let mut world = World::new(scenario.clone()).with_trace();
    for _ in 0..scenario.horizon {
        world.step();
    }
    let trace = world.trace().unwrap_or_default().to_vec();
    Ok((world.report(), trace))
}

/// Differences of one variant against the first variant of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantDelta {
    pub variant: Variant,
    pub baseline: Variant,
    /// In cents.
    pub fraud_gain: i64,
    /// In cents.
    pub honest_revenue: i64,
    pub deals: i64,
    pub blocked_duplicate_registrations: i64,
    pub trust_calibration: Option<f64>,
    /// Per seller; `None` when either side never sold.
    pub time_to_first_sale: BTreeMap<String, Option<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub reports: Vec<SimReport>,
    pub deltas: Vec<VariantDelta>,
}

fn delta(report: &SimReport, base: &SimReport) -> VariantDelta {
    let (m, b) = (&report.metrics, &base.metrics);
    let signed = |a: u64, b: u64| a as i64 - b as i64;
    VariantDelta {
        variant: report.variant,
        baseline: base.variant,
        fraud_gain: signed(m.fraud_gain.cents(), b.fraud_gain.cents()),
        honest_revenue: signed(m.honest_revenue.cents(), b.honest_revenue.cents()),
        deals: signed(m.deals, b.deals),
        blocked_duplicate_registrations: signed(
            m.blocked_duplicate_registrations,
            b.blocked_duplicate_registrations,
        ),
        trust_calibration: m.trust_calibration.zip(b.trust_calibration).map(|(x, y)| x - y),
        time_to_first_sale: report
            .sellers
            .iter()
            .zip(&base.sellers)
            .map(|(s, t)| {
                let d = s
                    .time_to_first_sale
                    .zip(t.time_to_first_sale)
                    .map(|(x, y)| x as i64 - y as i64);
                (s.name.clone(), d)
            })
            .collect(),
    }
}

/// Run the same scenario and seed under each variant. Deltas are taken
/// against the first variant listed.
pub fn compare_variants(
    scenario: &Scenario,
    variants: &[Variant],
    exec: Execution,
) -> Result<ComparisonReport, SimError> {
    if variants.is_empty() {
        return Err(SimError::InvalidScenario("no variants to compare".into()));
    }
    scenario.validate()?;
    let reports = parallel::map(variants, exec, |&v| run_scenario(&scenario.with_variant(v)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let deltas = reports.iter().map(|r| delta(r, &reports[0])).collect();
    Ok(ComparisonReport {
        seed: scenario.seed,
        reports,
        deltas,
    })
}

pub fn run_ensemble(
    scenario: &Scenario,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<SimReport>, SimError> {
    scenario.validate()?;
    parallel::map(seeds, exec, |&seed| run_scenario(&scenario.with_seed(seed)))
        .into_iter()
        .collect()
}

/// Means over a seed ensemble for one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub variant: Variant,
    pub seeds: usize,
    /// Currency units.
    pub mean_fraud_gain: f64,
    pub mean_honest_revenue: f64,
    pub mean_fraud_gain_by_seller: BTreeMap<String, f64>,
    /// Sellers that never sold count as the rest of the horizon.
    pub mean_time_to_first_sale: BTreeMap<String, f64>,
    pub mean_trust_calibration: Option<f64>,
    pub total_blocked_duplicate_registrations: u64,
}

pub fn summarize_ensemble(variant: Variant, reports: &[SimReport]) -> EnsembleSummary {
    let n = reports.len().max(1) as f64;
    let mut fraud_by_seller = BTreeMap::new();
    let mut ttfs = BTreeMap::new();
    for r in reports {
        for s in &r.sellers {
            *fraud_by_seller.entry(s.name.clone()).or_insert(0.0) += s.fraud_gain.units() / n;
            let t = r.censored_time_to_first_sale(&s.name).unwrap_or(0) as f64;
            *ttfs.entry(s.name.clone()).or_insert(0.0) += t / n;
        }
    }
    let calibrations: Vec<f64> = reports.iter().filter_map(|r| r.metrics.trust_calibration).collect();
    EnsembleSummary {
        variant,
        seeds: reports.len(),
        mean_fraud_gain: reports.iter().map(|r| r.metrics.fraud_gain.units()).sum::<f64>() / n,
        mean_honest_revenue: reports.iter().map(|r| r.metrics.honest_revenue.units()).sum::<f64>() / n,
        mean_fraud_gain_by_seller: fraud_by_seller,
        mean_time_to_first_sale: ttfs,
        mean_trust_calibration: (!calibrations.is_empty())
            .then(|| calibrations.iter().sum::<f64>() / calibrations.len() as f64),
        total_blocked_duplicate_registrations: reports
            .iter()
            .map(|r| r.metrics.blocked_duplicate_registrations)
            .sum(),
    }
}

/// Run every (variant, seed) pair with common random numbers across variants.
pub fn compare_ensemble(
    scenario: &Scenario,
    variants: &[Variant],
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<EnsembleSummary>, SimError> {
    if variants.is_empty() {
        return Err(SimError::InvalidScenario("no variants to compare".into()));
    }
    scenario.validate()?;
    let jobs: Vec<(Variant, u64)> = variants
        .iter()
        .flat_map(|&v| seeds.iter().map(move |&s| (v, s)))
        .collect();
    let reports = parallel::map(&jobs, exec, |&(v, s)| {
        run_scenario(&scenario.with_variant(v).with_seed(s))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(variants
        .iter()
        .zip(reports.chunks(seeds.len().max(1)))
        .map(|(&v, chunk)| summarize_ensemble(v, chunk))
        .collect())
}

pub fn render_comparison(report: &ComparisonReport) -> String {
    let mut out = String::new();
    for r in &report.reports {
        out.push_str(&r.summary_table());
        out.push('\n');
    }
    for d in report.deltas.iter().skip(1) {
        let _ = writeln!(
            out,
            "{:?} vs {:?}: fraud gain {:+.2}  honest revenue {:+.2}  deals {:+}  calibration {}",
            d.variant,
            d.baseline,
            d.fraud_gain as f64 / 100.0,
            d.honest_revenue as f64 / 100.0,
            d.deals,
            d.trust_calibration
                .map_or_else(|| "n/a".to_string(), |c| format!("{c:+.3}"))
        );
    }
    out
}

pub fn render_ensemble(summaries: &[EnsembleSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        let _ = writeln!(
            out,
            "{:?} over {} seeds: mean fraud gain {:.2}  mean honest revenue {:.2}  calibration {}",
            s.variant,
            s.seeds,
            s.mean_fraud_gain,
            s.mean_honest_revenue,
            s.mean_trust_calibration
                .map_or_else(|| "n/a".to_string(), |c| format!("{c:.3}"))
        );
        for (name, t) in &s.mean_time_to_first_sale {
            let _ = writeln!(
                out,
                "  {name:<16} mean time to first sale {t:>7.2}  mean fraud gain {:>10.2}",
                s.mean_fraud_gain_by_seller.get(name).copied().unwrap_or(0.0)
            );
        }
    }
    out
}
