//! Likert-scale descriptive statistics and the Kruskal-Wallis H test.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("group is empty")]
    EmptyGroup,
    #[error("need at least 2 samples for sample variance, got {0}")]
    TooFewSamples(usize),
    #[error("group {group:?} has {size} responses; at least {min} are required")]
    GroupTooSmall { group: String, size: usize, min: usize },
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("no chi-square table entry for df={df}, alpha={alpha}")]
    UnsupportedParameters { df: usize, alpha: f64 },
    #[error("Likert response {0} outside 1..=5")]
    OutOfRange(i64),
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One answer on the five-point agreement scale: 1 = strongly disagree,
/// 5 = strongly agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct LikertResponse(u8);

impl LikertResponse {
    pub fn new(v: i64) -> Result<Self, StatsError> {
        if (1..=5).contains(&v) {
            Ok(LikertResponse(v as u8))
        } else {
            Err(StatsError::OutOfRange(v))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Parse a numeric code or one of the scale labels.
    pub fn parse_label(s: &str) -> Option<Self> {
        let t = s.trim().to_lowercase();
        let v = match t.as_str() {
            "strongly agree" => 5,
            "agree" => 4,
            "less agree" | "neutral" => 3,
            "disagree" => 2,
            "strongly disagree" => 1,
            other => other.parse::<i64>().ok()?,
        };
        LikertResponse::new(v).ok()
    }
}

impl TryFrom<i64> for LikertResponse {
    type Error = StatsError;
    fn try_from(v: i64) -> Result<Self, StatsError> {
        LikertResponse::new(v)
    }
}

impl From<LikertResponse> for u8 {
    fn from(r: LikertResponse) -> u8 {
        r.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertGroup {
    pub name: String,
    pub responses: Vec<LikertResponse>,
}

impl LikertGroup {
    pub fn values(&self) -> Vec<f64> {
        self.responses.iter().map(|r| f64::from(r.0)).collect()
    }
}

/// Named groups of responses, in input order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LikertDataset {
    pub groups: Vec<LikertGroup>,
}

impl LikertDataset {
    /// Expand per-group counts, indexed by scale point 1..=5.
    pub fn from_counts<S: Into<String>>(groups: impl IntoIterator<Item = (S, [u64; 5])>) -> Self {
        let groups = groups
            .into_iter()
            .map(|(name, counts)| LikertGroup {
                name: name.into(),
                responses: counts
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &c)| std::iter::repeat_n(LikertResponse(i as u8 + 1), c as usize))
                    .collect(),
            })
            .collect();
        LikertDataset { groups }
    }

    pub fn group(&self, name: &str) -> Option<&LikertGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    fn group_mut(&mut self, name: &str) -> &mut LikertGroup {
        if let Some(i) = self.groups.iter().position(|g| g.name == name) {
            &mut self.groups[i]
        } else {
            self.groups.push(LikertGroup {
                name: name.to_string(),
                responses: Vec::new(),
            });
            self.groups.last_mut().unwrap()
        }
    }

    /// Parse CSV in either layout.
    ///
    /// Long layout: a `group,response` header, then one response per row.
    /// Frequency layout: a header naming each group after a leading scale
    /// column, then one row per scale point with a count per group. Rows
    /// labelled `Total` and columns headed `%` are skipped.
    pub fn parse_csv(text: &str) -> Result<Self, StatsError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| StatsError::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            rows.push((line, rec.iter().map(str::to_string).collect::<Vec<_>>()));
        }
        let Some((header_line, header)) = rows.first().cloned() else {
            return Ok(LikertDataset::default());
        };
        if header.first().is_some_and(|h| h.eq_ignore_ascii_case("group")) {
            Self::parse_long(&rows[1..])
        } else if header.len() >= 2 {
            Self::parse_wide(&header, &rows[1..])
        } else {
            Err(StatsError::Parse {
                line: header_line,
                reason: "expected a `group,response` header or a frequency-table header".into(),
            })
        }
    }

    fn parse_long(rows: &[(usize, Vec<String>)]) -> Result<Self, StatsError> {
        let mut ds = LikertDataset::default();
        for (line, row) in rows {
            let [group, value] = row.as_slice() else {
                return Err(StatsError::Parse {
                    line: *line,
                    reason: "expected two fields: group,response".into(),
                });
            };
            let response = LikertResponse::parse_label(value).ok_or_else(|| StatsError::Parse {
                line: *line,
                reason: format!("invalid response {value:?}"),
            })?;
            ds.group_mut(group).responses.push(response);
        }
        Ok(ds)
    }

    fn parse_wide(header: &[String], rows: &[(usize, Vec<String>)]) -> Result<Self, StatsError> {
        let columns: Vec<(usize, &str)> = header
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, h)| !h.is_empty() && h.as_str() != "%")
            .map(|(i, h)| (i, h.as_str()))
            .collect();
        let mut counts = vec![[0u64; 5]; columns.len()];
        for (line, row) in rows {
            let label = row.first().map(String::as_str).unwrap_or("");
            if label.eq_ignore_ascii_case("total") {
                continue;
            }
            let point = LikertResponse::parse_label(label).ok_or_else(|| StatsError::Parse {
                line: *line,
                reason: format!("unknown scale label {label:?}"),
            })?;
            for (g, &(col, _)) in columns.iter().enumerate() {
                let cell = row.get(col).map(String::as_str).unwrap_or("0");
                let n: u64 = if cell.is_empty() {
                    0
                } else {
                    cell.parse().map_err(|_| StatsError::Parse {
                        line: *line,
                        reason: format!("invalid count {cell:?}"),
                    })?
                };
                counts[g][usize::from(point.0) - 1] += n;
            }
        }
        Ok(LikertDataset::from_counts(
            columns.iter().map(|(_, name)| name.to_string()).zip(counts),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub n: u64,
    /// Counts per scale point, index 0 is response 1.
    pub counts: [u64; 5],
    pub relative: [f64; 5],
}

pub fn frequency_table(group: &[LikertResponse]) -> Result<FrequencyTable, StatsError> {
    if group.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let mut counts = [0u64; 5];
    for r in group {
        counts[usize::from(r.0) - 1] += 1;
    }
    let n = group.len() as u64;
    Ok(FrequencyTable {
        n,
        counts,
        relative: counts.map(|c| c as f64 / n as f64),
    })
}

/// Descriptive summary in the usual spreadsheet column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub sum: f64,
    pub mean: f64,
    pub median: f64,
    /// Sample variance (n - 1 denominator).
    pub variance: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary, StatsError> {
    let n = values.len();
    if n == 0 {
        return Err(StatsError::EmptyGroup);
    }
    if n < 2 {
        return Err(StatsError::TooFewSamples(n));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sum: f64 = sorted.iter().sum();
    let mean = sum / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let ss: f64 = sorted.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok(Summary {
        count: n,
        min: sorted[0],
        max: sorted[n - 1],
        sum,
        mean,
        median,
        variance: ss / (n - 1) as f64,
    })
}

pub fn summarize_group(group: &LikertGroup) -> Result<Summary, StatsError> {
    summarize(&group.values())
}

/// Chi-square upper-tail critical values, rows df = 1..=10, columns
/// alpha = 0.10, 0.05, 0.01.
const CHI_SQUARE_TABLE: [[f64; 3]; 10] = [
    [2.706, 3.841, 6.635],
    [4.605, 5.991, 9.210],
    [6.251, 7.815, 11.345],
    [7.779, 9.488, 13.277],
    [9.236, 11.070, 15.086],
    [10.645, 12.592, 16.812],
    [12.017, 14.067, 18.475],
    [13.362, 15.507, 20.090],
    [14.684, 16.919, 21.666],
    [15.987, 18.307, 23.209],
];

const ALPHAS: [f64; 3] = [0.10, 0.05, 0.01];

pub fn chi_square_critical(df: usize, alpha: f64) -> Result<f64, StatsError> {
    let col = ALPHAS.iter().position(|a| (a - alpha).abs() < 1e-12);
    match (df, col) {
        (1..=10, Some(col)) => Ok(CHI_SQUARE_TABLE[df - 1][col]),
        _ => Err(StatsError::UnsupportedParameters { df, alpha }),
    }
}

/// Smallest group size for which the chi-square approximation is used.
pub const MIN_GROUP_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidRank {
    pub value: f64,
    /// Tie count.
    pub count: usize,
    pub rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KruskalResult {
    pub groups: Vec<String>,
    pub sizes: Vec<usize>,
    pub rank_sums: Vec<f64>,
    pub rank_sum_total: f64,
    pub mid_ranks: Vec<MidRank>,
    pub h: f64,
    /// Divisor `1 - sum(t^3 - t) / (N^3 - N)`.
    pub tie_correction: f64,
    pub h_tie_corrected: f64,
    pub df: usize,
    pub alpha: f64,
    pub critical: f64,
    pub reject: bool,
}

/// Kruskal-Wallis H over arbitrary ordinal samples.
///
/// Tied values share the mean of the rank positions they occupy. The reject
/// decision uses the tie-corrected statistic.
pub fn kruskal_wallis_samples(
    groups: &[(String, Vec<f64>)],
    alpha: f64,
) -> Result<KruskalResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for (name, vals) in groups {
        if vals.len() < MIN_GROUP_SIZE {
            return Err(StatsError::GroupTooSmall {
                group: name.clone(),
                size: vals.len(),
                min: MIN_GROUP_SIZE,
            });
        }
    }
    let df = groups.len() - 1;
    let critical = chi_square_critical(df, alpha)?;

    let mut pooled: Vec<(f64, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, (_, vals))| vals.iter().map(move |&v| (v, g)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pooled.len();

    let mut rank_sums = vec![0.0; groups.len()];
    let mut mid_ranks = Vec::new();
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &(_, g) in &pooled[start..end] {
            rank_sums[g] += rank;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        mid_ranks.push(MidRank {
            value: pooled[start].0,
            count: end - start,
            rank,
        });
        start = end;
    }

    let nf = n as f64;
    let sum_sq: f64 = rank_sums
        .iter()
        .zip(groups)
        .map(|(r, (_, vals))| r * r / vals.len() as f64)
        .sum();
    let h = (12.0 / (nf * (nf + 1.0)) * sum_sq - 3.0 * (nf + 1.0)).max(0.0);
    let tie_correction = 1.0 - tie_term / (nf * nf * nf - nf);
    let h_tie_corrected = if tie_correction > 0.0 { h / tie_correction } else { 0.0 };

    Ok(KruskalResult {
        groups: groups.iter().map(|(g, _)| g.clone()).collect(),
        sizes: groups.iter().map(|(_, v)| v.len()).collect(),
        rank_sum_total: rank_sums.iter().sum(),
        rank_sums,
        mid_ranks,
        h,
        tie_correction,
        h_tie_corrected,
        df,
        alpha,
        critical,
        reject: h_tie_corrected > critical,
    })
}

pub fn kruskal_wallis(dataset: &LikertDataset, alpha: f64) -> Result<KruskalResult, StatsError> {
    let groups: Vec<(String, Vec<f64>)> = dataset
        .groups
        .iter()
        .map(|g| (g.name.clone(), g.values()))
        .collect();
    kruskal_wallis_samples(&groups, alpha)
}

/// Mid-ranks of `values` (ties share the mean of their positions), in input order.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation. `None` for mismatched lengths, fewer than two
/// pairs, or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (mid_ranks(x), mid_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Comparison of externally reported rank sums (and optionally H) against a
/// computed result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSumCheck {
    pub reported: Vec<f64>,
    pub reported_total: f64,
    /// `N(N + 1) / 2`.
    pub expected_total: f64,
    pub consistent: bool,
    pub reported_h: Option<f64>,
    pub computed_h: f64,
    pub computed_h_tie_corrected: f64,
}

pub fn check_reported_rank_sums(
    result: &KruskalResult,
    reported: &[f64],
    reported_h: Option<f64>,
) -> RankSumCheck {
    let n: usize = result.sizes.iter().sum();
    let expected_total = (n * (n + 1)) as f64 / 2.0;
    let reported_total: f64 = reported.iter().sum();
    RankSumCheck {
        reported: reported.to_vec(),
        reported_total,
        expected_total,
        consistent: reported.len() == result.sizes.len() && reported_total == expected_total,
        reported_h,
        computed_h: result.h,
        computed_h_tie_corrected: result.h_tie_corrected,
    }
}

pub fn render_summary_table(rows: &[(String, Summary)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);
    let mut out = format!(
        "{:<width$}  {:>5}  {:>4}  {:>4}  {:>8}  {:>8}  {:>6}  {:>11}\n",
        "Groups", "Count", "Min", "Max", "Sum", "Mean", "Median", "Variance"
    );
    for (name, s) in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>5}  {:>4}  {:>4}  {:>8}  {:>8}  {:>6}  {:>11.9}",
            name,
            s.count,
            s.min,
            s.max,
            s.sum,
            format!("{}", (s.mean * 1e9).round() / 1e9),
            s.median,
            s.variance
        );
    }
    out
}

pub fn render_frequency_table(rows: &[(String, FrequencyTable)]) -> String {
    const LABELS: [&str; 5] = [
        "Strongly Disagree",
        "Disagree",
        "Less Agree",
        "Agree",
        "Strongly Agree",
    ];
    let mut out = format!("{:<22}", "Scale");
    for (name, _) in rows {
        let _ = write!(out, "  {:>14}", format!("{name} N"));
        let _ = write!(out, "  {:>6}", "%");
    }
    out.push('\n');
    for point in (0..5).rev() {
        let _ = write!(out, "{:<22}", format!("{} ({})", LABELS[point], point + 1));
        for (_, t) in rows {
            let _ = write!(out, "  {:>14}  {:>6.1}", t.counts[point], 100.0 * t.relative[point]);
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<22}", "Total");
    for (_, t) in rows {
        let _ = write!(out, "  {:>14}  {:>6.1}", t.n, 100.0);
    }
    out.push('\n');
    out
}

pub fn render_kruskal(result: &KruskalResult, check: Option<&RankSumCheck>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Kruskal-Wallis H test (alpha = {})", result.alpha);
    for ((g, n), r) in result.groups.iter().zip(&result.sizes).zip(&result.rank_sums) {
        let _ = writeln!(out, "  {g:<24} n = {n:<4} R = {r}");
    }
    let _ = writeln!(out, "  mid-ranks:");
    for m in &result.mid_ranks {
        let _ = writeln!(out, "    value {:<6} ties {:<4} rank {}", m.value, m.count, m.rank);
    }
    let _ = writeln!(out, "rank-sum total    = {}", result.rank_sum_total);
    let _ = writeln!(out, "H                 = {:.4}", result.h);
    let _ = writeln!(out, "H (tie-corrected) = {:.4}", result.h_tie_corrected);
    let _ = writeln!(out, "df                = {}", result.df);
    let _ = writeln!(out, "critical value    = {:.2}", result.critical);
    let _ = writeln!(
        out,
        "decision          = {}",
        if result.reject { "REJECT H0" } else { "FAIL TO REJECT H0" }
    );
    if let Some(c) = check {
        let sums: Vec<String> = c.reported.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(
            out,
            "reported rank sums {} total {} (expected {}): {}",
            sums.join(" + "),
            c.reported_total,
            c.expected_total,
            if c.consistent { "consistent" } else { "INCONSISTENT" }
        );
        if let Some(h) = c.reported_h {
            let _ = writeln!(
                out,
                "reported H {h} vs computed H {:.4} (tie-corrected {:.4})",
                c.computed_h, c.computed_h_tie_corrected
            );
        }
    }
    out
}
