//! Wilcoxon signed-rank test and cross-dataset method comparison.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::eval::{fmt_opt, EvalReport};
use crate::eval::metrics::midranks;
use crate::resample::MethodId;

/// Largest effective sample size handled by exact enumeration.
pub const EXACT_MAX_N: usize = 25;
/// Fewest nonzero differences the test accepts.
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub r_plus: f64,
    pub r_minus: f64,
    pub n_effective: usize,
    /// Pairs dropped because their difference was exactly zero.
    pub n_zero: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Two-sided signed-rank test on `a - b`, exact for up to
/// [`EXACT_MAX_N`] nonzero differences and normal-approximated beyond.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_with(a, b, None)
}

/// As [`wilcoxon_signed_rank`], optionally forcing the p-value method.
pub fn wilcoxon_with(a: &[f64], b: &[f64], force: Option<WilcoxonMethod>) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::Data("non-finite paired difference".into()));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let n_zero = diffs.len() - nonzero.len();
    let n = nonzero.len();
    if n == 0 {
        return Err(Error::Data("all paired differences are zero".into()));
    }
    if n < MIN_PAIRS {
        return Err(Error::InsufficientSamples {
            what: "Wilcoxon nonzero pairs",
            required: MIN_PAIRS,
            found: n,
        });
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let r_plus: f64 = ranks.iter().zip(&nonzero).filter(|(_, &d)| d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let r_minus = total - r_plus;
    let method = force.unwrap_or(if n <= EXACT_MAX_N {
        WilcoxonMethod::Exact
    } else {
        WilcoxonMethod::NormalApproximation
    });
    let p_value = match method {
        WilcoxonMethod::Exact => exact_p(&ranks, r_plus),
        WilcoxonMethod::NormalApproximation => normal_p(&ranks, r_plus),
    };
    Ok(WilcoxonResult {
        r_plus,
        r_minus,
        n_effective: n,
        n_zero,
        p_value,
        method,
    })
}

/// Exact null distribution of the positive-rank sum given the observed
/// (possibly tied) ranks. Doubled ranks are integers, so a subset-sum count
/// over them enumerates all 2^n sign patterns.
fn exact_p(ranks: &[f64], r_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let total: f64 = counts.iter().sum();
    let obs = (2.0 * r_plus).round() as usize;
    let lower: f64 = counts[..=obs].iter().sum::<f64>() / total;
    let upper: f64 = counts[obs..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Normal approximation with tie-corrected variance and a 1/2 continuity
/// correction.
fn normal_p(ranks: &[f64], r_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((r_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    (2.0 * Normal::standard().cdf(-z)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    GMean,
    RocAuc,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::GMean, Metric::RocAuc];

    pub fn id(self) -> &'static str {
        match self {
            Metric::GMean => "g_mean",
            Metric::RocAuc => "roc_auc",
        }
    }

    pub fn of(self, r: &EvalReport) -> Option<f64> {
        match self {
            Metric::GMean => r.summary.mean_g_mean,
            Metric::RocAuc => r.summary.mean_roc_auc,
        }
    }
}

/// Mean metric per dataset and method; `None` where undefined.
pub type ScoreTable = BTreeMap<String, BTreeMap<MethodId, Option<f64>>>;

pub fn score_table(reports: &[EvalReport], metric: Metric) -> ScoreTable {
    let mut t = ScoreTable::new();
    for r in reports {
        t.entry(r.dataset.clone()).or_default().insert(r.method, metric.of(r));
    }
    t
}

/// Scores of `a` and `b` on datasets where both are defined, plus how many
/// datasets were skipped for lack of a defined pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedScores {
    pub datasets: Vec<String>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub n_excluded: usize,
}

pub fn paired_scores(table: &ScoreTable, a: MethodId, b: MethodId) -> PairedScores {
    let mut p = PairedScores {
        datasets: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
        n_excluded: 0,
    };
    for (ds, row) in table {
        match (row.get(&a).copied().flatten(), row.get(&b).copied().flatten()) {
            (Some(x), Some(y)) => {
                p.datasets.push(ds.clone());
                p.a.push(x);
                p.b.push(y);
            }
            _ => p.n_excluded += 1,
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: Metric,
    pub reference: MethodId,
    pub other: MethodId,
    pub n_datasets: usize,
    pub n_excluded: usize,
    pub result: WilcoxonResult,
}

impl ComparisonRow {
    pub fn label(&self) -> String {
        format!("{} vs {}", self.reference.display_name(), self.other.display_name())
    }
}

/// Wilcoxon test of `reference` against `other` across datasets.
pub fn compare_pair(table: &ScoreTable, metric: Metric, reference: MethodId, other: MethodId) -> Result<ComparisonRow> {
    let p = paired_scores(table, reference, other);
    if p.datasets.len() < MIN_PAIRS {
        return Err(Error::InsufficientSamples {
            what: "common datasets for comparison",
            required: MIN_PAIRS,
            found: p.datasets.len(),
        });
    }
    Ok(ComparisonRow {
        metric,
        reference,
        other,
        n_datasets: p.datasets.len(),
        n_excluded: p.n_excluded,
        result: wilcoxon_signed_rank(&p.a, &p.b)?,
    })
}

/// `reference` against every other method present, in report order.
pub fn compare_methods(reports: &[EvalReport], metric: Metric, reference: MethodId) -> Result<Vec<ComparisonRow>> {
    let table = score_table(reports, metric);
    present_methods(reports)
        .into_iter()
        .filter(|&m| m != reference)
        .map(|m| compare_pair(&table, metric, reference, m))
        .collect()
}

pub fn present_methods(reports: &[EvalReport]) -> Vec<MethodId> {
    MethodId::ALL
        .into_iter()
        .filter(|m| reports.iter().any(|r| r.method == *m))
        .collect()
}

/// Datasets on which each method attains the best score. A tie among `t`
/// methods credits each with `1/t`, so the counts sum to the number of
/// datasets with at least one defined score.
pub fn winning_times(table: &ScoreTable, methods: &[MethodId]) -> Vec<(MethodId, f64)> {
    let mut wins: Vec<(MethodId, f64)> = methods.iter().map(|&m| (m, 0.0)).collect();
    for row in table.values() {
        let vals: Vec<(usize, f64)> = methods
            .iter()
            .enumerate()
            .filter_map(|(i, m)| row.get(m).copied().flatten().map(|v| (i, v)))
            .collect();
        let Some(best) = vals.iter().map(|v| v.1).reduce(f64::max) else {
            continue;
        };
        let winners: Vec<usize> = vals.iter().filter(|v| v.1 == best).map(|v| v.0).collect();
        for &w in &winners {
            wins[w].1 += 1.0 / winners.len() as f64;
        }
    }
    wins
}

/// Outcome of one comparison for reporting; `Err` holds why no test ran.
pub type ComparisonOutcome = (Metric, MethodId, MethodId, std::result::Result<ComparisonRow, String>);

const CSV_HEADER: [&str; 9] = [
    "metric",
    "comparison",
    "R+",
    "R-",
    "n_eff",
    "n_excluded",
    "p",
    "method",
    "significant@0.05",
];

pub fn write_comparison_csv<W: Write>(rows: &[ComparisonOutcome], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for (metric, reference, other, outcome) in rows {
        let label = format!("{} vs {}", reference.display_name(), other.display_name());
        let rec = match outcome {
            Ok(r) => vec![
                metric.id().to_string(),
                label,
                r.result.r_plus.to_string(),
                r.result.r_minus.to_string(),
                r.result.n_effective.to_string(),
                r.n_excluded.to_string(),
                r.result.p_value.to_string(),
                serde_json::to_value(r.result.method)?.as_str().unwrap_or_default().to_string(),
                (r.result.p_value < 0.05).to_string(),
            ],
            Err(_) => {
                let mut v = vec![metric.id().to_string(), label];
                v.extend(std::iter::repeat_n("NA".to_string(), 7));
                v
            }
        };
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn comparison_markdown(rows: &[ComparisonOutcome]) -> String {
    let mut s = String::from("| metric | comparison | R+ | R- | n_eff | p | significant@0.05 |\n");
    s.push_str("|---|---|---:|---:|---:|---:|---|\n");
    for (metric, reference, other, outcome) in rows {
        let label = format!("{} vs {}", reference.display_name(), other.display_name());
        match outcome {
            Ok(r) => s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {:.6} | {} |\n",
                metric.id(),
                label,
                r.result.r_plus,
                r.result.r_minus,
                r.result.n_effective,
                r.result.p_value,
                if r.result.p_value < 0.05 { "yes" } else { "no" }
            )),
            Err(why) => s.push_str(&format!("| {} | {} | NA | NA | NA | NA | NA ({why}) |\n", metric.id(), label)),
        }
    }
    s
}

/// Format helper shared with report writers.
pub fn fmt_score(v: Option<f64>) -> String {
    fmt_opt(v)
}
