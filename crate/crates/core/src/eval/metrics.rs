use serde::{Deserialize, Serialize};

use crate::data::{Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};

/// Binary confusion counts with the minority class (1) as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p == MINORITY, a == MINORITY) {
            (true, true) => m.tp += 1,
            (true, false) => m.fp += 1,
            (false, false) => m.tn += 1,
            (false, true) => m.fn_ += 1,
        }
    }
    Ok(m)
}

/// Rates derived from a confusion matrix. `None` marks a value that is
/// undefined because the evaluation set lacks one of the classes.
///
/// `paper_literal_*` hold the variants that use the false-positive rate in
/// place of specificity; they are diagnostics, not the reported scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tnr: Option<f64>,
    pub g_mean: Option<f64>,
    pub roc_auc: Option<f64>,
    pub balanced_accuracy: Option<f64>,
    pub paper_literal_gmean: Option<f64>,
    pub paper_literal_auc: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(m: &ConfusionMatrix, scores: Option<&[f64]>, actual: &[Label]) -> Result<MetricsReport> {
    if m.total() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: m.total(),
        });
    }
    let tpr = ratio(m.tp, m.tp + m.fn_);
    let fpr = ratio(m.fp, m.fp + m.tn);
    let tnr = fpr.map(|f| 1.0 - f);
    let both = |f: fn(f64, f64) -> f64, a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| f(a, b));
    let roc_auc = match scores {
        Some(s) => roc_auc(s, actual)?,
        None => None,
    };
    Ok(MetricsReport {
        tpr,
        fpr,
        tnr,
        g_mean: both(|a, b| (a * b).sqrt(), tpr, tnr),
        roc_auc,
        balanced_accuracy: both(|a, b| (a + b) / 2.0, tpr, tnr),
        paper_literal_gmean: both(|a, b| (a * b).sqrt(), tpr, fpr),
        paper_literal_auc: both(|a, b| (a + b) / 2.0, tpr, fpr),
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann–Whitney statistic via mid-ranks). `None` when
/// either class is absent.
pub fn roc_auc(scores: &[f64], actual: &[Label]) -> Result<Option<f64>> {
    if scores.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data("NaN classifier score".into()));
    }
    let n_pos = actual.iter().filter(|&&a| a == MINORITY).count();
    let n_neg = actual.iter().filter(|&&a| a == MAJORITY).count();
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    let ranks = midranks(scores);
    let pos_rank_sum: f64 = ranks
        .iter()
        .zip(actual)
        .filter(|(_, &a)| a == MINORITY)
        .map(|(r, _)| r)
        .sum();
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(Some(u / (n_pos as f64 * n_neg as f64)))
}

/// 1-based ranks with tied values sharing their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        for &o in &order[i..=j] {
            ranks[o] = rank;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn confusion_examples() {
        let m = confusion(&[1, 1, 0, 0], &[1, 1, 0, 0]).unwrap();
        assert_eq!((m.tp, m.tn, m.fp, m.fn_), (2, 2, 0, 0));
        let m = confusion(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap();
        assert_eq!((m.tp, m.tn), (0, 0));
        let m = confusion(&[1, 0, 1], &[1, 1, 0]).unwrap();
        assert_eq!((m.tp, m.fn_, m.fp, m.tn), (1, 1, 1, 0));
        assert!(confusion(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn perfect_classifier() {
        let actual = [1, 1, 0, 0];
        let m = confusion(&actual, &actual).unwrap();
        let r = metrics(&m, Some(&[0.9, 0.8, 0.1, 0.2]), &actual).unwrap();
        assert_eq!(r.g_mean, Some(1.0));
        assert_eq!(r.roc_auc, Some(1.0));
        assert_eq!(r.balanced_accuracy, Some(1.0));
        assert_eq!(r.paper_literal_gmean, Some(0.0));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.3], &[1, 1, 0]).unwrap(), Some(1.0));
        assert_eq!(roc_auc(&[0.5, 0.5], &[1, 0]).unwrap(), Some(0.5));
        assert_eq!(roc_auc(&[0.1, 0.9], &[1, 0]).unwrap(), Some(0.0));
    }

    #[test]
    fn single_class_is_undefined_not_zero() {
        let actual = [1, 1, 1];
        let m = confusion(&[1, 0, 1], &actual).unwrap();
        let r = metrics(&m, Some(&[0.9, 0.2, 0.7]), &actual).unwrap();
        assert!((r.tpr.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.fpr, None);
        assert_eq!(r.g_mean, None);
        assert_eq!(r.roc_auc, None);
    }

    #[test]
    fn identities_hold_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(2..60);
            let actual: Vec<Label> = (0..n).map(|i| (i % 2) as Label).collect();
            let pred: Vec<Label> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let r = metrics(&confusion(&pred, &actual).unwrap(), None, &actual).unwrap();
            let (tpr, tnr) = (r.tpr.unwrap(), r.tnr.unwrap());
            assert_eq!(r.g_mean.unwrap(), (tpr * tnr).sqrt());
            assert_eq!(r.balanced_accuracy.unwrap(), (tpr + tnr) / 2.0);
        }
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }
}
