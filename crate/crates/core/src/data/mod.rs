//! Datasets, ingestion and fold planning.
//!
//! Labels are binary: [`MAJORITY`] (0) and [`MINORITY`] (1). Features are
//! stored row-major in a single buffer and are never rescaled implicitly;
//! use [`MinMaxScaler`] when a scaled copy is wanted.

mod case_study;
mod csv_format;
mod folds;
mod keel;
mod scale;

pub use case_study::{make_case_study, CASE_STUDY_MAJORITY, CASE_STUDY_MINORITY};
pub use csv_format::{load_csv, parse_csv, save_csv, write_csv, CsvOptions, LabelColumn};
pub use folds::{stratified_folds, FoldPlan};
pub use keel::{load_keel, load_keel_with, parse_keel, KeelOptions};
pub use scale::MinMaxScaler;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = u8;
pub const MAJORITY: Label = 0;
pub const MINORITY: Label = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<Label>,
    feature_names: Vec<String>,
}

/// Class counts and imbalance ratio (majority count over minority count).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_majority: usize,
    pub n_minority: usize,
    pub imbalance_ratio: f64,
    pub n_features: usize,
}

impl Dataset {
    /// Build from a row-major buffer. Checks shape, label range and finiteness.
    pub fn from_flat(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<Label>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::Data("dataset needs at least one feature".into()));
        }
        if feature_names.len() != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                found: feature_names.len(),
            });
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::Data(format!(
                "{} feature values do not fill {} rows of {} columns",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > MINORITY) {
            return Err(Error::Data(format!("label {bad} is not binary")));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
            feature_names,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        let names = default_names(d);
        Self::from_flat(rows.concat(), d, labels, names)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.features
    }

    pub fn count(&self, class: Label) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }

    /// Row ids of `class`, in row order.
    pub fn class_indices(&self, class: Label) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == class).then_some(i))
            .collect()
    }

    pub fn stats(&self) -> Result<DatasetStats> {
        let n_majority = self.count(MAJORITY);
        let n_minority = self.count(MINORITY);
        if n_majority == 0 || n_minority == 0 {
            return Err(Error::Data(format!(
                "both classes must be present (majority {n_majority}, minority {n_minority})"
            )));
        }
        Ok(DatasetStats {
            n_majority,
            n_minority,
            imbalance_ratio: n_majority as f64 / n_minority as f64,
            n_features: self.n_features,
        })
    }

    /// New dataset holding `indices` in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Append rows. Each row must have `n_features` finite values.
    pub fn extend_rows<'a, I>(&mut self, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a [f64], Label)>,
    {
        for (row, label) in rows {
            if row.len() != self.n_features {
                return Err(Error::DimensionMismatch {
                    expected: self.n_features,
                    found: row.len(),
                });
            }
            if label > MINORITY || row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data("invalid appended row".into()));
            }
            self.features.extend_from_slice(row);
            self.labels.push(label);
        }
        Ok(())
    }
}

pub(crate) fn default_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

/// Map two class names onto {majority, minority}: the rarer one becomes the
/// minority; on equal counts the lexicographically smaller name does.
pub(crate) fn minority_of<'a>(a: (&'a str, usize), b: (&'a str, usize)) -> &'a str {
    match a.1.cmp(&b.1) {
        std::cmp::Ordering::Less => a.0,
        std::cmp::Ordering::Greater => b.0,
        std::cmp::Ordering::Equal => a.0.min(b.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(maj: usize, min: usize) -> Dataset {
        let mut labels = vec![MAJORITY; maj];
        labels.extend(std::iter::repeat_n(MINORITY, min));
        let rows: Vec<Vec<f64>> = (0..maj + min).map(|i| vec![i as f64]).collect();
        Dataset::from_rows(&rows, labels).unwrap()
    }

    #[test]
    fn imbalance_ratio_matches_published_counts() {
        let s = counts(4142, 32).stats().unwrap();
        assert_eq!((s.n_majority, s.n_minority), (4142, 32));
        assert!((s.imbalance_ratio - 129.44).abs() < 0.005);

        let s = counts(202, 23).stats().unwrap();
        assert!((s.imbalance_ratio - 8.78).abs() < 0.005);

        assert_eq!(counts(10, 10).stats().unwrap().imbalance_ratio, 1.0);
    }

    #[test]
    fn stats_rejects_missing_class() {
        assert!(counts(5, 0).stats().is_err());
        assert!(counts(0, 5).stats().is_err());
    }

    #[test]
    fn rejects_non_finite_and_bad_labels() {
        assert!(Dataset::from_rows(&[vec![f64::NAN]], vec![0]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], vec![2]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![1.0, 2.0]], vec![0, 1]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], vec![0, 1]).is_err());
    }

    #[test]
    fn subset_preserves_requested_order() {
        let d = counts(3, 2);
        let s = d.subset(&[4, 0]);
        assert_eq!(s.row(0), &[4.0]);
        assert_eq!(s.labels(), &[MINORITY, MAJORITY]);
    }

    #[test]
    fn tie_goes_to_smaller_name() {
        assert_eq!(minority_of(("pos", 3), ("neg", 3)), "neg");
        assert_eq!(minority_of(("pos", 2), ("neg", 3)), "pos");
    }
}
