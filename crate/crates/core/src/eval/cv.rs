//! Cross-validated evaluation with resampling confined to training folds.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::ClassifierSpec;
use super::metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
use crate::data::{Dataset, FoldPlan, Label, MinMaxScaler, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::resample::{MethodId, Resampler, ResamplerSpec};
use crate::seed::{stable_hash, substream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvOptions {
    /// Min-max scale features, fit on each training fold only.
    pub scale: bool,
    /// Also emit the FPR-based metric variants in CSV output.
    pub paper_literal: bool,
}

/// What the leakage audit sees for one fold: the held-out rows and every
/// original row a synthetic was built from, both as dataset row ids.
#[derive(Debug, Clone)]
pub struct FoldAudit<'a> {
    pub fold: usize,
    pub test_rows: &'a [usize],
    pub referenced_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_resampled: usize,
    pub n_synthetic: usize,
    pub n_test: usize,
    /// False when the test split lacks a class; such folds are left out of
    /// the summary.
    pub defined: bool,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_defined_folds: usize,
    pub mean_g_mean: Option<f64>,
    pub std_g_mean: Option<f64>,
    pub mean_roc_auc: Option<f64>,
    pub std_roc_auc: Option<f64>,
}

impl Summary {
    pub fn from_folds(folds: &[FoldResult]) -> Summary {
        let defined: Vec<&FoldResult> = folds.iter().filter(|f| f.defined).collect();
        let g: Vec<f64> = defined.iter().filter_map(|f| f.metrics.g_mean).collect();
        let a: Vec<f64> = defined.iter().filter_map(|f| f.metrics.roc_auc).collect();
        Summary {
            n_defined_folds: defined.len(),
            mean_g_mean: mean(&g),
            std_g_mean: sample_std(&g),
            mean_roc_auc: mean(&a),
            std_roc_auc: sample_std(&a),
        }
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn sample_std(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    (v.len() > 1).then(|| (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub method: MethodId,
    pub resampler: ResamplerSpec,
    pub classifier: ClassifierSpec,
    pub options: CvOptions,
    pub seed: u64,
    pub n_folds: usize,
    pub folds: Vec<FoldResult>,
    pub summary: Summary,
    /// Wall time per fold in milliseconds. Not serialized, so reports stay
    /// byte-stable across runs.
    #[serde(skip)]
    pub fold_wall_ms: Vec<f64>,
}

/// Render an optional number for CSV; undefined values become `NA`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

impl EvalReport {
    /// One row per fold.
    pub fn write_folds_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![
            "dataset", "method", "fold", "n_train", "n_resampled", "n_synthetic", "n_test", "defined", "tp", "fp",
            "tn", "fn", "tpr", "fpr", "tnr", "g_mean", "roc_auc", "balanced_accuracy",
        ];
        if self.options.paper_literal {
            header.extend(["paper_literal_gmean", "paper_literal_auc"]);
        }
        w.write_record(&header)?;
        for f in &self.folds {
            let m = &f.metrics;
            let mut rec = vec![
                self.dataset.clone(),
                self.method.id().to_string(),
                f.fold.to_string(),
                f.n_train.to_string(),
                f.n_resampled.to_string(),
                f.n_synthetic.to_string(),
                f.n_test.to_string(),
                f.defined.to_string(),
                f.confusion.tp.to_string(),
                f.confusion.fp.to_string(),
                f.confusion.tn.to_string(),
                f.confusion.fn_.to_string(),
                fmt_opt(m.tpr),
                fmt_opt(m.fpr),
                fmt_opt(m.tnr),
                fmt_opt(m.g_mean),
                fmt_opt(m.roc_auc),
                fmt_opt(m.balanced_accuracy),
            ];
            if self.options.paper_literal {
                rec.push(fmt_opt(m.paper_literal_gmean));
                rec.push(fmt_opt(m.paper_literal_auc));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Pretty JSON; the paper-literal fields are dropped unless requested.
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if !self.options.paper_literal {
            if let Some(folds) = v.get_mut("folds").and_then(|f| f.as_array_mut()) {
                for f in folds {
                    if let Some(m) = f.get_mut("metrics").and_then(|m| m.as_object_mut()) {
                        m.remove("paper_literal_gmean");
                        m.remove("paper_literal_auc");
                    }
                }
            }
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

/// Seed for one fold of one (dataset, method) cell.
pub fn fold_seed(seed: u64, dataset: &str, method: MethodId, fold: usize) -> u64 {
    substream(seed, &[stable_hash(dataset), stable_hash(method.id()), fold as u64])
}

pub fn cross_validate(
    dataset: &str,
    d: &Dataset,
    resampler: &ResamplerSpec,
    classifier: &ClassifierSpec,
    plan: &FoldPlan,
    seed: u64,
    opts: CvOptions,
) -> Result<EvalReport> {
    cross_validate_with(dataset, d, resampler, resampler, classifier, plan, seed, opts, &|_| {})
}

/// Cross-validate with an arbitrary resampler. `spec` is the record stored
/// in the report; `audit` is called once per fold after the leakage check.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate_with(
    dataset: &str,
    d: &Dataset,
    resampler: &(dyn Resampler + Sync),
    spec: &ResamplerSpec,
    classifier: &ClassifierSpec,
    plan: &FoldPlan,
    seed: u64,
    opts: CvOptions,
    audit: &(dyn Fn(&FoldAudit) + Sync),
) -> Result<EvalReport> {
    if plan.assignments.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: plan.assignments.len(),
        });
    }
    let method = spec.method();
    let results: Vec<(FoldResult, f64)> = (0..plan.n_folds)
        .into_par_iter()
        .map(|fold| {
            let start = Instant::now();
            let r = run_fold(dataset, d, resampler, method, classifier, plan, fold, seed, opts, audit)?;
            Ok((r, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_>>()?;
    let (folds, fold_wall_ms): (Vec<FoldResult>, Vec<f64>) = results.into_iter().unzip();
    for f in folds.iter().filter(|f| !f.defined) {
        log::warn!("{dataset}/{method}: fold {} has a single-class test split; excluded", f.fold);
    }
    Ok(EvalReport {
        dataset: dataset.to_string(),
        method,
        resampler: spec.clone(),
        classifier: *classifier,
        options: opts,
        seed,
        n_folds: plan.n_folds,
        summary: Summary::from_folds(&folds),
        folds,
        fold_wall_ms,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    dataset: &str,
    d: &Dataset,
    resampler: &(dyn Resampler + Sync),
    method: MethodId,
    classifier: &ClassifierSpec,
    plan: &FoldPlan,
    fold: usize,
    seed: u64,
    opts: CvOptions,
    audit: &(dyn Fn(&FoldAudit) + Sync),
) -> Result<FoldResult> {
    let train_rows = plan.train_indices(fold);
    let test_rows = plan.test_indices(fold);
    let mut train = d.subset(&train_rows);
    let mut test = d.subset(&test_rows);
    if opts.scale {
        let scaler = MinMaxScaler::fit(&train);
        train = scaler.transform(&train);
        test = scaler.transform(&test);
    }
    let resampled = resampler.resample(&train, fold_seed(seed, dataset, method, fold))?;

    // Map provenance back to dataset row ids; anything outside the training
    // fold is leakage.
    let test_set: HashSet<usize> = test_rows.iter().copied().collect();
    let mut referenced = Vec::new();
    for p in resampled.provenance() {
        for local in p.source_rows() {
            let row = *train_rows.get(local).ok_or(Error::Leakage { fold, row: local })?;
            if test_set.contains(&row) {
                return Err(Error::Leakage { fold, row });
            }
            referenced.push(row);
        }
    }
    referenced.sort_unstable();
    referenced.dedup();
    audit(&FoldAudit {
        fold,
        test_rows: &test_rows,
        referenced_rows: referenced,
    });

    let model = classifier.fit(&resampled.data)?;
    let scores: Vec<f64> = test.rows().map(|x| model.score(x)).collect();
    let predicted: Vec<Label> = scores.iter().map(|&s| if s > 0.5 { MINORITY } else { MAJORITY }).collect();
    let cm = confusion(&predicted, test.labels())?;
    let report = metrics(&cm, Some(&scores), test.labels())?;
    Ok(FoldResult {
        fold,
        n_train: train.len(),
        n_resampled: resampled.data.len(),
        n_synthetic: resampled.synthetic_count(),
        n_test: test.len(),
        defined: test.count(MINORITY) > 0 && test.count(MAJORITY) > 0,
        confusion: cm,
        metrics: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_case_study, stratified_folds};
    use crate::poqg::PoqgConfig;
    use crate::resample::{Provenance, Resampled, RowOrigin};
    use std::sync::Mutex;

    #[test]
    fn identity_memorizer_on_duplicates_scores_perfectly() {
        // Every row appears twice, so a 1-NN model sees an exact copy of
        // each test row whenever the copy lands in the training fold.
        let base = make_case_study(1);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..2 {
            for i in 0..base.len() {
                rows.push(base.row(i).to_vec());
                labels.push(base.label(i));
            }
        }
        let d = Dataset::from_rows(&rows, labels).unwrap();
        // Put both copies of a row in different folds.
        let n = base.len();
        let plan = FoldPlan {
            n_folds: 2,
            assignments: (0..2 * n).map(|i| usize::from(i >= n)).collect(),
            seed: 0,
        };
        let r = cross_validate("dup", &d, &ResamplerSpec::None, &ClassifierSpec::Knn { k: 1 }, &plan, 0, CvOptions::default())
            .unwrap();
        for f in &r.folds {
            assert_eq!(f.metrics.roc_auc, Some(1.0));
        }
    }

    #[test]
    fn poqg_beats_no_resampling_on_case_study() {
        let d = make_case_study(0);
        let plan = stratified_folds(&d, 5, 0).unwrap();
        let knn = ClassifierSpec::Knn { k: 5 };
        let none = cross_validate("case", &d, &ResamplerSpec::None, &knn, &plan, 0, CvOptions::default()).unwrap();
        let poqg = cross_validate(
            "case",
            &d,
            &ResamplerSpec::Poqg(PoqgConfig::default()),
            &knn,
            &plan,
            0,
            CvOptions::default(),
        )
        .unwrap();
        assert!(poqg.summary.mean_g_mean.unwrap() > none.summary.mean_g_mean.unwrap());
    }

    #[test]
    fn reports_are_deterministic_and_serializable() {
        let d = make_case_study(2);
        let plan = stratified_folds(&d, 5, 9).unwrap();
        let spec = ResamplerSpec::Poqg(PoqgConfig::default());
        let knn = ClassifierSpec::default();
        let a = cross_validate("case", &d, &spec, &knn, &plan, 4, CvOptions::default()).unwrap();
        let b = cross_validate("case", &d, &spec, &knn, &plan, 4, CvOptions::default()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_folds_csv(&mut ca).unwrap();
        b.write_folds_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        assert!(!a.to_json().unwrap().contains("paper_literal_gmean"));
        let back: EvalReport = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(back.summary, a.summary);
    }

    #[test]
    fn audit_sees_only_training_rows() {
        let d = make_case_study(0);
        let plan = stratified_folds(&d, 5, 0).unwrap();
        let seen = Mutex::new(0usize);
        let spec = ResamplerSpec::Poqg(PoqgConfig::default());
        cross_validate_with(
            "case",
            &d,
            &spec,
            &spec,
            &ClassifierSpec::default(),
            &plan,
            0,
            CvOptions { scale: true, paper_literal: false },
            &|a| {
                assert!(a.referenced_rows.iter().all(|r| !a.test_rows.contains(r)));
                *seen.lock().unwrap() += 1;
            },
        )
        .unwrap();
        assert_eq!(*seen.lock().unwrap(), 5);
    }

    /// A resampler that cites a row id it was never given.
    struct Leaky;

    impl Resampler for Leaky {
        fn name(&self) -> &'static str {
            "leaky"
        }

        fn resample(&self, data: &Dataset, _seed: u64) -> Result<Resampled> {
            let mut r = Resampled::identity(data);
            let bad = data.len();
            r.origins[0] = RowOrigin::Synthetic(Provenance { anchor: bad, proxima: bad, orion: bad, q1: 0.5, q2: 0.5 });
            Ok(r)
        }
    }

    #[test]
    fn leakage_guard_fires() {
        let d = make_case_study(0);
        let plan = stratified_folds(&d, 5, 0).unwrap();
        let err = cross_validate_with(
            "case",
            &d,
            &Leaky,
            &ResamplerSpec::None,
            &ClassifierSpec::default(),
            &plan,
            0,
            CvOptions::default(),
            &|_| {},
        )
        .unwrap_err();
        assert!(matches!(err, Error::Leakage { .. }));
    }

    #[test]
    fn summary_uses_sample_std_and_skips_undefined() {
        let mk = |g: f64, defined: bool| FoldResult {
            fold: 0,
            n_train: 0,
            n_resampled: 0,
            n_synthetic: 0,
            n_test: 0,
            defined,
            confusion: ConfusionMatrix::default(),
            metrics: MetricsReport { g_mean: Some(g), roc_auc: Some(g), ..Default::default() },
        };
        let s = Summary::from_folds(&[mk(1.0, true), mk(3.0, true), mk(100.0, false)]);
        assert_eq!(s.n_defined_folds, 2);
        assert_eq!(s.mean_g_mean, Some(2.0));
        assert!((s.std_g_mean.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }
}
