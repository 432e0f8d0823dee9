//! Classification metrics, built-in classifiers and cross-validation.

pub mod classifier;
pub mod cv;
pub mod metrics;

pub use classifier::{
    loss_and_gradient, train_knn_classifier, train_logistic, ClassifierSpec, KnnClassifier, LogisticConfig,
    LogisticModel, Scorer,
};
pub use cv::{
    cross_validate, cross_validate_with, fmt_opt, fold_seed, CvOptions, EvalReport, FoldAudit, FoldResult, Summary,
};
pub use metrics::{confusion, metrics, midranks, roc_auc, ConfusionMatrix, MetricsReport};
