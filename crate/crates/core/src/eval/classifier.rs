//! Small built-in classifiers that score rows by minority likelihood.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::neighbors::k_nearest;

/// A fitted model mapping a feature row to a minority score in [0, 1].
pub trait Scorer: Send + Sync {
    fn score(&self, x: &[f64]) -> f64;

    /// Minority when the score is strictly above 1/2; ties go to majority.
    fn predict(&self, x: &[f64]) -> Label {
        if self.score(x) > 0.5 {
            MINORITY
        } else {
            MAJORITY
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnnClassifier {
    train: Dataset,
    k: usize,
}

pub fn train_knn_classifier(train: &Dataset, k: usize) -> Result<KnnClassifier> {
    if k == 0 {
        return Err(Error::Config("classifier k must be positive".into()));
    }
    if k > train.len() {
        return Err(Error::InsufficientSamples {
            what: "k-NN classifier training rows",
            required: k,
            found: train.len(),
        });
    }
    Ok(KnnClassifier {
        train: train.clone(),
        k,
    })
}

impl Scorer for KnnClassifier {
    /// Fraction of minority rows among the `k` nearest training rows.
    fn score(&self, x: &[f64]) -> f64 {
        let nn = k_nearest(&self.train, 0..self.train.len(), x, None, self.k);
        nn.iter().filter(|p| self.train.label(p.0) == MINORITY).count() as f64 / self.k as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Ridge penalty on the weights (not the intercept).
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            epochs: 500,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

/// Logistic regression on standardized features, fit by full-batch
/// gradient descent from zero weights.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    means: Vec<f64>,
    scales: Vec<f64>,
    /// Intercept first, then one weight per feature.
    params: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean log-loss plus `l2/2 * |w|^2` and its gradient with respect to
/// `params` (intercept first). `x` is row-major with `d` columns.
pub fn loss_and_gradient(x: &[f64], d: usize, y: &[Label], params: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for (row, &label) in x.chunks_exact(d).zip(y) {
        let z = params[0] + row.iter().zip(&params[1..]).map(|(a, b)| a * b).sum::<f64>();
        let t = f64::from(label);
        // log(1 + e^z) - t z, computed stably.
        loss += z.max(0.0) + (-z.abs()).exp().ln_1p() - t * z;
        let r = sigmoid(z) - t;
        grad[0] += r;
        for (g, v) in grad[1..].iter_mut().zip(row) {
            *g += r * v;
        }
    }
    let n = n as f64;
    loss /= n;
    for g in &mut grad {
        *g /= n;
    }
    for (g, w) in grad[1..].iter_mut().zip(&params[1..]) {
        *g += l2 * w;
    }
    loss += 0.5 * l2 * params[1..].iter().map(|w| w * w).sum::<f64>();
    (loss, grad)
}

pub fn train_logistic(train: &Dataset, cfg: &LogisticConfig) -> Result<LogisticModel> {
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) || cfg.l2 < 0.0 {
        return Err(Error::Config("logistic learning_rate must be positive and l2 nonnegative".into()));
    }
    if train.count(MINORITY) == 0 || train.count(MAJORITY) == 0 {
        return Err(Error::Data("logistic regression needs both classes in training data".into()));
    }
    let d = train.n_features();
    let n = train.len() as f64;
    let mut means = vec![0.0; d];
    for row in train.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut scales = vec![0.0; d];
    for row in train.rows() {
        for ((s, v), m) in scales.iter_mut().zip(row).zip(&means) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut scales {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let x: Vec<f64> = train
        .rows()
        .flat_map(|row| standardize(row, &means, &scales))
        .collect();
    let mut params = vec![0.0; d + 1];
    for _ in 0..cfg.epochs {
        let (loss, grad) = loss_and_gradient(&x, d, train.labels(), &params, cfg.l2);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged);
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Diverged);
    }
    Ok(LogisticModel { means, scales, params })
}

fn standardize<'a>(row: &'a [f64], means: &'a [f64], scales: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    row.iter().zip(means).zip(scales).map(|((v, m), s)| (v - m) / s)
}

impl Scorer for LogisticModel {
    fn score(&self, x: &[f64]) -> f64 {
        let z = self.params[0]
            + standardize(x, &self.means, &self.scales)
                .zip(&self.params[1..])
                .map(|(a, b)| a * b)
                .sum::<f64>();
        sigmoid(z)
    }
}

/// Serializable classifier choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierSpec {
    Knn { k: usize },
    Logistic(LogisticConfig),
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Knn { k: 5 }
    }
}

impl ClassifierSpec {
    pub fn fit(&self, train: &Dataset) -> Result<Box<dyn Scorer>> {
        Ok(match self {
            ClassifierSpec::Knn { k } => Box::new(train_knn_classifier(train, *k)?),
            ClassifierSpec::Logistic(cfg) => Box::new(train_logistic(train, cfg)?),
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn { .. } => "knn",
            ClassifierSpec::Logistic(_) => "logistic",
        }
    }
}
