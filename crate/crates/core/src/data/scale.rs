use serde::{Deserialize, Serialize};

use super::Dataset;

/// Per-feature min-max scaling to [0, 1], fit on one dataset and applied to
/// others. Constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub ranges: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(d: &Dataset) -> Self {
        let n = d.n_features();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for row in d.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        if d.is_empty() {
            mins.fill(0.0);
            maxs.fill(0.0);
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        MinMaxScaler { mins, ranges }
    }

    pub fn transform(&self, d: &Dataset) -> Dataset {
        let mut flat = Vec::with_capacity(d.as_flat().len());
        for row in d.rows() {
            for (j, &v) in row.iter().enumerate() {
                let r = self.ranges[j];
                flat.push(if r > 0.0 { (v - self.mins[j]) / r } else { 0.0 });
            }
        }
        Dataset::from_flat(
            flat,
            d.n_features(),
            d.labels().to_vec(),
            d.feature_names().to_vec(),
        )
        .expect("scaling keeps values finite")
    }
}
