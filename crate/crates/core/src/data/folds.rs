use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, MAJORITY, MINORITY};
use crate::error::{Error, Result};

/// Assignment of every row to one of `n_folds` test folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f == fold)
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f != fold)
    }

    fn indices(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| keep(f).then_some(i))
            .collect()
    }
}

/// Stratified k-fold split. Each class is shuffled with the seed and dealt
/// round-robin; the majority deal continues where the minority one stopped
/// so fold sizes stay within one row of each other.
pub fn stratified_folds(d: &Dataset, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {n_folds}")));
    }
    let mut minority = d.class_indices(MINORITY);
    let mut majority = d.class_indices(MAJORITY);
    if minority.len() < n_folds {
        return Err(Error::InsufficientSamples {
            what: "stratified folds (minority rows)",
            required: n_folds,
            found: minority.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    minority.shuffle(&mut rng);
    majority.shuffle(&mut rng);
    let mut assignments = vec![0; d.len()];
    for (slot, &row) in minority.iter().chain(&majority).enumerate() {
        assignments[row] = slot % n_folds;
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        seed,
    })
}
