//! Exact brute-force neighbour queries.
//!
//! Ordering is by Euclidean distance, ties broken by ascending row id.
//! Comparisons use squared distances; reported distances are the roots.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// The `k` same-class neighbours of an anchor row.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub anchor_index: usize,
    pub neighbor_indices: Vec<usize>,
    pub distances: Vec<f64>,
}

/// Nearest majority row of a minority anchor and that row's density factor.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityContext {
    pub anchor_index: usize,
    pub nearest_majority_index: usize,
    pub distance_to_majority: f64,
    pub density: Option<f64>,
}

/// Denominator of the majority density factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityDenominator {
    /// Number of majority rows (the summation range).
    #[default]
    Majority,
    /// Number of rows in the whole dataset.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    sq: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sq
            .total_cmp(&other.sq)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `k` rows among `candidates` closest to `query`, skipping `exclude`.
/// Returns `(row, distance)` pairs, nearest first. Fewer than `k` pairs come
/// back when there are not enough candidates.
pub fn k_nearest<I>(
    d: &Dataset,
    candidates: I,
    query: &[f64],
    exclude: Option<usize>,
    k: usize,
) -> Vec<(usize, f64)>
where
    I: IntoIterator<Item = usize>,
{
    if k == 0 {
        return Vec::new();
    }
    // Max-heap of the best k seen so far; the root is the worst kept.
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
    for index in candidates {
        if Some(index) == exclude {
            continue;
        }
        let c = Candidate {
            sq: squared_euclidean(query, d.row(index)),
            index,
        };
        if heap.len() < k {
            heap.push(c);
        } else if let Some(mut worst) = heap.peek_mut() {
            if c < *worst {
                *worst = c;
            }
        }
    }
    heap.into_sorted_vec()
        .into_iter()
        .map(|c| (c.index, c.sq.sqrt()))
        .collect()
}

/// Exact k nearest rows of the same class as `anchor`.
pub fn knn_within(d: &Dataset, class: Label, anchor: usize, k: usize) -> Result<NeighborSet> {
    if anchor >= d.len() || d.label(anchor) != class {
        return Err(Error::Data(format!("row {anchor} is not in class {class}")));
    }
    let members = d.class_indices(class);
    if members.len() < k + 1 {
        return Err(Error::InsufficientSamples {
            what: "same-class neighbours (k + 1 rows)",
            required: k + 1,
            found: members.len(),
        });
    }
    let found = k_nearest(d, members, d.row(anchor), Some(anchor), k);
    let (neighbor_indices, distances) = found.into_iter().unzip();
    Ok(NeighborSet {
        anchor_index: anchor,
        neighbor_indices,
        distances,
    })
}

/// Nearest majority row to a minority anchor; density left unset.
pub fn nearest_majority(d: &Dataset, anchor: usize) -> Result<MajorityContext> {
    if anchor >= d.len() || d.label(anchor) != MINORITY {
        return Err(Error::Data(format!("row {anchor} is not a minority row")));
    }
    let majority = d.class_indices(MAJORITY);
    let &(index, distance) = k_nearest(d, majority, d.row(anchor), None, 1)
        .first()
        .ok_or(Error::InsufficientSamples {
            what: "majority class",
            required: 1,
            found: 0,
        })?;
    Ok(MajorityContext {
        anchor_index: anchor,
        nearest_majority_index: index,
        distance_to_majority: distance,
        density: None,
    })
}

/// Mean distance from a majority row to every majority row (itself
/// included), divided by the majority count.
pub fn majority_density(d: &Dataset, majority_point: usize) -> Result<f64> {
    majority_density_with(d, majority_point, DensityDenominator::Majority)
}

pub fn majority_density_with(
    d: &Dataset,
    majority_point: usize,
    denominator: DensityDenominator,
) -> Result<f64> {
    if majority_point >= d.len() || d.label(majority_point) != MAJORITY {
        return Err(Error::Data(format!("row {majority_point} is not a majority row")));
    }
    let majority = d.class_indices(MAJORITY);
    if majority.len() < 2 {
        return Err(Error::InsufficientSamples {
            what: "majority density",
            required: 2,
            found: majority.len(),
        });
    }
    let p = d.row(majority_point);
    let total: f64 = majority.iter().map(|&j| euclidean(p, d.row(j))).sum();
    let n = match denominator {
        DensityDenominator::Majority => majority.len(),
        DensityDenominator::All => d.len(),
    };
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[(f64, Label)]) -> Dataset {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        Dataset::from_rows(&rows, points.iter().map(|p| p.1).collect()).unwrap()
    }

    #[test]
    fn collinear_minority() {
        let d = line(&[(0.0, 1), (1.0, 1), (3.0, 1), (10.0, 0)]);
        let n = knn_within(&d, MINORITY, 0, 2).unwrap();
        assert_eq!(n.neighbor_indices, vec![1, 2]);
        assert_eq!(n.distances, vec![1.0, 3.0]);
    }

    #[test]
    fn k_equal_population_minus_one() {
        let d = line(&[(0.0, 1), (4.0, 1), (1.0, 1), (2.0, 0)]);
        let mut n = knn_within(&d, MINORITY, 0, 2).unwrap().neighbor_indices;
        n.sort_unstable();
        assert_eq!(n, vec![1, 2]);
        assert!(matches!(
            knn_within(&d, MINORITY, 0, 3),
            Err(Error::InsufficientSamples { required: 4, .. })
        ));
    }

    #[test]
    fn duplicate_comes_first() {
        let d = line(&[(5.0, 1), (4.0, 1), (5.0, 1), (0.0, 0)]);
        let n = knn_within(&d, MINORITY, 0, 2).unwrap();
        assert_eq!(n.neighbor_indices, vec![2, 1]);
        assert_eq!(n.distances[0], 0.0);
    }

    #[test]
    fn anchor_must_match_class() {
        let d = line(&[(0.0, 1), (1.0, 1), (2.0, 0)]);
        assert!(knn_within(&d, MINORITY, 2, 1).is_err());
    }

    #[test]
    fn nearest_majority_geometry() {
        let d = Dataset::from_rows(
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]],
            vec![1, 0, 0],
        )
        .unwrap();
        let ctx = nearest_majority(&d, 0).unwrap();
        assert_eq!(ctx.nearest_majority_index, 1);
        assert_eq!(ctx.distance_to_majority, 1.0);
        assert_eq!(ctx.density, None);
    }

    #[test]
    fn nearest_majority_tie_and_singleton() {
        let d = line(&[(0.0, 1), (-1.0, 0), (1.0, 0)]);
        assert_eq!(nearest_majority(&d, 0).unwrap().nearest_majority_index, 1);
        let d = line(&[(0.0, 1), (7.0, 1), (3.0, 0)]);
        assert_eq!(nearest_majority(&d, 1).unwrap().nearest_majority_index, 2);
        let d = line(&[(0.0, 1), (7.0, 1)]);
        assert!(nearest_majority(&d, 0).is_err());
    }

    #[test]
    fn density_hand_values() {
        let d = line(&[(0.0, 0), (2.0, 0), (9.0, 1)]);
        assert_eq!(majority_density(&d, 0).unwrap(), 1.0);
        assert!(
            (majority_density_with(&d, 0, DensityDenominator::All).unwrap() - 2.0 / 3.0).abs()
                < 1e-15
        );
        let d = line(&[(0.0, 0), (1.0, 0), (5.0, 0), (9.0, 1)]);
        assert!((majority_density(&d, 1).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        let d = line(&[(3.0, 0), (3.0, 0), (9.0, 1)]);
        assert_eq!(majority_density(&d, 0).unwrap(), 0.0);
        let d = line(&[(3.0, 0), (9.0, 1)]);
        assert!(majority_density(&d, 0).is_err());
    }

    /// Independent oracle: sort every same-class row by (squared distance, id).
    fn sort_all(d: &Dataset, anchor: usize, k: usize) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = (0..d.len())
            .filter(|&j| j != anchor && d.label(j) == d.label(anchor))
            .map(|j| (squared_euclidean(d.row(anchor), d.row(j)), j))
            .collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        all.into_iter().take(k).map(|p| p.1).collect()
    }

    #[test]
    fn matches_sort_all_oracle_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(10..80);
            // Integer grid coordinates force many exact ties.
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..2).map(|_| rng.random_range(0..4) as f64).collect())
                .collect();
            let labels = (0..n).map(|_| rng.random_range(0..2) as Label).collect();
            let d = Dataset::from_rows(&rows, labels).unwrap();
            for anchor in 0..n {
                let pop = d.count(d.label(anchor));
                for k in [1, 3, pop.saturating_sub(1)] {
                    if k == 0 || pop < k + 1 {
                        continue;
                    }
                    let got = knn_within(&d, d.label(anchor), anchor, k).unwrap();
                    assert_eq!(got.neighbor_indices, sort_all(&d, anchor, k));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn nearest_majority_is_minimal(
            pts in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0, 0u8..2), 3..60)
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0, p.1]).collect();
            let d = Dataset::from_rows(&rows, pts.iter().map(|p| p.2).collect()).unwrap();
            prop_assume!(d.count(MAJORITY) > 0);
            for a in d.class_indices(MINORITY) {
                let ctx = nearest_majority(&d, a).unwrap();
                for m in d.class_indices(MAJORITY) {
                    prop_assert!(ctx.distance_to_majority <= euclidean(d.row(a), d.row(m)));
                }
            }
        }

        #[test]
        fn sorted_ascending_and_excludes_anchor(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 6..40),
            k in 1usize..5,
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0, p.1]).collect();
            let d = Dataset::from_rows(&rows, vec![MINORITY; rows.len()]).unwrap();
            let n = knn_within(&d, MINORITY, 0, k).unwrap();
            prop_assert_eq!(n.neighbor_indices.len(), k);
            prop_assert!(!n.neighbor_indices.contains(&0));
            prop_assert!(n.distances.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
