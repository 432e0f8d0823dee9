use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, MAJORITY, MINORITY};

pub const CASE_STUDY_MAJORITY: usize = 202;
pub const CASE_STUDY_MINORITY: usize = 23;

/// Two overlapping 2-D Gaussian clusters: 202 majority rows around the
/// origin (sd 1.0) followed by 23 minority rows around (1.6, 1.6) (sd 0.6).
pub fn make_case_study(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let majority = Normal::new(0.0, 1.0).expect("valid sd");
    let minority = Normal::new(1.6, 0.6).expect("valid sd");
    let mut features = Vec::with_capacity(2 * (CASE_STUDY_MAJORITY + CASE_STUDY_MINORITY));
    let mut labels = Vec::with_capacity(CASE_STUDY_MAJORITY + CASE_STUDY_MINORITY);
    for (n, dist, label) in [
        (CASE_STUDY_MAJORITY, majority, MAJORITY),
        (CASE_STUDY_MINORITY, minority, MINORITY),
    ] {
        for _ in 0..n {
            features.push(dist.sample(&mut rng));
            features.push(dist.sample(&mut rng));
            labels.push(label);
        }
    }
    Dataset::from_flat(features, 2, labels, vec!["x1".into(), "x2".into()])
        .expect("generated data is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centroid(d: &Dataset, class: u8) -> [f64; 2] {
        let idx = d.class_indices(class);
        let n = idx.len() as f64;
        let mut c = [0.0; 2];
        for i in idx {
            c[0] += d.row(i)[0] / n;
            c[1] += d.row(i)[1] / n;
        }
        c
    }

    #[test]
    fn counts_and_determinism() {
        for seed in [0, 1, 99] {
            let s = make_case_study(seed).stats().unwrap();
            assert_eq!((s.n_majority, s.n_minority, s.n_features), (202, 23, 2));
            assert!((s.imbalance_ratio - 8.78).abs() < 0.005);
        }
        assert_eq!(make_case_study(0), make_case_study(0));
        assert_ne!(make_case_study(0), make_case_study(1));
    }

    #[test]
    fn centroids_are_apart() {
        let d = make_case_study(0);
        let (a, b) = (centroid(&d, MAJORITY), centroid(&d, MINORITY));
        assert!(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() > 0.0);
    }
}
