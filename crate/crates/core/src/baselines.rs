//! SMOTE-family reference resamplers: SMOTE, SMOTE-Tomek, ADASYN, SMOTE-ENN
//! and Borderline-SMOTE.
//!
//! Every synthetic row is `anchor + gap * (partner - anchor)`, recorded as a
//! [`Provenance`] with `proxima = anchor`, `orion = partner`, `q2 = gap`.
//! All methods balance the classes exactly before any cleaning step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::neighbors::{k_nearest, knn_within};
use crate::resample::{MethodId, Provenance, Resampled, Resampler, RowOrigin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Smote,
    SmoteTomek,
    Adasyn,
    SmoteEnn,
    BorderlineSmote,
}

impl From<BaselineMethod> for MethodId {
    fn from(m: BaselineMethod) -> Self {
        match m {
            BaselineMethod::Smote => MethodId::Smote,
            BaselineMethod::SmoteTomek => MethodId::SmoteTomek,
            BaselineMethod::Adasyn => MethodId::Adasyn,
            BaselineMethod::SmoteEnn => MethodId::SmoteEnn,
            BaselineMethod::BorderlineSmote => MethodId::BorderlineSmote,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorderlineKind {
    Borderline1,
    #[default]
    Borderline2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    /// Oversample the minority class up to the majority count.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    #[serde(default = "default_k")]
    pub k_neighbors: usize,
    /// Neighbourhood size used to label Borderline-SMOTE danger points.
    #[serde(default = "default_m")]
    pub m_neighbors: usize,
    #[serde(default)]
    pub borderline_kind: BorderlineKind,
    /// Neighbours in the edited-nearest-neighbour vote.
    #[serde(default = "default_enn_k")]
    pub enn_k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampling_strategy: SamplingStrategy,
}

fn default_k() -> usize {
    5
}
fn default_m() -> usize {
    10
}
fn default_enn_k() -> usize {
    3
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        BaselineConfig {
            method,
            k_neighbors: default_k(),
            m_neighbors: default_m(),
            borderline_kind: BorderlineKind::default(),
            enn_k: default_enn_k(),
            seed: 0,
            sampling_strategy: SamplingStrategy::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 || self.m_neighbors == 0 || self.enn_k == 0 {
            return Err(Error::Config("neighbour counts must be positive".into()));
        }
        Ok(())
    }
}

fn balance_target(d: &Dataset) -> Result<usize> {
    let (maj, min) = (d.count(MAJORITY), d.count(MINORITY));
    maj.checked_sub(min).ok_or_else(|| {
        Error::Config(format!("minority ({min}) already outnumbers majority ({maj})"))
    })
}

fn require_minority(d: &Dataset, k: usize, what: &'static str) -> Result<Vec<usize>> {
    let minority = d.class_indices(MINORITY);
    if minority.len() < k + 1 {
        return Err(Error::InsufficientSamples {
            what,
            required: k + 1,
            found: minority.len(),
        });
    }
    Ok(minority)
}

/// k nearest minority rows of each minority row.
fn minority_neighbors(d: &Dataset, minority: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    minority
        .par_iter()
        .map(|&a| Ok(knn_within(d, MINORITY, a, k)?.neighbor_indices))
        .collect()
}

/// k nearest rows of any class for each of `rows`, excluding the row itself.
fn all_neighbors(d: &Dataset, rows: &[usize], k: usize) -> Vec<Vec<usize>> {
    rows.par_iter()
        .map(|&i| {
            k_nearest(d, 0..d.len(), d.row(i), Some(i), k)
                .into_iter()
                .map(|p| p.0)
                .collect()
        })
        .collect()
}

/// Accumulates synthetic rows on top of a copy of the input.
struct Builder<'a> {
    source: &'a Dataset,
    out: Dataset,
    origins: Vec<RowOrigin>,
}

impl<'a> Builder<'a> {
    fn new(source: &'a Dataset) -> Self {
        Builder {
            source,
            out: source.clone(),
            origins: (0..source.len()).map(RowOrigin::Original).collect(),
        }
    }

    fn interpolate(&mut self, anchor: usize, partner: usize, gap: f64) -> Result<()> {
        let a = self.source.row(anchor);
        let b = self.source.row(partner);
        let x: Vec<f64> = a.iter().zip(b).map(|(a, b)| a + gap * (b - a)).collect();
        self.out.extend_rows([(x.as_slice(), MINORITY)])?;
        self.origins.push(RowOrigin::Synthetic(Provenance {
            anchor,
            proxima: anchor,
            orion: partner,
            q1: 1.0 - gap,
            q2: gap,
        }));
        Ok(())
    }

    fn finish(self) -> Resampled {
        Resampled {
            data: self.out,
            origins: self.origins,
            fallback_count: 0,
        }
    }
}

/// Plain SMOTE: random minority anchor, random one of its `k` minority
/// neighbours, gap uniform in [0, 1).
pub fn smote(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    cfg.validate()?;
    let target = balance_target(d)?;
    if target == 0 {
        return Ok(Resampled::identity(d));
    }
    let minority = require_minority(d, cfg.k_neighbors, "SMOTE minority rows (k + 1)")?;
    let neighbors = minority_neighbors(d, &minority, cfg.k_neighbors)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = Builder::new(d);
    for _ in 0..target {
        let slot = rng.random_range(0..minority.len());
        let partner = neighbors[slot][rng.random_range(0..cfg.k_neighbors)];
        let gap: f64 = rng.random();
        b.interpolate(minority[slot], partner, gap)?;
    }
    Ok(b.finish())
}

/// Keep-mask dropping the majority member of every Tomek link (a pair of
/// opposite-class rows that are each other's nearest neighbour).
pub fn tomek_keep_mask(d: &Dataset) -> Vec<bool> {
    let mut keep = vec![true; d.len()];
    if d.len() < 2 {
        return keep;
    }
    let rows: Vec<usize> = (0..d.len()).collect();
    let nearest: Vec<usize> = all_neighbors(d, &rows, 1).into_iter().map(|n| n[0]).collect();
    for (i, &j) in nearest.iter().enumerate() {
        if d.label(i) != d.label(j) && nearest[j] == i && d.label(i) == MAJORITY {
            keep[i] = false;
        }
    }
    keep
}

pub fn tomek_remove(d: &Dataset) -> Dataset {
    Resampled::identity(d).retain(&tomek_keep_mask(d)).data
}

/// Keep-mask for edited nearest neighbours: a row goes when a strict
/// majority of its `k` nearest rows carry the other label. Ties keep it.
pub fn enn_keep_mask(d: &Dataset, k: usize) -> Vec<bool> {
    if d.len() < k + 1 {
        log::warn!("ENN needs {} rows, found {}; nothing removed", k + 1, d.len());
        return vec![true; d.len()];
    }
    let rows: Vec<usize> = (0..d.len()).collect();
    all_neighbors(d, &rows, k)
        .into_iter()
        .enumerate()
        .map(|(i, nb)| {
            let other = nb.iter().filter(|&&j| d.label(j) != d.label(i)).count();
            2 * other <= k
        })
        .collect()
}

pub fn enn_clean(d: &Dataset, k: usize) -> Dataset {
    Resampled::identity(d).retain(&enn_keep_mask(d, k)).data
}

/// Split `total` across `weights` proportionally, rounding by largest
/// remainder (ties to the lower index) so the counts sum to `total`.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || !(sum > 0.0) {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Fraction of majority rows among each minority row's `k` nearest rows.
pub fn adasyn_difficulty(d: &Dataset, k: usize) -> Vec<f64> {
    let minority = d.class_indices(MINORITY);
    all_neighbors(d, &minority, k)
        .into_iter()
        .map(|nb| nb.iter().filter(|&&j| d.label(j) == MAJORITY).count() as f64 / k as f64)
        .collect()
}

/// ADASYN: minority rows get synthetics in proportion to how many majority
/// rows sit among their `k` nearest neighbours.
pub fn adasyn(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    cfg.validate()?;
    let target = balance_target(d)?;
    if target == 0 {
        return Ok(Resampled::identity(d));
    }
    let k = cfg.k_neighbors;
    let minority = require_minority(d, k, "ADASYN minority rows (k + 1)")?;
    let difficulty = adasyn_difficulty(d, k);
    if difficulty.iter().all(|&r| r == 0.0) {
        log::warn!("ADASYN: no minority row has a majority neighbour; using SMOTE allocation");
        return smote(d, cfg);
    }
    let counts = largest_remainder(&difficulty, target);
    let neighbors = minority_neighbors(d, &minority, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = Builder::new(d);
    for (slot, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            let partner = neighbors[slot][rng.random_range(0..k)];
            let gap: f64 = rng.random();
            b.interpolate(minority[slot], partner, gap)?;
        }
    }
    Ok(b.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorderlineClass {
    Safe,
    Danger,
    Noise,
}

/// Label each minority row by the count of majority rows among its `m`
/// nearest rows: all majority is noise, at least half is danger.
pub fn classify_borderline(d: &Dataset, m: usize) -> Vec<BorderlineClass> {
    let minority = d.class_indices(MINORITY);
    all_neighbors(d, &minority, m)
        .into_iter()
        .map(|nb| {
            let n_maj = nb.iter().filter(|&&j| d.label(j) == MAJORITY).count();
            if n_maj == nb.len() {
                BorderlineClass::Noise
            } else if 2 * n_maj >= nb.len() {
                BorderlineClass::Danger
            } else {
                BorderlineClass::Safe
            }
        })
        .collect()
}

pub fn borderline_smote(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    cfg.validate()?;
    let target = balance_target(d)?;
    if target == 0 {
        return Ok(Resampled::identity(d));
    }
    let k = cfg.k_neighbors;
    let minority = require_minority(d, k, "Borderline-SMOTE minority rows (k + 1)")?;
    if d.len() < cfg.m_neighbors + 1 {
        return Err(Error::InsufficientSamples {
            what: "Borderline-SMOTE rows (m + 1)",
            required: cfg.m_neighbors + 1,
            found: d.len(),
        });
    }
    let danger: Vec<usize> = classify_borderline(d, cfg.m_neighbors)
        .into_iter()
        .zip(&minority)
        .filter_map(|(c, &i)| (c == BorderlineClass::Danger).then_some(i))
        .collect();
    if danger.is_empty() {
        return Err(Error::NoDangerPoints);
    }
    let same_class = minority_neighbors(d, &danger, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = Builder::new(d);
    let from_minority = match cfg.borderline_kind {
        BorderlineKind::Borderline1 => target,
        BorderlineKind::Borderline2 => {
            let frac: f64 = Beta::new(10.0, 10.0).expect("valid shape").sample(&mut rng);
            ((frac * (target + 1) as f64) as usize).min(target)
        }
    };
    for _ in 0..from_minority {
        let slot = rng.random_range(0..danger.len());
        let partner = same_class[slot][rng.random_range(0..k)];
        let gap: f64 = rng.random();
        b.interpolate(danger[slot], partner, gap)?;
    }
    if from_minority < target {
        let any_class = all_neighbors(d, &danger, k);
        for _ in from_minority..target {
            let slot = rng.random_range(0..danger.len());
            let partner = any_class[slot][rng.random_range(0..any_class[slot].len())];
            let gap: f64 = rng.random_range(0.0..0.5);
            b.interpolate(danger[slot], partner, gap)?;
        }
    }
    Ok(b.finish())
}

/// The oversampling half of a method (SMOTE for the composite methods).
pub fn oversampling_stage(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    match cfg.method {
        BaselineMethod::Smote | BaselineMethod::SmoteTomek | BaselineMethod::SmoteEnn => smote(d, cfg),
        BaselineMethod::Adasyn => adasyn(d, cfg),
        BaselineMethod::BorderlineSmote => borderline_smote(d, cfg),
    }
}

/// Rows the cleaning half of a method keeps, or `None` when the method has
/// no cleaning step.
pub fn cleaning_mask(d: &Dataset, cfg: &BaselineConfig) -> Option<Vec<bool>> {
    match cfg.method {
        BaselineMethod::SmoteTomek => Some(tomek_keep_mask(d)),
        BaselineMethod::SmoteEnn => Some(enn_keep_mask(d, cfg.enn_k)),
        _ => None,
    }
}

/// The cleaning half of a method; identity for methods without one.
pub fn cleaning_stage(r: Resampled, cfg: &BaselineConfig) -> Resampled {
    match cleaning_mask(&r.data, cfg) {
        Some(keep) => r.retain(&keep),
        None => r,
    }
}

pub fn smote_tomek(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    Ok(cleaning_stage(
        smote(d, cfg)?,
        &BaselineConfig {
            method: BaselineMethod::SmoteTomek,
            ..cfg.clone()
        },
    ))
}

pub fn smote_enn(d: &Dataset, cfg: &BaselineConfig) -> Result<Resampled> {
    Ok(cleaning_stage(
        smote(d, cfg)?,
        &BaselineConfig {
            method: BaselineMethod::SmoteEnn,
            ..cfg.clone()
        },
    ))
}

impl Resampler for BaselineConfig {
    fn name(&self) -> &'static str {
        MethodId::from(self.method).id()
    }

    fn resample(&self, data: &Dataset, seed: u64) -> Result<Resampled> {
        let cfg = BaselineConfig {
            seed,
            ..self.clone()
        };
        Ok(cleaning_stage(oversampling_stage(data, &cfg)?, &cfg))
    }
}

/// Labels of a resampled dataset by class, for quick balance checks.
pub fn class_counts(labels: &[Label]) -> (usize, usize) {
    let min = labels.iter().filter(|&&l| l == MINORITY).count();
    (labels.len() - min, min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_case_study;
    use proptest::prelude::*;

    fn pts(points: &[(f64, f64, Label)]) -> Dataset {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0, p.1]).collect();
        Dataset::from_rows(&rows, points.iter().map(|p| p.2).collect()).unwrap()
    }

    fn cfg(method: BaselineMethod) -> BaselineConfig {
        BaselineConfig::new(method)
    }

    /// Two far-apart clusters: majority around (0,0), minority around (100,100).
    fn separated(n_maj: usize, n_min: usize) -> Dataset {
        let mut p = Vec::new();
        for i in 0..n_maj {
            p.push(((i % 7) as f64, (i / 7) as f64, MAJORITY));
        }
        for i in 0..n_min {
            p.push((100.0 + (i % 3) as f64, 100.0 + (i / 3) as f64, MINORITY));
        }
        pts(&p)
    }

    fn assert_on_segments(r: &Resampled, source: &Dataset) {
        for (i, o) in r.origins.iter().enumerate() {
            if let RowOrigin::Synthetic(p) = o {
                let (a, b) = (source.row(p.proxima), source.row(p.orion));
                for (j, x) in r.data.row(i).iter().enumerate() {
                    assert!((x - (p.q1 * a[j] + p.q2 * b[j])).abs() < 1e-9);
                }
                assert!((0.0..=1.0).contains(&p.q2));
            }
        }
    }

    #[test]
    fn smote_midpoint_and_endpoints() {
        let d = pts(&[(0.0, 0.0, 1), (1.0, 1.0, 1)]);
        for (gap, want) in [(0.5, [0.5, 0.5]), (0.0, [0.0, 0.0]), (1.0, [1.0, 1.0])] {
            let mut b = Builder::new(&d);
            b.interpolate(0, 1, gap).unwrap();
            assert_eq!(b.finish().data.row(2), &want);
        }
    }

    #[test]
    fn smote_case_study_counts() {
        let d = make_case_study(0);
        let r = smote(&d, &cfg(BaselineMethod::Smote)).unwrap();
        assert_eq!(r.synthetic_count(), 179);
        assert_eq!(class_counts(r.data.labels()), (202, 202));
        assert_on_segments(&r, &d);
        for p in r.provenance() {
            assert_eq!(d.label(p.orion), MINORITY);
        }
    }

    #[test]
    fn tomek_removes_majority_member_of_link() {
        // Rows 1 (majority) and 2 (minority) are mutual nearest neighbours.
        let d = pts(&[(0.0, 0.0, 0), (5.0, 0.0, 0), (5.5, 0.0, 1), (11.0, 0.0, 1)]);
        assert_eq!(tomek_keep_mask(&d), vec![true, false, true, true]);
        let t = tomek_remove(&d);
        assert_eq!(t.len(), 3);
        assert_eq!(t.count(MINORITY), 2);
    }

    #[test]
    fn tomek_leaves_separated_clusters_alone() {
        let d = separated(20, 6);
        assert_eq!(tomek_remove(&d), d);
    }

    #[test]
    fn enn_removes_isolated_minority() {
        let mut p: Vec<(f64, f64, Label)> = (0..9).map(|i| ((i % 3) as f64, (i / 3) as f64, 0)).collect();
        p.push((1.0, 1.1, 1));
        let d = pts(&p);
        let keep = enn_keep_mask(&d, 3);
        assert!(!keep[9]);
        assert!(keep[..9].iter().all(|&k| k));
        assert_eq!(enn_clean(&d, 3).count(MINORITY), 0);
    }

    #[test]
    fn enn_homogeneous_and_tie() {
        let d = separated(10, 6);
        assert_eq!(enn_clean(&d, 3), d);
        // Even k with a 1-1 split keeps the row.
        let d = pts(&[(0.0, 0.0, 1), (1.0, 0.0, 1), (-1.0, 0.0, 0), (10.0, 0.0, 0)]);
        assert!(enn_keep_mask(&d, 2)[0]);
    }

    #[test]
    fn adasyn_difficulty_extremes() {
        // Minority 0 sits among minority; minority 6 sits inside the majority.
        let mut p = vec![(50.0, 50.0, 1), (50.5, 50.0, 1), (50.0, 50.5, 1), (49.5, 50.0, 1), (50.0, 49.5, 1), (50.5, 50.5, 1)];
        p.extend((0..12).map(|i| ((i % 4) as f64, (i / 4) as f64, 0)));
        p.push((1.5, 1.0, 1));
        let d = pts(&p);
        let r = adasyn_difficulty(&d, 5);
        assert_eq!(r[0], 0.0);
        assert_eq!(r[6], 1.0);
    }

    #[test]
    fn adasyn_balances_and_falls_back() {
        let d = make_case_study(3);
        let r = adasyn(&d, &cfg(BaselineMethod::Adasyn)).unwrap();
        assert_eq!(class_counts(r.data.labels()), (202, 202));
        assert_on_segments(&r, &d);
        let d = separated(20, 8);
        let r = adasyn(&d, &cfg(BaselineMethod::Adasyn)).unwrap();
        assert_eq!(class_counts(r.data.labels()), (20, 20));
    }

    #[test]
    fn borderline_noise_is_never_an_anchor() {
        let d = make_case_study(0);
        let classes = classify_borderline(&d, 10);
        let minority = d.class_indices(MINORITY);
        let noise: Vec<usize> = classes
            .iter()
            .zip(&minority)
            .filter_map(|(c, &i)| (*c == BorderlineClass::Noise).then_some(i))
            .collect();
        let r = borderline_smote(&d, &cfg(BaselineMethod::BorderlineSmote)).unwrap();
        assert_eq!(class_counts(r.data.labels()), (202, 202));
        for p in r.provenance() {
            assert!(!noise.contains(&p.anchor));
            assert_eq!(classes[minority.iter().position(|&m| m == p.anchor).unwrap()], BorderlineClass::Danger);
        }
    }

    #[test]
    fn borderline_two_stays_near_anchor_toward_majority() {
        let d = make_case_study(0);
        let r = borderline_smote(&d, &cfg(BaselineMethod::BorderlineSmote)).unwrap();
        assert_on_segments(&r, &d);
        let mut toward_majority = 0;
        for p in r.provenance() {
            if d.label(p.orion) == MAJORITY {
                toward_majority += 1;
                assert!(p.q2 <= 0.5);
            }
        }
        assert!(toward_majority > 0);
    }

    #[test]
    fn borderline_all_safe_errors() {
        let d = separated(30, 12);
        assert!(matches!(
            borderline_smote(&d, &cfg(BaselineMethod::BorderlineSmote)),
            Err(Error::NoDangerPoints)
        ));
    }

    #[test]
    fn composites_on_separated_clusters_equal_smote() {
        let d = separated(30, 8);
        let plain = smote(&d, &cfg(BaselineMethod::Smote)).unwrap();
        assert_eq!(smote_tomek(&d, &cfg(BaselineMethod::SmoteTomek)).unwrap(), plain);
        assert_eq!(smote_enn(&d, &cfg(BaselineMethod::SmoteEnn)).unwrap(), plain);
    }

    #[test]
    fn composites_only_remove_rows_and_are_deterministic() {
        let d = make_case_study(5);
        let c = cfg(BaselineMethod::SmoteTomek);
        let plain = smote(&d, &c).unwrap();
        let tl = smote_tomek(&d, &c).unwrap();
        assert!(tl.data.len() <= plain.data.len());
        assert_eq!(tl.data.count(MINORITY), plain.data.count(MINORITY));
        assert_eq!(tl, smote_tomek(&d, &c).unwrap());
        let enn = smote_enn(&d, &cfg(BaselineMethod::SmoteEnn)).unwrap();
        assert!(enn.data.len() <= plain.data.len());
        assert_on_segments(&enn, &d);
    }

    #[test]
    fn too_few_minority() {
        let d = pts(&[(0.0, 0.0, 1), (1.0, 0.0, 1), (2.0, 0.0, 0), (3.0, 0.0, 0), (4.0, 0.0, 0)]);
        assert!(matches!(smote(&d, &cfg(BaselineMethod::Smote)), Err(Error::InsufficientSamples { .. })));
        assert!(adasyn(&d, &cfg(BaselineMethod::Adasyn)).is_err());
    }

    proptest! {
        #[test]
        fn largest_remainder_sums_to_total(
            w in proptest::collection::vec(0.0f64..1.0, 1..40),
            total in 0usize..500,
        ) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let c = largest_remainder(&w, total);
            prop_assert_eq!(c.iter().sum::<usize>(), total);
            let s: f64 = w.iter().sum();
            for (ci, wi) in c.iter().zip(&w) {
                prop_assert!((*ci as f64 - wi / s * total as f64).abs() < 1.0 + 1e-9);
            }
        }
    }
}
