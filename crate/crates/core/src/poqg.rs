//! Proxima-Orion q-Gaussian oversampling.
//!
//! For each minority anchor the oversampler looks at its `k` minority
//! neighbours, the anchor's nearest majority row `m` and that row's density
//! factor `rho` (mean distance from `m` to the majority class). Neighbour `n`
//! gets the raw weight
//!
//! ```text
//! w_n = (|x_n - m| + eps) / (|x_anchor - m| + eps) * (rho + eps)^(-alpha)
//! ```
//!
//! which is normalised into a categorical distribution. Two distinct
//! neighbours, Proxima and Orion, are drawn from it by inverting the
//! cumulative weights. The synthetic point blends them with normalised
//! q-Gaussian weights of their distances to the anchor:
//!
//! ```text
//! x_syn = x_anchor + q1 (x_proxima - x_anchor) + q2 (x_orion - x_anchor)
//! ```
//!
//! Since `q1 + q2 = 1` the anchor cancels and every synthetic point lies on
//! the segment between Proxima and Orion.
//!
//! `eps` does not appear in the bare weight formula; without it an anchor
//! sitting on its nearest majority row divides by zero.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::neighbors::{
    euclidean, knn_within, majority_density_with, nearest_majority, DensityDenominator,
    MajorityContext, NeighborSet,
};
use crate::resample::{Provenance, Resampled, Resampler, RowOrigin};

/// How anchors are picked in the generation loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorMode {
    /// Uniformly at random from the minority class on every iteration.
    #[default]
    Uniform,
    /// Cycle through the minority rows in order.
    RoundRobin,
}

/// Whether Orion may repeat Proxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSampling {
    #[default]
    WithoutReplacement,
    WithReplacement,
}

/// Which q-Gaussian kernel blends Proxima and Orion.
///
/// `Literal` uses `exp(-x^2 / 2)` at `q = 1` and `[1 - (1-q) x^2]^(1/(1-q))`
/// otherwise. The second branch tends to `exp(-x^2)`, so the kernel jumps
/// at `q = 1`. `Continuous` halves `x^2` in the second branch, which makes
/// it the usual Tsallis q-exponential of `-x^2 / 2` and continuous in `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QKernel {
    #[default]
    Literal,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoqgConfig {
    /// Minority neighbours per anchor.
    pub k: usize,
    /// Exponent applied to the majority density factor.
    pub alpha: f64,
    /// q-Gaussian length scale.
    pub beta: f64,
    /// q-Gaussian shape; 1 is the ordinary Gaussian.
    pub q: f64,
    pub seed: u64,
    /// Guard added to distances and density before dividing.
    pub eps_div: f64,
    /// Number of synthetics; defaults to majority count minus minority count.
    pub target: Option<usize>,
    pub anchor_mode: AnchorMode,
    pub pair_sampling: PairSampling,
    pub density_denominator: DensityDenominator,
    pub q_kernel: QKernel,
}

impl Default for PoqgConfig {
    /// The most frequent tuned values across the published benchmark grid.
    fn default() -> Self {
        PoqgConfig {
            k: 5,
            alpha: 0.3,
            beta: 0.05,
            q: 1.3,
            seed: 0,
            eps_div: 1e-9,
            target: None,
            anchor_mode: AnchorMode::default(),
            pair_sampling: PairSampling::default(),
            density_denominator: DensityDenominator::default(),
            q_kernel: QKernel::default(),
        }
    }
}

/// Grid values searched for each hyperparameter.
pub const GRID_K: [usize; 3] = [5, 7, 10];
pub const GRID_ALPHA: [f64; 3] = [0.3, 0.5, 0.7];
pub const GRID_BETA: [f64; 3] = [0.05, 0.1, 0.2];
pub const GRID_Q: [f64; 3] = [1.3, 1.5, 1.7];

impl PoqgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Config(format!("beta must be > 0, got {}", self.beta)));
        }
        if !self.q.is_finite() {
            return Err(Error::Config(format!("q must be finite, got {}", self.q)));
        }
        if !(self.eps_div.is_finite() && self.eps_div > 0.0) {
            return Err(Error::Config(format!("eps_div must be > 0, got {}", self.eps_div)));
        }
        Ok(())
    }
}

/// Neighbour weights of one anchor: raw, normalised and cumulative.
/// The later vectors stay empty until the matching step has run.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub anchor_index: usize,
    pub neighbor_indices: Vec<usize>,
    pub raw_weights: Vec<f64>,
    pub normalized_weights: Vec<f64>,
    pub cumulative: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGaussianWeights {
    pub q1: f64,
    pub q2: f64,
    pub raw1: f64,
    pub raw2: f64,
    /// Both raw weights were zero and the 1/2 split was used.
    pub fallback: bool,
}

pub fn relative_weights(
    d: &Dataset,
    neighbors: &NeighborSet,
    ctx: &MajorityContext,
    alpha: f64,
    eps_div: f64,
) -> Result<WeightTable> {
    let density = ctx
        .density
        .ok_or_else(|| Error::Config("majority density has not been computed".into()))?;
    let majority = d.row(ctx.nearest_majority_index);
    let anchor_gap = euclidean(d.row(neighbors.anchor_index), majority) + eps_div;
    let penalty = (density + eps_div).powf(-alpha);
    let raw_weights = neighbors
        .neighbor_indices
        .iter()
        .map(|&n| (euclidean(d.row(n), majority) + eps_div) / anchor_gap * penalty)
        .collect();
    Ok(WeightTable {
        anchor_index: neighbors.anchor_index,
        neighbor_indices: neighbors.neighbor_indices.clone(),
        raw_weights,
        normalized_weights: Vec::new(),
        cumulative: Vec::new(),
    })
}

pub fn normalize_weights(mut t: WeightTable) -> Result<WeightTable> {
    if t.raw_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Data(format!(
            "anchor {}: raw weights must be finite and nonnegative",
            t.anchor_index
        )));
    }
    let total: f64 = t.raw_weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Data(format!(
            "anchor {}: raw weights sum to {total}",
            t.anchor_index
        )));
    }
    t.normalized_weights = t.raw_weights.iter().map(|w| w / total).collect();
    Ok(t)
}

/// Running sums of the normalised weights: `S(n) = w_1 + ... + w_n`.
pub fn cumulative_weights(mut t: WeightTable) -> WeightTable {
    let mut acc = 0.0;
    t.cumulative = t
        .normalized_weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    t
}

/// Inverse-CDF draw over `weights` (which need not sum to 1), skipping `skip`.
fn draw<R: Rng + ?Sized>(weights: &[f64], skip: Option<usize>, rng: &mut R) -> usize {
    let total: f64 = weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(_, w)| w)
        .sum();
    let eligible = (0..weights.len()).filter(|&i| Some(i) != skip);
    if !(total > 0.0) {
        let options: Vec<usize> = eligible.collect();
        return options[rng.random_range(0..options.len())];
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for i in eligible {
        acc += weights[i];
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn select_positions<R: Rng + ?Sized>(
    t: &WeightTable,
    rng: &mut R,
    sampling: PairSampling,
) -> Result<(usize, usize)> {
    let k = t.normalized_weights.len();
    if k < 2 {
        return Err(Error::InsufficientSamples {
            what: "Proxima/Orion selection (neighbours)",
            required: 2,
            found: k,
        });
    }
    if t.cumulative.len() != k {
        return Err(Error::Config("cumulative weights have not been computed".into()));
    }
    // First draw walks the cumulative table directly.
    let u = rng.random::<f64>() * t.cumulative[k - 1];
    let proxima = t.cumulative.iter().position(|&s| u < s).unwrap_or(k - 1);
    let skip = match sampling {
        PairSampling::WithoutReplacement => Some(proxima),
        PairSampling::WithReplacement => None,
    };
    let orion = draw(&t.normalized_weights, skip, rng);
    Ok((proxima, orion))
}

/// Draw Proxima then Orion from the table's categorical distribution.
/// Returns row ids.
pub fn select_proxima_orion<R: Rng + ?Sized>(
    t: &WeightTable,
    rng: &mut R,
    sampling: PairSampling,
) -> Result<(usize, usize)> {
    let (p, o) = select_positions(t, rng, sampling)?;
    Ok((t.neighbor_indices[p], t.neighbor_indices[o]))
}

/// q-Gaussian kernel of `distance / beta` in its [`QKernel::Literal`] form.
/// Outside the compact support that appears for `q < 1` the weight is 0.
pub fn q_gaussian_weight(distance: f64, beta: f64, q: f64) -> f64 {
    q_gaussian_weight_with(distance, beta, q, QKernel::Literal)
}

pub fn q_gaussian_weight_with(distance: f64, beta: f64, q: f64, kernel: QKernel) -> f64 {
    let x2 = (distance / beta).powi(2);
    if q == 1.0 {
        return (-0.5 * x2).exp();
    }
    let x2 = match kernel {
        QKernel::Literal => x2,
        QKernel::Continuous => 0.5 * x2,
    };
    let one_minus_q = 1.0 - q;
    let inner = -one_minus_q * x2;
    if inner <= -1.0 {
        return 0.0;
    }
    (inner.ln_1p() / one_minus_q).exp()
}

pub fn normalize_q_weights(raw1: f64, raw2: f64) -> QGaussianWeights {
    let total = raw1 + raw2;
    if total > 0.0 && total.is_finite() {
        QGaussianWeights {
            q1: raw1 / total,
            q2: raw2 / total,
            raw1,
            raw2,
            fallback: false,
        }
    } else {
        QGaussianWeights {
            q1: 0.5,
            q2: 0.5,
            raw1,
            raw2,
            fallback: true,
        }
    }
}

fn check_dims(anchor: &[f64], others: [&[f64]; 2]) -> Result<()> {
    for o in others {
        if o.len() != anchor.len() {
            return Err(Error::DimensionMismatch {
                expected: anchor.len(),
                found: o.len(),
            });
        }
    }
    Ok(())
}

/// `anchor + q1 (proxima - anchor) + q2 (orion - anchor)`.
pub fn generate_synthetic(
    anchor: &[f64],
    proxima: &[f64],
    orion: &[f64],
    w: &QGaussianWeights,
) -> Result<Vec<f64>> {
    check_dims(anchor, [proxima, orion])?;
    Ok(anchor
        .iter()
        .zip(proxima)
        .zip(orion)
        .map(|((a, p), o)| a + w.q1 * (p - a) + w.q2 * (o - a))
        .collect())
}

/// The anchor-free form `q1 proxima + q2 orion`.
pub fn convex_combination(proxima: &[f64], orion: &[f64], w: &QGaussianWeights) -> Result<Vec<f64>> {
    check_dims(proxima, [orion, orion])?;
    Ok(proxima
        .iter()
        .zip(orion)
        .map(|(p, o)| w.q1 * p + w.q2 * o)
        .collect())
}

/// Per-anchor state computed once before generation.
#[derive(Debug, Clone)]
pub struct AnchorState {
    pub neighbors: NeighborSet,
    pub majority: MajorityContext,
    pub weights: WeightTable,
}

/// Neighbour sets, majority contexts and weight tables for every minority row,
/// in row order.
pub fn prepare_anchors(d: &Dataset, cfg: &PoqgConfig) -> Result<Vec<AnchorState>> {
    cfg.validate()?;
    let minority = d.class_indices(MINORITY);
    let n_majority = d.count(MAJORITY);
    if minority.len() < cfg.k + 1 {
        return Err(Error::InsufficientSamples {
            what: "PO-QG minority rows (k + 1)",
            required: cfg.k + 1,
            found: minority.len(),
        });
    }
    if n_majority < 2 {
        return Err(Error::InsufficientSamples {
            what: "PO-QG majority rows",
            required: 2,
            found: n_majority,
        });
    }
    let contexts: Vec<(NeighborSet, MajorityContext)> = minority
        .par_iter()
        .map(|&a| Ok((knn_within(d, MINORITY, a, cfg.k)?, nearest_majority(d, a)?)))
        .collect::<Result<_>>()?;

    let mut majority_rows: Vec<usize> = contexts.iter().map(|c| c.1.nearest_majority_index).collect();
    majority_rows.sort_unstable();
    majority_rows.dedup();
    let densities: Vec<(usize, f64)> = majority_rows
        .par_iter()
        .map(|&m| Ok((m, majority_density_with(d, m, cfg.density_denominator)?)))
        .collect::<Result<_>>()?;

    contexts
        .into_iter()
        .map(|(neighbors, mut majority)| {
            let pos = densities
                .binary_search_by_key(&majority.nearest_majority_index, |p| p.0)
                .expect("density computed for every nearest majority row");
            majority.density = Some(densities[pos].1);
            let raw = relative_weights(d, &neighbors, &majority, cfg.alpha, cfg.eps_div)?;
            let weights = cumulative_weights(normalize_weights(raw)?);
            Ok(AnchorState {
                neighbors,
                majority,
                weights,
            })
        })
        .collect()
}

/// Generated minority rows with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBatch {
    pub points: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
    pub config: PoqgConfig,
    pub fallback_count: usize,
}

impl SyntheticBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature columns followed by `anchor_id,proxima_id,orion_id,q1,q2`.
    pub fn write_csv<W: Write>(&self, feature_names: &[String], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = feature_names.iter().map(String::as_str).collect();
        header.extend(["anchor_id", "proxima_id", "orion_id", "q1", "q2"]);
        w.write_record(&header)?;
        for (x, p) in self.points.iter().zip(&self.provenance) {
            let mut rec: Vec<String> = x.iter().map(f64::to_string).collect();
            rec.extend([
                p.anchor.to_string(),
                p.proxima.to_string(),
                p.orion.to_string(),
                p.q1.to_string(),
                p.q2.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn resolve_target(d: &Dataset, cfg: &PoqgConfig) -> Result<usize> {
    match cfg.target {
        Some(t) => Ok(t),
        None => {
            let (maj, min) = (d.count(MAJORITY), d.count(MINORITY));
            maj.checked_sub(min).ok_or_else(|| {
                Error::Config(format!(
                    "default target is negative: minority ({min}) outnumbers majority ({maj})"
                ))
            })
        }
    }
}

/// Generate synthetics for `d`. Returns the original rows followed by the
/// synthetic minority rows, plus the batch with provenance.
pub fn oversample(d: &Dataset, cfg: &PoqgConfig) -> Result<(Dataset, SyntheticBatch)> {
    cfg.validate()?;
    let target = resolve_target(d, cfg)?;
    let mut batch = SyntheticBatch {
        points: Vec::with_capacity(target),
        provenance: Vec::with_capacity(target),
        config: cfg.clone(),
        fallback_count: 0,
    };
    if target == 0 {
        return Ok((d.clone(), batch));
    }
    let anchors = prepare_anchors(d, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for iteration in 0..target {
        let slot = match cfg.anchor_mode {
            AnchorMode::Uniform => rng.random_range(0..anchors.len()),
            AnchorMode::RoundRobin => iteration % anchors.len(),
        };
        let state = &anchors[slot];
        let (p, o) = select_positions(&state.weights, &mut rng, cfg.pair_sampling)?;
        let nb = &state.neighbors;
        let w = normalize_q_weights(
            q_gaussian_weight_with(nb.distances[p], cfg.beta, cfg.q, cfg.q_kernel),
            q_gaussian_weight_with(nb.distances[o], cfg.beta, cfg.q, cfg.q_kernel),
        );
        if w.fallback {
            batch.fallback_count += 1;
        }
        let (proxima, orion) = (nb.neighbor_indices[p], nb.neighbor_indices[o]);
        let x = generate_synthetic(d.row(nb.anchor_index), d.row(proxima), d.row(orion), &w)?;
        batch.points.push(x);
        batch.provenance.push(Provenance {
            anchor: nb.anchor_index,
            proxima,
            orion,
            q1: w.q1,
            q2: w.q2,
        });
    }
    if batch.fallback_count > 0 {
        log::warn!(
            "{} of {} synthetics used the 1/2 fallback (all q-Gaussian weights zero)",
            batch.fallback_count,
            target
        );
    }
    let mut out = d.clone();
    out.extend_rows(batch.points.iter().map(|p| (p.as_slice(), MINORITY)))?;
    Ok((out, batch))
}

impl Resampler for PoqgConfig {
    fn name(&self) -> &'static str {
        "poqg"
    }

    fn resample(&self, data: &Dataset, seed: u64) -> Result<Resampled> {
        let cfg = PoqgConfig {
            seed,
            ..self.clone()
        };
        let (out, batch) = oversample(data, &cfg)?;
        let origins = (0..data.len())
            .map(RowOrigin::Original)
            .chain(batch.provenance.iter().copied().map(RowOrigin::Synthetic))
            .collect();
        Ok(Resampled {
            data: out,
            origins,
            fallback_count: batch.fallback_count,
        })
    }
}
