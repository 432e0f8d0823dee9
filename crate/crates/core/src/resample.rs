//! The resampler interface shared by PO-QG and the baselines.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineConfig, BaselineMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::poqg::PoqgConfig;

/// Where a synthetic row came from. Every synthetic point equals
/// `q1 * row(proxima) + q2 * row(orion)` with `q1 + q2 = 1`; for the
/// SMOTE family `proxima` is the anchor itself and `q2` is the gap.
/// Row ids refer to the dataset handed to the resampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub anchor: usize,
    pub proxima: usize,
    pub orion: usize,
    pub q1: f64,
    pub q2: f64,
}

impl Provenance {
    pub fn source_rows(&self) -> [usize; 3] {
        [self.anchor, self.proxima, self.orion]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowOrigin {
    Original(usize),
    Synthetic(Provenance),
}

/// Output of a resampler: the new dataset plus one origin per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub data: Dataset,
    pub origins: Vec<RowOrigin>,
    /// Synthetics whose interpolation weights fell back to 1/2 each.
    pub fallback_count: usize,
}

impl Resampled {
    pub fn identity(d: &Dataset) -> Self {
        Resampled {
            data: d.clone(),
            origins: (0..d.len()).map(RowOrigin::Original).collect(),
            fallback_count: 0,
        }
    }

    pub fn synthetic_flags(&self) -> Vec<bool> {
        self.origins
            .iter()
            .map(|o| matches!(o, RowOrigin::Synthetic(_)))
            .collect()
    }

    pub fn synthetic_count(&self) -> usize {
        self.provenance().count()
    }

    pub fn provenance(&self) -> impl Iterator<Item = &Provenance> + '_ {
        self.origins.iter().filter_map(|o| match o {
            RowOrigin::Synthetic(p) => Some(p),
            RowOrigin::Original(_) => None,
        })
    }

    /// Keep rows whose flag is set, preserving order and provenance.
    pub fn retain(&self, keep: &[bool]) -> Resampled {
        let idx: Vec<usize> = keep
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect();
        Resampled {
            data: self.data.subset(&idx),
            origins: idx.iter().map(|&i| self.origins[i]).collect(),
            fallback_count: self.fallback_count,
        }
    }

    /// One line per synthetic row: `anchor_id,proxima_id,orion_id,q1,q2`.
    pub fn write_provenance_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["anchor_id", "proxima_id", "orion_id", "q1", "q2"])?;
        for p in self.provenance() {
            w.write_record(&[
                p.anchor.to_string(),
                p.proxima.to_string(),
                p.orion.to_string(),
                p.q1.to_string(),
                p.q2.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub trait Resampler {
    fn name(&self) -> &'static str;

    /// Resample `data` using `seed` for all randomness.
    fn resample(&self, data: &Dataset, seed: u64) -> Result<Resampled>;
}

/// Leaves the data untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Resampler for Identity {
    fn name(&self) -> &'static str {
        MethodId::None.id()
    }

    fn resample(&self, data: &Dataset, _seed: u64) -> Result<Resampled> {
        Ok(Resampled::identity(data))
    }
}

/// Every method known to the toolkit, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    None,
    Adasyn,
    BorderlineSmote,
    Smote,
    SmoteEnn,
    SmoteTomek,
    Poqg,
}

impl MethodId {
    pub const ALL: [MethodId; 7] = [
        MethodId::None,
        MethodId::Adasyn,
        MethodId::BorderlineSmote,
        MethodId::Smote,
        MethodId::SmoteEnn,
        MethodId::SmoteTomek,
        MethodId::Poqg,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MethodId::None => "none",
            MethodId::Adasyn => "adasyn",
            MethodId::BorderlineSmote => "borderline_smote",
            MethodId::Smote => "smote",
            MethodId::SmoteEnn => "smote_enn",
            MethodId::SmoteTomek => "smote_tomek",
            MethodId::Poqg => "poqg",
        }
    }

    /// Column heading used in reports.
    pub fn display_name(self) -> &'static str {
        match self {
            MethodId::None => "No-Resampling",
            MethodId::Adasyn => "ADASYN",
            MethodId::BorderlineSmote => "Boundary_SMOTE",
            MethodId::Smote => "SMOTE",
            MethodId::SmoteEnn => "SMOTE-ENN",
            MethodId::SmoteTomek => "SMOTE-TL",
            MethodId::Poqg => "PO-QG",
        }
    }

    pub fn baseline(self) -> Option<BaselineMethod> {
        Some(match self {
            MethodId::Adasyn => BaselineMethod::Adasyn,
            MethodId::BorderlineSmote => BaselineMethod::BorderlineSmote,
            MethodId::Smote => BaselineMethod::Smote,
            MethodId::SmoteEnn => BaselineMethod::SmoteEnn,
            MethodId::SmoteTomek => BaselineMethod::SmoteTomek,
            MethodId::None | MethodId::Poqg => return None,
        })
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match norm.as_str() {
            "po_qg" => "poqg",
            "smote_tl" | "smotetomek" => "smote_tomek",
            "boundary_smote" | "borderline" => "borderline_smote",
            "identity" => "none",
            other => other,
        };
        MethodId::ALL
            .into_iter()
            .find(|m| m.id() == alias)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// A fully configured resampler that can be serialized into run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResamplerSpec {
    None,
    Poqg(PoqgConfig),
    Baseline(BaselineConfig),
}

impl ResamplerSpec {
    pub fn method(&self) -> MethodId {
        match self {
            ResamplerSpec::None => MethodId::None,
            ResamplerSpec::Poqg(_) => MethodId::Poqg,
            ResamplerSpec::Baseline(b) => b.method.into(),
        }
    }
}

impl Resampler for ResamplerSpec {
    fn name(&self) -> &'static str {
        self.method().id()
    }

    fn resample(&self, data: &Dataset, seed: u64) -> Result<Resampled> {
        match self {
            ResamplerSpec::None => Identity.resample(data, seed),
            ResamplerSpec::Poqg(cfg) => cfg.resample(data, seed),
            ResamplerSpec::Baseline(cfg) => cfg.resample(data, seed),
        }
    }
}
