use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::codefile::Codes;
use super::dataset::DatasetMatrix;
use super::FORMAT_VERSION;
use crate::bitcode::{QuantizerConfig, SignZero, WORD_BITS};
use crate::circulant::{CirculantSketcher, RowPolicy, XiDistribution};
use crate::error::{Error, Result};
use crate::estimators::EstimatorParams;
use crate::gaussian::GaussianSketcher;
use crate::rng::RNG_IDENTIFIER;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchKind {
    #[default]
    Gaussian,
    Circulant,
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(SketchKind::Gaussian),
            "circulant" => Ok(SketchKind::Circulant),
            other => Err(Error::invalid(format!("unknown sketch kind {other:?}"))),
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::Circulant => "circulant",
        })
    }
}

/// Everything needed to rebuild a sketcher bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchManifest {
    pub format_version: u32,
    pub kind: SketchKind,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_pad: Option<usize>,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_distribution: Option<XiDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_policy: Option<RowPolicy>,
    pub sign_zero: SignZero,
    pub word_width: u32,
    pub rng_identifier: String,
}

impl SketchManifest {
    pub fn gaussian(seed: u64, m: usize, n: usize, lambda: f64) -> Self {
        SketchManifest {
            format_version: FORMAT_VERSION,
            kind: SketchKind::Gaussian,
            seed,
            m,
            n,
            n_pad: None,
            lambda,
            xi_distribution: None,
            row_policy: None,
            sign_zero: SignZero::default(),
            word_width: WORD_BITS as u32,
            rng_identifier: RNG_IDENTIFIER.to_owned(),
        }
    }

    pub fn circulant(
        seed: u64,
        m: usize,
        n: usize,
        lambda: f64,
        xi_distribution: XiDistribution,
        row_policy: RowPolicy,
    ) -> Self {
        SketchManifest {
            kind: SketchKind::Circulant,
            n_pad: Some(n.next_power_of_two()),
            xi_distribution: Some(xi_distribution),
            row_policy: Some(row_policy),
            ..Self::gaussian(seed, m, n, lambda)
        }
    }

    pub fn params(&self) -> Result<EstimatorParams> {
        EstimatorParams::new(self.lambda, self.m)
    }

    /// Codes stored per point: one for the dense kind, two for the circulant kind.
    pub fn branches(&self) -> usize {
        match self.kind {
            SketchKind::Gaussian => 1,
            SketchKind::Circulant => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::format(format!(
                "unsupported manifest version {}",
                self.format_version
            )));
        }
        if self.word_width as usize != WORD_BITS {
            return Err(Error::format(format!("unsupported word width {}", self.word_width)));
        }
        if self.rng_identifier != RNG_IDENTIFIER {
            return Err(Error::format(format!(
                "codes were produced by generator {:?}, this build uses {RNG_IDENTIFIER:?}",
                self.rng_identifier
            )));
        }
        if self.m == 0 || self.n == 0 || !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::format("manifest has non-positive m, n or lambda"));
        }
        match self.kind {
            SketchKind::Gaussian => {
                if self.n_pad.is_some() || self.xi_distribution.is_some() || self.row_policy.is_some() {
                    return Err(Error::format("gaussian manifest carries circulant fields"));
                }
            }
            SketchKind::Circulant => {
                let n_pad = self.n.checked_next_power_of_two();
                if self.n_pad != n_pad || self.xi_distribution.is_none() || self.row_policy.is_none() {
                    return Err(Error::format("circulant manifest is missing or has inconsistent fields"));
                }
                if Some(self.m) > n_pad {
                    return Err(Error::format("circulant manifest has m > n_pad"));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON bytes (the exact bytes written to code files).
    pub fn to_json_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of [`to_json_bytes`](Self::to_json_bytes).
    pub fn content_hash(&self) -> String {
        hex_digest(&self.to_json_bytes())
    }

    pub fn build(&self) -> Result<Sketcher> {
        self.validate()?;
        let config = QuantizerConfig { sign_zero: self.sign_zero };
        Ok(match self.kind {
            SketchKind::Gaussian => Sketcher::Gaussian(GaussianSketcher::sample_with_config(
                self.seed,
                self.m,
                self.n,
                self.lambda,
                config,
            )?),
            SketchKind::Circulant => Sketcher::Circulant(CirculantSketcher::sample_with_config(
                self.seed,
                self.m,
                self.n,
                self.lambda,
                self.xi_distribution.unwrap_or_default(),
                self.row_policy.unwrap_or_default(),
                config,
            )?),
        })
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A sketcher of either kind.
#[derive(Clone, Debug)]
pub enum Sketcher {
    Gaussian(GaussianSketcher),
    Circulant(CirculantSketcher),
}

impl Sketcher {
    pub fn manifest(&self) -> SketchManifest {
        match self {
            Sketcher::Gaussian(s) => SketchManifest {
                sign_zero: s.config().sign_zero,
                ..SketchManifest::gaussian(s.seed(), s.m(), s.n(), s.lambda())
            },
            Sketcher::Circulant(s) => SketchManifest {
                sign_zero: s.config().sign_zero,
                ..SketchManifest::circulant(
                    s.seed(),
                    s.m(),
                    s.n(),
                    s.lambda(),
                    s.xi_distribution(),
                    s.row_policy(),
                )
            },
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Sketcher::Gaussian(s) => s.n(),
            Sketcher::Circulant(s) => s.n(),
        }
    }

    /// Embeds every point: single codes for the dense kind, dual codes for the circulant kind.
    pub fn embed_dataset(&self, data: &DatasetMatrix) -> Result<Codes> {
        if data.n() != self.n() {
            return Err(Error::invalid(format!(
                "dataset dimension {} does not match sketcher dimension {}",
                data.n(),
                self.n()
            )));
        }
        let points: Vec<&[f64]> = data.points().collect();
        Ok(match self {
            Sketcher::Gaussian(s) => Codes::Single(
                points.par_iter().map(|p| s.embed(p)).collect::<Result<_>>()?,
            ),
            Sketcher::Circulant(s) => Codes::Dual(
                points.par_iter().map(|p| s.embed_dual(p)).collect::<Result<_>>()?,
            ),
        })
    }
}
