//! Bid predictors and squared-loss measurement.
//!
//! The default predictor is ridge-regularized linear least squares solved by
//! normal equations (dimensions here are small, a few hundred at most).
//! Downstream pricing takes any predictor: a constant, or an external table
//! keyed by a hash of the feature vector for replaying predictions produced
//! outside this crate.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::Dataset;

/// FNV-1a over the little-endian bit patterns of the features. Keys the
/// external-table predictor.
pub fn feature_hash(features: &[f64]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for f in features {
        for byte in f.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    h
}

/// Deterministic map from features to a predicted bid.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    /// w . x + intercept.
    Linear { weights: Vec<f64>, intercept: f64 },
    /// Ignores the features.
    Constant { value: f64 },
    /// Lookup by [`feature_hash`]; unseen vectors fall back to `fallback`.
    Table {
        dimension: usize,
        entries: BTreeMap<u64, f64>,
        fallback: f64,
    },
}

impl Predictor {
    pub fn constant(value: f64) -> Self {
        Predictor::Constant { value }
    }

    /// 1-d passthrough (weight 1, intercept 0); handy when predictions are
    /// precomputed into the single feature column.
    pub fn identity_1d() -> Self {
        Predictor::Linear {
            weights: vec![1.0],
            intercept: 0.0,
        }
    }

    pub fn predict(&self, features: &[f64]) -> f64 {
        match self {
            Predictor::Linear { weights, intercept } => {
                intercept
                    + weights
                        .iter()
                        .zip(features)
                        .map(|(w, x)| w * x)
                        .sum::<f64>()
            }
            Predictor::Constant { value } => *value,
            Predictor::Table {
                entries, fallback, ..
            } => *entries.get(&feature_hash(features)).unwrap_or(fallback),
        }
    }

    /// Feature dimension the predictor expects; `None` when any dimension
    /// is accepted.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Predictor::Linear { weights, .. } => Some(weights.len()),
            Predictor::Constant { .. } => None,
            Predictor::Table { dimension, .. } => Some(*dimension),
        }
    }

    pub fn check_dimension(&self, d: usize) -> Result<()> {
        match self.dimension() {
            Some(expected) if expected != d => Err(Error::DimensionMismatch {
                expected,
                actual: d,
            }),
            _ => Ok(()),
        }
    }

    /// Predictions for every sample, after a dimension check.
    pub fn predict_dataset(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        self.check_dimension(dataset.dimension())?;
        Ok(dataset
            .samples()
            .iter()
            .map(|s| self.predict(&s.features))
            .collect())
    }

    /// Stable fingerprint of the serialized form, used to tag reserve rules
    /// with the predictor that defined their cells.
    pub fn fingerprint(&self) -> u64 {
        let text = self.to_text();
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        for byte in text.as_bytes() {
            h ^= *byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        h
    }

    /// Flat text form: kind line, dimension line, then one value per line
    /// (weights then intercept for `linear`; `default` then `hash value`
    /// pairs for `table`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Predictor::Linear { weights, intercept } => {
                out.push_str("linear\n");
                out.push_str(&format!("{}\n", weights.len()));
                for w in weights {
                    out.push_str(&format!("{w}\n"));
                }
                out.push_str(&format!("{intercept}\n"));
            }
            Predictor::Constant { value } => {
                out.push_str("constant\n0\n");
                out.push_str(&format!("{value}\n"));
            }
            Predictor::Table {
                dimension,
                entries,
                fallback,
            } => {
                out.push_str("table\n");
                out.push_str(&format!("{dimension}\n"));
                out.push_str(&format!("default {fallback}\n"));
                for (k, v) in entries {
                    out.push_str(&format!("{k:016x} {v}\n"));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            what: "predictor",
            reason,
        };
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let kind = lines.next().ok_or_else(|| err("empty input".into()))?;
        let d: usize = lines
            .next()
            .ok_or_else(|| err("missing dimension line".into()))?
            .parse()
            .map_err(|e| err(format!("bad dimension: {e}")))?;
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| err(format!("bad number `{s}`: {e}")))
        };
        match kind {
            "linear" => {
                let values: Vec<f64> = lines.map(parse_f64).collect::<Result<_>>()?;
                if values.len() != d + 1 {
                    return Err(err(format!(
                        "linear predictor needs {} values, got {}",
                        d + 1,
                        values.len()
                    )));
                }
                Ok(Predictor::Linear {
                    weights: values[..d].to_vec(),
                    intercept: values[d],
                })
            }
            "constant" => {
                let value = parse_f64(lines.next().ok_or_else(|| err("missing value".into()))?)?;
                Ok(Predictor::Constant { value })
            }
            "table" => {
                let default_line = lines.next().ok_or_else(|| err("missing default".into()))?;
                let fallback = match default_line.split_once(' ') {
                    Some(("default", v)) => parse_f64(v.trim())?,
                    _ => return Err(err("expected `default <value>` line".into())),
                };
                let mut entries = BTreeMap::new();
                for line in lines {
                    let (k, v) = line
                        .split_once(' ')
                        .ok_or_else(|| err(format!("expected `hash value`, got `{line}`")))?;
                    let key = u64::from_str_radix(k, 16)
                        .map_err(|e| err(format!("bad hash `{k}`: {e}")))?;
                    entries.insert(key, parse_f64(v.trim())?);
                }
                Ok(Predictor::Table {
                    dimension: d,
                    entries,
                    fallback,
                })
            }
            other => Err(err(format!("unknown predictor kind `{other}`"))),
        }
    }
}

/// Empirical squared loss of a predictor and its root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub squared_loss: f64,
    pub rmse: f64,
}

/// Ridge-regularized least squares via normal equations. The penalty applies
/// to the weights only, not the intercept. A singular system with ridge = 0
/// is reported as an error rather than silently regularized.
pub fn fit_linear_least_squares(train: &Dataset, ridge: f64) -> Result<Predictor> {
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(Error::param("ridge", "must be finite and >= 0"));
    }
    let d = train.dimension();
    // Augmented design [x, 1]; gram is (d+1) x (d+1).
    let mut gram = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut moment = DVector::<f64>::zeros(d + 1);
    let mut row = vec![0.0; d + 1];
    for s in train.samples() {
        row[..d].copy_from_slice(&s.features);
        row[d] = 1.0;
        for i in 0..=d {
            for j in i..=d {
                gram[(i, j)] += row[i] * row[j];
            }
            moment[i] += row[i] * s.bid;
        }
    }
    for i in 0..=d {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    for i in 0..d {
        gram[(i, i)] += ridge;
    }
    let chol = Cholesky::new(gram).ok_or(Error::SingularNormalMatrix)?;
    let solution = chol.solve(&moment);
    Ok(Predictor::Linear {
        weights: solution.as_slice()[..d].to_vec(),
        intercept: solution[d],
    })
}

/// Mean squared prediction error over the dataset.
pub fn squared_loss(predictor: &Predictor, dataset: &Dataset) -> Result<LossReport> {
    predictor.check_dimension(dataset.dimension())?;
    let m = dataset.len() as f64;
    let sq = dataset
        .samples()
        .iter()
        .map(|s| {
            let e = predictor.predict(&s.features) - s.bid;
            e * e
        })
        .sum::<f64>()
        / m;
    Ok(LossReport {
        squared_loss: sq,
        rmse: sq.sqrt(),
    })
}
