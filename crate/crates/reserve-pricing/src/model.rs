//! Domain types and empirical revenue/separation accounting.
//!
//! A [`Dataset`] holds (feature vector, bid) pairs. A reserve rule prices
//! each auction; a bid `b` facing price `p` pays `p` when `b >= p` and
//! nothing otherwise. Reports carry the empirical mean bid, mean revenue and
//! their difference, the separation (revenue left on the table). All
//! quantities are per-sample averages; variances use the population (1/m)
//! convention throughout the crate.

use crate::error::{Error, Result};
use crate::regression::Predictor;

/// One observed auction: feature vector plus the submitted bid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub bid: f64,
}

impl Sample {
    pub fn new(features: Vec<f64>, bid: f64) -> Self {
        Self { features, bid }
    }
}

/// Non-empty collection of samples sharing one feature dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<Sample>,
    dimension: usize,
}

impl Dataset {
    /// Validates non-emptiness, uniform dimension, finite features and
    /// non-negative finite bids.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let dimension = match samples.first() {
            Some(s) => s.features.len(),
            None => return Err(Error::EmptyDataset),
        };
        for (index, s) in samples.iter().enumerate() {
            if s.features.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    actual: s.features.len(),
                });
            }
            if !s.bid.is_finite() || s.bid < 0.0 {
                return Err(Error::InvalidSample {
                    index,
                    reason: format!("bid must be finite and >= 0, got {}", s.bid),
                });
            }
            if s.features.iter().any(|f| !f.is_finite()) {
                return Err(Error::InvalidSample {
                    index,
                    reason: "non-finite feature".into(),
                });
            }
        }
        Ok(Self { samples, dimension })
    }

    /// Builds a dataset from parallel feature rows and bids.
    pub fn from_rows(features: Vec<Vec<f64>>, bids: Vec<f64>) -> Result<Self> {
        if features.len() != bids.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                actual: bids.len(),
            });
        }
        Self::new(
            features
                .into_iter()
                .zip(bids)
                .map(|(f, b)| Sample::new(f, b))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty datasets
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn bids(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.bid)
    }
}

/// Mean bid and population variance of the bids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalStats {
    pub mean_bid: f64,
    pub variance: f64,
    pub count: usize,
}

/// Mean and population variance of a non-empty slice.
pub(crate) fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0))
}

/// Mean bid and population bid variance of the dataset.
pub fn empirical_stats(dataset: &Dataset) -> EmpiricalStats {
    let bids: Vec<f64> = dataset.bids().collect();
    let (mean_bid, variance) = mean_and_variance(&bids);
    EmpiricalStats {
        mean_bid,
        variance,
        count: dataset.len(),
    }
}

/// Revenue of posting price `price` against bid `bid`: the price when the
/// bid clears it (weak inequality), zero otherwise.
#[inline]
pub fn revenue(price: f64, bid: f64) -> f64 {
    if bid >= price {
        price
    } else {
        0.0
    }
}

/// Piecewise-constant reserve rule over the prediction axis.
///
/// Interior thresholds t_1 < ... < t_{k-1} split the axis into k cells,
/// cell j being the interval (t_{j-1}, t_j] with t_0 = -inf and t_k = +inf.
/// Each cell carries one reserve price.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseReserve {
    thresholds: Vec<f64>,
    reserves: Vec<f64>,
    predictor_id: Option<u64>,
}

impl PiecewiseReserve {
    pub fn new(
        thresholds: Vec<f64>,
        reserves: Vec<f64>,
        predictor_id: Option<u64>,
    ) -> Result<Self> {
        if reserves.len() != thresholds.len() + 1 {
            return Err(Error::param(
                "reserves",
                format!(
                    "need thresholds + 1 reserves, got {} thresholds and {} reserves",
                    thresholds.len(),
                    reserves.len()
                ),
            ));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("thresholds", "must be finite"));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("thresholds", "must be strictly increasing"));
        }
        if reserves.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::param("reserves", "must be finite and >= 0"));
        }
        Ok(Self {
            thresholds,
            reserves,
            predictor_id,
        })
    }

    /// Single-cell rule pricing everything at `reserve`.
    pub fn constant(reserve: f64) -> Self {
        Self {
            thresholds: Vec::new(),
            reserves: vec![reserve],
            predictor_id: None,
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn reserves(&self) -> &[f64] {
        &self.reserves
    }

    pub fn predictor_id(&self) -> Option<u64> {
        self.predictor_id
    }

    pub fn num_cells(&self) -> usize {
        self.reserves.len()
    }

    /// Index of the cell containing `prediction`: the count of thresholds
    /// strictly below it, so a value equal to t_j lands in cell j (left
    /// side), honoring the (t_{j-1}, t_j] convention.
    pub fn cell_index(&self, prediction: f64) -> usize {
        self.thresholds.partition_point(|t| *t < prediction)
    }

    /// Reserve price applied to a prediction value.
    pub fn price(&self, prediction: f64) -> f64 {
        self.reserves[self.cell_index(prediction)]
    }

    /// Text serialization: one `threshold <v>` line per interior cut, then
    /// one `reserve <v>` line per cell. Values round-trip bit-exactly via
    /// shortest-representation decimal formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.thresholds {
            out.push_str(&format!("threshold {t}\n"));
        }
        for r in &self.reserves {
            out.push_str(&format!("reserve {r}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut thresholds = Vec::new();
        let mut reserves = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Parse {
                what: "piecewise reserve",
                reason: format!("line {}: {}", i + 1, reason),
            };
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| err("expected `<key> <value>`".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| err(format!("bad number: {e}")))?;
            match key {
                "threshold" => thresholds.push(value),
                "reserve" => reserves.push(value),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Self::new(thresholds, reserves, None)
    }
}

/// Per-cell slice of a [`RevenueReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub count: usize,
    pub mean_bid: f64,
    pub reserve: f64,
    pub mean_revenue: f64,
    pub std_bid: f64,
}

/// Empirical revenue accounting of a reserve rule on a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RevenueReport {
    pub mean_bid: f64,
    pub mean_revenue: f64,
    pub separation: f64,
    pub count: usize,
    pub per_cell: Vec<CellReport>,
}

impl RevenueReport {
    /// (1/m) sum over cells of m_j * sigma_j, the weighted bid standard
    /// deviation entering the cluster separation bound.
    pub fn weighted_cell_std(&self) -> f64 {
        let m: usize = self.count;
        self.per_cell
            .iter()
            .map(|c| c.count as f64 * c.std_bid)
            .sum::<f64>()
            / m as f64
    }
}

/// Applies a piecewise reserve through a predictor and reports empirical
/// revenue, separation, and per-cell statistics.
pub fn evaluate_reserve(
    reserve: &PiecewiseReserve,
    predictor: &Predictor,
    dataset: &Dataset,
) -> Result<RevenueReport> {
    predictor.check_dimension(dataset.dimension())?;
    let k = reserve.num_cells();
    let mut cell_bids: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut cell_rev: Vec<f64> = vec![0.0; k];
    let mut total_rev = 0.0;
    let mut total_bid = 0.0;
    for s in dataset.samples() {
        let cell = reserve.cell_index(predictor.predict(&s.features));
        let r = reserve.reserves()[cell];
        let rev = revenue(r, s.bid);
        cell_bids[cell].push(s.bid);
        cell_rev[cell] += rev;
        total_rev += rev;
        total_bid += s.bid;
    }
    let m = dataset.len() as f64;
    let per_cell = (0..k)
        .map(|j| {
            let count = cell_bids[j].len();
            let (mean_bid, var) = if count == 0 {
                (0.0, 0.0)
            } else {
                mean_and_variance(&cell_bids[j])
            };
            CellReport {
                count,
                mean_bid,
                reserve: reserve.reserves()[j],
                mean_revenue: if count == 0 {
                    0.0
                } else {
                    cell_rev[j] / count as f64
                },
                std_bid: var.sqrt(),
            }
        })
        .collect();
    let mean_bid = total_bid / m;
    let mean_revenue = total_rev / m;
    Ok(RevenueReport {
        mean_bid,
        mean_revenue,
        separation: mean_bid - mean_revenue,
        count: dataset.len(),
        per_cell,
    })
}
