//! Reserve-price construction.
//!
//! Three rules are built here:
//!
//! * the single empirical monopoly reserve of a bid list;
//! * RIC-h (reserve inference from clusters): partition the prediction axis
//!   into k minimum-variance cells and price each cell at its empirical
//!   optimum;
//! * the offset rule r(x) = max(h(x) - t, 0), with t either fitted
//!   empirically or set to the cube root of the squared loss.
//!
//! Both argmax searches run over finite candidate sets: the revenue of a
//! single price is left-continuous piecewise linear rising between bids, so
//! the optimum is attained at a bid value; the offset revenue is piecewise
//! linear in t with upward jumps only where some sample's acceptance flips,
//! i.e. at t = h(x_i) - b_i.

use crate::error::{Error, Result};
use crate::model::{revenue, Dataset, PiecewiseReserve};
use crate::partition::optimal_k_partition;
use crate::regression::Predictor;

/// Equal-width bucketing of the prediction axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationConfig {
    pub buckets: usize,
    pub range_low: f64,
    pub range_high: f64,
}

impl QuantizationConfig {
    pub fn new(buckets: usize, range_low: f64, range_high: f64) -> Result<Self> {
        if buckets == 0 {
            return Err(Error::param("buckets", "must be >= 1"));
        }
        if !(range_low.is_finite() && range_high.is_finite() && range_low < range_high) {
            return Err(Error::param("range", "need finite range_low < range_high"));
        }
        Ok(Self {
            buckets,
            range_low,
            range_high,
        })
    }

    /// 1000 buckets over [0, 50], the preset used by the experiment harness.
    pub fn standard() -> Self {
        Self {
            buckets: 1000,
            range_low: 0.0,
            range_high: 50.0,
        }
    }

    /// Clamp into range, then snap to the midpoint of the containing bucket.
    pub fn snap(&self, value: f64) -> f64 {
        let lo = self.range_low;
        let hi = self.range_high;
        let b = self.buckets as f64;
        let v = value.clamp(lo, hi);
        let idx = (((v - lo) * b / (hi - lo)).floor() as usize).min(self.buckets - 1);
        lo + (idx as f64 + 0.5) * (hi - lo) / b
    }
}

/// Snap every value to its bucket midpoint.
pub fn quantize(values: &[f64], quant: &QuantizationConfig) -> Vec<f64> {
    values.iter().map(|v| quant.snap(*v)).collect()
}

/// Constant-offset reserve rule r(x) = max(h(x) - offset, 0).
///
/// A fitted offset may be negative (prices above the prediction) when the
/// predictor systematically under-predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetReserve {
    pub offset: f64,
    pub predictor_id: Option<u64>,
}

impl OffsetReserve {
    pub fn price(&self, prediction: f64) -> f64 {
        (prediction - self.offset).max(0.0)
    }
}

/// Price maximizing r * #{b_i >= r} over all reals, attained at a bid value;
/// ties break toward the lowest price. Returns (price, mean revenue).
pub fn empirical_optimal_reserve(bids: &[f64]) -> Result<(f64, f64)> {
    if bids.is_empty() {
        return Err(Error::EmptyBids);
    }
    if bids.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(Error::param("bids", "must be finite and >= 0"));
    }
    let mut sorted = bids.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut best_price = sorted[0];
    let mut best_rev = sorted[0] * m / m;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            continue;
        }
        let rev = sorted[i] * (sorted.len() - i) as f64 / m;
        if rev > best_rev {
            best_rev = rev;
            best_price = sorted[i];
        }
    }
    Ok((best_price, best_rev))
}

/// Offset candidates for the empirical fit: every prediction-bid gap plus
/// zero, sorted ascending and deduplicated.
pub fn offset_candidates(train: &Dataset, predictor: &Predictor) -> Result<Vec<f64>> {
    let preds = predictor.predict_dataset(train)?;
    let mut cands: Vec<f64> = preds
        .iter()
        .zip(train.bids())
        .map(|(h, b)| h - b)
        .chain(std::iter::once(0.0))
        .collect();
    cands.sort_unstable_by(f64::total_cmp);
    cands.dedup();
    Ok(cands)
}

/// Mean revenue of the offset rule with offset `t` on a dataset.
pub fn offset_mean_revenue(dataset: &Dataset, predictor: &Predictor, t: f64) -> Result<f64> {
    let preds = predictor.predict_dataset(dataset)?;
    let total: f64 = preds
        .iter()
        .zip(dataset.bids())
        .map(|(h, b)| revenue((h - t).max(0.0), b))
        .sum();
    Ok(total / dataset.len() as f64)
}

/// Fit the offset maximizing empirical training revenue over the candidate
/// set; ties break toward the smallest offset.
pub fn offset_reserve_fit(train: &Dataset, predictor: &Predictor) -> Result<OffsetReserve> {
    let candidates = offset_candidates(train, predictor)?;
    let mut best_t = 0.0;
    let mut best_rev = f64::NEG_INFINITY;
    for &t in &candidates {
        let rev = offset_mean_revenue(train, predictor, t)?;
        if rev > best_rev {
            best_rev = rev;
            best_t = t;
        }
    }
    Ok(OffsetReserve {
        offset: best_t,
        predictor_id: Some(predictor.fingerprint()),
    })
}

/// Offset guaranteeing bounded separation: the cube root of the squared
/// loss, i.e. eta^(2/3).
pub fn theoretical_offset(eta_sq: f64) -> Result<f64> {
    if !eta_sq.is_finite() || eta_sq < 0.0 {
        return Err(Error::param("eta_sq", "must be finite and >= 0"));
    }
    Ok(eta_sq.cbrt())
}

/// Reserve inference from clusters.
///
/// Predictions (optionally quantized) are sorted and partitioned into k
/// minimum-variance cells by [`optimal_k_partition`]; each cell is priced at
/// the empirical optimal reserve of the bids landing in it. Cells that the
/// partition leaves empty are merged away by the threshold conversion, so
/// the returned rule always prices from observed bids; `k` may exceed the
/// number of distinct predictions.
pub fn ric_h(
    train: &Dataset,
    predictor: &Predictor,
    k: usize,
    quant: Option<&QuantizationConfig>,
) -> Result<PiecewiseReserve> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let mut preds = predictor.predict_dataset(train)?;
    if let Some(q) = quant {
        preds = quantize(&preds, q);
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_unstable_by(|a, b| preds[*a].total_cmp(&preds[*b]));
    let sorted_preds: Vec<f64> = order.iter().map(|i| preds[*i]).collect();
    let bids: Vec<f64> = train.bids().collect();
    let sorted_bids: Vec<f64> = order.iter().map(|i| bids[*i]).collect();

    let part = optimal_k_partition(&sorted_preds, k)?;
    let mut reserves: Vec<Option<f64>> = Vec::new();
    for w in part.cut_indices.windows(2) {
        if w[1] > w[0] {
            let (price, _) = empirical_optimal_reserve(&sorted_bids[w[0]..w[1]])?;
            reserves.push(Some(price));
        }
    }
    let reserves = fill_empty_cells(&part.thresholds, reserves);
    PiecewiseReserve::new(
        part.thresholds,
        reserves,
        Some(predictor.fingerprint()),
    )
}

/// Assigns reserves to cells with no training samples: each inherits from
/// the non-empty cell whose midpoint is nearest (left neighbor on a tie).
/// End cells use their single finite threshold as midpoint.
fn fill_empty_cells(thresholds: &[f64], reserves: Vec<Option<f64>>) -> Vec<f64> {
    if reserves.iter().all(|r| r.is_some()) {
        return reserves.into_iter().map(|r| r.unwrap()).collect();
    }
    let k = reserves.len();
    let midpoint = |j: usize| -> f64 {
        match (j.checked_sub(1).map(|i| thresholds[i]), thresholds.get(j)) {
            (Some(lo), Some(hi)) => 0.5 * (lo + hi),
            (Some(lo), None) => lo,
            (None, Some(hi)) => *hi,
            (None, None) => 0.0,
        }
    };
    (0..k)
        .map(|j| {
            if let Some(r) = reserves[j] {
                return r;
            }
            let mut best: Option<(f64, usize, f64)> = None;
            for (i, r) in reserves.iter().enumerate() {
                if let Some(r) = r {
                    let d = (midpoint(i) - midpoint(j)).abs();
                    let better = match best {
                        None => true,
                        Some((bd, bi, _)) => d < bd || (d == bd && i < bi),
                    };
                    if better {
                        best = Some((d, i, *r));
                    }
                }
            }
            best.map(|(_, _, r)| r).unwrap_or(0.0)
        })
        .collect()
}
