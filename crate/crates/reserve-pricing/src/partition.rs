//! Optimal k-cell partitioning of a sorted 1-d array.
//!
//! The objective for a partition into consecutive segments is the sum over
//! segments of sqrt(sum of pairwise squared differences), equivalently
//! sqrt(2) * n_s * sigma_s per segment. A dynamic program over cut positions
//! finds the exact minimum in O(k m^2); an exhaustive oracle covers small
//! instances for testing.
//!
//! Equal values are never split across a cut: a threshold on the value axis
//! cannot separate them. Restricting cuts to boundaries between distinct
//! values loses nothing, because the cost of moving t tied values into a
//! segment is sqrt(2(P + tQ)) with constants P, Q >= 0 - concave in t - so
//! distributing a tie group between two adjacent segments is always
//! dominated by an all-left or all-right placement.

use crate::error::{Error, Result};

/// Prefix sums over a sorted array for O(1) segment costs.
///
/// Values are shifted by the median element before squaring; the cost is
/// translation invariant and the shift keeps the radicand away from
/// catastrophic cancellation for large magnitudes.
#[derive(Debug, Clone)]
pub struct SegmentCostTable {
    prefix_sum: Vec<f64>,
    prefix_sum_sq: Vec<f64>,
    count: usize,
    shift: f64,
}

impl SegmentCostTable {
    /// Builds the table; input must be sorted ascending and finite.
    pub fn new(sorted_values: &[f64]) -> Result<Self> {
        validate_sorted(sorted_values)?;
        let n = sorted_values.len();
        let shift = if n == 0 { 0.0 } else { sorted_values[n / 2] };
        let mut prefix_sum = Vec::with_capacity(n + 1);
        let mut prefix_sum_sq = Vec::with_capacity(n + 1);
        prefix_sum.push(0.0);
        prefix_sum_sq.push(0.0);
        let (mut s, mut q) = (0.0, 0.0);
        for v in sorted_values {
            let y = v - shift;
            s += y;
            q += y * y;
            prefix_sum.push(s);
            prefix_sum_sq.push(q);
        }
        Ok(Self {
            prefix_sum,
            prefix_sum_sq,
            count: n,
            shift,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Translation applied to values before accumulating the prefix sums.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Cost of the segment holding values l..r (half-open over the sorted
    /// array): sqrt(2 n_s sum(y^2) - 2 (sum y)^2), clamped at zero against
    /// rounding. Empty segments cost zero.
    pub fn segment_cost(&self, l: usize, r: usize) -> Result<f64> {
        if l > r || r > self.count {
            return Err(Error::SegmentBounds { l, r });
        }
        Ok(self.cost(l, r))
    }

    #[inline]
    fn cost(&self, l: usize, r: usize) -> f64 {
        if r - l <= 1 {
            return 0.0; // no pairs; exact zero regardless of prefix rounding
        }
        let n = (r - l) as f64;
        let s = self.prefix_sum[r] - self.prefix_sum[l];
        let q = self.prefix_sum_sq[r] - self.prefix_sum_sq[l];
        (2.0 * (n * q - s * s)).max(0.0).sqrt()
    }
}

fn validate_sorted(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnsortedValues);
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedValues);
    }
    Ok(())
}

/// A k-segment partition of a sorted array.
///
/// `cut_indices` is the nondecreasing index tuple i_0 = 0 <= ... <= i_k = n;
/// repeated indices are empty segments. `thresholds` are the interior cut
/// values at midpoints between the sorted neighbors across each non-empty
/// cut, deduplicated, so a (lo, hi] interval rule over them reproduces the
/// index partition exactly on the input values.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub cut_indices: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub objective: f64,
}

impl PartitionResult {
    /// sum over segments of n_j * sigma_j, i.e. objective / sqrt(2).
    pub fn weighted_std(&self) -> f64 {
        self.objective / std::f64::consts::SQRT_2
    }
}

fn thresholds_from_cuts(values: &[f64], cuts: &[usize]) -> Vec<f64> {
    let n = values.len();
    let mut out: Vec<f64> = Vec::new();
    for &i in cuts {
        if i == 0 || i >= n {
            continue;
        }
        let t = 0.5 * (values[i - 1] + values[i]);
        if out.last().is_none_or(|last| *last < t) {
            out.push(t);
        }
    }
    out
}

fn objective_from_cuts(table: &SegmentCostTable, cuts: &[usize]) -> f64 {
    cuts.windows(2).map(|w| table.cost(w[0], w[1])).sum()
}

/// Boundary positions between runs of equal values: 0, every index where
/// the value strictly increases, and n.
fn group_boundaries(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(0);
    for i in 1..n {
        if values[i - 1] < values[i] {
            bounds.push(i);
        }
    }
    bounds.push(n);
    bounds
}

/// Exact minimum-cost partition into k segments via dynamic programming.
///
/// Input must be sorted ascending; empty segments are permitted, so any
/// k >= 1 is legal even beyond the number of distinct values. Runs in
/// O(k g^2) for g distinct-value groups.
pub fn optimal_k_partition(values: &[f64], k: usize) -> Result<PartitionResult> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    if values.is_empty() {
        return Err(Error::param("values", "must be non-empty"));
    }
    let table = SegmentCostTable::new(values)?;
    let n = values.len();
    let bounds = group_boundaries(values);
    let g = bounds.len() - 1;
    let k_eff = k.min(g);

    // best[l][j]: min cost of covering values[..bounds[j]] with l segments.
    let width = g + 1;
    let mut best = vec![f64::INFINITY; (k_eff + 1) * width];
    let mut parent = vec![0usize; (k_eff + 1) * width];
    best[0] = 0.0;
    best[width] = 0.0; // zero values in one (empty) segment
    for j in 1..width {
        best[width + j] = table.cost(0, bounds[j]);
    }
    for l in 2..=k_eff {
        best[l * width] = 0.0;
        for j in 1..width {
            let mut min = f64::INFINITY;
            let mut arg = j;
            for jp in 0..=j {
                let c = best[(l - 1) * width + jp] + table.cost(bounds[jp], bounds[j]);
                if c < min {
                    min = c;
                    arg = jp;
                }
            }
            best[l * width + j] = min;
            parent[l * width + j] = arg;
        }
    }

    // Backtrack boundary indices, then translate to value indices.
    let mut cuts_rev = vec![n];
    let mut j = g;
    for l in (2..=k_eff).rev() {
        j = parent[l * width + j];
        cuts_rev.push(bounds[j]);
    }
    cuts_rev.push(0);
    cuts_rev.reverse();
    let mut cut_indices = cuts_rev;
    // Pad with trailing empty segments when k exceeds the group count.
    while cut_indices.len() < k + 1 {
        cut_indices.push(n);
    }

    let thresholds = thresholds_from_cuts(values, &cut_indices);
    let objective = objective_from_cuts(&table, &cut_indices);
    Ok(PartitionResult {
        cut_indices,
        thresholds,
        objective,
    })
}

const ORACLE_LIMIT: usize = 15;

/// Exhaustive oracle: tries every set of interior cut positions (all
/// nondecreasing index tuples collapse to such a set) and returns the
/// global minimum. Limited to n <= 15.
pub fn brute_force_partition(values: &[f64], k: usize) -> Result<PartitionResult> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    if values.is_empty() {
        return Err(Error::param("values", "must be non-empty"));
    }
    let n = values.len();
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    let table = SegmentCostTable::new(values)?;
    let max_cuts = k - 1;
    let mut best_mask: u32 = 0;
    let mut best = f64::INFINITY;
    for mask in 0..(1u32 << (n - 1)) {
        if mask.count_ones() as usize > max_cuts {
            continue;
        }
        let mut cost = 0.0;
        let mut prev = 0usize;
        for p in 1..n {
            if mask & (1 << (p - 1)) != 0 {
                cost += table.cost(prev, p);
                prev = p;
            }
        }
        cost += table.cost(prev, n);
        if cost < best {
            best = cost;
            best_mask = mask;
        }
    }
    let mut cut_indices = vec![0usize];
    for p in 1..n {
        if best_mask & (1 << (p - 1)) != 0 {
            cut_indices.push(p);
        }
    }
    cut_indices.push(n);
    while cut_indices.len() < k + 1 {
        cut_indices.push(n);
    }
    let thresholds = thresholds_from_cuts(values, &cut_indices);
    let objective = objective_from_cuts(&table, &cut_indices);
    Ok(PartitionResult {
        cut_indices,
        thresholds,
        objective,
    })
}
