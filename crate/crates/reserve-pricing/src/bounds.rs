//! Variance/separation inequalities evaluated numerically.
//!
//! For a bid distribution with mean B, monopoly revenue R = max_r r P(b >= r),
//! separation S = B - R and variance sigma^2, the following hold:
//!
//! * variance lower bound:  sigma^2 >= 2 R^2 e^(S/R) - B^2 - R^2
//! * separation bound:      S <= (3R)^(1/3) sigma^(2/3) <= (3B)^(1/3) sigma^(2/3)
//! * approximation ratio:   B/R <= 4.78 + 2 ln(1 + sigma^2/B^2)
//!
//! Each check evaluates both sides and reports the slack; violations beyond
//! a relative 1e-9 float allowance mean a broken implementation, not a
//! borderline input. The equal-revenue truncation (P(b >= x) = 1/x on
//! [1, M], atom at M) meets the variance lower bound with equality and makes
//! the separation bound tight as M -> 1.

use crate::error::{Error, Result};
use crate::model::mean_and_variance;
use crate::pricing::empirical_optimal_reserve;

/// Relative float allowance for theorem checks.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Mean bid, monopoly revenue, separation and variance of one distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSummary {
    pub mean_bid: f64,
    pub monopoly_revenue: f64,
    pub separation: f64,
    pub variance: f64,
}

/// One evaluated inequality. `slack` is oriented so that the inequality
/// holds iff slack >= 0 (up to the float allowance).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundCheck {
    fn with_slack(name: &'static str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let tol = BOUND_TOLERANCE * lhs.abs().max(rhs.abs()).max(1.0);
        BoundCheck {
            name,
            lhs,
            rhs,
            satisfied: slack >= -tol,
            slack,
        }
    }

    /// Check of `lhs <= rhs`.
    fn le(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self::with_slack(name, lhs, rhs, rhs - lhs)
    }

    /// Check of `lhs >= rhs`.
    fn ge(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self::with_slack(name, lhs, rhs, lhs - rhs)
    }
}

impl std::fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.name, self.lhs, self.rhs, self.satisfied, self.slack
        )
    }
}

/// Summary of an empirical bid list. The monopoly revenue reuses the same
/// candidate search as reserve pricing, keeping one definition of R.
pub fn summarize_empirical(bids: &[f64]) -> Result<DistributionSummary> {
    let (_, monopoly_revenue) = empirical_optimal_reserve(bids)?;
    let (mean_bid, variance) = mean_and_variance(bids);
    Ok(DistributionSummary {
        mean_bid,
        monopoly_revenue,
        separation: mean_bid - monopoly_revenue,
        variance,
    })
}

fn require_positive_revenue(d: &DistributionSummary) -> Result<()> {
    if d.monopoly_revenue <= 0.0 {
        return Err(Error::ZeroRevenue);
    }
    Ok(())
}

/// sigma^2 >= 2 R^2 e^(S/R) - B^2 - R^2.
pub fn check_variance_lower_bound(d: &DistributionSummary) -> Result<BoundCheck> {
    require_positive_revenue(d)?;
    let r = d.monopoly_revenue;
    let rhs = 2.0 * r * r * (d.separation / r).exp() - d.mean_bid * d.mean_bid - r * r;
    Ok(BoundCheck::ge("variance_lower_bound", d.variance, rhs))
}

/// S <= (3R)^(1/3) sigma^(2/3) and S <= (3B)^(1/3) sigma^(2/3).
pub fn check_separation_bound(d: &DistributionSummary) -> Result<(BoundCheck, BoundCheck)> {
    require_positive_revenue(d)?;
    let by_revenue = (3.0 * d.monopoly_revenue * d.variance).cbrt();
    let by_mean = (3.0 * d.mean_bid * d.variance).cbrt();
    Ok((
        BoundCheck::le("separation_bound_revenue", d.separation, by_revenue),
        BoundCheck::le("separation_bound_mean", d.separation, by_mean),
    ))
}

/// B/R <= 4.78 + 2 ln(1 + sigma^2/B^2).
pub fn check_approx_ratio(d: &DistributionSummary) -> Result<BoundCheck> {
    require_positive_revenue(d)?;
    if d.mean_bid <= 0.0 {
        return Err(Error::param("mean_bid", "must be > 0"));
    }
    let lhs = d.mean_bid / d.monopoly_revenue;
    let rhs = 4.78 + 2.0 * (1.0 + d.variance / (d.mean_bid * d.mean_bid)).ln();
    Ok(BoundCheck::le("approx_ratio", lhs, rhs))
}

/// Closed-form summary of the equal-revenue truncation at M: tail
/// P(b >= x) = 1/x on [1, M] with an atom of mass 1/M at M. Every reserve
/// in [1, M] extracts revenue 1; B = 1 + ln M; the second moment is
/// 1 + 2(M - 1), giving sigma^2 = 2M - 1 - (1 + ln M)^2 (about ln^3(M)/3
/// as M -> 1).
pub fn equal_revenue_summary(m: f64) -> Result<DistributionSummary> {
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::param("M", "must be finite and > 1"));
    }
    let log_m = m.ln();
    let mean_bid = 1.0 + log_m;
    let variance = 2.0 * m - 1.0 - mean_bid * mean_bid;
    Ok(DistributionSummary {
        mean_bid,
        monopoly_revenue: 1.0,
        separation: log_m,
        variance,
    })
}

/// All four distribution checks in display order.
pub fn check_all(d: &DistributionSummary) -> Result<Vec<BoundCheck>> {
    let (sep_r, sep_b) = check_separation_bound(d)?;
    Ok(vec![
        check_variance_lower_bound(d)?,
        sep_r,
        sep_b,
        check_approx_ratio(d)?,
    ])
}

/// Uniform-convergence gap for the piecewise reserve class on m samples:
/// 2 sqrt(ln(1/delta) / 2m) + 4 sqrt(2 ((2k-1) ln m - k ln k) / m).
///
/// The growth-function term is clamped at zero (a growth function is never
/// below 1). Bids must be normalized to [0, 1] for the gap to be meaningful;
/// that precondition is documented, not checked.
pub fn generalization_gap(m: usize, k: usize, delta: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::param("m", "must be >= 2"));
    }
    if k < 1 {
        return Err(Error::param("k", "must be >= 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", "must lie in (0, 1]"));
    }
    let m_f = m as f64;
    let k_f = k as f64;
    let confidence = 2.0 * ((1.0 / delta).ln() / (2.0 * m_f)).sqrt();
    let log_growth = ((2.0 * k_f - 1.0) * m_f.ln() - k_f * k_f.ln()).max(0.0);
    let complexity = 4.0 * (2.0 * log_growth / m_f).sqrt();
    Ok(confidence + complexity)
}

/// Separation limit of the offset rule: eta^(1/2) + 2 eta^(2/3) for
/// eta = sqrt(eta_sq).
pub fn offset_separation_limit(eta_sq: f64) -> Result<f64> {
    if !eta_sq.is_finite() || eta_sq < 0.0 {
        return Err(Error::param("eta_sq", "must be finite and >= 0"));
    }
    let eta = eta_sq.sqrt();
    Ok(eta.sqrt() + 2.0 * eta_sq.cbrt())
}

/// Compare an observed (Monte Carlo) separation of the offset rule against
/// its limit. Sampling error allowances are the caller's to add.
pub fn check_offset_lemma(s_observed: f64, eta_sq: f64) -> Result<BoundCheck> {
    let rhs = offset_separation_limit(eta_sq)?;
    Ok(BoundCheck::le("offset_separation", s_observed, rhs))
}

/// Cluster separation limit: (3B)^(1/3) w^(2/3) where w = (1/m) sum over
/// cells of m_j sigma_j (bid standard deviations within cells).
pub fn cluster_separation_limit(mean_bid: f64, weighted_std: f64) -> f64 {
    (3.0 * mean_bid).cbrt() * weighted_std.powi(2).cbrt()
}

/// Worst-case separation of the clustered rule as k and m grow:
/// (12 B eta^2)^(1/3); the constant 12^(1/3) is about 2.289.
pub fn worst_case_separation_limit(mean_bid: f64, eta_sq: f64) -> f64 {
    (12.0 * mean_bid * eta_sq).cbrt()
}
