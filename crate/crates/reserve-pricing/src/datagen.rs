//! Seeded synthetic auction data.
//!
//! Feature coordinates are drawn from an even mixture of two lognormals,
//! exp(N(0, 0.5^2)) and exp(N(1, 0.5^2)). Bids follow one of two scenarios:
//!
//! * linear: b = max(sum(x) + beta, 0) with beta ~ N(0, sigma^2);
//! * bimodal: s = max(sum(x) + beta, 0); if s > 30 the bid jumps to
//!   40 + alpha (alpha an independent draw with beta's distribution),
//!   otherwise b = s.
//!
//! Every random quantity comes from a substream keyed by (role, sample
//! index), so any sample can be regenerated independently and adding draws
//! to one role never shifts another.

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::rng::SplitMix64;

const ROLE_FEATURES: u64 = 1;
const ROLE_NOISE: u64 = 2;
const ROLE_SHIFT: u64 = 3;

fn sample_stream(seed: u64, role: u64, index: usize) -> SplitMix64 {
    SplitMix64::stream(seed, (role << 48) | index as u64)
}

/// Bid-generation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Linear,
    Bimodal,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Linear => "linear",
            Scenario::Bimodal => "bimodal",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scenario::Linear),
            "bimodal" => Ok(Scenario::Bimodal),
            other => Err(Error::param(
                "scenario",
                format!("expected `linear` or `bimodal`, got `{other}`"),
            )),
        }
    }
}

/// Parameters of one synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub n: usize,
    pub d: usize,
    pub noise_sigma: f64,
    pub scenario: Scenario,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, n: usize, noise_sigma: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        if !noise_sigma.is_finite() || noise_sigma < 0.0 {
            return Err(Error::param("noise_sigma", "must be finite and >= 0"));
        }
        Ok(Self {
            n,
            d: 10,
            noise_sigma,
            scenario,
            seed,
        })
    }

    pub fn with_dimension(mut self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("d", "must be >= 1"));
        }
        self.d = d;
        Ok(self)
    }
}

fn mixture_lognormal(rng: &mut SplitMix64) -> f64 {
    let mu = if rng.next_f64() < 0.5 { 0.0 } else { 1.0 };
    (mu + 0.5 * rng.next_gaussian()).exp()
}

/// n x d feature matrix; each coordinate is an independent mixture draw.
pub fn gen_features(config: &ScenarioConfig) -> Vec<Vec<f64>> {
    (0..config.n)
        .map(|i| {
            let mut rng = sample_stream(config.seed, ROLE_FEATURES, i);
            (0..config.d).map(|_| mixture_lognormal(&mut rng)).collect()
        })
        .collect()
}

fn noise(config: &ScenarioConfig, role: u64, index: usize) -> f64 {
    config.noise_sigma * sample_stream(config.seed, role, index).next_gaussian()
}

/// Linear-scenario bids for a feature matrix.
pub fn gen_linear_bids(features: &[Vec<f64>], config: &ScenarioConfig) -> Vec<f64> {
    features
        .iter()
        .enumerate()
        .map(|(i, x)| (x.iter().sum::<f64>() + noise(config, ROLE_NOISE, i)).max(0.0))
        .collect()
}

/// Bimodal-scenario bids: pass-through below the threshold, a jump to
/// 40 + alpha above it. Clamped at zero (unreachable for realistic sigma).
pub fn gen_bimodal_bids(features: &[Vec<f64>], config: &ScenarioConfig) -> Vec<f64> {
    features
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let s = (x.iter().sum::<f64>() + noise(config, ROLE_NOISE, i)).max(0.0);
            if s > 30.0 {
                (40.0 + noise(config, ROLE_SHIFT, i)).max(0.0)
            } else {
                s
            }
        })
        .collect()
}

/// Full dataset for the configured scenario.
pub fn generate(config: &ScenarioConfig) -> Result<Dataset> {
    let features = gen_features(config);
    let bids = match config.scenario {
        Scenario::Linear => gen_linear_bids(&features, config),
        Scenario::Bimodal => gen_bimodal_bids(&features, config),
    };
    Dataset::from_rows(features, bids)
}
