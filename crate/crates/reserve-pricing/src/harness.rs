//! Experiment driver: data splits, k selection on a holdout set, baseline
//! comparison across replicas, and tidy CSV reports.
//!
//! Per replica: draw (or split) train/holdout/test data, fit the linear
//! predictor on train, pick k for the clustered rule and the offset for the
//! offset rule by holdout revenue, then score every method on test. The
//! monopoly baseline (single reserve, k = 1) anchors normalization.
//! Replicas run in parallel but are reduced in index order, so reports are
//! byte-identical across runs for the same configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::datagen::{self, Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::io;
use crate::model::{evaluate_reserve, Dataset, Sample};
use crate::pricing::{
    offset_candidates, offset_mean_revenue, ric_h, QuantizationConfig,
};
use crate::regression::fit_linear_least_squares;
use crate::rng::{mix, SplitMix64};

const STREAM_TRAIN: u64 = 0x11;
const STREAM_HOLDOUT: u64 = 0x22;
const STREAM_TEST: u64 = 0x33;
const STREAM_SHUFFLE: u64 = 0x44;

/// Where a replica's data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// Fresh synthetic draws per replica.
    Scenario { scenario: Scenario, noise_sigma: f64 },
    /// Re-splits of one CSV file, shuffled per replica.
    Csv(PathBuf),
}

/// Full experiment specification.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: DataSource,
    /// Samples per split (train, holdout and test each get this many).
    pub n_per_split: usize,
    /// Feature dimension for synthetic sources.
    pub d: usize,
    pub replicas: usize,
    pub k_grid: Vec<usize>,
    pub quantize: bool,
    pub ridge: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Desk-scale defaults: 4000 samples per split, 20 replicas,
    /// k in {2, 4, ..., 24}, quantization preset on.
    pub fn scenario(scenario: Scenario, noise_sigma: f64, seed: u64) -> Self {
        Self {
            source: DataSource::Scenario {
                scenario,
                noise_sigma,
            },
            n_per_split: 4000,
            d: 10,
            replicas: 20,
            k_grid: (1..=12).map(|i| 2 * i).collect(),
            quantize: true,
            ridge: 1e-8,
            seed,
        }
    }

    pub fn csv(path: PathBuf, seed: u64) -> Self {
        Self {
            source: DataSource::Csv(path),
            ..Self::scenario(Scenario::Linear, 0.0, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::param("replicas", "must be >= 1"));
        }
        if self.k_grid.is_empty() {
            return Err(Error::param("k_grid", "must be non-empty"));
        }
        if self.k_grid.contains(&0) {
            return Err(Error::param("k_grid", "entries must be >= 1"));
        }
        if self.n_per_split == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        Ok(())
    }
}

/// Test revenues of one replica, plus the holdout-chosen hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub chosen_k: usize,
    pub chosen_offset: f64,
    pub ric_h_revenue: f64,
    pub offset_revenue: f64,
    pub monopoly_revenue: f64,
}

/// Mean and population standard deviation across replicas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodAggregate {
    pub mean: f64,
    pub std_dev: f64,
}

fn aggregate(values: impl Iterator<Item = f64>) -> MethodAggregate {
    let vs: Vec<f64> = values.collect();
    let (mean, var) = crate::model::mean_and_variance(&vs);
    MethodAggregate {
        mean,
        std_dev: var.sqrt(),
    }
}

/// Per-replica outcomes plus per-method aggregates. Normalized revenues
/// divide by the monopoly baseline of the same replica; raw values are
/// always retained.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub replicas: Vec<ReplicaOutcome>,
    pub ric_h: MethodAggregate,
    pub offset: MethodAggregate,
    pub monopoly: MethodAggregate,
}

impl ExperimentReport {
    /// Tidy CSV: `replica,method,k,revenue_raw,revenue_normalized`, one row
    /// per replica and method. The offset method carries k = 0.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("replica,method,k,revenue_raw,revenue_normalized\n");
        for r in &self.replicas {
            let anchor = r.monopoly_revenue;
            let norm = |v: f64| if anchor > 0.0 { v / anchor } else { f64::NAN };
            out.push_str(&format!(
                "{},ric_h,{},{},{}\n",
                r.replica,
                r.chosen_k,
                r.ric_h_revenue,
                norm(r.ric_h_revenue)
            ));
            out.push_str(&format!(
                "{},offset,0,{},{}\n",
                r.replica,
                r.offset_revenue,
                norm(r.offset_revenue)
            ));
            out.push_str(&format!(
                "{},monopoly,1,{},{}\n",
                r.replica,
                r.monopoly_revenue,
                norm(r.monopoly_revenue)
            ));
        }
        out
    }

    /// Human-readable aggregate block.
    pub fn render_summary(&self) -> String {
        format!(
            "method,mean_revenue,std_dev\nric_h,{},{}\noffset,{},{}\nmonopoly,{},{}\n",
            self.ric_h.mean,
            self.ric_h.std_dev,
            self.offset.mean,
            self.offset.std_dev,
            self.monopoly.mean,
            self.monopoly.std_dev,
        )
    }
}

/// Write the tidy per-replica CSV to disk.
pub fn write_report(report: &ExperimentReport, path: impl AsRef<std::path::Path>) -> Result<()> {
    io::write_text(path, &report.render_csv())
}

/// Argmax of holdout revenue over the k grid; ties break to the smallest k.
pub fn select_k(holdout_revenues: &BTreeMap<usize, f64>) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (&k, &rev) in holdout_revenues {
        if best.is_none_or(|(_, brev)| rev > brev) {
            best = Some((k, rev));
        }
    }
    best.map(|(k, _)| k)
        .ok_or_else(|| Error::param("holdout_revenues", "must be non-empty"))
}

/// Run train/holdout/test for one replica with fixed datasets. Hyperparameters
/// (k and the offset) are chosen on the holdout set only; the test set enters
/// only the final scoring.
pub fn evaluate_replica(
    replica: usize,
    train: &Dataset,
    holdout: &Dataset,
    test: &Dataset,
    k_grid: &[usize],
    quant: Option<&QuantizationConfig>,
    ridge: f64,
) -> Result<ReplicaOutcome> {
    let predictor = fit_linear_least_squares(train, ridge)?;

    let mut holdout_revenues = BTreeMap::new();
    let mut rules = BTreeMap::new();
    for &k in k_grid {
        let rule = ric_h(train, &predictor, k, quant)?;
        let rep = evaluate_reserve(&rule, &predictor, holdout)?;
        holdout_revenues.insert(k, rep.mean_revenue);
        rules.insert(k, rule);
    }
    let chosen_k = select_k(&holdout_revenues)?;
    let ric_rule = &rules[&chosen_k];

    // Offset candidates come from the training gaps; selection is by
    // holdout revenue, ties to the smallest offset.
    let mut chosen_offset = 0.0;
    let mut best_rev = f64::NEG_INFINITY;
    for t in offset_candidates(train, &predictor)? {
        let rev = offset_mean_revenue(holdout, &predictor, t)?;
        if rev > best_rev {
            best_rev = rev;
            chosen_offset = t;
        }
    }

    let monopoly_rule = ric_h(train, &predictor, 1, quant)?;

    Ok(ReplicaOutcome {
        replica,
        chosen_k,
        chosen_offset,
        ric_h_revenue: evaluate_reserve(ric_rule, &predictor, test)?.mean_revenue,
        offset_revenue: offset_mean_revenue(test, &predictor, chosen_offset)?,
        monopoly_revenue: evaluate_reserve(&monopoly_rule, &predictor, test)?.mean_revenue,
    })
}

fn scenario_split(
    scenario: Scenario,
    noise_sigma: f64,
    cfg: &ExperimentConfig,
    replica_seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let gen = |stream: u64| -> Result<Dataset> {
        let sc = ScenarioConfig {
            n: cfg.n_per_split,
            d: cfg.d,
            noise_sigma,
            scenario,
            seed: mix(replica_seed, stream),
        };
        datagen::generate(&sc)
    };
    Ok((gen(STREAM_TRAIN)?, gen(STREAM_HOLDOUT)?, gen(STREAM_TEST)?))
}

fn csv_split(
    full: &Dataset,
    cfg: &ExperimentConfig,
    replica_seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let m = full.len();
    let per = cfg.n_per_split.min(m / 3);
    if per == 0 {
        return Err(Error::param(
            "data",
            format!("need at least 3 rows to split, got {m}"),
        ));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = SplitMix64::new(mix(replica_seed, STREAM_SHUFFLE));
    // Fisher-Yates on the index vector.
    for i in (1..m).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let take = |range: std::ops::Range<usize>| -> Result<Dataset> {
        Dataset::new(
            order[range]
                .iter()
                .map(|&i| full.samples()[i].clone())
                .collect::<Vec<Sample>>(),
        )
    };
    Ok((
        take(0..per)?,
        take(per..2 * per)?,
        take(2 * per..3 * per)?,
    ))
}

/// Run the full experiment: every replica, every method, aggregated.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let quant = cfg.quantize.then(QuantizationConfig::standard);
    let csv_data = match &cfg.source {
        DataSource::Csv(path) => Some(io::load_csv(path)?),
        DataSource::Scenario { .. } => None,
    };

    let replicas: Vec<ReplicaOutcome> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| -> Result<ReplicaOutcome> {
            let replica_seed = mix(cfg.seed, r as u64);
            let (train, holdout, test) = match &cfg.source {
                DataSource::Scenario {
                    scenario,
                    noise_sigma,
                } => scenario_split(*scenario, *noise_sigma, cfg, replica_seed)?,
                DataSource::Csv(_) => {
                    csv_split(csv_data.as_ref().unwrap(), cfg, replica_seed)?
                }
            };
            evaluate_replica(
                r,
                &train,
                &holdout,
                &test,
                &cfg.k_grid,
                quant.as_ref(),
                cfg.ridge,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        ric_h: aggregate(replicas.iter().map(|r| r.ric_h_revenue)),
        offset: aggregate(replicas.iter().map(|r| r.offset_revenue)),
        monopoly: aggregate(replicas.iter().map(|r| r.monopoly_revenue)),
        replicas,
    })
}
