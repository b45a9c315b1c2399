//! Reserve-price optimization reduced to squared-loss prediction.
//!
//! Given a bid predictor h, the clustered rule partitions the prediction
//! axis into k minimum-variance cells (exact 1-d dynamic program) and prices
//! each cell at its empirical optimal reserve; the offset rule posts
//! max(h(x) - t, 0) with a fitted or loss-derived t. The [`bounds`] module
//! evaluates the variance and separation inequalities governing how much
//! revenue any reserve can recover, and [`harness`] reproduces the
//! synthetic-scenario comparisons end to end.

pub mod bounds;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod io;
pub mod model;
pub mod partition;
pub mod pricing;
pub mod regression;
pub mod rng;

pub use error::{Error, Result};
pub use model::{
    empirical_stats, evaluate_reserve, Dataset, EmpiricalStats, PiecewiseReserve, RevenueReport,
    Sample,
};
pub use partition::{brute_force_partition, optimal_k_partition, PartitionResult};
pub use pricing::{
    empirical_optimal_reserve, offset_reserve_fit, quantize, ric_h, theoretical_offset,
    OffsetReserve, QuantizationConfig,
};
pub use regression::{fit_linear_least_squares, squared_loss, LossReport, Predictor};
