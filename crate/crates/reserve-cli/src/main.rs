//! `reserve` - reserve-price toolkit.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags or malformed
//! inputs), 1 on internal failures such as I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reserve_pricing::bounds;
use reserve_pricing::datagen::{self, Scenario, ScenarioConfig};
use reserve_pricing::harness::{run_experiment, write_report, DataSource, ExperimentConfig};
use reserve_pricing::io;
use reserve_pricing::model::{evaluate_reserve, PiecewiseReserve};
use reserve_pricing::pricing::{ric_h, QuantizationConfig};
use reserve_pricing::regression::{fit_linear_least_squares, Predictor};
use reserve_pricing::Error;

#[derive(Parser)]
#[command(
    name = "reserve",
    about = "Reserve pricing from bid predictions: generate data, fit rules, evaluate revenue, check bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV.
    Generate(GenerateArgs),
    /// Fit a linear predictor (and optionally a clustered reserve rule).
    Fit(FitArgs),
    /// Apply a serialized reserve rule to a CSV, one price per row.
    Price(PriceArgs),
    /// Report revenue and separation of a reserve rule on a CSV.
    Evaluate(EvaluateArgs),
    /// Run the replica experiment comparing pricing methods.
    Experiment(ExperimentArgs),
    /// Evaluate the variance/separation inequalities on a bid distribution.
    BoundsCheck(BoundsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Bid scenario: linear or bimodal.
    #[arg(long)]
    scenario: String,
    /// Number of samples.
    #[arg(long, default_value_t = 4000)]
    n: usize,
    /// Feature dimension.
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// Bid noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Training dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Where to write the serialized predictor.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,
    /// Also build a clustered reserve rule with this many cells.
    #[arg(long)]
    k: Option<usize>,
    /// Where to write the reserve rule (requires --k).
    #[arg(long)]
    reserve_out: Option<PathBuf>,
    /// Quantize predictions (1000 buckets over [0, 50]) before clustering.
    #[arg(long, default_value_t = false)]
    quantize: bool,
}

#[derive(Args)]
struct PriceArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    predictor: PathBuf,
    #[arg(long)]
    reserve: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    predictor: PathBuf,
    #[arg(long)]
    reserve: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Synthetic scenario (linear or bimodal); mutually exclusive with --data.
    #[arg(long, conflicts_with = "data")]
    scenario: Option<String>,
    /// Noise standard deviation for synthetic scenarios.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// CSV to re-split per replica instead of generating data.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Samples per train/holdout/test split.
    #[arg(long, default_value_t = 4000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated cluster counts to try.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24])]
    k_grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    replicas: usize,
    /// Quantize predictions before clustering (true/false).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    quantize: bool,
    /// Tidy per-replica CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// File with one bid per line.
    #[arg(long, conflicts_with = "equal_revenue")]
    bids: Option<PathBuf>,
    /// Closed-form equal-revenue truncation at this M > 1.
    #[arg(long)]
    equal_revenue: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Fit(args) => fit(args),
        Command::Price(args) => price(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Experiment(args) => experiment(args),
        Command::BoundsCheck(args) => bounds_check(args),
    }
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let scenario: Scenario = args.scenario.parse()?;
    let cfg = ScenarioConfig::new(scenario, args.n, args.sigma, args.seed)?
        .with_dimension(args.d)?;
    let ds = datagen::generate(&cfg)?;
    io::save_csv(&ds, &args.out)?;
    println!(
        "wrote {} samples (d={}) to {}",
        ds.len(),
        ds.dimension(),
        args.out.display()
    );
    Ok(())
}

fn fit(args: FitArgs) -> Result<(), Error> {
    let train = io::load_csv(&args.data)?;
    let predictor = fit_linear_least_squares(&train, args.ridge)?;
    io::write_text(&args.out, &predictor.to_text())?;
    let loss = reserve_pricing::squared_loss(&predictor, &train)?;
    println!(
        "fit linear predictor on {} samples: squared loss {}, rmse {}",
        train.len(),
        loss.squared_loss,
        loss.rmse
    );
    match (args.k, args.reserve_out) {
        (Some(k), Some(path)) => {
            let quant = args.quantize.then(QuantizationConfig::standard);
            let rule = ric_h(&train, &predictor, k, quant.as_ref())?;
            io::write_text(&path, &rule.to_text())?;
            println!(
                "wrote {}-cell reserve rule to {}",
                rule.num_cells(),
                path.display()
            );
        }
        (None, None) => {}
        _ => {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "--k and --reserve-out must be given together".into(),
            })
        }
    }
    Ok(())
}

fn load_rule(args_predictor: &PathBuf, args_reserve: &PathBuf) -> Result<(Predictor, PiecewiseReserve), Error> {
    let predictor = Predictor::from_text(&io::read_text(args_predictor)?)?;
    let reserve = PiecewiseReserve::from_text(&io::read_text(args_reserve)?)?;
    Ok((predictor, reserve))
}

fn price(args: PriceArgs) -> Result<(), Error> {
    let data = io::load_csv(&args.data)?;
    let (predictor, reserve) = load_rule(&args.predictor, &args.reserve)?;
    predictor.check_dimension(data.dimension())?;
    let mut out = String::from("reserve\n");
    for s in data.samples() {
        out.push_str(&format!("{}\n", reserve.price(predictor.predict(&s.features))));
    }
    match args.out {
        Some(path) => io::write_text(&path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let data = io::load_csv(&args.data)?;
    let (predictor, reserve) = load_rule(&args.predictor, &args.reserve)?;
    let rep = evaluate_reserve(&reserve, &predictor, &data)?;
    println!("samples {}", rep.count);
    println!("mean_bid {}", rep.mean_bid);
    println!("mean_revenue {}", rep.mean_revenue);
    println!("separation {}", rep.separation);
    println!("cell count mean_bid reserve mean_revenue std_bid");
    for (j, c) in rep.per_cell.iter().enumerate() {
        println!(
            "{} {} {} {} {} {}",
            j, c.count, c.mean_bid, c.reserve, c.mean_revenue, c.std_bid
        );
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), Error> {
    let source = match (&args.scenario, &args.data) {
        (Some(s), None) => DataSource::Scenario {
            scenario: s.parse()?,
            noise_sigma: args.sigma,
        },
        (None, Some(path)) => DataSource::Csv(path.clone()),
        _ => {
            return Err(Error::InvalidParameter {
                name: "scenario",
                reason: "exactly one of --scenario or --data is required".into(),
            })
        }
    };
    let cfg = ExperimentConfig {
        source,
        n_per_split: args.n,
        d: args.d,
        replicas: args.replicas,
        k_grid: args.k_grid,
        quantize: args.quantize,
        ridge: 1e-8,
        seed: args.seed,
    };
    let report = run_experiment(&cfg)?;
    print!("{}", report.render_summary());
    if let Some(path) = args.out {
        write_report(&report, &path)?;
        println!("wrote per-replica report to {}", path.display());
    }
    Ok(())
}

fn bounds_check(args: BoundsArgs) -> Result<(), Error> {
    let summary = match (args.bids, args.equal_revenue) {
        (Some(path), None) => bounds::summarize_empirical(&io::load_bids(path)?)?,
        (None, Some(m)) => bounds::equal_revenue_summary(m)?,
        _ => {
            return Err(Error::InvalidParameter {
                name: "bids",
                reason: "exactly one of --bids or --equal-revenue is required".into(),
            })
        }
    };
    println!(
        "summary B={} R={} S={} var={}",
        summary.mean_bid, summary.monopoly_revenue, summary.separation, summary.variance
    );
    for check in bounds::check_all(&summary)? {
        println!("{check}");
    }
    Ok(())
}
