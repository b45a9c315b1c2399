//! Cross-module invariants, mostly property-based.

use proptest::prelude::*;

use reserve_pricing::bounds;
use reserve_pricing::model::{empirical_stats, evaluate_reserve, revenue, Dataset};
use reserve_pricing::partition::{brute_force_partition, optimal_k_partition, SegmentCostTable};
use reserve_pricing::pricing::{
    empirical_optimal_reserve, offset_mean_revenue, offset_reserve_fit, ric_h,
    theoretical_offset,
};
use reserve_pricing::regression::{fit_linear_least_squares, squared_loss, Predictor};
use reserve_pricing::rng::SplitMix64;
use reserve_pricing::{PiecewiseReserve, Sample};

fn prediction_dataset(preds: &[f64], bids: &[f64]) -> Dataset {
    Dataset::from_rows(preds.iter().map(|p| vec![*p]).collect(), bids.to_vec()).unwrap()
}

fn bid_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 1..max_len)
}

proptest! {
    // Zero reserves sell every impression at price zero.
    #[test]
    fn zero_reserve_gives_zero_revenue(bids in bid_vec(50)) {
        let ds = prediction_dataset(&bids, &bids);
        let rep = evaluate_reserve(
            &PiecewiseReserve::constant(0.0),
            &Predictor::identity_1d(),
            &ds,
        ).unwrap();
        prop_assert_eq!(rep.mean_revenue, 0.0);
        prop_assert!((rep.separation - rep.mean_bid).abs() < 1e-15);
    }

    // Per-sample revenue never exceeds the bid, so mean revenue stays in
    // [0, mean bid] for any rule.
    #[test]
    fn revenue_bounded_by_mean_bid(
        bids in bid_vec(50),
        cuts in prop::collection::vec(0.0..1.0f64, 0..4),
        reserves in prop::collection::vec(0.0..2.0f64, 5),
    ) {
        let mut thresholds = cuts;
        thresholds.sort_unstable_by(f64::total_cmp);
        thresholds.dedup();
        let rule = PiecewiseReserve::new(
            thresholds.clone(),
            reserves[..thresholds.len() + 1].to_vec(),
            None,
        ).unwrap();
        let ds = prediction_dataset(&bids, &bids);
        let rep = evaluate_reserve(&rule, &Predictor::identity_1d(), &ds).unwrap();
        prop_assert!(rep.mean_revenue >= 0.0);
        prop_assert!(rep.mean_revenue <= rep.mean_bid + 1e-12);
        prop_assert!(rep.separation >= -1e-12);
        let cells: usize = rep.per_cell.iter().map(|c| c.count).sum();
        prop_assert_eq!(cells, bids.len());
    }

    // Scaling bids, predictions, thresholds and reserves by a power of two
    // scales the report exactly.
    #[test]
    fn scale_equivariance_exact_for_pow2(
        bids in bid_vec(40),
        shift in 0usize..5,
    ) {
        let c = [0.25f64, 0.5, 2.0, 4.0, 8.0][shift];
        let rule = PiecewiseReserve::new(vec![0.5], vec![0.25, 0.75], None).unwrap();
        let scaled_rule = PiecewiseReserve::new(
            vec![0.5 * c],
            vec![0.25 * c, 0.75 * c],
            None,
        ).unwrap();
        let ds = prediction_dataset(&bids, &bids);
        let scaled: Vec<f64> = bids.iter().map(|b| b * c).collect();
        let ds_scaled = prediction_dataset(&scaled, &scaled);
        let p = Predictor::identity_1d();
        let a = evaluate_reserve(&rule, &p, &ds).unwrap();
        let b = evaluate_reserve(&scaled_rule, &p, &ds_scaled).unwrap();
        prop_assert_eq!(a.mean_bid * c, b.mean_bid);
        prop_assert_eq!(a.mean_revenue * c, b.mean_revenue);
        prop_assert_eq!(a.separation * c, b.separation);
    }

    // The fitted linear model is a stationary point: nudging any weight by
    // 1e-3 cannot lower the (ridge) objective.
    #[test]
    fn least_squares_perturbation_never_improves(
        xs in prop::collection::vec((0.0..4.0f64, 0.0..4.0f64), 6..30),
        noise_seed in 0u64..1000,
        use_ridge in any::<bool>(),
    ) {
        let ridge = if use_ridge { 0.1 } else { 0.0 };
        let mut rng = SplitMix64::new(noise_seed);
        let samples: Vec<Sample> = xs
            .iter()
            .map(|(a, b)| Sample::new(
                vec![*a, *b],
                (a + 2.0 * b + 0.3 * rng.next_gaussian()).max(0.0),
            ))
            .collect();
        let ds = Dataset::new(samples).unwrap();
        let fit = fit_linear_least_squares(&ds, ridge);
        prop_assume!(fit.is_ok());
        let (w, w0) = match fit.unwrap() {
            Predictor::Linear { weights, intercept } => (weights, intercept),
            _ => unreachable!(),
        };
        let objective = |w: &[f64], w0: f64| -> f64 {
            ds.samples()
                .iter()
                .map(|s| {
                    let e = w[0] * s.features[0] + w[1] * s.features[1] + w0 - s.bid;
                    e * e
                })
                .sum::<f64>()
                + ridge * (w[0] * w[0] + w[1] * w[1])
        };
        let base = objective(&w, w0);
        for i in 0..3 {
            for delta in [-1e-3, 1e-3] {
                let mut wp = w.clone();
                let mut w0p = w0;
                if i < 2 { wp[i] += delta } else { w0p += delta }
                prop_assert!(objective(&wp, w0p) >= base - 1e-9 * base.abs().max(1.0));
            }
        }
    }

    // Duplicating every sample leaves the least-squares solution unchanged.
    #[test]
    fn fit_invariant_under_duplication(
        xs in prop::collection::vec((0.0..4.0f64, 0.0..2.0f64), 4..20),
    ) {
        let samples: Vec<Sample> = xs
            .iter()
            .map(|(x, b)| Sample::new(vec![*x], *b))
            .collect();
        let doubled: Vec<Sample> = samples
            .iter()
            .flat_map(|s| [s.clone(), s.clone()])
            .collect();
        let a = fit_linear_least_squares(&Dataset::new(samples).unwrap(), 0.0);
        prop_assume!(a.is_ok());
        let b = fit_linear_least_squares(&Dataset::new(doubled).unwrap(), 0.0).unwrap();
        let (wa, ia) = match a.unwrap() {
            Predictor::Linear { weights, intercept } => (weights, intercept),
            _ => unreachable!(),
        };
        let (wb, ib) = match b {
            Predictor::Linear { weights, intercept } => (weights, intercept),
            _ => unreachable!(),
        };
        let scale = wa[0].abs().max(ia.abs()).max(1.0);
        prop_assert!((wa[0] - wb[0]).abs() <= 1e-8 * scale, "{} vs {}", wa[0], wb[0]);
        prop_assert!((ia - ib).abs() <= 1e-8 * scale, "{ia} vs {ib}");
    }

    // DP equals the exhaustive oracle, including on inputs with ties.
    #[test]
    fn dp_matches_oracle(
        mut values in prop::collection::vec(0.0..1.0f64, 1..12),
        k in 1usize..5,
        quantize_to_ties in any::<bool>(),
    ) {
        if quantize_to_ties {
            for v in values.iter_mut() {
                *v = (*v * 4.0).round() / 4.0;
            }
        }
        values.sort_unstable_by(f64::total_cmp);
        let dp = optimal_k_partition(&values, k).unwrap();
        let bf = brute_force_partition(&values, k).unwrap();
        prop_assert!(
            (dp.objective - bf.objective).abs() <= 1e-12 * bf.objective.max(1.0),
            "dp {} oracle {}", dp.objective, bf.objective
        );
    }

    // More segments never cost more.
    #[test]
    fn objective_monotone_in_k(mut values in prop::collection::vec(0.0..1.0f64, 1..40)) {
        values.sort_unstable_by(f64::total_cmp);
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let obj = optimal_k_partition(&values, k).unwrap().objective;
            prop_assert!(obj <= prev + 1e-12);
            prev = obj;
        }
    }

    // Translation leaves the objective unchanged; positive scaling scales it.
    #[test]
    fn objective_translation_and_scale(
        mut values in prop::collection::vec(0.0..1.0f64, 2..30),
        k in 1usize..4,
        offset in -100.0..100.0f64,
    ) {
        values.sort_unstable_by(f64::total_cmp);
        let base = optimal_k_partition(&values, k).unwrap().objective;

        let shifted: Vec<f64> = values.iter().map(|v| v + offset).collect();
        let shifted_obj = optimal_k_partition(&shifted, k).unwrap().objective;
        prop_assert!(
            (base - shifted_obj).abs() <= 1e-6 * base.max(1.0),
            "base {base} shifted {shifted_obj}"
        );

        let scaled: Vec<f64> = values.iter().map(|v| v * 4.0).collect();
        let scaled_obj = optimal_k_partition(&scaled, k).unwrap().objective;
        prop_assert!(
            (4.0 * base - scaled_obj).abs() <= 1e-9 * scaled_obj.max(1.0),
            "base {base} scaled {scaled_obj}"
        );
    }

    // Extremes: one segment costs sqrt(2) n sigma, n segments cost zero.
    #[test]
    fn objective_extremes(mut values in prop::collection::vec(0.0..1.0f64, 1..25)) {
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len();
        let whole = optimal_k_partition(&values, 1).unwrap().objective;
        let (_, var) = {
            let mean = values.iter().sum::<f64>() / n as f64;
            (mean, values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64)
        };
        let expect = std::f64::consts::SQRT_2 * n as f64 * var.sqrt();
        prop_assert!((whole - expect).abs() <= 1e-9 * expect.max(1.0));
        prop_assert_eq!(optimal_k_partition(&values, n).unwrap().objective, 0.0);
    }

    // The candidate-set reserve search beats any price on a dense grid.
    #[test]
    fn reserve_beats_grid_sweep(bids in bid_vec(50)) {
        let (price, rev) = empirical_optimal_reserve(&bids).unwrap();
        prop_assert!(bids.contains(&price));
        let m = bids.len() as f64;
        let max_bid = bids.iter().cloned().fold(0.0, f64::max);
        let step = 1e-4 * max_bid.max(1e-12);
        for i in 0..=10_000u32 {
            let p = i as f64 * step;
            let grid_rev = bids.iter().map(|b| revenue(p, *b)).sum::<f64>() / m;
            prop_assert!(rev >= grid_rev - 1e-12, "price {p} beats candidate search");
        }
    }

    // Doubling k with nested cuts (every coarse cell split in two, reserves
    // re-optimized per refined cell) never loses training revenue.
    #[test]
    fn nested_refinement_never_loses_training_revenue(
        pairs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 4..40),
        k in 1usize..5,
    ) {
        let preds: Vec<f64> = pairs.iter().map(|(p, _)| *p).collect();
        let bids: Vec<f64> = pairs.iter().map(|(_, b)| *b).collect();
        let ds = prediction_dataset(&preds, &bids);
        let p = Predictor::identity_1d();
        let coarse = ric_h(&ds, &p, k, None).unwrap();
        let coarse_rev = evaluate_reserve(&coarse, &p, &ds).unwrap().mean_revenue;

        // Force nested cuts: keep every coarse threshold and bisect each
        // cell at the median of the predictions it holds.
        let mut thresholds = coarse.thresholds().to_vec();
        let mut cell_preds: Vec<Vec<f64>> = vec![Vec::new(); coarse.num_cells()];
        for pred in &preds {
            cell_preds[coarse.cell_index(*pred)].push(*pred);
        }
        for cp in &mut cell_preds {
            cp.sort_unstable_by(f64::total_cmp);
            if cp.len() >= 2 {
                let lo = cp[cp.len() / 2 - 1];
                let hi = cp[cp.len() / 2];
                if lo < hi {
                    thresholds.push(0.5 * (lo + hi));
                }
            }
        }
        thresholds.sort_unstable_by(f64::total_cmp);
        thresholds.dedup();

        // Re-pick optimal reserves per refined cell.
        let probe = PiecewiseReserve::new(
            thresholds.clone(),
            vec![0.0; thresholds.len() + 1],
            None,
        ).unwrap();
        let mut cell_bids: Vec<Vec<f64>> = vec![Vec::new(); probe.num_cells()];
        for (pred, bid) in preds.iter().zip(&bids) {
            cell_bids[probe.cell_index(*pred)].push(*bid);
        }
        let reserves: Vec<f64> = cell_bids
            .iter()
            .map(|cb| {
                if cb.is_empty() {
                    0.0
                } else {
                    empirical_optimal_reserve(cb).unwrap().0
                }
            })
            .collect();
        let refined = PiecewiseReserve::new(thresholds, reserves, None).unwrap();
        let refined_rev = evaluate_reserve(&refined, &p, &ds).unwrap().mean_revenue;
        prop_assert!(refined_rev >= coarse_rev - 1e-12);
    }

    // Clustered-rule training separation obeys the weighted-std limit.
    #[test]
    fn cluster_bound_holds_on_training_data(
        pairs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..60),
        k in 1usize..8,
    ) {
        let preds: Vec<f64> = pairs.iter().map(|(p, _)| *p).collect();
        let bids: Vec<f64> = pairs.iter().map(|(_, b)| (*b).max(1e-6)).collect();
        let ds = prediction_dataset(&preds, &bids);
        let p = Predictor::identity_1d();
        let rule = ric_h(&ds, &p, k, None).unwrap();
        let rep = evaluate_reserve(&rule, &p, &ds).unwrap();
        let limit = bounds::cluster_separation_limit(rep.mean_bid, rep.weighted_cell_std());
        prop_assert!(
            rep.separation <= limit + 1e-9 * limit.max(1.0),
            "separation {} limit {}", rep.separation, limit
        );
    }

    // The fitted offset earns at least what the loss-derived offset earns
    // on the training set.
    #[test]
    fn fitted_offset_beats_theoretical_on_train(
        pairs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..50),
    ) {
        let preds: Vec<f64> = pairs.iter().map(|(p, _)| *p).collect();
        let bids: Vec<f64> = pairs.iter().map(|(_, b)| *b).collect();
        let ds = prediction_dataset(&preds, &bids);
        let p = Predictor::identity_1d();
        let fitted = offset_reserve_fit(&ds, &p).unwrap();
        let eta_sq = squared_loss(&p, &ds).unwrap().squared_loss;
        let theory = theoretical_offset(eta_sq).unwrap();
        let fitted_rev = offset_mean_revenue(&ds, &p, fitted.offset).unwrap();
        let theory_rev = offset_mean_revenue(&ds, &p, theory).unwrap();
        prop_assert!(fitted_rev >= theory_rev - 1e-12);
    }

    // Theorem checks on random small empirical distributions.
    #[test]
    fn theorem_checks_hold_on_random_bids(
        bids in prop::collection::vec(1e-3..1.0f64, 2..80),
    ) {
        let d = bounds::summarize_empirical(&bids).unwrap();
        for check in bounds::check_all(&d).unwrap() {
            prop_assert!(check.satisfied, "{check}");
        }
    }
}

// ric_h with k = 1 is exactly the monopoly reserve of all bids.
#[test]
fn ric_h_k1_equals_monopoly() {
    let mut rng = SplitMix64::new(2024);
    for _ in 0..50 {
        let n = 2 + (rng.next_u64() % 40) as usize;
        let bids: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let preds: Vec<f64> = (0..n).map(|_| rng.next_f64() * 3.0).collect();
        let ds = prediction_dataset(&preds, &bids);
        let rule = ric_h(&ds, &Predictor::identity_1d(), 1, None).unwrap();
        let (price, _) = empirical_optimal_reserve(&bids).unwrap();
        assert_eq!(rule.reserves(), &[price]);
        assert!(rule.thresholds().is_empty());
    }
}

// Constant-predictor loss equals the bid variance (variance decomposition).
#[test]
fn constant_predictor_loss_matches_variance() {
    let mut rng = SplitMix64::new(77);
    let bids: Vec<f64> = (0..200).map(|_| rng.next_f64() * 5.0).collect();
    let ds = prediction_dataset(&bids, &bids);
    let stats = empirical_stats(&ds);
    let rep = squared_loss(&Predictor::constant(stats.mean_bid), &ds).unwrap();
    assert!((rep.squared_loss - stats.variance).abs() < 1e-12);
}

// Byte-identical synthetic CSV for identical configs.
#[test]
fn datagen_csv_is_byte_identical() {
    use reserve_pricing::datagen::{generate, Scenario, ScenarioConfig};
    let cfg = ScenarioConfig::new(Scenario::Bimodal, 500, 1.0, 99).unwrap();
    let a = reserve_pricing::io::render_csv(&generate(&cfg).unwrap());
    let b = reserve_pricing::io::render_csv(&generate(&cfg).unwrap());
    assert_eq!(a, b);
}

// Segment cost table rejects reversed bounds but allows empty segments.
#[test]
fn segment_cost_bounds() {
    let t = SegmentCostTable::new(&[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(t.segment_cost(1, 1).unwrap(), 0.0);
    assert!(t.segment_cost(2, 1).is_err());
}
