//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use lagnet::arima::{fit_css, forecast_arima, nelder_mead, ArimaSpec};
use lagnet::ffnet::{
    backprop_gradient, count_parameters, forward, init_weights, prepare_scaled, train,
    Activation, ForecastMode, NetConfig, Observation, StopMonitor, TrainConfig, Weights,
};
use lagnet::select::{
    hidden_sizes, multi_restart_fit, run_search, Criterion, HiddenRule, OrderNotation,
    SearchSpec,
};
use lagnet::timeseries::{simulate, DesignMatrix, LagSpec, SimSpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(line: &str) {
    println!("{line}: PASS");
}

/// Threshold-AR generator shared by the comparative experiments: two regimes
/// switched at zero, moderate noise, one Poisson-count exogenous channel.
fn tar_spec() -> SimSpec {
    SimSpec::tar((2.0, 0.9), (-1.0, 0.3), 0.0, 0.5).with_exog(0.5, 3.0)
}

/// Experiment template: full epoch budget, best-epoch weights kept.
fn experiment_train_config() -> TrainConfig {
    TrainConfig {
        patience: 0,
        ..TrainConfig::default()
    }
}

#[test]
fn ac01_parameter_count_golden() {
    // All 17 reference orders with the preset hidden-size map and one
    // exogenous input. Expected counts must match exactly.
    let rows: [(&str, usize); 17] = [
        ("NN(1,1+2)", 11),
        ("NN(1,1-3)", 19),
        ("NN(1,1-4)", 22),
        ("NN(1,1-5)", 33),
        ("NN(1,1-6)", 37),
        ("NN(1,1-7)", 71),
        ("NN(1,1-8)", 78),
        ("NN(1,1+2+5)", 19),
        ("NN(1,1+5)", 11),
        ("NN(1,1+3)", 11),
        ("NN(1,2+3)", 11),
        ("NN(1,3+4)", 11),
        ("NN(1,4+5)", 11),
        ("NN(1,1+2)", 11),
        ("NN(2,1-3)", 26),
        ("NN(2,1-3)", 26),
        ("NN(1,1-3)", 19),
    ];
    for (text, expected) in rows {
        let order = OrderNotation::parse(text).unwrap();
        let k = order.lags.len() + 1;
        let hidden = hidden_sizes(k, &HiddenRule::Preset, order.layers);
        let config = NetConfig::new(
            order.lags.clone(),
            1,
            hidden,
            Activation::Sigmoid,
            Activation::Identity,
        )
        .unwrap();
        assert_eq!(
            count_parameters(&config),
            expected,
            "{text} must have {expected} parameters"
        );
    }

    // The same counts must surface through a full search leaderboard. The 17
    // rows are the union of a sigmoid/identity grid and a sigmoid/sigmoid
    // grid; training quality is irrelevant here, so one epoch suffices.
    let series = simulate(&tar_spec(), 40, 1).unwrap();
    let split = series.split_train_test(30).unwrap();
    let quick = TrainConfig {
        max_epochs: 1,
        patience: 0,
        ..TrainConfig::default()
    };
    let search_orders = |texts: &[&str], pair: (Activation, Activation)| {
        let mut spec = SearchSpec::new(
            texts.iter().map(|o| OrderNotation::parse(o).unwrap()).collect(),
        );
        spec.activations = vec![pair];
        spec.train = quick.clone();
        run_search(&spec, &split.train, &split.test).unwrap()
    };
    let identity_board = search_orders(
        &[
            "NN(1,1+2)", "NN(1,1-3)", "NN(1,1-4)", "NN(1,1-5)", "NN(1,1-6)", "NN(1,1-7)",
            "NN(1,1-8)", "NN(1,1+2+5)", "NN(1,1+5)", "NN(1,1+3)", "NN(1,2+3)", "NN(1,3+4)",
            "NN(1,4+5)", "NN(2,1-3)",
        ],
        (Activation::Sigmoid, Activation::Identity),
    );
    let sigmoid_board = search_orders(
        &["NN(1,1+2)", "NN(2,1-3)", "NN(1,1-3)"],
        (Activation::Sigmoid, Activation::Sigmoid),
    );
    let mut reports: Vec<_> = identity_board
        .reports
        .iter()
        .chain(sigmoid_board.reports.iter())
        .collect();
    assert_eq!(reports.len(), 17, "leaderboards cover all 17 reference rows");
    reports.sort_by(|a, b| (&a.order, &a.activations).cmp(&(&b.order, &b.activations)));
    for report in reports {
        let (_, expected) = rows
            .iter()
            .find(|(text, _)| *text == report.order)
            .expect("known order");
        assert_eq!(report.n_params, *expected, "{}", report.order);
    }
    pass("AC-1 parameter-count golden (17 orders, exact, incl. leaderboard column)");
}

#[test]
fn ac02_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let activations = [Activation::Sigmoid, Activation::Tanh, Activation::Identity];
    let mut max_rel = 0.0f64;
    for case in 0..200 {
        let n_lags = rng.gen_range(1..=6);
        let exog = rng.gen_range(0..=3usize.min(9 - n_lags));
        let k = n_lags + exog;
        assert!(k <= 9);
        let hidden: Vec<usize> = if case % 2 == 0 {
            vec![rng.gen_range(1..=4)]
        } else {
            vec![rng.gen_range(1..=4), rng.gen_range(1..=3)]
        };
        let config = NetConfig::new(
            LagSpec::new((1..=n_lags).collect()).unwrap(),
            exog,
            hidden,
            activations[case % 3],
            activations[(case / 3) % 3],
        )
        .unwrap();
        let weights = init_weights(&config, rng.gen(), 1.0);
        let rows = rng.gen_range(1..=8);
        let inputs: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = DesignMatrix::from_parts(inputs, targets).unwrap();
        let row_ids: Vec<usize> = (0..rows).collect();

        let grad = backprop_gradient(&config, &weights, &data, &row_ids).unwrap();
        let loss = |w: &Weights| -> f64 {
            row_ids
                .iter()
                .map(|&r| {
                    let err = forward(&config, w, data.input_row(r)).unwrap()
                        - data.targets()[r];
                    0.5 * err * err
                })
                .sum()
        };
        let h = 1e-5;
        for i in 0..weights.len() {
            let mut up = weights.clone();
            let mut dn = weights.clone();
            up.0[i] += h;
            dn.0[i] -= h;
            let fd = (loss(&up) - loss(&dn)) / (2.0 * h);
            let rel = (grad.values[i] - fd).abs() / grad.values[i].abs().max(1.0);
            max_rel = max_rel.max(rel);
        }
    }
    assert!(max_rel < 1e-6, "max relative error {max_rel}");
    pass(&format!(
        "AC-2 gradient vs central differences over 200 cases (max rel {max_rel:.2e} < 1e-6)"
    ));
}

#[test]
fn ac03_linear_subsumption() {
    // Identity/identity net, hidden size 1, on y = 2x + 3 with n = 200, at
    // the default learning rate and momentum, full epoch budget.
    let xs: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
    let inputs: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let targets: Vec<f64> = xs.iter().map(|&x| 2.0 * x + 3.0).collect();
    let data = DesignMatrix::from_parts(inputs, targets).unwrap();
    let config = NetConfig::new(
        LagSpec::new(vec![1]).unwrap(),
        0,
        vec![1],
        Activation::Identity,
        Activation::Identity,
    )
    .unwrap();
    let tc = experiment_train_config();
    assert_eq!(tc.learning_rate, 0.4);
    assert_eq!(tc.momentum, 0.9);
    assert_eq!(tc.max_epochs, 2000);
    let net = train(&config, &data, &tc).unwrap();
    assert!(
        net.train_sse < 1e-6,
        "train SSE {} after {} epochs",
        net.train_sse,
        net.epochs
    );
    pass(&format!(
        "AC-3 linear subsumption (SSE {:.2e} < 1e-6 within 2000 epochs)",
        net.train_sse
    ));
}

fn nn_vs_arimax_one_seed(seed: u64) -> (f64, f64) {
    let series = simulate(&tar_spec(), 687, seed).unwrap();
    let split = series.split_train_test(470).unwrap();
    assert_eq!(split.train.len(), 470);
    assert_eq!(split.test.len(), 217);

    let mut spec = SearchSpec::new(
        ["NN(1,1+2)", "NN(1,1-3)", "NN(1,1+3)"]
            .iter()
            .map(|o| OrderNotation::parse(o).unwrap())
            .collect(),
    );
    spec.restarts = 5;
    spec.base_seed = seed * 100;
    spec.train = experiment_train_config();
    let board = run_search(&spec, &split.train, &split.test).unwrap();
    let nn_sse = board.winner().sse_test_onestep.unwrap();

    let fit = fit_css(&ArimaSpec::new(2, 1, 1).with_exog(1), &split.train).unwrap();
    let exog_future = vec![split.test.exog_values(0).to_vec()];
    let preds = forecast_arima(
        &fit,
        &split.train,
        split.test.len(),
        ForecastMode::OneStep,
        Some(split.test.values()),
        Some(&exog_future),
    )
    .unwrap();
    let arimax_sse: f64 = preds
        .iter()
        .zip(split.test.values())
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    (nn_sse, arimax_sse)
}

#[test]
fn ac04_low_order_nn_beats_arimax() {
    let mut wins = 0;
    for seed in 0..10u64 {
        let (nn, arimax) = nn_vs_arimax_one_seed(seed);
        if nn < arimax {
            wins += 1;
        }
    }
    assert!(wins >= 8, "NN won only {wins}/10 seeds");
    pass(&format!(
        "AC-4 best low-order NN beats ARIMAX(2,1,1) on one-step test SSE ({wins}/10 seeds >= 8)"
    ));
}

#[test]
fn ac05_identity_output_beats_sigmoid_output() {
    let mut identity_sses = Vec::new();
    let mut sigmoid_sses = Vec::new();
    for seed in 0..10u64 {
        let series = simulate(&tar_spec(), 687, seed).unwrap();
        let split = series.split_train_test(470).unwrap();
        let mut spec = SearchSpec::new(vec![OrderNotation::parse("NN(1,1+2)").unwrap()]);
        spec.activations = vec![
            (Activation::Sigmoid, Activation::Identity),
            (Activation::Sigmoid, Activation::Sigmoid),
        ];
        spec.restarts = 5;
        spec.base_seed = seed * 100;
        spec.train = experiment_train_config();
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        for report in &board.reports {
            let sse = report.sse_test_onestep.unwrap();
            if report.activations.ends_with("identity") {
                identity_sses.push(sse);
            } else {
                sigmoid_sses.push(sse);
            }
        }
    }
    let median = |values: &mut Vec<f64>| -> f64 {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values[values.len() / 2]
    };
    let identity_median = median(&mut identity_sses);
    let sigmoid_median = median(&mut sigmoid_sses);
    assert!(
        identity_median < sigmoid_median,
        "identity median {identity_median} vs sigmoid median {sigmoid_median}"
    );
    pass(&format!(
        "AC-5 identity output beats sigmoid output (median one-step test SSE {identity_median:.2} < {sigmoid_median:.2})"
    ));
}

#[test]
fn ac06_arima_coefficient_recovery() {
    for seed in 42..52u64 {
        let ar = simulate(&SimSpec::ar(0.0, vec![0.5], 1.0), 500, seed).unwrap();
        let ar_fit = fit_css(&ArimaSpec::new(1, 0, 0), &ar).unwrap();
        assert!(
            (ar_fit.params.ar[0] - 0.5).abs() < 0.1,
            "seed {seed}: AR(1) phi {} outside 0.5 +/- 0.1",
            ar_fit.params.ar[0]
        );

        let arma = simulate(&SimSpec::arma(0.0, vec![0.5], vec![0.3], 1.0), 2000, seed).unwrap();
        let arma_fit = fit_css(&ArimaSpec::new(1, 0, 1), &arma).unwrap();
        assert!(
            (arma_fit.params.ar[0] - 0.5).abs() < 0.1,
            "seed {seed}: ARMA phi {}",
            arma_fit.params.ar[0]
        );
        assert!(
            (arma_fit.params.ma[0] - 0.3).abs() < 0.1,
            "seed {seed}: ARMA theta {}",
            arma_fit.params.ma[0]
        );
    }
    pass("AC-6 CSS recovers AR(1) and ARMA(1,1) coefficients within +/-0.1 (10/10 seeds)");
}

#[test]
fn ac07_multi_restart_monotone_and_distinct_minima() {
    let series = simulate(&tar_spec(), 687, 0).unwrap();
    let split = series.split_train_test(470).unwrap();
    let order = OrderNotation::parse("NN(1,1+2)").unwrap();
    let config = NetConfig::new(
        order.lags.clone(),
        1,
        hidden_sizes(order.lags.len() + 1, &HiddenRule::Preset, 1),
        Activation::Sigmoid,
        Activation::Identity,
    )
    .unwrap();
    let data = prepare_scaled(&config, &split.train).unwrap();
    let tc = TrainConfig {
        max_epochs: 400,
        ..experiment_train_config()
    };

    // Best-of-R train SSE is non-increasing for nested seed sets R = 1..8.
    let mut previous = f64::INFINITY;
    for restarts in 1..=8 {
        let (net, _) = multi_restart_fit(&config, &data.scaled, &tc, restarts, 500).unwrap();
        assert!(
            net.train_sse <= previous,
            "best-of-{restarts} regressed: {} > {previous}",
            net.train_sse
        );
        previous = net.train_sse;
    }

    // Ten restarts land in at least two distinct local minima.
    let (_, sses) = multi_restart_fit(&config, &data.scaled, &tc, 10, 500).unwrap();
    let finals: Vec<f64> = sses.into_iter().flatten().collect();
    let mut distinct: Vec<f64> = Vec::new();
    for sse in finals {
        if !distinct
            .iter()
            .any(|d| (d - sse).abs() <= 1e-9 * d.abs().max(1.0))
        {
            distinct.push(sse);
        }
    }
    assert!(
        distinct.len() >= 2,
        "only {} distinct final SSE values among 10 restarts",
        distinct.len()
    );
    pass(&format!(
        "AC-7 best-of-R monotone (R=1..8) and {} distinct minima among 10 restarts (>= 2)",
        distinct.len()
    ));
}

#[test]
fn ac08_bic_selects_lag_two() {
    let mut ok = 0;
    for seed in 0..10u64 {
        let series = simulate(&SimSpec::ar(1.0, vec![0.5, -0.6], 1.0), 470, seed).unwrap();
        let split = series.split_train_test(470).unwrap();
        assert!(split.empty_test_warning);
        let orders: Vec<OrderNotation> = [
            vec![1usize],
            vec![1, 2],
            vec![1, 2, 3],
            vec![1, 2, 3, 4],
        ]
        .into_iter()
        .map(|lags| OrderNotation::from_lags(1, LagSpec::new(lags).unwrap()))
        .collect();
        let mut spec = SearchSpec::new(orders);
        spec.restarts = 3;
        spec.base_seed = seed * 100;
        spec.train = experiment_train_config();
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        assert_eq!(board.criterion, Criterion::Bic);
        let winner = &board.winner().order;
        let winner_has_lag_two = winner != "NN(1,1)";
        let full_set_not_winner = winner != "NN(1,1-4)";
        if winner_has_lag_two && full_set_not_winner {
            ok += 1;
        }
    }
    assert!(ok >= 7, "BIC selection criterion held on only {ok}/10 seeds");
    pass(&format!(
        "AC-8 BIC selects a lag set containing lag 2 and demotes {{1,2,3,4}} ({ok}/10 seeds >= 7)"
    ));
}

#[test]
fn ac09_stopping_rule_exact() {
    // Scripted loss sequence: strictly improving until the first plateau.
    let script = [10.0, 8.0, 6.5, 6.5, 5.0];
    let mut monitor = StopMonitor::new(1);
    let mut stopped_at = None;
    for (epoch, &sse) in script.iter().enumerate() {
        match monitor.observe(sse) {
            Observation::Stop => {
                stopped_at = Some(epoch + 1);
                break;
            }
            _ => continue,
        }
    }
    // Epoch 4 is the first whose SSE fails to improve; the trace ends there.
    assert_eq!(stopped_at, Some(4));

    // Patience 2 tolerates exactly one bad epoch.
    let script2 = [10.0, 9.0, 9.5, 8.0, 8.5, 8.4];
    let mut monitor2 = StopMonitor::new(2);
    let mut stopped2 = None;
    for (epoch, &sse) in script2.iter().enumerate() {
        if monitor2.observe(sse) == Observation::Stop {
            stopped2 = Some(epoch + 1);
            break;
        }
    }
    assert_eq!(stopped2, Some(6));

    // The same rule drives train(): a patience-1 run that stops early has a
    // strictly-improving trace except for its final entry.
    let xs: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
    let inputs: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let targets: Vec<f64> = xs.iter().map(|&x| 0.8 * x - 0.2).collect();
    let data = DesignMatrix::from_parts(inputs, targets).unwrap();
    let config = NetConfig::new(
        LagSpec::new(vec![1]).unwrap(),
        0,
        vec![2],
        Activation::Sigmoid,
        Activation::Identity,
    )
    .unwrap();
    let tc = TrainConfig {
        patience: 1,
        ..TrainConfig::default()
    };
    let net = train(&config, &data, &tc).unwrap();
    if net.stop_reason == lagnet::ffnet::StopReason::Patience {
        let trace = &net.trace;
        let mut best = f64::INFINITY;
        for &sse in &trace[..trace.len() - 1] {
            assert!(sse < best, "non-final epochs must improve strictly");
            best = sse;
        }
        assert!(trace[trace.len() - 1] >= best, "final epoch failed to improve");
    }
    pass("AC-9 patience-1 trace ends exactly at the first non-improving epoch (scripted, exact)");
}

#[test]
fn ac10_cli_outputs_are_byte_deterministic() {
    let bin = env!("CARGO_BIN_EXE_lagnet");
    let dir = std::env::temp_dir().join("lagnet_ac10");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let data_csv = dir.join("data.csv");

    let run = |args: &[&str], threads: &str| {
        let output = std::process::Command::new(bin)
            .args(args)
            .env("LAGNET_THREADS", threads)
            .current_dir(&dir)
            .output()
            .expect("spawn lagnet");
        assert!(
            output.status.success(),
            "command {:?} failed: {}",
            args,
            String::from_utf8_lossy(&output.stderr)
        );
    };

    run(
        &[
            "simulate", "--kind", "tar", "--c", "2", "--phi", "0.9", "--c2", "-1", "--phi2",
            "0.3", "--tau", "0", "--sigma", "0.5", "--exog-beta", "0.5", "--n", "687",
            "--seed", "0", "--out", data_csv.to_str().unwrap(),
        ],
        "1",
    );

    let search_args = [
        "search", "--input", "data.csv", "--target", "y", "--exog", "x", "--train", "470",
        "--orders", "NN(1,1+2),NN(1,1-3),NN(1,1+3)", "--restarts", "2", "--seed", "7",
        "--max-epochs", "200", "--out-dir", "search_out",
    ];
    let compare_args = [
        "compare", "--input", "data.csv", "--target", "y", "--exog", "x", "--train", "470",
        "--order", "NN(1,1+3)", "--arimax", "2,1,1", "--restarts", "2", "--seed", "7",
        "--max-epochs", "200", "--plot", "--out-dir", "compare_out",
    ];
    let search_files = ["leaderboard.csv", "report.json", "run_meta.json"];
    let compare_files = [
        "comparison.csv",
        "forecast.csv",
        "forecast_iterated.csv",
        "plot.svg",
        "run_meta.json",
    ];

    let snapshot = |sub: &str, files: &[&str]| -> Vec<Vec<u8>> {
        files
            .iter()
            .map(|f| std::fs::read(dir.join(sub).join(f)).expect("artifact exists"))
            .collect()
    };

    run(&search_args, "1");
    let search_first = snapshot("search_out", &search_files);
    run(&search_args, "1");
    let search_repeat = snapshot("search_out", &search_files);
    run(&search_args, "4");
    let search_parallel = snapshot("search_out", &search_files);
    assert_eq!(search_first, search_repeat, "search outputs differ across runs");
    assert_eq!(
        search_first, search_parallel,
        "search outputs differ between serial and parallel execution"
    );

    run(&compare_args, "1");
    let compare_first = snapshot("compare_out", &compare_files);
    run(&compare_args, "1");
    let compare_repeat = snapshot("compare_out", &compare_files);
    run(&compare_args, "4");
    let compare_parallel = snapshot("compare_out", &compare_files);
    assert_eq!(compare_first, compare_repeat, "compare outputs differ across runs");
    assert_eq!(
        compare_first, compare_parallel,
        "compare outputs differ between serial and parallel execution"
    );

    pass("AC-10 search/compare artifacts byte-identical across runs and serial vs parallel");
}

#[test]
fn ac11_nelder_mead_rosenbrock() {
    let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let result = nelder_mead(rosenbrock, &[-1.2, 1.0], 1e-12, 2000).unwrap();
    assert!(result.iterations <= 2000);
    assert!(
        (result.x[0] - 1.0).abs() < 1e-3 && (result.x[1] - 1.0).abs() < 1e-3,
        "minimizer {:?} after {} iterations",
        result.x,
        result.iterations
    );
    pass(&format!(
        "AC-11 Rosenbrock solved to within 1e-3 in {} iterations (<= 2000)",
        result.iterations
    ));
}
