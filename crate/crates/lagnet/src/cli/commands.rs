//! Implementations of the six subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use lagnet::arima::{fit_css, forecast_arima, ArimaFit, ArimaSpec};
use lagnet::eval::{compare as compare_rows, ModelKind, ModelSummary};
use lagnet::ffnet::{
    count_parameters, finalize_net, prepare_scaled, Activation, ForecastMode, NetConfig,
    Regime, TrainConfig, TrainedNet,
};
use lagnet::plot::{emit_plot, PlotSpec};
use lagnet::select::{
    bic, hidden_sizes, multi_restart_fit, run_search, HiddenRule, OrderNotation, SearchSpec,
};
use lagnet::timeseries::{load_csv, CsvSchema, SimSpec, TimeSeries};
use lagnet::Error;

use crate::cli::args::{
    merge_opt, split_orders, CompareArgs, DataArgs, FitArimaArgs, FitNnArgs, ForecastArgs,
    SearchArgs, SimulateArgs, TrainArgs,
};
use crate::cli::CliError;

type CmdResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Loads the --config overlay, or the all-None default when absent.
fn load_overlay<T: Default + DeserializeOwned>(path: &Option<PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

/// Collects written files so a failing command can remove partial output.
#[derive(Default)]
struct Artifacts {
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, path: impl AsRef<Path>, contents: &str) -> Result<(), Error> {
        let path = path.as_ref();
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, contents)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn plot(&mut self, spec: &PlotSpec, path: impl AsRef<Path>) -> Result<(), Error> {
        emit_plot(spec, path.as_ref())?;
        self.written.push(path.as_ref().to_path_buf());
        Ok(())
    }

    fn discard(&self) {
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
    }
}

/// Runs the writing phase; on failure removes everything written so far.
fn write_all(f: impl FnOnce(&mut Artifacts) -> Result<(), Error>) -> CmdResult {
    let mut artifacts = Artifacts::default();
    match f(&mut artifacts) {
        Ok(()) => Ok(()),
        Err(e) => {
            artifacts.discard();
            Err(e.into())
        }
    }
}

fn meta_json(command: &str, resolved: &impl Serialize) -> String {
    let body = serde_json::json!({ "command": command, "args": resolved });
    serde_json::to_string_pretty(&body).expect("static structure serializes")
}

fn load_series(data: &DataArgs) -> Result<(TimeSeries, CsvSchema), CliError> {
    let input = data
        .input
        .as_ref()
        .ok_or_else(|| usage("--input is required"))?;
    let mut schema = CsvSchema::new(data.target.clone().unwrap_or_else(|| "y".into()));
    if let Some(exog) = &data.exog {
        schema = schema.with_exog(exog.clone());
    }
    if let Some(date) = &data.date_column {
        schema = schema.with_date(date.clone());
    }
    let series = load_csv(input, &schema)?;
    Ok((series, schema))
}

fn build_train_config(train: &TrainArgs, seed: u64) -> Result<TrainConfig, CliError> {
    let defaults = TrainConfig::default();
    let regime = match train.regime.as_deref() {
        None | Some("batch") => Regime::Batch,
        Some("mini-batch") | Some("minibatch") => {
            Regime::MiniBatch(train.batch_size.unwrap_or(32))
        }
        Some("online") => Regime::Online,
        Some(other) => return Err(usage(format!("unknown regime '{other}'"))),
    };
    // The CLI drives multi-restart experiments, so it defaults to running the
    // whole epoch budget (patience 0) and keeping the best-epoch weights;
    // pass --patience 1 for the strict one-more-step stopping rule.
    let tc = TrainConfig {
        learning_rate: train.lr.unwrap_or(defaults.learning_rate),
        momentum: train.momentum.unwrap_or(defaults.momentum),
        regime,
        max_epochs: train.max_epochs.unwrap_or(defaults.max_epochs),
        patience: train.patience.unwrap_or(0),
        shuffle: train.shuffle.unwrap_or(false),
        seed,
        init_half_width: train.init_range.unwrap_or(defaults.init_half_width),
        lr_decay: train.lr_decay,
    };
    tc.validate().map_err(|e| usage(e.to_string()))?;
    Ok(tc)
}

fn parse_hidden_rule(
    hidden: &Option<Vec<usize>>,
    rule: &Option<String>,
) -> Result<HiddenRule, CliError> {
    if let Some(sizes) = hidden {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(usage("--hidden sizes must all be >= 1"));
        }
        return Ok(HiddenRule::Explicit(sizes.clone()));
    }
    match rule.as_deref() {
        None | Some("preset") => Ok(HiddenRule::Preset),
        Some("n") => Ok(HiddenRule::InputCount),
        Some("2n+1") => Ok(HiddenRule::TwiceInputPlusOne),
        Some(other) => Err(usage(format!("unknown hidden rule '{other}'"))),
    }
}

fn parse_activation_pair(text: &str) -> Result<(Activation, Activation), CliError> {
    let (hidden, output) = text
        .split_once('/')
        .ok_or_else(|| usage(format!("activation pair '{text}' must be hidden/output")))?;
    let parse = |s: &str| -> Result<Activation, CliError> {
        s.trim().parse().map_err(|e: Error| usage(e.to_string()))
    };
    Ok((parse(hidden)?, parse(output)?))
}

fn parse_arimax(text: &str) -> Result<(usize, usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("--arimax '{text}' must be p,d,q")));
    }
    let parse = |s: &str| -> Result<usize, CliError> {
        s.parse()
            .map_err(|_| usage(format!("--arimax component '{s}' is not a non-negative integer")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}

fn parse_mode(text: Option<&str>) -> Result<ForecastMode, CliError> {
    match text {
        None => Ok(ForecastMode::OneStep),
        Some(s) => s.parse().map_err(|e: Error| usage(e.to_string())),
    }
}

/// Fits with restarts through the standard scaling pipeline.
fn fit_nn_with_restarts(
    config: &NetConfig,
    series: &TimeSeries,
    tc: &TrainConfig,
    restarts: usize,
    base_seed: u64,
) -> Result<(TrainedNet, Vec<Option<f64>>), Error> {
    let data = prepare_scaled(config, series)?;
    let (net, sses) = multi_restart_fit(config, &data.scaled, tc, restarts, base_seed)?;
    Ok((finalize_net(net, &data), sses))
}

fn train_metrics(net: &TrainedNet, series: &TimeSeries) -> (f64, f64, f64) {
    let sse_train: f64 = net.residuals.iter().map(|r| r * r).sum();
    let max_lag = net.config.lags.max_lag();
    let targets = &series.values()[max_lag..];
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let sst: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    let r_squared = if sst > 0.0 { 1.0 - sse_train / sst } else { 1.0 };
    let bic_value = bic(targets.len(), sse_train, count_parameters(&net.config));
    (sse_train, r_squared, bic_value)
}

/// Tagged on-disk model format shared by fit-nn, fit-arima and forecast.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelFile {
    Nn(TrainedNet),
    Arimax(ArimaFit),
}

fn exog_matrix(series: &TimeSeries) -> Vec<Vec<f64>> {
    (0..series.exog_count())
        .map(|ch| series.exog_values(ch).to_vec())
        .collect()
}

fn forecast_csv(header: &[&str], t0: usize, actuals: &[f64], columns: &[&[f64]]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        let mut fields = vec![format!("{}", t0 + i)];
        if i < actuals.len() {
            fields.push(format!("{}", actuals[i]));
        } else {
            fields.push(String::new());
        }
        for col in columns {
            fields.push(format!("{}", col[i]));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn simulate(mut args: SimulateArgs) -> CmdResult {
    let overlay: SimulateArgs = load_overlay(&args.config)?;
    merge_opt!(
        args, overlay, kind, c, phi, theta, sigma, c2, phi2, tau, exog_beta, exog_lambda, n,
        seed, out
    );

    let n = args.n.ok_or_else(|| usage("--n is required"))?;
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    let out = args.out.clone().ok_or_else(|| usage("--out is required"))?;
    let seed = args.seed.unwrap_or(0);
    let kind = args.kind.clone().unwrap_or_else(|| "ar1".into());
    let c = args.c.unwrap_or(0.0);
    let phi = args.phi.clone().unwrap_or_else(|| vec![0.5]);
    let theta = args.theta.clone().unwrap_or_default();
    let sigma = args.sigma.unwrap_or(1.0);

    let mut spec = match kind.as_str() {
        "ar1" => {
            if phi.len() != 1 {
                return Err(usage("--kind ar1 takes exactly one --phi value"));
            }
            SimSpec::ar(c, phi.clone(), sigma)
        }
        "ar" => SimSpec::ar(c, phi.clone(), sigma),
        "arma" => SimSpec::arma(c, phi.clone(), theta.clone(), sigma),
        "tar" => {
            let c2 = args.c2.ok_or_else(|| usage("--kind tar requires --c2"))?;
            let phi2 = args.phi2.ok_or_else(|| usage("--kind tar requires --phi2"))?;
            let tau = args.tau.ok_or_else(|| usage("--kind tar requires --tau"))?;
            if phi.len() != 1 {
                return Err(usage("--kind tar takes exactly one --phi value"));
            }
            SimSpec::tar((c, phi[0]), (c2, phi2), tau, sigma)
        }
        other => return Err(usage(format!("unknown --kind '{other}'"))),
    };
    if let Some(beta) = args.exog_beta {
        spec = spec.with_exog(beta, args.exog_lambda.unwrap_or(3.0));
    }

    let series = match lagnet::timeseries::simulate(&spec, n, seed) {
        Ok(s) => s,
        Err(e @ Error::InvalidParameter { .. }) => return Err(usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    // Resolved values go into the meta file.
    args.kind = Some(kind);
    args.c = Some(c);
    args.phi = Some(phi);
    args.theta = Some(theta);
    args.sigma = Some(sigma);
    args.seed = Some(seed);

    write_all(|artifacts| {
        let t: Vec<f64> = (0..series.len()).map(|i| i as f64).collect();
        let mut columns: Vec<(&str, &[f64])> = vec![("t", &t), ("y", series.values())];
        if series.exog_count() > 0 {
            columns.push(("x", series.exog_values(0)));
        }
        let mut csv = String::new();
        csv.push_str(
            &columns
                .iter()
                .map(|(name, _)| *name)
                .collect::<Vec<_>>()
                .join(","),
        );
        csv.push('\n');
        for i in 0..series.len() {
            let row: Vec<String> = columns.iter().map(|(_, col)| format!("{}", col[i])).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        artifacts.write(&out, &csv)?;
        let meta_path = out.with_extension("meta.json");
        artifacts.write(meta_path, &meta_json("simulate", &args))?;
        Ok(())
    })?;
    println!("seed: {seed}");
    println!("wrote {} rows to {}", n, out.display());
    Ok(())
}

pub fn fit_nn(mut args: FitNnArgs) -> CmdResult {
    let overlay: FitNnArgs = load_overlay(&args.config)?;
    merge_opt!(args, overlay, order, hidden, hidden_rule, activations, restarts, seed, out_dir);
    merge_opt!(args.data, overlay.data, input, target, exog, date_column, train);
    merge_opt!(
        args.train_args, overlay.train_args, lr, momentum, regime, batch_size, max_epochs,
        patience, shuffle, init_range, lr_decay
    );

    let (series, _) = load_series(&args.data)?;
    let n_train = args.data.train.unwrap_or(series.len());
    let split = series
        .split_train_test(n_train)
        .map_err(|e| usage(e.to_string()))?;

    let order_text = args.order.clone().ok_or_else(|| usage("--order is required"))?;
    let order = OrderNotation::parse(&order_text).map_err(|e| usage(e.to_string()))?;
    let exog_count = split.train.exog_count();
    let rule = parse_hidden_rule(&args.hidden, &args.hidden_rule)?;
    let hidden = hidden_sizes(order.lags.len() + exog_count, &rule, order.layers);
    if hidden.len() != order.layers {
        return Err(usage(format!(
            "--hidden gives {} layer(s) but {} declares {}",
            hidden.len(),
            order.render(),
            order.layers
        )));
    }
    let (h_act, o_act) =
        parse_activation_pair(args.activations.as_deref().unwrap_or("sigmoid/identity"))?;
    let config = NetConfig::new(order.lags.clone(), exog_count, hidden, h_act, o_act)
        .map_err(|e| usage(e.to_string()))?;

    let seed = args.seed.unwrap_or(0);
    let tc = build_train_config(&args.train_args, seed)?;
    let restarts = args.restarts.unwrap_or(1);
    if restarts == 0 {
        return Err(usage("--restarts must be >= 1"));
    }

    let (net, restart_sses) = fit_nn_with_restarts(&config, &split.train, &tc, restarts, seed)?;
    let (sse_train, r_squared, bic_value) = train_metrics(&net, &split.train);

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    args.seed = Some(seed);
    args.restarts = Some(restarts);
    write_all(|artifacts| {
        let model = serde_json::to_string_pretty(&ModelFile::Nn(net.clone()))?;
        artifacts.write(out_dir.join("model_nn.json"), &model)?;
        let report = serde_json::json!({
            "order": order.render(),
            "n_params": count_parameters(&config),
            "activations": config.activation_pair(),
            "sse_train": sse_train,
            "r_squared": r_squared,
            "bic": bic_value,
            "epochs": net.epochs,
            "stop_reason": net.stop_reason,
            "seed": net.seed,
            "restart_sses": restart_sses,
        });
        artifacts.write(
            out_dir.join("report.json"),
            &serde_json::to_string_pretty(&report)?,
        )?;
        artifacts.write(out_dir.join("run_meta.json"), &meta_json("fit-nn", &args))?;
        Ok(())
    })?;
    println!(
        "{} [{}] params {} train sse {:.4} r2 {:.4} epochs {}",
        order.render(),
        config.activation_pair(),
        count_parameters(&config),
        sse_train,
        r_squared,
        net.epochs
    );
    Ok(())
}

pub fn fit_arima(mut args: FitArimaArgs) -> CmdResult {
    let overlay: FitArimaArgs = load_overlay(&args.config)?;
    merge_opt!(args, overlay, arimax, no_intercept, out_dir);
    merge_opt!(args.data, overlay.data, input, target, exog, date_column, train);

    let (series, _) = load_series(&args.data)?;
    let n_train = args.data.train.unwrap_or(series.len());
    let split = series
        .split_train_test(n_train)
        .map_err(|e| usage(e.to_string()))?;

    let arimax_text = args
        .arimax
        .clone()
        .ok_or_else(|| usage("--arimax p,d,q is required"))?;
    let (p, d, q) = parse_arimax(&arimax_text)?;
    let spec = ArimaSpec::new(p, d, q)
        .with_intercept(!args.no_intercept.unwrap_or(false))
        .with_exog(split.train.exog_count());
    spec.validate().map_err(|e| usage(e.to_string()))?;

    let fit = fit_css(&spec, &split.train)?;
    for warning in &fit.warnings {
        eprintln!("warning: {warning}");
    }

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    write_all(|artifacts| {
        let model = serde_json::to_string_pretty(&ModelFile::Arimax(fit.clone()))?;
        artifacts.write(out_dir.join("model_arima.json"), &model)?;
        artifacts.write(out_dir.join("run_meta.json"), &meta_json("fit-arima", &args))?;
        Ok(())
    })?;
    println!(
        "{} sse {:.4} r2 {:.4} converged {} iterations {}",
        fit.spec.label(),
        fit.sse,
        fit.r_squared,
        fit.converged,
        fit.iterations
    );
    Ok(())
}

pub fn search(mut args: SearchArgs) -> CmdResult {
    let overlay: SearchArgs = load_overlay(&args.config)?;
    merge_opt!(args, overlay, orders, activations, hidden, hidden_rule, restarts, seed, out_dir);
    merge_opt!(args.data, overlay.data, input, target, exog, date_column, train);
    merge_opt!(
        args.train_args, overlay.train_args, lr, momentum, regime, batch_size, max_epochs,
        patience, shuffle, init_range, lr_decay
    );

    let (series, _) = load_series(&args.data)?;
    let n_train = args
        .data
        .train
        .ok_or_else(|| usage("--train is required"))?;
    let split = series
        .split_train_test(n_train)
        .map_err(|e| usage(e.to_string()))?;
    if split.empty_test_warning {
        eprintln!("warning: empty test window; ranking by BIC on training data");
    }

    let orders_text = args.orders.clone().ok_or_else(|| usage("--orders is required"))?;
    let orders: Vec<OrderNotation> = split_orders(&orders_text)
        .iter()
        .map(|o| OrderNotation::parse(o).map_err(|e| usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    if orders.is_empty() {
        return Err(usage("--orders lists no candidates"));
    }
    let activations: Vec<(Activation, Activation)> = args
        .activations
        .as_deref()
        .unwrap_or("sigmoid/identity")
        .split(',')
        .map(parse_activation_pair)
        .collect::<Result<_, _>>()?;

    let seed = args.seed.unwrap_or(0);
    let restarts = args.restarts.unwrap_or(5);
    let mut spec = SearchSpec::new(orders);
    spec.activations = activations;
    spec.hidden_rule = parse_hidden_rule(&args.hidden, &args.hidden_rule)?;
    spec.include_exog = args.data.exog.as_ref().is_some_and(|e| !e.is_empty());
    spec.restarts = restarts;
    spec.base_seed = seed;
    spec.train = build_train_config(&args.train_args, seed)?;

    let board = run_search(&spec, &split.train, &split.test)?;

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    args.seed = Some(seed);
    args.restarts = Some(restarts);
    write_all(|artifacts| {
        artifacts.write(out_dir.join("leaderboard.csv"), &board.to_csv())?;
        artifacts.write(
            out_dir.join("report.json"),
            &serde_json::to_string_pretty(&board)?,
        )?;
        artifacts.write(out_dir.join("run_meta.json"), &meta_json("search", &args))?;
        Ok(())
    })?;
    let winner = board.winner();
    println!(
        "winner: {} [{}] criterion {} params {}",
        winner.order,
        winner.activations,
        board.criterion,
        winner.n_params
    );
    for skipped in &board.skipped {
        eprintln!(
            "skipped {} [{}]: {}",
            skipped.order, skipped.activations, skipped.reason
        );
    }
    Ok(())
}

pub fn forecast(mut args: ForecastArgs) -> CmdResult {
    let overlay: ForecastArgs = load_overlay(&args.config)?;
    merge_opt!(args, overlay, model, horizon, mode, out);
    merge_opt!(args.data, overlay.data, input, target, exog, date_column, train);

    let model_path = args.model.clone().ok_or_else(|| usage("--model is required"))?;
    let model_text = fs::read_to_string(&model_path).map_err(Error::from)?;
    let model: ModelFile = serde_json::from_str(&model_text).map_err(Error::from)?;
    let (series, _) = load_series(&args.data)?;
    let n_train = args.data.train.unwrap_or(series.len());
    let split = series
        .split_train_test(n_train)
        .map_err(|e| usage(e.to_string()))?;
    let horizon = args.horizon.unwrap_or(split.test.len());
    let mode = parse_mode(args.mode.as_deref())?;
    if mode == ForecastMode::OneStep && horizon > split.test.len() {
        return Err(usage(format!(
            "one-step mode needs actuals: horizon {} exceeds the {} observations after the training window",
            horizon,
            split.test.len()
        )));
    }

    let exog_future = exog_matrix(&split.test);
    let exog_arg = (!exog_future.is_empty()).then_some(exog_future.as_slice());
    let actuals = (mode == ForecastMode::OneStep).then(|| split.test.values());
    let predictions = match &model {
        ModelFile::Nn(net) => lagnet::ffnet::forecast(
            net,
            &split.train,
            horizon,
            mode,
            actuals,
            exog_arg,
        )?,
        ModelFile::Arimax(fit) => forecast_arima(
            fit,
            &split.train,
            horizon,
            mode,
            actuals,
            exog_arg,
        )?,
    };

    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("forecast.csv"));
    write_all(|artifacts| {
        let csv = forecast_csv(
            &["t", "actual", "pred"],
            n_train,
            &split.test.values()[..horizon.min(split.test.len())],
            &[&predictions],
        );
        artifacts.write(&out, &csv)?;
        let meta_path = out.with_extension("meta.json");
        artifacts.write(meta_path, &meta_json("forecast", &args))?;
        Ok(())
    })?;
    println!("wrote {} forecasts to {}", predictions.len(), out.display());
    Ok(())
}

pub fn compare(mut args: CompareArgs) -> CmdResult {
    let overlay: CompareArgs = load_overlay(&args.config)?;
    merge_opt!(
        args, overlay, order, activations, hidden, arimax, no_intercept, restarts, seed,
        horizon, out_dir, plot
    );
    merge_opt!(args.data, overlay.data, input, target, exog, date_column, train);
    merge_opt!(
        args.train_args, overlay.train_args, lr, momentum, regime, batch_size, max_epochs,
        patience, shuffle, init_range, lr_decay
    );

    let (series, _) = load_series(&args.data)?;
    let n_train = args.data.train.ok_or_else(|| usage("--train is required"))?;
    let split = series
        .split_train_test(n_train)
        .map_err(|e| usage(e.to_string()))?;
    let horizon = args.horizon.unwrap_or(split.test.len());
    if horizon > split.test.len() {
        return Err(usage(format!(
            "horizon {} exceeds the test window of {}",
            horizon,
            split.test.len()
        )));
    }

    let order_text = args.order.clone().ok_or_else(|| usage("--order is required"))?;
    let order = OrderNotation::parse(&order_text).map_err(|e| usage(e.to_string()))?;
    let arimax_text = args.arimax.clone().ok_or_else(|| usage("--arimax is required"))?;
    let (p, d, q) = parse_arimax(&arimax_text)?;

    let exog_count = split.train.exog_count();
    let (h_act, o_act) =
        parse_activation_pair(args.activations.as_deref().unwrap_or("sigmoid/identity"))?;
    let hidden = match &args.hidden {
        Some(sizes) => sizes.clone(),
        None => hidden_sizes(order.lags.len() + exog_count, &HiddenRule::Preset, order.layers),
    };
    if hidden.len() != order.layers {
        return Err(usage(format!(
            "--hidden gives {} layer(s) but {} declares {}",
            hidden.len(),
            order.render(),
            order.layers
        )));
    }
    let config = NetConfig::new(order.lags.clone(), exog_count, hidden, h_act, o_act)
        .map_err(|e| usage(e.to_string()))?;
    let seed = args.seed.unwrap_or(0);
    let restarts = args.restarts.unwrap_or(5);
    if restarts == 0 {
        return Err(usage("--restarts must be >= 1"));
    }
    let tc = build_train_config(&args.train_args, seed)?;

    let arima_spec = ArimaSpec::new(p, d, q)
        .with_intercept(!args.no_intercept.unwrap_or(false))
        .with_exog(exog_count);
    arima_spec.validate().map_err(|e| usage(e.to_string()))?;

    let (net, _) = fit_nn_with_restarts(&config, &split.train, &tc, restarts, seed)?;
    let arima_fit = fit_css(&arima_spec, &split.train)?;
    for warning in &arima_fit.warnings {
        eprintln!("warning: {warning}");
    }

    let exog_future = exog_matrix(&split.test);
    let exog_arg = (exog_count > 0).then_some(exog_future.as_slice());
    let actuals = &split.test.values()[..horizon];
    let nn_onestep = lagnet::ffnet::forecast(
        &net,
        &split.train,
        horizon,
        ForecastMode::OneStep,
        Some(actuals),
        exog_arg,
    )?;
    let nn_iterated = lagnet::ffnet::forecast(
        &net,
        &split.train,
        horizon,
        ForecastMode::Iterated,
        None,
        exog_arg,
    )?;
    let ar_onestep = forecast_arima(
        &arima_fit,
        &split.train,
        horizon,
        ForecastMode::OneStep,
        Some(actuals),
        exog_arg,
    )?;
    let ar_iterated = forecast_arima(
        &arima_fit,
        &split.train,
        horizon,
        ForecastMode::Iterated,
        None,
        exog_arg,
    )?;

    let sse_of = |preds: &[f64]| -> f64 {
        preds
            .iter()
            .zip(actuals)
            .map(|(p, a)| (p - a) * (p - a))
            .sum()
    };

    let table = if horizon > 0 {
        let (nn_sse_train, nn_r2, nn_bic) = train_metrics(&net, &split.train);
        let rows = vec![
            ModelSummary {
                label: order.render(),
                kind: ModelKind::Nn,
                n_params: count_parameters(&config),
                activations: Some(config.activation_pair()),
                r_squared: nn_r2,
                sse_train: nn_sse_train,
                sse_test_onestep: sse_of(&nn_onestep),
                sse_test_iterated: Some(sse_of(&nn_iterated)),
                bic: nn_bic,
                seed: Some(seed),
                n_test: horizon,
            },
            ModelSummary {
                label: arima_spec.label(),
                kind: ModelKind::Arimax,
                n_params: arima_spec.n_params(),
                activations: None,
                r_squared: arima_fit.r_squared,
                sse_train: arima_fit.sse,
                sse_test_onestep: sse_of(&ar_onestep),
                sse_test_iterated: Some(sse_of(&ar_iterated)),
                bic: bic(arima_fit.n_used, arima_fit.sse, arima_spec.n_params()),
                seed: Some(seed),
                n_test: horizon,
            },
        ];
        Some(compare_rows(&rows)?)
    } else {
        None
    };

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    args.seed = Some(seed);
    args.restarts = Some(restarts);
    args.horizon = Some(horizon);
    let meta = meta_json("compare", &args);
    write_all(|artifacts| {
        let comparison_csv = table.as_ref().map_or_else(
            || {
                "order,n_params,activations,r_squared,sse_train,sse_test_onestep,sse_test_iterated,bic,seed,model_kind\n"
                    .to_string()
            },
            |t| t.to_csv(),
        );
        artifacts.write(out_dir.join("comparison.csv"), &comparison_csv)?;
        artifacts.write(
            out_dir.join("forecast.csv"),
            &forecast_csv(
                &["t", "actual", "pred_nn", "pred_arimax"],
                n_train,
                actuals,
                &[&nn_onestep, &ar_onestep],
            ),
        )?;
        artifacts.write(
            out_dir.join("forecast_iterated.csv"),
            &forecast_csv(
                &["t", "actual", "pred_nn", "pred_arimax"],
                n_train,
                actuals,
                &[&nn_iterated, &ar_iterated],
            ),
        )?;
        if args.plot.unwrap_or(false) && horizon > 0 {
            let spec = PlotSpec {
                title: "forecast vs actual (one-step)".into(),
                actual_label: "actual".into(),
                actual: actuals.to_vec(),
                predicted: vec![
                    (order.render(), nn_onestep.clone()),
                    (arima_spec.label(), ar_onestep.clone()),
                ],
                width: 900,
                height: 400,
                comment: Some(meta.replace('\n', " ")),
            };
            artifacts.plot(&spec, out_dir.join("plot.svg"))?;
        }
        artifacts.write(out_dir.join("run_meta.json"), &meta)?;
        Ok(())
    })?;

    match &table {
        Some(t) => {
            println!("{}", t.to_text());
        }
        None => println!("horizon 0: forecast files written with headers only"),
    }
    Ok(())
}
