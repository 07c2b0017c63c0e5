//! Architecture search: order notation, hidden-size rules, multi-restart
//! fitting, BIC, and leaderboard ranking.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffnet::{
    count_parameters, finalize_net, forecast, prepare_scaled, train, Activation, ForecastMode,
    NetConfig, TrainConfig, TrainedNet,
};
use crate::parallel::ordered_map;
use crate::timeseries::{DesignMatrix, LagSpec, TimeSeries};

/// Compact network-order notation: `NN(L,spec)` with L hidden layers and a
/// lag spec where `a-b` is the contiguous range and `a+b+c` an explicit set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderNotation {
    pub layers: usize,
    lag_text: String,
    pub lags: LagSpec,
}

impl OrderNotation {
    /// Parses `NN(L,spec)`. Whitespace is tolerated and stripped, so valid
    /// inputs round-trip through `render` exactly.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::OrderNotation {
            text: text.into(),
            reason: reason.into(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("NN(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| bad("expected NN(L,spec)"))?;
        let (layer_text, lag_text) = inner
            .split_once(',')
            .ok_or_else(|| bad("expected a comma between layer count and lag spec"))?;
        let layers: usize = layer_text
            .parse()
            .map_err(|_| bad("layer count must be a positive integer"))?;
        if layers == 0 {
            return Err(bad("layer count must be >= 1"));
        }
        if lag_text.is_empty() {
            return Err(bad("lag spec is empty"));
        }
        let mut lags = Vec::new();
        for token in lag_text.split('+') {
            if let Some((a, b)) = token.split_once('-') {
                let a: usize = a.parse().map_err(|_| bad("range bounds must be integers"))?;
                let b: usize = b.parse().map_err(|_| bad("range bounds must be integers"))?;
                if a >= b {
                    return Err(bad("range must be ascending (a-b with a < b)"));
                }
                lags.extend(a..=b);
            } else {
                let lag: usize = token.parse().map_err(|_| bad("lags must be integers"))?;
                lags.push(lag);
            }
        }
        let lags = LagSpec::new(lags).map_err(|e| bad(&e.to_string()))?;
        Ok(Self {
            layers,
            lag_text: lag_text.to_string(),
            lags,
        })
    }

    /// Builds the canonical notation for a lag set: contiguous sets of three
    /// or more render as `a-b`, everything else joins with `+`.
    pub fn from_lags(layers: usize, lags: LagSpec) -> Self {
        let lag_text = if lags.is_contiguous() && lags.len() >= 3 {
            format!("{}-{}", lags.lags()[0], lags.max_lag())
        } else {
            lags.lags()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("+")
        };
        Self {
            layers,
            lag_text,
            lags,
        }
    }

    pub fn render(&self) -> String {
        format!("NN({},{})", self.layers, self.lag_text)
    }
}

impl std::fmt::Display for OrderNotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// How hidden layer sizes are chosen for a candidate with k inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenRule {
    /// Fixed sizes, one entry per layer.
    Explicit(Vec<usize>),
    /// One hidden node per input.
    InputCount,
    /// 2k + 1 hidden nodes.
    TwiceInputPlusOne,
    /// Built-in size table for small autoregressive nets, keeping parameter
    /// counts low for k in 3..=9; falls back to `InputCount` outside it.
    Preset,
}

fn preset_single(k: usize) -> usize {
    match k {
        3 => 2,
        4 => 3,
        5 => 3,
        6 => 4,
        7 => 4,
        8 => 7,
        9 => 7,
        other => other,
    }
}

/// Hidden sizes for `k` inputs under `rule`, one entry per layer.
pub fn hidden_sizes(k: usize, rule: &HiddenRule, layers: usize) -> Vec<usize> {
    match rule {
        HiddenRule::Explicit(sizes) => sizes.clone(),
        HiddenRule::InputCount => vec![k; layers],
        HiddenRule::TwiceInputPlusOne => vec![2 * k + 1; layers],
        HiddenRule::Preset => {
            if layers == 2 && k == 4 {
                return vec![3, 2];
            }
            let first = preset_single(k);
            let mut sizes = vec![first];
            for _ in 1..layers {
                sizes.push((sizes.last().unwrap() / 2).max(1));
            }
            sizes
        }
    }
}

/// Gaussian-likelihood BIC: n*ln(sse/n) + p*ln(n). A zero SSE returns the
/// negative-infinity sentinel (degenerate perfect fit).
pub fn bic(n_obs: usize, sse: f64, n_params: usize) -> f64 {
    debug_assert!(n_obs >= 1);
    if sse <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = n_obs as f64;
    n * (sse / n).ln() + n_params as f64 * n.ln()
}

/// What the leaderboard is ranked by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    TestSse,
    Bic,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::TestSse => "test_sse",
            Criterion::Bic => "bic",
        })
    }
}

/// Candidate grid and fitting options for a search run.
#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub orders: Vec<OrderNotation>,
    /// (hidden, output) activation pairs; each candidate is the cross product
    /// of orders and pairs.
    pub activations: Vec<(Activation, Activation)>,
    pub hidden_rule: HiddenRule,
    pub include_exog: bool,
    pub restarts: usize,
    pub base_seed: u64,
    pub train: TrainConfig,
    /// None selects by test SSE when a test window exists, else by BIC.
    pub criterion: Option<Criterion>,
}

impl SearchSpec {
    pub fn new(orders: Vec<OrderNotation>) -> Self {
        Self {
            orders,
            activations: vec![(Activation::Sigmoid, Activation::Identity)],
            hidden_rule: HiddenRule::Preset,
            include_exog: true,
            restarts: 1,
            base_seed: 0,
            train: TrainConfig::default(),
            criterion: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.orders.is_empty() {
            return Err(Error::InvalidParameter {
                name: "orders".into(),
                reason: "at least one candidate order".into(),
            });
        }
        if self.activations.is_empty() {
            return Err(Error::InvalidParameter {
                name: "activations".into(),
                reason: "at least one activation pair".into(),
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter {
                name: "restarts".into(),
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// One-layer contiguous family NN(1, 1-p) for p in the given range.
pub fn contiguous_orders(p_from: usize, p_to: usize) -> Result<Vec<OrderNotation>> {
    if p_from == 0 || p_from > p_to {
        return Err(Error::InvalidParameter {
            name: "p".into(),
            reason: "need 1 <= p_from <= p_to".into(),
        });
    }
    Ok((p_from..=p_to)
        .map(|p| OrderNotation::from_lags(1, LagSpec::new((1..=p).collect()).expect("non-empty")))
        .collect())
}

/// One candidate's scorecard; one row of the leaderboard.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub order: String,
    pub n_params: usize,
    pub activations: String,
    pub r_squared: f64,
    pub sse_train: f64,
    pub sse_test_onestep: Option<f64>,
    pub sse_test_iterated: Option<f64>,
    pub bic: f64,
    /// Seed of the winning restart.
    pub seed: u64,
    pub epochs: usize,
    /// Final train SSE of every restart, in seed order; None marks divergence.
    pub restart_sses: Vec<Option<f64>>,
    /// Per-epoch training SSE of the winning restart (training scale).
    pub trace: Vec<f64>,
    pub n_test: usize,
    /// Wall time is diagnostic only and never serialized, keeping artifacts
    /// byte-identical across runs.
    #[serde(skip)]
    pub wall_time_ms: u64,
}

impl FitReport {
    fn criterion_value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::TestSse => self.sse_test_onestep.unwrap_or(f64::INFINITY),
            Criterion::Bic => self.bic,
        }
    }
}

/// Candidate that could not be evaluated, with the reason it was skipped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedCandidate {
    pub order: String,
    pub activations: String,
    pub reason: String,
}

/// Ranked candidate scorecards. Ordering is total: criterion ascending, then
/// fewer parameters, then lower train SSE, then order string, then activations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Leaderboard {
    pub criterion: Criterion,
    pub tie_break: String,
    pub reports: Vec<FitReport>,
    pub skipped: Vec<SkippedCandidate>,
}

const LEADERBOARD_CSV_HEADER: &str =
    "order,n_params,activations,r_squared,sse_train,sse_test_onestep,sse_test_iterated,bic,seed";

impl Leaderboard {
    pub fn winner(&self) -> &FitReport {
        &self.reports[0]
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x}"));
        let mut out = String::from(LEADERBOARD_CSV_HEADER);
        out.push('\n');
        for r in &self.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                crate::timeseries::quote_csv_field(&r.order),
                r.n_params,
                r.activations,
                r.r_squared,
                r.sse_train,
                opt(r.sse_test_onestep),
                opt(r.sse_test_iterated),
                r.bic,
                r.seed,
            ));
        }
        out
    }
}

fn rank_reports(criterion: Criterion, reports: &mut [FitReport]) {
    reports.sort_by(|a, b| {
        a.criterion_value(criterion)
            .partial_cmp(&b.criterion_value(criterion))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.n_params.cmp(&b.n_params))
            .then(
                a.sse_train
                    .partial_cmp(&b.sse_train)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(a.order.cmp(&b.order))
            .then(a.activations.cmp(&b.activations))
    });
}

/// Trains `restarts` independent times with seeds base_seed..base_seed+R-1 on
/// an already-scaled design matrix and keeps the lowest final train SSE (ties
/// go to the lower seed). Diverged restarts are recorded as None and skipped;
/// only a full wipe-out is an error.
pub fn multi_restart_fit(
    config: &NetConfig,
    data: &DesignMatrix,
    tc: &TrainConfig,
    restarts: usize,
    base_seed: u64,
) -> Result<(TrainedNet, Vec<Option<f64>>)> {
    if restarts == 0 {
        return Err(Error::InvalidParameter {
            name: "restarts".into(),
            reason: "must be >= 1".into(),
        });
    }
    let mut sses: Vec<Option<f64>> = Vec::with_capacity(restarts);
    let mut best: Option<TrainedNet> = None;
    for r in 0..restarts {
        let seed = base_seed + r as u64;
        match train(config, data, &tc.clone().with_seed(seed)) {
            Ok(net) => {
                sses.push(Some(net.train_sse));
                let better = match &best {
                    None => true,
                    Some(b) => net.train_sse < b.train_sse,
                };
                if better {
                    best = Some(net);
                }
            }
            Err(Error::Diverged { .. }) | Err(Error::GradientOverflow { .. }) => {
                sses.push(None);
            }
            Err(other) => return Err(other),
        }
    }
    match best {
        Some(net) => Ok((net, sses)),
        None => Err(Error::AllRestartsDiverged { restarts }),
    }
}

struct Candidate {
    order: OrderNotation,
    hidden_activation: Activation,
    output_activation: Activation,
}

fn evaluate_candidate(
    candidate: &Candidate,
    spec: &SearchSpec,
    train_series: &TimeSeries,
    test: &TimeSeries,
    exog_count: usize,
) -> std::result::Result<FitReport, SkippedCandidate> {
    let activations = format!(
        "{}/{}",
        candidate.hidden_activation, candidate.output_activation
    );
    let skip = |reason: String| SkippedCandidate {
        order: candidate.order.render(),
        activations: activations.clone(),
        reason,
    };
    let started = Instant::now();

    let k = candidate.order.lags.len() + exog_count;
    let hidden = hidden_sizes(k, &spec.hidden_rule, candidate.order.layers);
    if hidden.len() != candidate.order.layers {
        return Err(skip(format!(
            "explicit hidden sizes give {} layer(s) but the order declares {}",
            hidden.len(),
            candidate.order.layers
        )));
    }
    let config = NetConfig::new(
        candidate.order.lags.clone(),
        exog_count,
        hidden,
        candidate.hidden_activation,
        candidate.output_activation,
    )
    .map_err(|e| skip(e.to_string()))?;

    if candidate.order.lags.max_lag() >= train_series.len() {
        return Err(skip(format!(
            "max lag {} >= training length {}",
            candidate.order.lags.max_lag(),
            train_series.len()
        )));
    }

    let data = prepare_scaled(&config, train_series).map_err(|e| skip(e.to_string()))?;
    let (net, restart_sses) =
        multi_restart_fit(&config, &data.scaled, &spec.train, spec.restarts, spec.base_seed)
            .map_err(|e| skip(e.to_string()))?;
    let net = finalize_net(net, &data);

    let sse_train: f64 = net.residuals.iter().map(|r| r * r).sum();
    let targets = data.raw.targets();
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let sst: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    let r_squared = if sst > 0.0 { 1.0 - sse_train / sst } else { 1.0 };

    let (sse_test_onestep, sse_test_iterated) = if test.is_empty() {
        (None, None)
    } else {
        let exog_future: Vec<Vec<f64>> = (0..exog_count)
            .map(|ch| test.exog_values(ch).to_vec())
            .collect();
        let exog_arg = (exog_count > 0).then_some(exog_future.as_slice());
        let one = forecast(
            &net,
            train_series,
            test.len(),
            ForecastMode::OneStep,
            Some(test.values()),
            exog_arg,
        )
        .map_err(|e| skip(e.to_string()))?;
        let iter = forecast(
            &net,
            train_series,
            test.len(),
            ForecastMode::Iterated,
            None,
            exog_arg,
        )
        .map_err(|e| skip(e.to_string()))?;
        let sse = |preds: &[f64]| -> f64 {
            preds
                .iter()
                .zip(test.values())
                .map(|(p, a)| (p - a) * (p - a))
                .sum()
        };
        (Some(sse(&one)), Some(sse(&iter)))
    };

    Ok(FitReport {
        order: candidate.order.render(),
        n_params: count_parameters(&config),
        activations,
        r_squared,
        sse_train,
        sse_test_onestep,
        sse_test_iterated,
        bic: bic(data.raw.rows(), sse_train, count_parameters(&config)),
        seed: net.seed,
        epochs: net.epochs,
        restart_sses,
        trace: net.trace.clone(),
        n_test: test.len(),
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Evaluates every (order, activation pair) candidate over the train window,
/// scores it on the test window, and ranks the survivors. Ranking uses test
/// SSE when a test window exists, otherwise BIC. Infeasible candidates are
/// skipped with a recorded reason, never a global failure.
pub fn run_search(
    spec: &SearchSpec,
    train_series: &TimeSeries,
    test: &TimeSeries,
) -> Result<Leaderboard> {
    spec.validate()?;
    let criterion = match spec.criterion {
        Some(Criterion::TestSse) if test.is_empty() => {
            return Err(Error::InvalidParameter {
                name: "criterion".into(),
                reason: "test-SSE ranking requires a non-empty test window".into(),
            })
        }
        Some(c) => c,
        None => {
            if test.is_empty() {
                Criterion::Bic
            } else {
                Criterion::TestSse
            }
        }
    };
    let exog_count = if spec.include_exog {
        train_series.exog_count()
    } else {
        0
    };
    if exog_count > 0 && !test.is_empty() && test.exog_count() != exog_count {
        return Err(Error::InvalidParameter {
            name: "exog".into(),
            reason: "train and test exogenous channels differ".into(),
        });
    }

    let candidates: Vec<Candidate> = spec
        .orders
        .iter()
        .flat_map(|order| {
            spec.activations.iter().map(move |(hidden, output)| Candidate {
                order: order.clone(),
                hidden_activation: *hidden,
                output_activation: *output,
            })
        })
        .collect();

    let outcomes = ordered_map(candidates, |candidate| {
        evaluate_candidate(&candidate, spec, train_series, test, exog_count)
    });

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(report) => reports.push(report),
            Err(skip) => skipped.push(skip),
        }
    }
    if reports.is_empty() {
        let reasons: Vec<String> = skipped
            .iter()
            .map(|s| format!("{} [{}]: {}", s.order, s.activations, s.reason))
            .collect();
        return Err(Error::NoFeasibleCandidate(reasons.join("; ")));
    }
    rank_reports(criterion, &mut reports);
    Ok(Leaderboard {
        criterion,
        tie_break: "n_params, sse_train, order, activations".into(),
        reports,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{simulate, SimSpec};

    #[test]
    fn parse_reference_orders() {
        let o = OrderNotation::parse("NN(1,1+2)").unwrap();
        assert_eq!(o.layers, 1);
        assert_eq!(o.lags.lags(), &[1, 2]);

        let o = OrderNotation::parse("NN(2,1-3)").unwrap();
        assert_eq!(o.layers, 2);
        assert_eq!(o.lags.lags(), &[1, 2, 3]);

        assert!(OrderNotation::parse("NN(1,3-1)").is_err());
        assert!(OrderNotation::parse("NN(0,1)").is_err());
        assert!(OrderNotation::parse("NN(1,)").is_err());
        assert!(OrderNotation::parse("garbage").is_err());
    }

    #[test]
    fn render_parse_round_trips_on_valid_inputs() {
        for text in [
            "NN(1,1+2)",
            "NN(1,1-3)",
            "NN(1,1-8)",
            "NN(1,1+2+5)",
            "NN(1,4+5)",
            "NN(2,1-3)",
            "NN(1,1-2)",
            "NN(1,2-4+7)",
        ] {
            let parsed = OrderNotation::parse(text).unwrap();
            assert_eq!(parsed.render(), text, "render(parse) identity");
            let reparsed = OrderNotation::parse(&parsed.render()).unwrap();
            assert_eq!(reparsed, parsed, "parse(render) identity");
        }
        // Whitespace is stripped during parsing.
        assert_eq!(OrderNotation::parse("NN(1, 1+2)").unwrap().render(), "NN(1,1+2)");
    }

    #[test]
    fn canonical_rendering_from_lag_sets() {
        let pair = OrderNotation::from_lags(1, LagSpec::new(vec![1, 2]).unwrap());
        assert_eq!(pair.render(), "NN(1,1+2)");
        let run = OrderNotation::from_lags(1, LagSpec::new(vec![1, 2, 3]).unwrap());
        assert_eq!(run.render(), "NN(1,1-3)");
        let sparse = OrderNotation::from_lags(1, LagSpec::new(vec![1, 3]).unwrap());
        assert_eq!(sparse.render(), "NN(1,1+3)");
        for o in [pair, run, sparse] {
            assert_eq!(OrderNotation::parse(&o.render()).unwrap(), o);
        }
    }

    #[test]
    fn mixed_range_and_explicit_tokens() {
        let o = OrderNotation::parse("NN(1,1-3+7)").unwrap();
        assert_eq!(o.lags.lags(), &[1, 2, 3, 7]);
    }

    #[test]
    fn hidden_size_rules() {
        assert_eq!(hidden_sizes(4, &HiddenRule::InputCount, 1), vec![4]);
        assert_eq!(hidden_sizes(4, &HiddenRule::TwiceInputPlusOne, 1), vec![9]);
        assert_eq!(hidden_sizes(1, &HiddenRule::InputCount, 1), vec![1]);
        assert_eq!(hidden_sizes(1, &HiddenRule::TwiceInputPlusOne, 1), vec![3]);
        assert_eq!(hidden_sizes(3, &HiddenRule::Preset, 1), vec![2]);
        assert_eq!(hidden_sizes(4, &HiddenRule::Preset, 2), vec![3, 2]);
        assert_eq!(hidden_sizes(9, &HiddenRule::Preset, 1), vec![7]);
        assert_eq!(
            hidden_sizes(5, &HiddenRule::Explicit(vec![6, 2]), 2),
            vec![6, 2]
        );
    }

    #[test]
    fn bic_monotone_in_parameters_and_sse() {
        assert!(bic(100, 50.0, 12) > bic(100, 50.0, 11));
        assert!(bic(100, 60.0, 11) > bic(100, 50.0, 11));
    }

    #[test]
    fn bic_hand_value() {
        // 100*ln(0.5) + 11*ln(100), evaluated independently.
        let expected = -18.657846010125516;
        assert!((bic(100, 50.0, 11) - expected).abs() < 1e-9);
    }

    #[test]
    fn bic_zero_sse_is_degenerate_sentinel() {
        assert_eq!(bic(100, 0.0, 5), f64::NEG_INFINITY);
    }

    fn scaled_toy_data() -> (NetConfig, crate::ffnet::ScaledData) {
        let series = simulate(&SimSpec::ar(1.0, vec![0.6], 0.8), 120, 2).unwrap();
        let config = NetConfig::new(
            LagSpec::new(vec![1]).unwrap(),
            0,
            vec![2],
            Activation::Sigmoid,
            Activation::Identity,
        )
        .unwrap();
        let data = prepare_scaled(&config, &series).unwrap();
        (config, data)
    }

    #[test]
    fn single_restart_equals_plain_train() {
        let (config, data) = scaled_toy_data();
        let tc = TrainConfig {
            max_epochs: 60,
            patience: 0,
            ..TrainConfig::default()
        };
        let (multi, sses) = multi_restart_fit(&config, &data.scaled, &tc, 1, 7).unwrap();
        let single = train(&config, &data.scaled, &tc.clone().with_seed(7)).unwrap();
        assert_eq!(multi.weights, single.weights);
        assert_eq!(sses, vec![Some(single.train_sse)]);
    }

    #[test]
    fn best_of_restarts_is_monotone_in_nested_seed_sets() {
        let (config, data) = scaled_toy_data();
        let tc = TrainConfig {
            max_epochs: 40,
            patience: 0,
            ..TrainConfig::default()
        };
        let mut previous = f64::INFINITY;
        for restarts in 1..=8 {
            let (net, _) = multi_restart_fit(&config, &data.scaled, &tc, restarts, 100).unwrap();
            assert!(
                net.train_sse <= previous + 1e-15,
                "best-of-{restarts} regressed: {} > {previous}",
                net.train_sse
            );
            previous = net.train_sse;
        }
    }

    #[test]
    fn ranking_breaks_ties_by_parameters_then_train_sse() {
        let report = |order: &str, n_params: usize, sse_train: f64, test: f64| FitReport {
            order: order.into(),
            n_params,
            activations: "sigmoid/identity".into(),
            r_squared: 0.5,
            sse_train,
            sse_test_onestep: Some(test),
            sse_test_iterated: Some(test),
            bic: 0.0,
            seed: 0,
            epochs: 10,
            restart_sses: vec![],
            trace: vec![],
            n_test: 10,
            wall_time_ms: 0,
        };
        let mut reports = vec![
            report("NN(1,1-3)", 19, 5.0, 10.0),
            report("NN(1,1+3)", 11, 6.0, 10.0),
            report("NN(1,1+2)", 11, 5.5, 10.0),
        ];
        rank_reports(Criterion::TestSse, &mut reports);
        assert_eq!(reports[0].order, "NN(1,1+2)"); // same params, lower train SSE
        assert_eq!(reports[1].order, "NN(1,1+3)");
        assert_eq!(reports[2].order, "NN(1,1-3)"); // more params last
    }

    #[test]
    fn bic_ranking_with_equal_params_matches_train_sse_ranking() {
        // Same n_obs and n_params: BIC order must equal train-SSE order.
        let n = 200;
        let sses = [40.0, 10.0, 25.0, 90.0];
        let mut by_bic: Vec<usize> = (0..4).collect();
        by_bic.sort_by(|&a, &b| {
            bic(n, sses[a], 11).partial_cmp(&bic(n, sses[b], 11)).unwrap()
        });
        let mut by_sse: Vec<usize> = (0..4).collect();
        by_sse.sort_by(|&a, &b| sses[a].partial_cmp(&sses[b]).unwrap());
        assert_eq!(by_bic, by_sse);
    }

    fn quick_search_spec(orders: &[&str]) -> SearchSpec {
        let mut spec = SearchSpec::new(
            orders
                .iter()
                .map(|o| OrderNotation::parse(o).unwrap())
                .collect(),
        );
        spec.restarts = 2;
        spec.train = TrainConfig {
            max_epochs: 30,
            patience: 0,
            ..TrainConfig::default()
        };
        spec
    }

    #[test]
    fn search_produces_one_row_per_candidate() {
        let series = simulate(&SimSpec::ar(2.0, vec![0.5], 1.0), 150, 5).unwrap();
        let split = series.split_train_test(120).unwrap();
        let spec = quick_search_spec(&["NN(1,1+2)", "NN(1,1-3)", "NN(1,1+3)"]);
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        assert_eq!(board.reports.len(), 3);
        assert_eq!(board.criterion, Criterion::TestSse);
        assert!(board.skipped.is_empty());
        // CSV has the pinned header and one line per report.
        let csv = board.to_csv();
        assert!(csv.starts_with(LEADERBOARD_CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn empty_test_window_falls_back_to_bic() {
        let series = simulate(&SimSpec::ar(2.0, vec![0.5], 1.0), 150, 5).unwrap();
        let split = series.split_train_test(150).unwrap();
        assert!(split.empty_test_warning);
        let spec = quick_search_spec(&["NN(1,1+2)", "NN(1,1-3)"]);
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        assert_eq!(board.criterion, Criterion::Bic);
        assert!(board.reports.iter().all(|r| r.sse_test_onestep.is_none()));
        // Sorted ascending by BIC.
        for pair in board.reports.windows(2) {
            assert!(pair[0].bic <= pair[1].bic);
        }
    }

    #[test]
    fn infeasible_candidate_is_skipped_not_fatal() {
        let series = simulate(&SimSpec::ar(2.0, vec![0.5], 1.0), 40, 5).unwrap();
        let split = series.split_train_test(30).unwrap();
        let spec = quick_search_spec(&["NN(1,1+2)", "NN(1,1+99)"]);
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        assert_eq!(board.reports.len(), 1);
        assert_eq!(board.skipped.len(), 1);
        assert!(board.skipped[0].reason.contains("max lag"));
    }

    #[test]
    fn search_is_deterministic() {
        let series = simulate(&SimSpec::ar(1.0, vec![0.6], 1.0).with_exog(1.0, 3.0), 160, 8)
            .unwrap();
        let split = series.split_train_test(130).unwrap();
        let spec = quick_search_spec(&["NN(1,1+2)", "NN(1,1-3)"]);
        let a = run_search(&spec, &split.train, &split.test).unwrap();
        let b = run_search(&spec, &split.train, &split.test).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn search_reports_reference_parameter_counts() {
        let series = simulate(&SimSpec::ar(2.0, vec![0.5], 1.0).with_exog(0.5, 3.0), 160, 5)
            .unwrap();
        let split = series.split_train_test(130).unwrap();
        let spec = quick_search_spec(&["NN(1,1+3)", "NN(1,1-3)", "NN(2,1-3)"]);
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        let params: std::collections::HashMap<String, usize> = board
            .reports
            .iter()
            .map(|r| (r.order.clone(), r.n_params))
            .collect();
        assert_eq!(params["NN(1,1+3)"], 11);
        assert_eq!(params["NN(1,1-3)"], 19);
        assert_eq!(params["NN(2,1-3)"], 26);
    }

    #[test]
    fn report_r_squared_consistency() {
        let series = simulate(&SimSpec::ar(2.0, vec![0.5], 1.0), 150, 6).unwrap();
        let split = series.split_train_test(120).unwrap();
        let spec = quick_search_spec(&["NN(1,1+2)"]);
        let board = run_search(&spec, &split.train, &split.test).unwrap();
        let report = &board.reports[0];
        assert!(report.r_squared <= 1.0);
        // Recompute SST over the same training targets.
        let dm = crate::timeseries::build_design_matrix(
            &split.train,
            &LagSpec::new(vec![1, 2]).unwrap(),
            false,
        )
        .unwrap();
        let mean = dm.targets().iter().sum::<f64>() / dm.targets().len() as f64;
        let sst: f64 = dm.targets().iter().map(|y| (y - mean) * (y - mean)).sum();
        let expected = 1.0 - report.sse_train / sst;
        assert!((report.r_squared - expected).abs() < 1e-12);
    }
}
