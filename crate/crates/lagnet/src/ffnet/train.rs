//! Momentum gradient-descent training under batch, mini-batch and online
//! regimes, with the plateau stopping rule and best-epoch weight selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffnet::{
    backprop_gradient, forward, init_weights, momentum_step, NetConfig, TrainedNet,
};
use crate::rng::derive_seed;
use crate::timeseries::{build_design_matrix, DesignMatrix, Scaler, ScalerKind, TimeSeries};

/// How records are grouped into weight updates within an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// One update per epoch from the full-batch gradient.
    Batch,
    /// One update per group of the given size.
    MiniBatch(usize),
    /// One update per record.
    Online,
}

/// Why training stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxEpochs,
}

/// Training options. Each update uses the mean gradient of its group, damped
/// by (1 - momentum) before entering the velocity accumulator, so the
/// learning rate is comparable across regimes, dataset sizes and momentum
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub regime: Regime,
    pub max_epochs: usize,
    /// Consecutive epochs without SSE improvement tolerated before stopping.
    /// Zero disables early stopping.
    pub patience: usize,
    /// Shuffle record order each epoch (mini-batch and online only).
    pub shuffle: bool,
    pub seed: u64,
    /// Half-width of the symmetric uniform weight initialization.
    pub init_half_width: f64,
    /// Optional multiplicative learning-rate decay applied on each
    /// non-improving epoch.
    pub lr_decay: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.4,
            momentum: 0.9,
            regime: Regime::Batch,
            max_epochs: 2000,
            patience: 1,
            shuffle: false,
            seed: 0,
            init_half_width: 0.5,
            lr_decay: None,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name: &str, reason: &str| {
            Err(Error::InvalidParameter {
                name: name.into(),
                reason: reason.into(),
            })
        };
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return invalid("learning_rate", "must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return invalid("momentum", "must be in [0, 1)");
        }
        if let Regime::MiniBatch(size) = self.regime {
            if size == 0 {
                return invalid("batch_size", "must be >= 1");
            }
        }
        if self.max_epochs == 0 {
            return invalid("max_epochs", "must be >= 1");
        }
        if self.init_half_width.is_nan() || self.init_half_width <= 0.0 {
            return invalid("init_half_width", "must be positive");
        }
        if let Some(f) = self.lr_decay {
            if !(f > 0.0 && f <= 1.0) {
                return invalid("lr_decay", "must be in (0, 1]");
            }
        }
        Ok(())
    }
}

/// Tracks the best SSE seen and counts consecutive non-improving epochs.
#[derive(Debug, Clone)]
pub struct StopMonitor {
    patience: usize,
    best: f64,
    streak: usize,
}

/// Outcome of observing one epoch's SSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Improved,
    Continue,
    Stop,
}

impl StopMonitor {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            streak: 0,
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    /// Feeds one epoch's SSE; strict improvement over the best resets the
    /// streak, a plateau of `patience` epochs stops.
    pub fn observe(&mut self, sse: f64) -> Observation {
        if sse < self.best {
            self.best = sse;
            self.streak = 0;
            Observation::Improved
        } else {
            self.streak += 1;
            if self.patience > 0 && self.streak >= self.patience {
                Observation::Stop
            } else {
                Observation::Continue
            }
        }
    }
}

fn epoch_groups(tc: &TrainConfig, n_rows: usize, epoch: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n_rows).collect();
    let group_size = match tc.regime {
        Regime::Batch => return vec![order],
        Regime::MiniBatch(size) => size,
        Regime::Online => 1,
    };
    if tc.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(tc.seed, epoch as u64));
        order.shuffle(&mut rng);
    }
    order.chunks(group_size).map(<[usize]>::to_vec).collect()
}

fn full_data_sse(config: &NetConfig, weights: &crate::ffnet::Weights, data: &DesignMatrix) -> f64 {
    (0..data.rows())
        .map(|i| {
            let pred = forward(config, weights, data.input_row(i)).unwrap_or(f64::NAN);
            let err = pred - data.targets()[i];
            err * err
        })
        .sum()
}

/// Trains on the given design matrix, which is assumed to already be on the
/// training scale (the `fit_series` pipeline handles scaling). Returns the
/// weights from the best-SSE epoch.
pub fn train(config: &NetConfig, data: &DesignMatrix, tc: &TrainConfig) -> Result<TrainedNet> {
    tc.validate()?;
    if data.rows() == 0 {
        return Err(Error::EmptyData);
    }
    if data.k() != config.k() {
        return Err(Error::LengthMismatch {
            left: data.k(),
            right: config.k(),
        });
    }

    let mut weights = init_weights(config, tc.seed, tc.init_half_width);
    let mut velocity = vec![0.0; weights.len()];
    let mut lr = tc.learning_rate;
    let mut trace = Vec::new();
    let mut monitor = StopMonitor::new(tc.patience);
    let mut best_weights = weights.clone();
    let mut stop_reason = StopReason::MaxEpochs;

    // Each update feeds the momentum accumulator the group-mean gradient
    // damped by (1 - momentum), so the accumulated step settles at
    // learning_rate * mean gradient regardless of momentum, regime or
    // dataset size. High momentum then smooths the path instead of
    // multiplying the step, which keeps the 0.4/0.9 defaults stable.
    let damping = 1.0 - tc.momentum;
    for epoch in 1..=tc.max_epochs {
        for group in epoch_groups(tc, data.rows(), epoch) {
            let mut grad = backprop_gradient(config, &weights, data, &group)?;
            grad.scale(damping / group.len() as f64);
            momentum_step(&mut weights, &mut velocity, &grad, lr, tc.momentum);
        }
        let sse = full_data_sse(config, &weights, data);
        if !sse.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        trace.push(sse);
        match monitor.observe(sse) {
            Observation::Improved => best_weights = weights.clone(),
            Observation::Continue => {
                if let Some(f) = tc.lr_decay {
                    lr *= f;
                }
            }
            Observation::Stop => {
                stop_reason = StopReason::Patience;
                break;
            }
        }
    }

    let train_sse = monitor.best();
    let residuals = (0..data.rows())
        .map(|i| {
            data.targets()[i]
                - forward(config, &best_weights, data.input_row(i)).expect("finite inputs")
        })
        .collect();

    Ok(TrainedNet {
        config: config.clone(),
        weights: best_weights,
        input_scaler: None,
        target_scaler: None,
        epochs: trace.len(),
        trace,
        train_sse,
        residuals,
        seed: tc.seed,
        stop_reason,
    })
}

/// Design matrix on both scales plus the fitted scalers, ready for training.
#[derive(Debug, Clone)]
pub struct ScaledData {
    pub raw: DesignMatrix,
    pub scaled: DesignMatrix,
    pub input_scaler: Scaler,
    pub target_scaler: Option<Scaler>,
}

/// Builds the lagged design matrix for `config` over `series`, z-scores the
/// inputs, and squeezes the targets into the output activation's range when
/// it saturates (sigmoid -> (0.1, 0.9), tanh -> (-0.8, 0.8)).
pub fn prepare_scaled(config: &NetConfig, series: &TimeSeries) -> Result<ScaledData> {
    if config.exog_count > 0 && config.exog_count != series.exog_count() {
        return Err(Error::InvalidParameter {
            name: "exog_count".into(),
            reason: format!(
                "config expects {} exog channels, series has {}",
                config.exog_count,
                series.exog_count()
            ),
        });
    }
    let raw = build_design_matrix(series, &config.lags, config.exog_count > 0)?;
    let input_scaler = Scaler::fit_matrix(ScalerKind::ZScore, &raw)?;
    let target_scaler = match config.output_activation {
        super::Activation::Sigmoid => Some(Scaler::fit(
            ScalerKind::MinMax { lo: 0.1, hi: 0.9 },
            &[("target", raw.targets())],
        )?),
        super::Activation::Tanh => Some(Scaler::fit(
            ScalerKind::MinMax { lo: -0.8, hi: 0.8 },
            &[("target", raw.targets())],
        )?),
        super::Activation::Identity => None,
    };

    let mut scaled = raw.clone();
    input_scaler.apply_matrix(&mut scaled);
    if let Some(ts) = &target_scaler {
        for t in scaled.targets_mut() {
            *t = ts.apply_value(0, *t);
        }
    }
    Ok(ScaledData {
        raw,
        scaled,
        input_scaler,
        target_scaler,
    })
}

/// Attaches the scalers to a net trained on `data.scaled` and recomputes its
/// residuals in original units.
pub fn finalize_net(mut net: TrainedNet, data: &ScaledData) -> TrainedNet {
    net.input_scaler = Some(data.input_scaler.clone());
    net.target_scaler = data.target_scaler.clone();
    net.residuals = (0..data.raw.rows())
        .map(|i| {
            let pred = net
                .predict_row(data.raw.input_row(i))
                .expect("finite inputs");
            data.raw.targets()[i] - pred
        })
        .collect();
    net
}

/// End-to-end fit on a series: scale, train, report residuals in original
/// units.
pub fn fit_series(config: &NetConfig, series: &TimeSeries, tc: &TrainConfig) -> Result<TrainedNet> {
    let data = prepare_scaled(config, series)?;
    let net = train(config, &data.scaled, tc)?;
    Ok(finalize_net(net, &data))
}
