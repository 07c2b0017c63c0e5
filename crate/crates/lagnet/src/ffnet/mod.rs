//! Feedforward autoregressive networks: y = phi(w_0 + sum_j w_j f(b_j + sum_i w_ij x_i)),
//! evaluated over lagged inputs, trained by momentum gradient descent.

mod backprop;
mod forecast;
mod train;

pub use backprop::{backprop_gradient, momentum_step, Gradient};
pub use forecast::{forecast, ForecastMode};
pub use train::{
    fit_series, finalize_net, prepare_scaled, train, Observation, Regime, ScaledData,
    StopMonitor, StopReason, TrainConfig,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{LagSpec, Scaler};

/// Node activation functions and their exact derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation value a = f(x).
    #[inline]
    pub fn derivative_from_value(self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" | "logistic" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(Error::InvalidParameter {
                name: "activation".into(),
                reason: format!("unknown activation '{other}'"),
            }),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Network architecture: lag inputs, optional exogenous inputs, hidden layer
/// sizes and the activation pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub lags: LagSpec,
    pub exog_count: usize,
    pub hidden: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl NetConfig {
    pub fn new(
        lags: LagSpec,
        exog_count: usize,
        hidden: Vec<usize>,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        if hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::InvalidParameter {
                name: "hidden".into(),
                reason: "at least one hidden layer, all sizes >= 1".into(),
            });
        }
        Ok(Self {
            lags,
            exog_count,
            hidden,
            hidden_activation,
            output_activation,
        })
    }

    /// Input node count: one per lag plus one per exogenous channel.
    pub fn k(&self) -> usize {
        self.lags.len() + self.exog_count
    }

    /// Layer sizes from input to last hidden layer.
    pub(crate) fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 1);
        sizes.push(self.k());
        sizes.extend_from_slice(&self.hidden);
        sizes
    }

    pub fn activation_pair(&self) -> String {
        format!("{}/{}", self.hidden_activation, self.output_activation)
    }
}

/// Total weight count: for each hidden layer, size_l * (size_{l-1} + 1)
/// per-node incoming weights plus bias, then size_last + 1 for the output node.
pub fn count_parameters(config: &NetConfig) -> usize {
    let sizes = config.layer_sizes();
    let hidden: usize = sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
    hidden + sizes.last().expect("layer sizes non-empty") + 1
}

/// Flat parameter vector. Layout: hidden layers in order, node-major, each
/// node's incoming weights followed by its bias; then the output node's
/// weights followed by the output bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub Vec<f64>);

impl Weights {
    pub fn zeros(config: &NetConfig) -> Self {
        Weights(vec![0.0; count_parameters(config)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Draws each weight uniformly from [-half_width, half_width] out of a
/// deterministic seeded stream.
pub fn init_weights(config: &NetConfig, seed: u64, half_width: f64) -> Weights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = count_parameters(config);
    Weights((0..n).map(|_| rng.gen_range(-half_width..half_width)).collect())
}

/// Evaluates the network on one input row. Pure function of its arguments.
pub fn forward(config: &NetConfig, weights: &Weights, input: &[f64]) -> Result<f64> {
    debug_assert_eq!(input.len(), config.k(), "input length must equal k");
    if input.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "network input".into(),
        });
    }
    let w = weights.as_slice();
    let mut act: Vec<f64> = input.to_vec();
    let mut cursor = 0;
    for &size in &config.hidden {
        let prev = act.len();
        let mut next = Vec::with_capacity(size);
        for _ in 0..size {
            let mut z = w[cursor + prev]; // bias
            for (i, a) in act.iter().enumerate() {
                z += w[cursor + i] * a;
            }
            cursor += prev + 1;
            next.push(config.hidden_activation.apply(z));
        }
        act = next;
    }
    let mut z = w[cursor + act.len()]; // output bias
    for (i, a) in act.iter().enumerate() {
        z += w[cursor + i] * a;
    }
    Ok(config.output_activation.apply(z))
}

/// A fitted network together with the scalers that map between original
/// units and the training scale. Residuals are kept in original units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedNet {
    pub config: NetConfig,
    pub weights: Weights,
    pub input_scaler: Option<Scaler>,
    pub target_scaler: Option<Scaler>,
    /// Full-data SSE after each epoch, on the training scale.
    pub trace: Vec<f64>,
    /// Best (minimum) trace entry; the stored weights are from that epoch.
    pub train_sse: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub seed: u64,
    pub epochs: usize,
    pub stop_reason: StopReason,
}

impl TrainedNet {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Scaled prediction for an unscaled input row.
    pub(crate) fn predict_row(&self, row: &[f64]) -> Result<f64> {
        let mut row = row.to_vec();
        if let Some(scaler) = &self.input_scaler {
            scaler.apply_row(&mut row);
        }
        let y = forward(&self.config, &self.weights, &row)?;
        Ok(match &self.target_scaler {
            Some(scaler) => scaler.invert_value(0, y),
            None => y,
        })
    }
}
