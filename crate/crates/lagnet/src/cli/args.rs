//! Flag definitions. Every command accepts `--config <json>` holding the same
//! field names; explicit flags override file values.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "lagnet",
    version,
    about = "Autoregressive neural-network forecasting with an ARIMAX baseline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic series CSV (AR, ARMA or threshold-AR).
    Simulate(SimulateArgs),
    /// Fit one network on the training window and save the model.
    FitNn(FitNnArgs),
    /// Fit an ARIMAX baseline on the training window and save the model.
    FitArima(FitArimaArgs),
    /// Evaluate candidate architectures and write a ranked leaderboard.
    Search(SearchArgs),
    /// Forecast from a saved model file.
    Forecast(ForecastArgs),
    /// Fit NN and ARIMAX, forecast the test window, and compare.
    Compare(CompareArgs),
}

/// Fills `None` fields of `$args` from the `$overlay` parsed out of --config.
macro_rules! merge_opt {
    ($args:expr, $overlay:expr, $($field:ident),+ $(,)?) => {
        $( if $args.$field.is_none() { $args.$field = $overlay.$field.clone(); } )+
    };
}
pub(crate) use merge_opt;

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct SimulateArgs {
    /// JSON file supplying defaults for any flag below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Generator family: ar1, ar, arma or tar.
    #[arg(long)]
    pub kind: Option<String>,
    /// Intercept (lower-regime intercept for tar).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// AR coefficients, comma separated (lower-regime phi for tar).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Option<Vec<f64>>,
    /// MA coefficients, comma separated (arma only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Upper-regime intercept (tar).
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    /// Upper-regime AR(1) coefficient (tar).
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    /// Threshold on the previous value (tar).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Adds an exogenous count channel with this additive coefficient.
    #[arg(long, allow_hyphen_values = true)]
    pub exog_beta: Option<f64>,
    /// Poisson rate of the exogenous counts (default 3).
    #[arg(long)]
    pub exog_lambda: Option<f64>,
    /// Number of observations to emit.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct DataArgs {
    /// Input CSV path.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Target column name.
    #[arg(long)]
    pub target: Option<String>,
    /// Exogenous column names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub exog: Option<Vec<String>>,
    /// Date column, preserved but never interpreted.
    #[arg(long)]
    pub date_column: Option<String>,
    /// Training window length (first N observations).
    #[arg(long)]
    pub train: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct TrainArgs {
    /// Learning rate (default 0.4).
    #[arg(long)]
    pub lr: Option<f64>,
    /// Momentum term (default 0.9).
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Training regime: batch, mini-batch or online (default batch).
    #[arg(long)]
    pub regime: Option<String>,
    /// Group size for the mini-batch regime (default 32).
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Epoch budget (default 2000).
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Epochs without improvement before stopping; 0 runs the full epoch
    /// budget and keeps the best epoch (default 0).
    #[arg(long)]
    pub patience: Option<usize>,
    /// Shuffle record order each epoch (mini-batch/online).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub shuffle: Option<bool>,
    /// Half-width of the uniform weight initialization (default 0.5).
    #[arg(long)]
    pub init_range: Option<f64>,
    /// Multiplicative learning-rate decay per non-improving epoch.
    #[arg(long)]
    pub lr_decay: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct FitNnArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Network order, e.g. "NN(1,1+3)".
    #[arg(long)]
    pub order: Option<String>,
    /// Explicit hidden sizes, comma separated (overrides --hidden-rule).
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// Hidden-size rule: preset, n or 2n+1 (default preset).
    #[arg(long)]
    pub hidden_rule: Option<String>,
    /// Hidden/output activation pair, e.g. "sigmoid/identity".
    #[arg(long)]
    pub activations: Option<String>,
    /// Random restarts; the best final SSE wins (default 1).
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub train_args: TrainArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct FitArimaArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Orders as "p,d,q", e.g. "2,1,1".
    #[arg(long)]
    pub arimax: Option<String>,
    /// Drop the intercept term.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_intercept: Option<bool>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct SearchArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Candidate orders, comma separated: "NN(1,1+2),NN(1,1-3)".
    #[arg(long)]
    pub orders: Option<String>,
    /// Activation pairs to try, comma separated (default sigmoid/identity).
    #[arg(long)]
    pub activations: Option<String>,
    /// Explicit hidden sizes applied to every candidate.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// Hidden-size rule: preset, n or 2n+1 (default preset).
    #[arg(long)]
    pub hidden_rule: Option<String>,
    /// Random restarts per candidate (default 5).
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub train_args: TrainArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct ForecastArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Saved model file (from fit-nn or fit-arima).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Steps to forecast (default: everything after the training window).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// one-step or iterated (default one-step).
    #[arg(long)]
    pub mode: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct CompareArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Network order, e.g. "NN(1,1+3)".
    #[arg(long)]
    pub order: Option<String>,
    /// Hidden/output activation pair (default sigmoid/identity).
    #[arg(long)]
    pub activations: Option<String>,
    /// Explicit hidden sizes for the network.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// ARIMAX orders as "p,d,q".
    #[arg(long)]
    pub arimax: Option<String>,
    /// Drop the ARIMAX intercept.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_intercept: Option<bool>,
    /// Random restarts for the network fit (default 5).
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Forecast window length (default: the whole test window).
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub train_args: TrainArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write an SVG overlaying actual and predicted curves.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub plot: Option<bool>,
}

/// Splits a comma-separated order list, keeping commas inside NN(...) intact.
pub fn split_orders(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                if !current.trim().is_empty() {
                    parts.push(current.trim().to_string());
                }
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_list_split_respects_parens() {
        assert_eq!(
            split_orders("NN(1,1+2),NN(1,1-3),NN(1,1+3)"),
            vec!["NN(1,1+2)", "NN(1,1-3)", "NN(1,1+3)"]
        );
        assert_eq!(split_orders(" NN(2,1-3) "), vec!["NN(2,1-3)"]);
        assert!(split_orders("").is_empty());
    }
}
