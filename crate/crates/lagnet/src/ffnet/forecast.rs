//! One-step-ahead and iterated forecasting from a trained network.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffnet::TrainedNet;
use crate::timeseries::TimeSeries;

/// One-step feeds true lagged observations at every step; iterated feeds its
/// own predictions back as lag inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastMode {
    OneStep,
    Iterated,
}

impl std::str::FromStr for ForecastMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-step" | "onestep" => Ok(ForecastMode::OneStep),
            "iterated" => Ok(ForecastMode::Iterated),
            other => Err(Error::InvalidParameter {
                name: "mode".into(),
                reason: format!("unknown forecast mode '{other}'"),
            }),
        }
    }
}

/// Forecasts `horizon` steps beyond `history`, in original units.
///
/// `actuals` supplies the realized target values over the horizon (required
/// in one-step mode). `exog_future` supplies each exogenous channel over the
/// horizon (required whenever the network has exogenous inputs).
pub fn forecast(
    net: &TrainedNet,
    history: &TimeSeries,
    horizon: usize,
    mode: ForecastMode,
    actuals: Option<&[f64]>,
    exog_future: Option<&[Vec<f64>]>,
) -> Result<Vec<f64>> {
    let max_lag = net.config.lags.max_lag();
    if history.len() < max_lag {
        return Err(Error::InsufficientHistory {
            needed: max_lag,
            len: history.len(),
        });
    }
    if horizon == 0 {
        return Ok(Vec::new());
    }
    if mode == ForecastMode::OneStep {
        match actuals {
            Some(a) if a.len() >= horizon => {}
            _ => {
                return Err(Error::MissingHorizonData {
                    what: "actual target values (one-step mode)".into(),
                })
            }
        }
    }
    let exog = if net.config.exog_count > 0 {
        match exog_future {
            Some(channels)
                if channels.len() == net.config.exog_count
                    && channels.iter().all(|c| c.len() >= horizon) =>
            {
                Some(channels)
            }
            _ => {
                return Err(Error::MissingHorizonData {
                    what: format!("{} exogenous channel(s)", net.config.exog_count),
                })
            }
        }
    } else {
        None
    };

    let mut working = history.values().to_vec();
    let mut predictions = Vec::with_capacity(horizon);
    for step in 0..horizon {
        let mut row = Vec::with_capacity(net.config.k());
        for &lag in net.config.lags.lags() {
            row.push(working[working.len() - lag]);
        }
        if let Some(channels) = exog {
            for channel in channels {
                row.push(channel[step]);
            }
        }
        let pred = net.predict_row(&row)?;
        predictions.push(pred);
        working.push(match mode {
            ForecastMode::OneStep => actuals.expect("validated above")[step],
            ForecastMode::Iterated => pred,
        });
    }
    Ok(predictions)
}
