//! lagnet: autoregressive neural-network forecasting with a Box-Jenkins
//! ARIMAX baseline.
//!
//! The crate covers the full workflow for univariate series with optional
//! exogenous channels: ingestion and lagged design matrices, feedforward
//! networks trained by momentum gradient descent under batch / mini-batch /
//! online regimes, multi-restart architecture search ranked by test SSE or
//! BIC, conditional-sum-of-squares ARIMAX estimation, and model comparison.

pub mod arima;
pub mod error;
pub mod eval;
pub mod ffnet;
pub mod parallel;
pub mod plot;
mod rng;
pub mod select;
pub mod timeseries;

pub use error::{Error, Result};
