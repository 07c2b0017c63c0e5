//! Time-series data model: ingestion, splitting, lagged design matrices,
//! scaling, differencing and synthetic generators.

mod csv;
mod scale;
mod sim;

pub use csv::{load_csv, write_csv, CsvSchema};
pub(crate) use csv::quote_csv_field;
pub use scale::{Scaler, ScalerKind};
pub use sim::{simulate, ExogEffect, SimProcess, SimSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered univariate series with zero or more aligned exogenous channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    values: Vec<f64>,
    exog: Vec<(String, Vec<f64>)>,
    /// Date labels carried through from ingestion, never interpreted.
    dates: Option<Vec<String>>,
    /// Index offset of the first observation relative to the original series.
    origin: usize,
}

impl TimeSeries {
    /// Builds a series from raw values. Rejects empty or non-finite input.
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("series value {bad}"),
            });
        }
        Ok(Self {
            name: name.into(),
            values,
            exog: Vec::new(),
            dates: None,
            origin: 0,
        })
    }

    /// Attaches an exogenous channel aligned index-for-index with the values.
    pub fn with_exog(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.values.len() {
            return Err(Error::ExogLengthMismatch {
                name,
                len: values.len(),
                expected: self.values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("exog '{name}' value {bad}"),
            });
        }
        self.exog.push((name, values));
        Ok(self)
    }

    pub(crate) fn with_dates(mut self, dates: Vec<String>) -> Self {
        self.dates = Some(dates);
        self
    }

    /// Internal constructor for derived series (splits, differences) that may
    /// legitimately be empty.
    fn derived(&self, values: Vec<f64>, exog: Vec<(String, Vec<f64>)>, origin: usize) -> Self {
        let start = origin - self.origin;
        let dates = self
            .dates
            .as_ref()
            .map(|d| d[start..start + values.len()].to_vec());
        Self {
            name: self.name.clone(),
            values,
            exog,
            dates,
            origin,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn exog_count(&self) -> usize {
        self.exog.len()
    }

    pub fn exog_channels(&self) -> &[(String, Vec<f64>)] {
        &self.exog
    }

    pub fn exog_values(&self, channel: usize) -> &[f64] {
        &self.exog[channel].1
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn dates(&self) -> Option<&[String]> {
        self.dates.as_deref()
    }

    /// Splits into the first `n_train` observations and the remainder.
    pub fn split_train_test(&self, n_train: usize) -> Result<TrainTestSplit> {
        if n_train == 0 || n_train > self.len() {
            return Err(Error::InvalidSplit {
                n_train,
                len: self.len(),
            });
        }
        let split_exog = |range: std::ops::Range<usize>| {
            self.exog
                .iter()
                .map(|(n, v)| (n.clone(), v[range.clone()].to_vec()))
                .collect::<Vec<_>>()
        };
        let train = self.derived(
            self.values[..n_train].to_vec(),
            split_exog(0..n_train),
            self.origin,
        );
        let test = self.derived(
            self.values[n_train..].to_vec(),
            split_exog(n_train..self.len()),
            self.origin + n_train,
        );
        let empty_test_warning = test.is_empty();
        Ok(TrainTestSplit {
            train,
            test,
            empty_test_warning,
        })
    }

    /// Applies first differencing `d` times. Exogenous channels are truncated
    /// from the front to stay aligned with the shortened series.
    pub fn difference(&self, d: usize) -> Result<TimeSeries> {
        if d >= self.len() {
            return Err(Error::DifferenceTooDeep { d, len: self.len() });
        }
        let mut values = self.values.clone();
        for _ in 0..d {
            values = values.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let exog = self
            .exog
            .iter()
            .map(|(n, v)| (n.clone(), v[d..].to_vec()))
            .collect();
        Ok(self.derived(values, exog, self.origin + d))
    }
}

/// Result of a train/test split. `empty_test_warning` is set when the whole
/// series went into the training window.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: TimeSeries,
    pub test: TimeSeries,
    pub empty_test_warning: bool,
}

/// Integrates a `d`-times differenced series back to levels.
///
/// `initial_levels` must hold the first `d` values of the original series.
/// Exact inverse of repeated first differencing.
pub fn undifference(diffs: &[f64], initial_levels: &[f64]) -> Vec<f64> {
    let d = initial_levels.len();
    if d == 0 {
        return diffs.to_vec();
    }
    // Heads of each intermediate difference level: h[j] = (Δ^j y)[0].
    let mut heads = Vec::with_capacity(d);
    let mut level = initial_levels.to_vec();
    for _ in 0..d {
        heads.push(level[0]);
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let mut cur = diffs.to_vec();
    for j in (0..d).rev() {
        let mut out = Vec::with_capacity(cur.len() + 1);
        out.push(heads[j]);
        let mut acc = heads[j];
        for &x in &cur {
            acc += x;
            out.push(acc);
        }
        cur = out;
    }
    cur
}

/// A set of distinct positive lags, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagSpec {
    lags: Vec<usize>,
}

impl LagSpec {
    /// Sorts and deduplicates; rejects empty sets and zero lags.
    pub fn new(mut lags: Vec<usize>) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::InvalidLag("lag set is empty".into()));
        }
        if lags.contains(&0) {
            return Err(Error::InvalidLag("lags must be >= 1".into()));
        }
        lags.sort_unstable();
        lags.dedup();
        Ok(Self { lags })
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_lag(&self) -> usize {
        *self.lags.last().expect("lag set is non-empty")
    }

    /// True when the set is exactly {a, a+1, ..., b}.
    pub fn is_contiguous(&self) -> bool {
        self.lags.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

/// Lagged regression layout: one row per usable time point, lag columns
/// ascending, then exogenous channels in declared order.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    k: usize,
    max_lag: usize,
}

impl DesignMatrix {
    /// Builds a matrix from explicit rows; used by tests and synthetic fits.
    pub fn from_parts(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: inputs.len(),
                right: targets.len(),
            });
        }
        let k = inputs[0].len();
        if k == 0 || inputs.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParameter {
                name: "inputs".into(),
                reason: "rows must be non-empty and rectangular".into(),
            });
        }
        Ok(Self {
            inputs: inputs.into_iter().flatten().collect(),
            targets,
            k,
            max_lag: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.targets.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    pub fn input_row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.k..(i + 1) * self.k]
    }

    pub fn input_row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.inputs[i * self.k..(i + 1) * self.k]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn targets_mut(&mut self) -> &mut [f64] {
        &mut self.targets
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.input_row(i)[j]).collect()
    }
}

/// Builds the lagged design matrix for `series`.
///
/// Row for time t holds (y_{t-l1}, ..., y_{t-lm}) followed, when requested,
/// by each exogenous channel's contemporaneous value x_t; the target is y_t.
pub fn build_design_matrix(
    series: &TimeSeries,
    lags: &LagSpec,
    include_exog: bool,
) -> Result<DesignMatrix> {
    let n = series.len();
    let max_lag = lags.max_lag();
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, len: n });
    }
    let exog_count = if include_exog { series.exog_count() } else { 0 };
    let k = lags.len() + exog_count;
    let rows = n - max_lag;
    let mut inputs = Vec::with_capacity(rows * k);
    let mut targets = Vec::with_capacity(rows);
    let y = series.values();
    for t in max_lag..n {
        for &lag in lags.lags() {
            inputs.push(y[t - lag]);
        }
        for ch in 0..exog_count {
            inputs.push(series.exog_values(ch)[t]);
        }
        targets.push(y[t]);
    }
    Ok(DesignMatrix {
        inputs,
        targets,
        k,
        max_lag,
    })
}
