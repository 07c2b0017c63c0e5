//! Box-Jenkins ARIMAX(p,d,q) baseline, estimated by conditional sum of
//! squares over a derivative-free simplex search, with recursive forecasting
//! and undifferencing.

mod nelder_mead;

pub use nelder_mead::{nelder_mead, SimplexResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffnet::ForecastMode;
use crate::timeseries::TimeSeries;

/// Model orders. The exogenous coefficients apply to the raw channel values
/// at the differenced-equation time index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub intercept: bool,
    pub exog_count: usize,
}

impl ArimaSpec {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            intercept: true,
            exog_count: 0,
        }
    }

    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn with_exog(mut self, exog_count: usize) -> Self {
        self.exog_count = exog_count;
        self
    }

    /// Rejects the degenerate model with nothing to estimate or integrate.
    pub fn validate(&self) -> Result<()> {
        if self.p + self.d + self.q + self.exog_count == 0 && !self.intercept {
            return Err(Error::InvalidParameter {
                name: "spec".into(),
                reason: "model has no AR, MA, differencing, exog or intercept term".into(),
            });
        }
        Ok(())
    }

    /// Free parameters entering the optimization.
    pub fn n_params(&self) -> usize {
        self.p + self.q + usize::from(self.intercept) + self.exog_count
    }

    pub fn label(&self) -> String {
        if self.exog_count > 0 {
            format!("ARIMAX({},{},{})", self.p, self.d, self.q)
        } else {
            format!("ARIMA({},{},{})", self.p, self.d, self.q)
        }
    }
}

/// Coefficients in Box-Jenkins parameterization: w_t = c + sum phi_i w_{t-i}
/// + sum theta_j e_{t-j} + sum beta_m x_{m,t} + e_t on the differenced scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    pub exog: Vec<f64>,
}

impl ArimaParams {
    pub fn zeros(spec: &ArimaSpec) -> Self {
        Self {
            ar: vec![0.0; spec.p],
            ma: vec![0.0; spec.q],
            intercept: 0.0,
            exog: vec![0.0; spec.exog_count],
        }
    }

    fn to_flat(&self, spec: &ArimaSpec) -> Vec<f64> {
        let mut flat = Vec::with_capacity(spec.n_params());
        flat.extend_from_slice(&self.ar);
        flat.extend_from_slice(&self.ma);
        if spec.intercept {
            flat.push(self.intercept);
        }
        flat.extend_from_slice(&self.exog);
        flat
    }

    fn from_flat(spec: &ArimaSpec, flat: &[f64]) -> Self {
        let mut cursor = 0;
        let ar = flat[cursor..cursor + spec.p].to_vec();
        cursor += spec.p;
        let ma = flat[cursor..cursor + spec.q].to_vec();
        cursor += spec.q;
        let intercept = if spec.intercept {
            cursor += 1;
            flat[cursor - 1]
        } else {
            0.0
        };
        let exog = flat[cursor..cursor + spec.exog_count].to_vec();
        Self {
            ar,
            ma,
            intercept,
            exog,
        }
    }

    fn all_finite(&self) -> bool {
        self.ar
            .iter()
            .chain(&self.ma)
            .chain(&self.exog)
            .chain(std::iter::once(&self.intercept))
            .all(|v| v.is_finite())
    }
}

/// Fitted model with conditional-SSE diagnostics. R-squared is computed on
/// the original (undifferenced) scale from one-step in-sample predictions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    pub params: ArimaParams,
    pub sse: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub n_used: usize,
    pub r_squared: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl ArimaFit {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

fn check_lengths(spec: &ArimaSpec, series: &TimeSeries) -> Result<()> {
    let needed = spec.d + spec.p.max(spec.q);
    if series.len() <= needed {
        return Err(Error::SeriesTooShort {
            needed,
            len: series.len(),
        });
    }
    if series.exog_count() != spec.exog_count {
        return Err(Error::InvalidParameter {
            name: "exog_count".into(),
            reason: format!(
                "spec expects {} exog channels, series has {}",
                spec.exog_count,
                series.exog_count()
            ),
        });
    }
    Ok(())
}

/// Recursive residuals on a differenced working series. Presample residuals
/// are fixed at zero and the first p values condition the recursion.
fn recurse_residuals(
    spec: &ArimaSpec,
    params: &ArimaParams,
    w: &[f64],
    exog: &[(String, Vec<f64>)],
) -> Vec<f64> {
    let m = w.len();
    let mut resid = vec![0.0; m];
    for t in spec.p..m {
        let mut pred = params.intercept;
        for (i, phi) in params.ar.iter().enumerate() {
            pred += phi * w[t - 1 - i];
        }
        for (j, theta) in params.ma.iter().enumerate() {
            if t > j {
                pred += theta * resid[t - 1 - j];
            }
        }
        for (beta, (_, x)) in params.exog.iter().zip(exog) {
            pred += beta * x[t];
        }
        resid[t] = w[t] - pred;
    }
    resid
}

/// Conditional sum of squares of `params` on `series`: differences d times,
/// recurses residuals with zero presample, and sums squares over the
/// non-conditioning points. Returns (sse, residuals).
pub fn css_objective(
    spec: &ArimaSpec,
    params: &ArimaParams,
    series: &TimeSeries,
) -> Result<(f64, Vec<f64>)> {
    spec.validate()?;
    check_lengths(spec, series)?;
    if !params.all_finite() {
        return Err(Error::NonFinite {
            context: "arima parameters".into(),
        });
    }
    let diffed = series.difference(spec.d)?;
    let resid = recurse_residuals(spec, params, diffed.values(), diffed.exog_channels());
    let sse = resid[spec.p..].iter().map(|e| e * e).sum();
    Ok((sse, resid[spec.p..].to_vec()))
}

/// Minimum modulus of the roots of 1 + c_1 z + ... + c_n z^n, via
/// Durand-Kerner with a fixed deterministic iteration budget.
fn min_root_modulus(coeffs_tail: &[f64]) -> Option<f64> {
    let n = coeffs_tail.len();
    if n == 0 || coeffs_tail.iter().all(|c| c.abs() < 1e-12) {
        return None;
    }
    // Full polynomial, ascending powers, constant term 1.
    let mut poly = Vec::with_capacity(n + 1);
    poly.push(1.0);
    poly.extend_from_slice(coeffs_tail);
    while poly.last().is_some_and(|c| c.abs() < 1e-12) && poly.len() > 1 {
        poly.pop();
    }
    let deg = poly.len() - 1;
    if deg == 0 {
        return None;
    }
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for &c in poly.iter().rev() {
            acc = (acc.0 * z.0 - acc.1 * z.1 + c, acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };
    // Distinct deterministic starting points on a circle of radius 0.4 + i0.9-ish.
    let mut roots: Vec<(f64, f64)> = (0..deg)
        .map(|i| {
            let angle = 0.7 + 2.0 * std::f64::consts::PI * i as f64 / deg as f64;
            (1.2 * angle.cos(), 1.2 * angle.sin())
        })
        .collect();
    for _ in 0..200 {
        let prev = roots.clone();
        for i in 0..deg {
            let num = eval(prev[i]);
            let mut den = (poly[deg], 0.0);
            for (j, r) in prev.iter().enumerate() {
                if j != i {
                    let diff = (prev[i].0 - r.0, prev[i].1 - r.1);
                    den = (
                        den.0 * diff.0 - den.1 * diff.1,
                        den.0 * diff.1 + den.1 * diff.0,
                    );
                }
            }
            let norm = den.0 * den.0 + den.1 * den.1;
            if norm < 1e-300 {
                continue;
            }
            let quot = (
                (num.0 * den.0 + num.1 * den.1) / norm,
                (num.1 * den.0 - num.0 * den.1) / norm,
            );
            roots[i] = (prev[i].0 - quot.0, prev[i].1 - quot.1);
        }
    }
    roots
        .iter()
        .map(|(re, im)| (re * re + im * im).sqrt())
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
}

fn root_warnings(params: &ArimaParams) -> Vec<String> {
    let mut warnings = Vec::new();
    // AR polynomial 1 - phi_1 z - ... - phi_p z^p.
    let ar_tail: Vec<f64> = params.ar.iter().map(|phi| -phi).collect();
    if let Some(min) = min_root_modulus(&ar_tail) {
        if min <= 1.0 + 1e-8 {
            warnings.push(format!(
                "AR polynomial has a root of modulus {min:.4} (<= 1): fitted process is non-stationary"
            ));
        }
    }
    // MA polynomial 1 + theta_1 z + ... + theta_q z^q.
    if let Some(min) = min_root_modulus(&params.ma) {
        if min <= 1.0 + 1e-8 {
            warnings.push(format!(
                "MA polynomial has a root of modulus {min:.4} (<= 1): fitted process is non-invertible"
            ));
        }
    }
    warnings
}

/// Fits by minimizing the conditional sum of squares. The start point is all
/// zeros except the intercept, which starts at the mean of the d-times
/// differenced series.
pub fn fit_css(spec: &ArimaSpec, series: &TimeSeries) -> Result<ArimaFit> {
    spec.validate()?;
    check_lengths(spec, series)?;
    let diffed = series.difference(spec.d)?;

    let mut start = ArimaParams::zeros(spec);
    if spec.intercept {
        start.intercept = diffed.values().iter().sum::<f64>() / diffed.len() as f64;
    }

    let (params, iterations, converged) = if spec.n_params() == 0 {
        (start, 0, true)
    } else {
        let x0 = start.to_flat(spec);
        let objective = |x: &[f64]| {
            let candidate = ArimaParams::from_flat(spec, x);
            match css_objective(spec, &candidate, series) {
                Ok((sse, _)) => sse,
                Err(_) => f64::INFINITY,
            }
        };
        let result = nelder_mead(objective, &x0, 1e-10, 5000)?;
        (
            ArimaParams::from_flat(spec, &result.x),
            result.iterations,
            result.converged,
        )
    };

    let (sse, residuals) = css_objective(spec, &params, series)?;
    let n_used = residuals.len();

    // One-step in-sample predictions on the level scale differ from the
    // actual levels by exactly the differenced-scale residuals, so the level
    // R-squared uses the CSS directly.
    let level_window = &series.values()[spec.d + spec.p..];
    let mean = level_window.iter().sum::<f64>() / level_window.len() as f64;
    let sst: f64 = level_window.iter().map(|y| (y - mean).powi(2)).sum();
    if sst <= 0.0 {
        return Err(Error::DegenerateChannel {
            name: "target (constant level window)".into(),
        });
    }
    let r_squared = 1.0 - sse / sst;

    Ok(ArimaFit {
        spec: *spec,
        warnings: root_warnings(&params),
        params,
        sse,
        residuals,
        n_used,
        r_squared,
        iterations,
        converged,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// d-th difference at the end of `levels`.
fn last_difference(levels: &[f64], d: usize) -> f64 {
    (0..=d)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(d, i) * levels[levels.len() - 1 - i]
        })
        .sum()
}

/// Undifferencing contribution of the last d observed levels.
fn integration_terms(levels: &[f64], d: usize) -> f64 {
    (1..=d)
        .map(|i| {
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(d, i) * levels[levels.len() - i]
        })
        .sum()
}

/// Forecasts `horizon` steps beyond `history` in original units.
///
/// Future residuals are zero. Iterated mode feeds forecasts back; one-step
/// mode feeds actual values and the realized residuals. Forecasts of the
/// differenced process are undifferenced by cumulative summation from the
/// last observed levels.
pub fn forecast_arima(
    fit: &ArimaFit,
    history: &TimeSeries,
    horizon: usize,
    mode: ForecastMode,
    actuals: Option<&[f64]>,
    exog_future: Option<&[Vec<f64>]>,
) -> Result<Vec<f64>> {
    let spec = &fit.spec;
    let needed = spec.d + spec.p.max(spec.q);
    if history.len() <= needed {
        return Err(Error::InsufficientHistory {
            needed: needed + 1,
            len: history.len(),
        });
    }
    if history.exog_count() != spec.exog_count {
        return Err(Error::InvalidParameter {
            name: "exog_count".into(),
            reason: "history exog channels do not match the fitted spec".into(),
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
    let exog = if spec.exog_count > 0 {
        match exog_future {
            Some(channels)
                if channels.len() == spec.exog_count
                    && channels.iter().all(|c| c.len() >= horizon) =>
            {
                Some(channels)
            }
            _ => {
                return Err(Error::MissingHorizonData {
                    what: format!("{} exogenous channel(s)", spec.exog_count),
                })
            }
        }
    } else {
        None
    };

    let diffed = history.difference(spec.d)?;
    let mut w = diffed.values().to_vec();
    let mut resid = recurse_residuals(spec, &fit.params, &w, diffed.exog_channels());
    let mut levels = history.values().to_vec();
    let mut predictions = Vec::with_capacity(horizon);

    for step in 0..horizon {
        let mut w_hat = fit.params.intercept;
        for (i, phi) in fit.params.ar.iter().enumerate() {
            w_hat += phi * w[w.len() - 1 - i];
        }
        for (j, theta) in fit.params.ma.iter().enumerate() {
            if resid.len() > j {
                w_hat += theta * resid[resid.len() - 1 - j];
            }
        }
        if let Some(channels) = exog {
            for (beta, channel) in fit.params.exog.iter().zip(channels) {
                w_hat += beta * channel[step];
            }
        }
        let y_hat = w_hat + integration_terms(&levels, spec.d);
        predictions.push(y_hat);

        match mode {
            ForecastMode::OneStep => {
                let actual = actuals.expect("validated above")[step];
                levels.push(actual);
                let w_new = last_difference(&levels, spec.d);
                w.push(w_new);
                resid.push(w_new - w_hat);
            }
            ForecastMode::Iterated => {
                levels.push(y_hat);
                w.push(w_hat);
                resid.push(0.0);
            }
        }
    }
    Ok(predictions)
}
