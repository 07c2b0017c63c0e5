//! Seeded synthetic generators: AR(p), ARMA(p,q) and a two-regime threshold
//! autoregression, optionally with an additive exogenous count effect.
//! Output is bit-deterministic per (spec, n, seed).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::timeseries::TimeSeries;

/// Samples discarded before emitting, washing out initial conditions.
const BURN_IN: usize = 100;

/// Process families available to `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SimProcess {
    Ar {
        c: f64,
        phi: Vec<f64>,
        sigma: f64,
    },
    Arma {
        c: f64,
        phi: Vec<f64>,
        theta: Vec<f64>,
        sigma: f64,
    },
    /// Two AR(1) regimes switched by y_{t-1} against the threshold `tau`:
    /// the lower regime applies when y_{t-1} <= tau.
    Tar {
        lower_c: f64,
        lower_phi: f64,
        upper_c: f64,
        upper_phi: f64,
        tau: f64,
        sigma: f64,
    },
}

impl SimProcess {
    fn sigma(&self) -> f64 {
        match self {
            SimProcess::Ar { sigma, .. }
            | SimProcess::Arma { sigma, .. }
            | SimProcess::Tar { sigma, .. } => *sigma,
        }
    }
}

/// Additive exogenous effect beta * x_t with x_t ~ Poisson(lambda) counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExogEffect {
    pub beta: f64,
    pub lambda: f64,
}

/// Full generator description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub process: SimProcess,
    pub exog: Option<ExogEffect>,
}

impl SimSpec {
    pub fn ar(c: f64, phi: Vec<f64>, sigma: f64) -> Self {
        Self {
            process: SimProcess::Ar { c, phi, sigma },
            exog: None,
        }
    }

    pub fn arma(c: f64, phi: Vec<f64>, theta: Vec<f64>, sigma: f64) -> Self {
        Self {
            process: SimProcess::Arma { c, phi, theta, sigma },
            exog: None,
        }
    }

    pub fn tar(lower: (f64, f64), upper: (f64, f64), tau: f64, sigma: f64) -> Self {
        Self {
            process: SimProcess::Tar {
                lower_c: lower.0,
                lower_phi: lower.1,
                upper_c: upper.0,
                upper_phi: upper.1,
                tau,
                sigma,
            },
            exog: None,
        }
    }

    pub fn with_exog(mut self, beta: f64, lambda: f64) -> Self {
        self.exog = Some(ExogEffect { beta, lambda });
        self
    }
}

/// Generates `n` observations from `spec`, deterministically in `seed`.
/// A burn-in of 100 samples is discarded before emitting.
pub fn simulate(spec: &SimSpec, n: usize, seed: u64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: "must be positive".into(),
        });
    }
    let sigma = spec.process.sigma();
    if sigma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma".into(),
            reason: "must be non-negative".into(),
        });
    }
    if let Some(exog) = &spec.exog {
        if exog.lambda <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda".into(),
                reason: "must be positive".into(),
            });
        }
    }

    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let mut exog_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative");

    let total = n + BURN_IN;
    let xs: Option<Vec<f64>> = spec.exog.as_ref().map(|e| {
        let pois = Poisson::new(e.lambda).expect("lambda validated positive");
        (0..total).map(|_| pois.sample(&mut exog_rng)).collect()
    });

    let (p, q) = match &spec.process {
        SimProcess::Ar { phi, .. } => (phi.len(), 0),
        SimProcess::Arma { phi, theta, .. } => (phi.len(), theta.len()),
        SimProcess::Tar { .. } => (1, 0),
    };
    let mut y_hist = vec![0.0f64; p.max(1)];
    let mut e_hist = vec![0.0f64; q.max(1)];
    let mut out = Vec::with_capacity(total);

    for t in 0..total {
        let eps = if sigma > 0.0 {
            normal.sample(&mut noise_rng)
        } else {
            0.0
        };
        let mut y = match &spec.process {
            SimProcess::Ar { c, phi, .. } => {
                c + phi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p * y_hist[y_hist.len() - 1 - i])
                    .sum::<f64>()
            }
            SimProcess::Arma { c, phi, theta, .. } => {
                c + phi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p * y_hist[y_hist.len() - 1 - i])
                    .sum::<f64>()
                    + theta
                        .iter()
                        .enumerate()
                        .map(|(j, th)| th * e_hist[e_hist.len() - 1 - j])
                        .sum::<f64>()
            }
            SimProcess::Tar {
                lower_c,
                lower_phi,
                upper_c,
                upper_phi,
                tau,
                ..
            } => {
                let prev = *y_hist.last().expect("history is non-empty");
                if prev <= *tau {
                    lower_c + lower_phi * prev
                } else {
                    upper_c + upper_phi * prev
                }
            }
        };
        if let (Some(xs), Some(effect)) = (&xs, &spec.exog) {
            y += effect.beta * xs[t];
        }
        y += eps;
        if !y.is_finite() {
            return Err(Error::NonFinite {
                context: format!("simulated value at step {t} (explosive spec?)"),
            });
        }
        y_hist.rotate_left(1);
        *y_hist.last_mut().expect("history is non-empty") = y;
        e_hist.rotate_left(1);
        *e_hist.last_mut().expect("history is non-empty") = eps;
        out.push(y);
    }

    let mut series = TimeSeries::new("y", out[BURN_IN..].to_vec())?;
    if let Some(xs) = xs {
        series = series.with_exog("x", xs[BURN_IN..].to_vec())?;
    }
    Ok(series)
}
