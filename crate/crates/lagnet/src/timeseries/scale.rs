//! Invertible per-channel scaling. Inputs are typically z-scored; targets are
//! squeezed into a bounded interval when the output activation saturates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::DesignMatrix;

/// Scaling family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalerKind {
    ZScore,
    /// Min-max onto the interval (lo, hi).
    MinMax { lo: f64, hi: f64 },
}

/// Fitted per-channel parameters. `apply` and `invert` are exact inverses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scaler {
    ZScore {
        means: Vec<f64>,
        stds: Vec<f64>,
    },
    MinMax {
        mins: Vec<f64>,
        maxs: Vec<f64>,
        lo: f64,
        hi: f64,
    },
}

impl Scaler {
    /// Fits one set of parameters per channel.
    pub fn fit(kind: ScalerKind, channels: &[(&str, &[f64])]) -> Result<Self> {
        match kind {
            ScalerKind::ZScore => {
                let mut means = Vec::with_capacity(channels.len());
                let mut stds = Vec::with_capacity(channels.len());
                for (name, data) in channels {
                    let n = data.len() as f64;
                    let mean = data.iter().sum::<f64>() / n;
                    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                    let std = var.sqrt();
                    if std <= 0.0 {
                        return Err(Error::DegenerateChannel {
                            name: (*name).into(),
                        });
                    }
                    means.push(mean);
                    stds.push(std);
                }
                Ok(Scaler::ZScore { means, stds })
            }
            ScalerKind::MinMax { lo, hi } => {
                let mut mins = Vec::with_capacity(channels.len());
                let mut maxs = Vec::with_capacity(channels.len());
                for (name, data) in channels {
                    let min = data.iter().cloned().fold(f64::INFINITY, f64::min);
                    let max = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    if max.is_nan() || min.is_nan() || max <= min {
                        return Err(Error::DegenerateChannel {
                            name: (*name).into(),
                        });
                    }
                    mins.push(min);
                    maxs.push(max);
                }
                Ok(Scaler::MinMax { mins, maxs, lo, hi })
            }
        }
    }

    /// Fits over the columns of a design matrix (one channel per column).
    pub fn fit_matrix(kind: ScalerKind, matrix: &DesignMatrix) -> Result<Self> {
        let columns: Vec<Vec<f64>> = (0..matrix.k()).map(|j| matrix.column(j)).collect();
        let names: Vec<String> = (0..matrix.k()).map(|j| format!("col{j}")).collect();
        let channels: Vec<(&str, &[f64])> = names
            .iter()
            .map(String::as_str)
            .zip(columns.iter().map(Vec::as_slice))
            .collect();
        Scaler::fit(kind, &channels)
    }

    pub fn channels(&self) -> usize {
        match self {
            Scaler::ZScore { means, .. } => means.len(),
            Scaler::MinMax { mins, .. } => mins.len(),
        }
    }

    pub fn apply_value(&self, channel: usize, x: f64) -> f64 {
        match self {
            Scaler::ZScore { means, stds } => (x - means[channel]) / stds[channel],
            Scaler::MinMax { mins, maxs, lo, hi } => {
                lo + (x - mins[channel]) / (maxs[channel] - mins[channel]) * (hi - lo)
            }
        }
    }

    pub fn invert_value(&self, channel: usize, x: f64) -> f64 {
        match self {
            Scaler::ZScore { means, stds } => x * stds[channel] + means[channel],
            Scaler::MinMax { mins, maxs, lo, hi } => {
                mins[channel] + (x - lo) / (hi - lo) * (maxs[channel] - mins[channel])
            }
        }
    }

    /// Scales a row in place, one channel per position.
    pub fn apply_row(&self, row: &mut [f64]) {
        for (j, x) in row.iter_mut().enumerate() {
            *x = self.apply_value(j, *x);
        }
    }

    /// Scales every input row of a matrix in place.
    pub fn apply_matrix(&self, matrix: &mut DesignMatrix) {
        for i in 0..matrix.rows() {
            self.apply_row(matrix.input_row_mut(i));
        }
    }
}
