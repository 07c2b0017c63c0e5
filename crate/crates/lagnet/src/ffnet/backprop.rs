//! Exact gradients of the half-SSE loss by backpropagation, and the momentum
//! update rule.

use crate::error::{Error, Result};
use crate::ffnet::{count_parameters, NetConfig, Weights};
use crate::timeseries::DesignMatrix;

/// Gradient of L = 1/2 * sum_batch (forward - target)^2, flat in the weight
/// layout, together with the loss value.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: Vec<f64>,
    pub loss: f64,
}

impl Gradient {
    pub fn zeros(config: &NetConfig) -> Self {
        Gradient {
            values: vec![0.0; count_parameters(config)],
            loss: 0.0,
        }
    }

    /// Scales gradient and loss by 1/n, turning a batch sum into a mean.
    pub(crate) fn scale(&mut self, factor: f64) {
        for g in &mut self.values {
            *g *= factor;
        }
        self.loss *= factor;
    }
}

/// Computes the exact batch gradient over the given rows of `data`.
/// The batch gradient is the sum of per-record gradients.
pub fn backprop_gradient(
    config: &NetConfig,
    weights: &Weights,
    data: &DesignMatrix,
    rows: &[usize],
) -> Result<Gradient> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "batch".into(),
            reason: "must be non-empty".into(),
        });
    }
    let mut grad = Gradient::zeros(config);
    for &row in rows {
        accumulate_record(
            config,
            weights,
            data.input_row(row),
            data.targets()[row],
            &mut grad,
        )?;
    }
    Ok(grad)
}

/// One backpropagation pass for a single (input, target) record, accumulating
/// into `grad`.
fn accumulate_record(
    config: &NetConfig,
    weights: &Weights,
    input: &[f64],
    target: f64,
    grad: &mut Gradient,
) -> Result<()> {
    let w = weights.as_slice();
    let n_hidden = config.hidden.len();

    // Forward pass, keeping each layer's activations.
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_hidden + 1);
    acts.push(input.to_vec());
    let mut offsets = Vec::with_capacity(n_hidden + 1);
    let mut cursor = 0;
    for l in 0..n_hidden {
        offsets.push(cursor);
        let prev = acts[l].len();
        let size = config.hidden[l];
        let mut next = Vec::with_capacity(size);
        for j in 0..size {
            let base = cursor + j * (prev + 1);
            let mut z = w[base + prev];
            for (i, a) in acts[l].iter().enumerate() {
                z += w[base + i] * a;
            }
            next.push(config.hidden_activation.apply(z));
        }
        cursor += size * (prev + 1);
        acts.push(next);
    }
    let out_off = cursor;
    offsets.push(out_off);
    let last = acts.last().expect("at least the input layer");
    let mut z_out = w[out_off + last.len()];
    for (i, a) in last.iter().enumerate() {
        z_out += w[out_off + i] * a;
    }
    let y_hat = config.output_activation.apply(z_out);
    if !y_hat.is_finite() {
        return Err(Error::GradientOverflow {
            weight_norm: weights.norm(),
        });
    }

    let err = y_hat - target;
    grad.loss += 0.5 * err * err;

    // Output node delta, then walk the hidden layers backwards.
    let delta_out = err * config.output_activation.derivative_from_value(y_hat);
    for (i, a) in last.iter().enumerate() {
        grad.values[out_off + i] += delta_out * a;
    }
    grad.values[out_off + last.len()] += delta_out;

    let mut downstream: Vec<f64> = last
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            delta_out * w[out_off + j] * config.hidden_activation.derivative_from_value(a)
        })
        .collect();

    for l in (0..n_hidden).rev() {
        let prev = acts[l].len();
        let base = offsets[l];
        for (j, &delta) in downstream.iter().enumerate() {
            let node = base + j * (prev + 1);
            for (i, a) in acts[l].iter().enumerate() {
                grad.values[node + i] += delta * a;
            }
            grad.values[node + prev] += delta;
        }
        if l == 0 {
            break;
        }
        // Delta for layer l-1: back through layer l's weights.
        let next_downstream: Vec<f64> = (0..prev)
            .map(|i| {
                let sum: f64 = downstream
                    .iter()
                    .enumerate()
                    .map(|(j, d)| d * w[base + j * (prev + 1) + i])
                    .sum();
                sum * config
                    .hidden_activation
                    .derivative_from_value(acts[l][i])
            })
            .collect();
        downstream = next_downstream;
    }

    if grad.values.iter().any(|g| !g.is_finite()) || !grad.loss.is_finite() {
        return Err(Error::GradientOverflow {
            weight_norm: weights.norm(),
        });
    }
    Ok(())
}

/// Momentum update: velocity' = momentum * velocity - learning_rate * gradient;
/// weights' = weights + velocity'.
pub fn momentum_step(
    weights: &mut Weights,
    velocity: &mut [f64],
    gradient: &Gradient,
    learning_rate: f64,
    momentum: f64,
) {
    debug_assert_eq!(weights.len(), velocity.len());
    debug_assert_eq!(weights.len(), gradient.values.len());
    for ((w, v), g) in weights
        .0
        .iter_mut()
        .zip(velocity.iter_mut())
        .zip(&gradient.values)
    {
        *v = momentum * *v - learning_rate * g;
        *w += *v;
    }
}
