//! Derivative-free simplex minimization used by the CSS estimator.

use crate::error::{Error, Result};

/// Outcome of a simplex run. When the budget is exhausted before the
/// function-value spread falls under `tol`, `converged` is false but the best
/// point found is still returned.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Standard Nelder-Mead with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. The initial simplex is `x0` plus per-coordinate steps of
/// max(0.05, 5% * |x0_i|). Convergence requires the function-value spread to
/// fall under `tol` and the simplex diameter under sqrt(tol); the diameter
/// guard prevents stopping on symmetric value ties away from a minimum.
/// Fully deterministic for a given objective and x0.
pub fn nelder_mead<F>(
    mut objective: F,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let eval = |x: &[f64], f: &mut F| -> f64 {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(Error::ObjectiveNotFinite);
    }
    if dim == 0 {
        return Ok(SimplexResult {
            x: Vec::new(),
            fx: f0,
            iterations: 0,
            converged: true,
        });
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += (0.05_f64).max(0.05 * x0[i].abs());
        simplex.push(p);
    }
    let mut scores: Vec<f64> = Vec::with_capacity(dim + 1);
    scores.push(f0);
    for p in &simplex[1..] {
        scores.push(eval(p, &mut objective));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;

        // Ties broken by index so the iterate sequence is reproducible.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| {
            scores[a]
                .partial_cmp(&scores[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let best = order[0];
        let second_worst = order[dim - 1];
        let worst = order[dim];

        if (scores[worst] - scores[best]).abs() < tol {
            let diameter = simplex
                .iter()
                .flat_map(|p| {
                    p.iter()
                        .zip(&simplex[best])
                        .map(|(a, b)| (a - b).abs())
                })
                .fold(0.0f64, f64::max);
            if diameter < tol.sqrt() {
                converged = true;
                break;
            }
        }

        let mut centroid = vec![0.0; dim];
        for &idx in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflected = eval(&reflected, &mut objective);

        if f_reflected < scores[best] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expanded = eval(&expanded, &mut objective);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                scores[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                scores[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < scores[second_worst] {
            simplex[worst] = reflected;
            scores[worst] = f_reflected;
            continue;
        }

        let contracted: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + 0.5 * (w - c))
            .collect();
        let f_contracted = eval(&contracted, &mut objective);
        if f_contracted < scores[worst] {
            simplex[worst] = contracted;
            scores[worst] = f_contracted;
            continue;
        }

        let best_point = simplex[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            let shrunk: Vec<f64> = best_point
                .iter()
                .zip(&simplex[idx])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            simplex[idx] = shrunk;
            scores[idx] = eval(&simplex[idx], &mut objective);
        }
    }

    let best_idx = (0..=dim)
        .min_by(|&a, &b| {
            scores[a]
                .partial_cmp(&scores[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        })
        .expect("simplex is non-empty");
    Ok(SimplexResult {
        x: simplex[best_idx].clone(),
        fx: scores[best_idx],
        iterations,
        converged,
    })
}
