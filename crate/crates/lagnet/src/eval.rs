//! Fit metrics and the model-comparison table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum of squared errors between two equal-length vectors.
pub fn sse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.is_empty() || actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum())
}

/// Coefficient of determination: 1 - SSE/SST around the mean of `actual`.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() < 2 || actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let sst: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if sst <= 0.0 {
        return Err(Error::DegenerateChannel {
            name: "actual (constant)".into(),
        });
    }
    Ok(1.0 - sse(actual, predicted)? / sst)
}

/// Which family produced a row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nn,
    Arimax,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            ModelKind::Nn => "nn",
            ModelKind::Arimax => "arimax",
        })
    }
}

/// One model's metrics, aligned on a common test window of `n_test` points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSummary {
    pub label: String,
    pub kind: ModelKind,
    pub n_params: usize,
    pub activations: Option<String>,
    pub r_squared: f64,
    pub sse_train: f64,
    pub sse_test_onestep: f64,
    pub sse_test_iterated: Option<f64>,
    pub bic: f64,
    pub seed: Option<u64>,
    pub n_test: usize,
}

/// Ranked comparison. The winner carries the minimal one-step test SSE.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub winner: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub rank: usize,
    #[serde(flatten)]
    pub summary: ModelSummary,
}

fn order_key(s: &ModelSummary) -> (f64, usize, &str) {
    (s.sse_test_onestep, s.n_params, s.label.as_str())
}

/// Aligns all models on the same test window, ranks them by one-step test
/// SSE (ties broken by fewer parameters, then label) and marks the winner.
pub fn compare(summaries: &[ModelSummary]) -> Result<ComparisonTable> {
    if summaries.is_empty() {
        return Err(Error::Incomparable("no rows to compare".into()));
    }
    let n_test = summaries[0].n_test;
    if summaries.iter().any(|s| s.n_test != n_test) {
        return Err(Error::Incomparable(
            "rows were evaluated on different test windows".into(),
        ));
    }
    let mut order: Vec<usize> = (0..summaries.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, pa, la) = order_key(&summaries[a]);
        let (sb, pb, lb) = order_key(&summaries[b]);
        sa.partial_cmp(&sb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(pa.cmp(&pb))
            .then(la.cmp(lb))
    });
    let rows: Vec<ComparisonRow> = order
        .iter()
        .enumerate()
        .map(|(rank, &idx)| ComparisonRow {
            rank: rank + 1,
            summary: summaries[idx].clone(),
        })
        .collect();
    let winner = rows[0].summary.label.clone();
    Ok(ComparisonTable { rows, winner })
}

const CSV_HEADER: &str =
    "order,n_params,activations,r_squared,sse_train,sse_test_onestep,sse_test_iterated,bic,seed,model_kind";

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

fn opt_u64(v: Option<u64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

impl ComparisonTable {
    /// Machine-readable CSV, full precision, rows in rank order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let s = &row.summary;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                crate::timeseries::quote_csv_field(&s.label),
                s.n_params,
                s.activations.as_deref().unwrap_or("-"),
                s.r_squared,
                s.sse_train,
                s.sse_test_onestep,
                opt_f64(s.sse_test_iterated),
                s.bic,
                opt_u64(s.seed),
                s.kind,
            ));
        }
        out
    }

    /// Human-readable aligned table; R-squared shown to 4 decimals.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!(
            "{:<4} {:<16} {:<8} {:<9} {:>9} {:>14} {:>14} {:>12}",
            "rank", "model", "kind", "params", "r_sq", "sse_train", "sse_test", "bic"
        )];
        for row in &self.rows {
            let s = &row.summary;
            lines.push(format!(
                "{:<4} {:<16} {:<8} {:<9} {:>9.4} {:>14.2} {:>14.2} {:>12.2}",
                row.rank, s.label, s.kind, s.n_params, s.r_squared, s.sse_train,
                s.sse_test_onestep, s.bic
            ));
        }
        lines.push(format!("winner: {}", self.winner));
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sse_basics() {
        assert_eq!(sse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(sse(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!(sse(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
        assert!(sse(&[], &[]).is_err());
    }

    #[test]
    fn r_squared_basics() {
        let actual = [1.0, 2.0, 3.0];
        assert_eq!(r_squared(&actual, &actual).unwrap(), 1.0);
        assert_eq!(r_squared(&actual, &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(r_squared(&actual, &[1.0, 1.0, 3.0]).unwrap(), 0.5);
        assert!(r_squared(&[5.0, 5.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn r_squared_shift_invariance() {
        let actual = [3.0, 1.0, 4.0, 1.0, 5.0];
        let predicted = [2.5, 1.5, 3.5, 1.5, 4.5];
        let base = r_squared(&actual, &predicted).unwrap();
        let shift = 123.456;
        let a2: Vec<f64> = actual.iter().map(|x| x + shift).collect();
        let p2: Vec<f64> = predicted.iter().map(|x| x + shift).collect();
        let shifted = r_squared(&a2, &p2).unwrap();
        assert!((base - shifted).abs() < 1e-12);
    }

    #[test]
    fn sse_scales_quadratically() {
        let a = [1.0, -2.0, 3.0];
        let p = [0.5, -1.0, 2.0];
        let base = sse(&a, &p).unwrap();
        let k = 7.0;
        let ak: Vec<f64> = a.iter().map(|x| k * x).collect();
        let pk: Vec<f64> = p.iter().map(|x| k * x).collect();
        assert!((sse(&ak, &pk).unwrap() - k * k * base).abs() < 1e-12 * base.max(1.0));
    }

    fn summary(label: &str, kind: ModelKind, test_sse: f64, n_params: usize) -> ModelSummary {
        ModelSummary {
            label: label.into(),
            kind,
            n_params,
            activations: None,
            r_squared: 0.8,
            sse_train: 100.0,
            sse_test_onestep: test_sse,
            sse_test_iterated: None,
            bic: 10.0,
            seed: None,
            n_test: 50,
        }
    }

    #[test]
    fn winner_is_argmin_and_permutation_invariant() {
        let a = summary("NN(1,1+3)", ModelKind::Nn, 10.0, 11);
        let b = summary("ARIMAX(2,1,1)", ModelKind::Arimax, 20.0, 5);
        let t1 = compare(&[a.clone(), b.clone()]).unwrap();
        let t2 = compare(&[b, a]).unwrap();
        assert_eq!(t1.winner, "NN(1,1+3)");
        assert_eq!(t1.winner, t2.winner);
        assert_eq!(t1.rows[0].rank, 1);
    }

    #[test]
    fn single_row_wins() {
        let t = compare(&[summary("only", ModelKind::Nn, 5.0, 3)]).unwrap();
        assert_eq!(t.winner, "only");
    }

    #[test]
    fn mismatched_windows_are_incomparable() {
        let a = summary("a", ModelKind::Nn, 10.0, 11);
        let mut b = summary("b", ModelKind::Arimax, 20.0, 5);
        b.n_test = 49;
        assert!(matches!(
            compare(&[a, b]),
            Err(Error::Incomparable(_))
        ));
    }

    #[test]
    fn tie_broken_by_fewer_parameters() {
        let a = summary("bigger", ModelKind::Nn, 10.0, 20);
        let b = summary("smaller", ModelKind::Nn, 10.0, 5);
        let t = compare(&[a, b]).unwrap();
        assert_eq!(t.winner, "smaller");
    }

    #[test]
    fn csv_has_pinned_columns() {
        let t = compare(&[summary("m", ModelKind::Nn, 1.0, 2)]).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with(
            "order,n_params,activations,r_squared,sse_train,sse_test_onestep,sse_test_iterated,bic,seed,model_kind"
        ));
        assert!(csv.lines().nth(1).unwrap().ends_with(",nn"));
    }
}
