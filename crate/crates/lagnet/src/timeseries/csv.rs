//! Strict CSV ingestion: UTF-8, comma-separated, one header row, one
//! observation per row. Any malformed cell is an error, never an imputation.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Column layout for ingestion. Names must be distinct.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub target: String,
    pub exog: Vec<String>,
    pub date: Option<String>,
}

impl CsvSchema {
    pub fn new(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            exog: Vec::new(),
            date: None,
        }
    }

    pub fn with_exog(mut self, names: Vec<String>) -> Self {
        self.exog = names;
        self
    }

    pub fn with_date(mut self, name: impl Into<String>) -> Self {
        self.date = Some(name.into());
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![self.target.as_str()];
        for name in self.exog.iter().map(String::as_str).chain(self.date.as_deref()) {
            if seen.contains(&name) {
                return Err(Error::DuplicateColumn { name: name.into() });
            }
            seen.push(name);
        }
        Ok(())
    }
}

/// Loads a series (and aligned exogenous channels) from a CSV file.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<TimeSeries> {
    schema.validate()?;
    let text = fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyData)?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();

    let find = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::ColumnNotFound { name: name.into() })
    };
    let target_idx = find(&schema.target)?;
    let exog_idx: Vec<usize> = schema
        .exog
        .iter()
        .map(|n| find(n))
        .collect::<Result<_>>()?;
    let date_idx = schema.date.as_deref().map(find).transpose()?;

    let mut values = Vec::new();
    let mut exog: Vec<Vec<f64>> = vec![Vec::new(); exog_idx.len()];
    let mut dates = Vec::new();

    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::RaggedRow {
                line: i + 1,
                expected: columns.len(),
                found: fields.len(),
            });
        }
        let parse = |col: usize| -> Result<f64> {
            let cell = fields[col];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::NonNumericCell {
                    line: i + 1,
                    column: columns[col].to_string(),
                    cell: cell.to_string(),
                }),
            }
        };
        values.push(parse(target_idx)?);
        for (slot, &col) in exog.iter_mut().zip(&exog_idx) {
            slot.push(parse(col)?);
        }
        if let Some(col) = date_idx {
            dates.push(fields[col].to_string());
        }
    }

    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut series = TimeSeries::new(schema.target.clone(), values)?;
    for (name, channel) in schema.exog.iter().zip(exog) {
        series = series.with_exog(name.clone(), channel)?;
    }
    if date_idx.is_some() {
        series = series.with_dates(dates);
    }
    Ok(series)
}

/// Quotes a CSV field when it contains a comma or quote (RFC-4180 style);
/// plain fields pass through unchanged.
pub(crate) fn quote_csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes named columns as CSV. All columns must share one length.
/// Floats use shortest round-trip formatting, so output is byte-deterministic.
pub fn write_csv(path: impl AsRef<Path>, columns: &[(&str, &[f64])]) -> Result<()> {
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let rows = columns.first().map_or(0, |(_, v)| v.len());
    for (name, col) in columns {
        if col.len() != rows {
            return Err(Error::ExogLengthMismatch {
                name: (*name).into(),
                len: col.len(),
                expected: rows,
            });
        }
    }
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|(_, v)| format!("{}", v[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("lagnet_csv_tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn loads_target_and_exog() {
        let path = write_temp(
            "calls.csv",
            "calls,accidents\n10,1\n12,2\n11,0\n",
        );
        let schema = CsvSchema::new("calls").with_exog(vec!["accidents".into()]);
        let s = load_csv(&path, &schema).unwrap();
        assert_eq!(s.values(), &[10.0, 12.0, 11.0]);
        assert_eq!(s.exog_count(), 1);
        assert_eq!(s.exog_values(0), &[1.0, 2.0, 0.0]);
    }

    #[test]
    fn loads_full_call_volume_sized_file() {
        let mut body = String::from("calls,accidents\n");
        for i in 0..687 {
            body.push_str(&format!("{},{}\n", 100 + i % 40, i % 7));
        }
        let path = write_temp("calls687.csv", &body);
        let schema = CsvSchema::new("calls").with_exog(vec!["accidents".into()]);
        let s = load_csv(&path, &schema).unwrap();
        assert_eq!(s.len(), 687);
        assert_eq!(s.exog_count(), 1);
        assert_eq!(s.exog_values(0).len(), 687);
    }

    #[test]
    fn loads_target_only() {
        let path = write_temp("simple.csv", "y\n1\n2\n3\n");
        let s = load_csv(&path, &CsvSchema::new("y")).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.exog_count(), 0);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let path = write_temp("bad.csv", "y\n1\nN/A\n3\n");
        match load_csv(&path, &CsvSchema::new("y")) {
            Err(Error::NonNumericCell { line, column, cell }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "y");
                assert_eq!(cell, "N/A");
            }
            other => panic!("expected NonNumericCell, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nan_and_inf_cells() {
        let path = write_temp("naninf.csv", "y\n1\nNaN\n");
        assert!(matches!(
            load_csv(&path, &CsvSchema::new("y")),
            Err(Error::NonNumericCell { .. })
        ));
        let path = write_temp("inf.csv", "y\ninf\n");
        assert!(matches!(
            load_csv(&path, &CsvSchema::new("y")),
            Err(Error::NonNumericCell { .. })
        ));
    }

    #[test]
    fn missing_column_and_file() {
        let path = write_temp("cols.csv", "a,b\n1,2\n");
        assert!(matches!(
            load_csv(&path, &CsvSchema::new("c")),
            Err(Error::ColumnNotFound { .. })
        ));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", &CsvSchema::new("y")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn ragged_row_reports_line() {
        let path = write_temp("ragged.csv", "a,b\n1,2\n3\n");
        match load_csv(&path, &CsvSchema::new("a")) {
            Err(Error::RaggedRow { line, expected, found }) => {
                assert_eq!((line, expected, found), (3, 2, 1));
            }
            other => panic!("expected RaggedRow, got {other:?}"),
        }
    }

    #[test]
    fn empty_body_is_an_error() {
        let path = write_temp("empty.csv", "y\n");
        assert!(matches!(
            load_csv(&path, &CsvSchema::new("y")),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn duplicate_schema_names_rejected() {
        let path = write_temp("dup.csv", "y,x\n1,2\n");
        let schema = CsvSchema::new("y").with_exog(vec!["y".into()]);
        assert!(matches!(
            load_csv(&path, &schema),
            Err(Error::DuplicateColumn { .. })
        ));
    }

    #[test]
    fn date_column_preserved_not_interpreted() {
        let path = write_temp("dated.csv", "day,y\n2020-01-02,5\n2020-01-01,6\n");
        let schema = CsvSchema::new("y").with_date("day");
        let s = load_csv(&path, &schema).unwrap();
        // File row order wins; the date content is never parsed.
        assert_eq!(s.values(), &[5.0, 6.0]);
        assert_eq!(
            s.dates().unwrap(),
            &["2020-01-02".to_string(), "2020-01-01".to_string()]
        );
    }

    #[test]
    fn write_then_load_round_trip() {
        let dir = std::env::temp_dir().join("lagnet_csv_tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round.csv");
        let y = [1.5, -2.25, 0.1, 1e-9];
        let x = [3.0, 4.0, 5.0, 6.0];
        write_csv(&path, &[("y", &y), ("x", &x)]).unwrap();
        let schema = CsvSchema::new("y").with_exog(vec!["x".into()]);
        let s = load_csv(&path, &schema).unwrap();
        assert_eq!(s.values(), &y);
        assert_eq!(s.exog_values(0), &x);
    }
}
