use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::NumericTable;

/// Load a headered CSV. Cells equal to `missing_token` (after trimming) or
/// empty are treated as missing; everything else must parse as a finite real.
pub fn load_csv(path: impl AsRef<Path>, missing_token: &str) -> Result<NumericTable> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    let column_names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    parse_rows(rdr.records(), column_names, missing_token, path)
}

fn parse_rows<R: std::io::Read>(
    records: csv::StringRecordsIter<'_, R>,
    column_names: Vec<String>,
    missing_token: &str,
    path: &Path,
) -> Result<NumericTable> {
    let s = column_names.len();
    let mut values = Vec::new();
    let mut mask = Vec::new();
    let mut n = 0usize;
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
        if rec.len() != s {
            return Err(Error::Ragged {
                row: i + 1,
                found: rec.len(),
                expected: s,
            });
        }
        for (j, field) in rec.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() || field == missing_token {
                values.push(f64::NAN);
                mask.push(false);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row: i + 1,
                    column: column_names[j].clone(),
                    text: field.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: column_names[j].clone(),
                        text: field.to_string(),
                    });
                }
                values.push(v);
                mask.push(true);
            }
        }
        n += 1;
    }
    let table = NumericTable::with_mask(Matrix::from_vec(n, s, values), mask, column_names);
    table.validate()?;
    Ok(table)
}

/// Parse CSV text already in memory (used for bundled fixtures).
pub(crate) fn load_csv_str(text: &str, missing_token: &str, label: &str) -> Result<NumericTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let column_names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: label.to_string(),
            source: e,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    parse_rows(rdr.records(), column_names, missing_token, Path::new(label))
}

/// Write the table as CSV; missing cells are written as `missing_token`.
pub fn save_csv(table: &NumericTable, path: impl AsRef<Path>, missing_token: &str) -> Result<()> {
    let path = path.as_ref();
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.display().to_string(),
        source: e,
    })?;
    let write = |wtr: &mut csv::Writer<std::fs::File>, rec: Vec<String>| {
        wtr.write_record(&rec).map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })
    };
    write(&mut wtr, table.column_names.clone())?;
    for i in 0..table.n_rows() {
        let rec: Vec<String> = (0..table.n_cols())
            .map(|j| {
                if table.is_observed(i, j) {
                    // f64 Display is shortest-round-trip, so load reproduces bits
                    format!("{}", table.values.at(i, j))
                } else {
                    missing_token.to_string()
                }
            })
            .collect();
        write(&mut wtr, rec)?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Write the mask as a parallel CSV of 0/1 (1 = observed).
pub fn save_mask_csv(table: &NumericTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.display().to_string(),
        source: e,
    })?;
    wtr.write_record(&table.column_names).map_err(|e| Error::Csv {
        path: path.display().to_string(),
        source: e,
    })?;
    for i in 0..table.n_rows() {
        let rec: Vec<&str> = (0..table.n_cols())
            .map(|j| if table.is_observed(i, j) { "1" } else { "0" })
            .collect();
        wtr.write_record(&rec).map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_missing_cells_by_token() {
        let t = load_csv_str("a,b\n1,2\n,3\n4,\n", "", "inline").unwrap();
        assert_eq!(t.n_rows(), 3);
        assert!(!t.is_observed(1, 0));
        assert!(!t.is_observed(2, 1));
        assert_eq!(t.values.at(0, 1), 2.0);
    }

    #[test]
    fn fully_populated_csv_has_all_true_mask() {
        let t = load_csv_str("a,b\n1,2\n3,4\n", "", "inline").unwrap();
        assert!(t.is_complete());
    }

    #[test]
    fn parse_error_names_row_and_column() {
        let err = load_csv_str("a,b\n1,2\nabc,3\n", "", "inline").unwrap_err();
        match err {
            crate::error::Error::Parse { row, column, text } => {
                assert_eq!(row, 2);
                assert_eq!(column, "a");
                assert_eq!(text, "abc");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn custom_missing_token() {
        let t = load_csv_str("a,b\n1,NA\n2,3\n4,5\n", "NA", "inline").unwrap();
        assert!(!t.is_observed(0, 1));
    }

    #[test]
    fn round_trip_preserves_values_and_mask() {
        let t = load_csv_str("a,b\n1.25,2e-3\n,3.777777777777\n4,\n", "", "inline").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        save_csv(&t, &p, "").unwrap();
        let back = load_csv(&p, "").unwrap();
        assert_eq!(back.mask(), t.mask());
        for i in 0..t.n_rows() {
            for j in 0..t.n_cols() {
                if t.is_observed(i, j) {
                    assert_eq!(back.values.at(i, j), t.values.at(i, j));
                }
            }
        }
    }
}
