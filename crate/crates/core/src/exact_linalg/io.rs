//! Matrix file formats.
//!
//! Text: a `rows cols` header line, then one line per row of whitespace-separated
//! decimal integers. JSON: `{"rows": r, "cols": c, "entries": [[...], ...]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{IntMatrix, LinalgError};
use crate::serde_int;

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    #[serde(with = "serde_int::nested")]
    entries: Vec<Vec<BigInt>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixDoc {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.to_nested(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        doc_to_matrix(doc).map_err(serde::de::Error::custom)
    }
}

fn doc_to_matrix(doc: MatrixDoc) -> Result<IntMatrix, LinalgError> {
    if doc.entries.len() != doc.rows {
        return Err(LinalgError::Parse(format!(
            "header says {} rows, found {}",
            doc.rows,
            doc.entries.len()
        )));
    }
    let mut flat = Vec::with_capacity(doc.rows * doc.cols);
    for (i, row) in doc.entries.into_iter().enumerate() {
        if row.len() != doc.cols {
            return Err(LinalgError::RaggedRow {
                row: i,
                expected: doc.cols,
                found: row.len(),
            });
        }
        flat.extend(row);
    }
    IntMatrix::new(doc.rows, doc.cols, flat)
}

pub fn format_matrix_text(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_matrix_json(m: &IntMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialisation is infallible")
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_matrix(input: &str) -> Result<IntMatrix, LinalgError> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        let doc: MatrixDoc =
            serde_json::from_str(trimmed).map_err(|e| LinalgError::Parse(e.to_string()))?;
        return doc_to_matrix(doc);
    }
    parse_matrix_text(input)
}

fn parse_matrix_text(input: &str) -> Result<IntMatrix, LinalgError> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| LinalgError::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| LinalgError::Parse(format!("bad dimension {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(LinalgError::Parse(format!(
            "header must be `rows cols`, got {header:?}"
        )));
    };
    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for line in lines {
        let row: Vec<BigInt> = line
            .split_whitespace()
            .map(|t| {
                BigInt::from_str(t).map_err(|_| LinalgError::Parse(format!("bad integer {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(LinalgError::RaggedRow {
                row: seen_rows,
                expected: cols,
                found: row.len(),
            });
        }
        entries.extend(row);
        seen_rows += 1;
    }
    // Rows of a zero-column matrix are blank lines, which the filter drops.
    if cols == 0 && seen_rows == 0 {
        seen_rows = rows;
    }
    if seen_rows != rows {
        return Err(LinalgError::Parse(format!(
            "header says {rows} rows, found {seen_rows}"
        )));
    }
    IntMatrix::new(rows, cols, entries)
}
