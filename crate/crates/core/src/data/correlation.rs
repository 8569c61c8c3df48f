//! `correlation.csv`: a header row `trait,<category ids…>` followed by five
//! rows labeled E, A, C, N, O. Lines starting with `#` are comments.
//!
//! Columns are matched to the taxonomy by id, so the file may list them in
//! any order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::data::Taxonomy;
use crate::error::{Error, Result};
use crate::model::{CorrelationMatrix, Trait, TRAIT_COUNT};

const DEFAULT_CORRELATION: &str = include_str!("../../data/correlation.csv");

/// The placeholder matrix shipped with the crate (synthetic values).
pub fn builtin_correlation_csv() -> &'static str {
    DEFAULT_CORRELATION
}

pub fn builtin_correlation(taxonomy: &Taxonomy) -> Result<CorrelationMatrix> {
    parse_correlation(DEFAULT_CORRELATION, "builtin correlation", taxonomy)
}

pub fn load_correlation(path: &Path, taxonomy: &Taxonomy) -> Result<CorrelationMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_correlation(&text, &path.display().to_string(), taxonomy)
}

pub fn parse_correlation(text: &str, file: &str, taxonomy: &Taxonomy) -> Result<CorrelationMatrix> {
    let mismatch = |message: String| Error::SchemaMismatch {
        file: file.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_error(file, e))?.clone();
    if headers.get(0) != Some("trait") {
        return Err(mismatch("first header cell must be `trait`".into()));
    }
    let ids: Vec<&str> = headers.iter().skip(1).collect();
    if ids.len() != taxonomy.len() {
        return Err(mismatch(format!(
            "{} activity columns, taxonomy has {} categories",
            ids.len(),
            taxonomy.len()
        )));
    }
    // file column -> taxonomy index
    let mut placement = Vec::with_capacity(ids.len());
    let mut seen = HashMap::new();
    for (col, id) in ids.iter().enumerate() {
        let idx = taxonomy
            .index_of(id)
            .ok_or_else(|| mismatch(format!("column {id:?} is not a taxonomy category")))?;
        if seen.insert(idx, col).is_some() {
            return Err(mismatch(format!("duplicate column {id:?}")));
        }
        placement.push(idx);
    }

    let mut rows: [Option<Vec<f64>>; TRAIT_COUNT] = Default::default();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(file, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let label = record.get(0).unwrap_or_default();
        let t = Trait::from_label(label)
            .ok_or_else(|| mismatch(format!("line {line}: unknown trait label {label:?}")))?;
        if rows[t.index()].is_some() {
            return Err(mismatch(format!("line {line}: duplicate row {label}")));
        }
        let mut row = vec![0.0; taxonomy.len()];
        for (col, cell) in record.iter().skip(1).enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                file: file.to_string(),
                line,
                column: col as u64 + 2,
                message: format!("{cell:?} is not a number"),
            })?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::RangeViolation {
                    file: file.to_string(),
                    row: line,
                    field: ids[col].to_string(),
                    value: cell.to_string(),
                });
            }
            row[placement[col]] = value;
        }
        rows[t.index()] = Some(row);
    }
    let missing: Vec<&str> = Trait::ALL
        .iter()
        .filter(|t| rows[t.index()].is_none())
        .map(|t| t.label())
        .collect();
    if !missing.is_empty() {
        return Err(mismatch(format!("missing trait rows {}", missing.join(","))));
    }
    CorrelationMatrix::new(rows.map(|r| r.expect("checked above")))
}

/// Writes the matrix in canonical taxonomy order, with optional `#` banner lines.
pub fn correlation_to_csv(matrix: &CorrelationMatrix, taxonomy: &Taxonomy, banner: &[&str]) -> String {
    let mut out = String::new();
    for line in banner {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "trait,{}", taxonomy.ids().join(","));
    for t in Trait::ALL {
        let cells: Vec<String> = matrix.row(t).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{},{}", t.label(), cells.join(","));
    }
    out
}

pub fn write_correlation(path: &Path, matrix: &CorrelationMatrix, taxonomy: &Taxonomy) -> Result<()> {
    std::fs::write(path, correlation_to_csv(matrix, taxonomy, &[]))?;
    Ok(())
}

/// SHA-256 over the category ids and the exact matrix entries.
pub fn correlation_fingerprint(matrix: &CorrelationMatrix, taxonomy: &Taxonomy) -> String {
    let mut hasher = Sha256::new();
    for id in taxonomy.ids() {
        hasher.update(id.as_bytes());
        hasher.update([0]);
    }
    for t in Trait::ALL {
        for v in matrix.row(t) {
            hasher.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let (line, column) = match e.position() {
        Some(p) => (p.line(), 0),
        None => (0, 0),
    };
    Error::Parse {
        file: file.to_string(),
        line,
        column,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_taxonomy() -> Taxonomy {
        Taxonomy::from_json_str(
            r#"{"version":1,"categories":[{"id":"a","name":"A"},{"id":"b","name":"B"},{"id":"c","name":"C"}],"items":{}}"#,
            "t",
        )
        .unwrap()
    }

    #[test]
    fn builtin_matrix_is_placeholder_range() {
        let t = Taxonomy::builtin();
        let m = builtin_correlation(&t).unwrap();
        assert_eq!(m.columns(), 15);
        for tr in Trait::ALL {
            assert!(m.row(tr).iter().all(|v| (-0.3..=0.3).contains(v)));
        }
        assert!(builtin_correlation_csv().starts_with("# PLACEHOLDER"));
    }

    #[test]
    fn shuffled_columns_and_rows_load_to_the_same_matrix() {
        let t = small_taxonomy();
        let canonical = "trait,a,b,c\nE,0.1,0.2,0.3\nA,0,0,0\nC,-0.1,-0.2,-0.3\nN,1,-1,0.5\nO,0.01,0.02,0.03\n";
        let shuffled = "# comment\ntrait,c,a,b\nO,0.03,0.01,0.02\nN,0.5,1,-1\nE,0.3,0.1,0.2\nC,-0.3,-0.1,-0.2\nA,0,0,0\n";
        let m1 = parse_correlation(canonical, "x", &t).unwrap();
        let m2 = parse_correlation(shuffled, "y", &t).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(m1.column(2), [0.3, 0.0, -0.3, 0.5, 0.03]);
        let round = parse_correlation(&correlation_to_csv(&m1, &t, &["banner"]), "z", &t).unwrap();
        assert_eq!(round, m1);
        assert_eq!(correlation_fingerprint(&m1, &t), correlation_fingerprint(&m2, &t));
    }

    #[test]
    fn schema_and_range_errors() {
        let t = small_taxonomy();
        let short = "trait,a,b\nE,0,0\nA,0,0\nC,0,0\nN,0,0\nO,0,0\n";
        assert!(matches!(parse_correlation(short, "x", &t), Err(Error::SchemaMismatch { .. })));
        let unknown = "trait,a,b,z\nE,0,0,0\nA,0,0,0\nC,0,0,0\nN,0,0,0\nO,0,0,0\n";
        assert!(matches!(parse_correlation(unknown, "x", &t), Err(Error::SchemaMismatch { .. })));
        let missing_row = "trait,a,b,c\nE,0,0,0\nA,0,0,0\nC,0,0,0\nN,0,0,0\n";
        assert!(matches!(parse_correlation(missing_row, "x", &t), Err(Error::SchemaMismatch { .. })));
        let out_of_range = "trait,a,b,c\nE,0,1.5,0\nA,0,0,0\nC,0,0,0\nN,0,0,0\nO,0,0,0\n";
        match parse_correlation(out_of_range, "x", &t) {
            Err(Error::RangeViolation { row, field, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(field, "b");
            }
            other => panic!("{other:?}"),
        }
        let not_number = "trait,a,b,c\nE,0,zero,0\nA,0,0,0\nC,0,0,0\nN,0,0,0\nO,0,0,0\n";
        match parse_correlation(not_number, "x", &t) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }
}
