//! Vector and labeled-reference files.
//!
//! JSON: `[[x1, x2, ...], ...]` for vectors, `[{"label": .., "vector": [..]}]`
//! for references. CSV: one vector per row (`x1,x2,...`), or `label,x1,...`
//! for references; `#` lines are comments and a non-numeric first row is
//! taken as a header.

use std::path::Path;

use qdist_core::{LabeledReference, RealVector};

use crate::config::InlineReference;
use crate::error::{CliError, Result};

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn vectors_from_rows(rows: Vec<Vec<f64>>) -> Result<Vec<RealVector>> {
    rows.into_iter()
        .map(|r| RealVector::new(r).map_err(CliError::from))
        .collect()
}

pub fn labeled(label: &str, vector: Vec<f64>) -> Result<LabeledReference> {
    Ok(LabeledReference::new(label, RealVector::new(vector)?)?)
}

/// Numeric records of a CSV file, skipping comments and a header row.
fn csv_records(path: &Path, text: &str, leading_label: bool) -> Result<Vec<(Option<String>, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(path, e.to_string()))?;
        let mut fields = rec.iter();
        let label = if leading_label {
            Some(fields.next().unwrap_or_default().to_owned())
        } else {
            None
        };
        let nums: std::result::Result<Vec<f64>, _> = fields.map(str::parse::<f64>).collect();
        match nums {
            Ok(v) => out.push((label, v)),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(parse_err(path, format!("row {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

pub fn read_vectors(path: &Path) -> Result<Vec<RealVector>> {
    let text = read(path)?;
    let rows: Vec<Vec<f64>> = if is_csv(path) {
        csv_records(path, &text, false)?.into_iter().map(|(_, v)| v).collect()
    } else {
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?
    };
    if rows.is_empty() {
        return Err(parse_err(path, "no vectors"));
    }
    vectors_from_rows(rows)
}

pub fn read_references(path: &Path) -> Result<Vec<LabeledReference>> {
    let text = read(path)?;
    let refs: Vec<InlineReference> = if is_csv(path) {
        csv_records(path, &text, true)?
            .into_iter()
            .map(|(l, vector)| InlineReference {
                label: l.unwrap_or_default(),
                vector,
            })
            .collect()
    } else {
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?
    };
    if refs.is_empty() {
        return Err(parse_err(path, "no references"));
    }
    refs.into_iter().map(|r| labeled(&r.label, r.vector)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(name: &str, body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(name);
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        (dir, p)
    }

    #[test]
    fn csv_vectors_with_header_and_comments() {
        let (_d, p) = file("v.csv", "# points\nx,y\n1, 2\n-0.5,3e-1\n");
        let vs = read_vectors(&p).unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[1].components(), &[-0.5, 0.3]);
    }

    #[test]
    fn json_references() {
        let (_d, p) = file("r.json", r#"[{"label":"A","vector":[1,0]},{"label":"B","vector":[0,1]}]"#);
        let rs = read_references(&p).unwrap();
        assert_eq!(rs[1].label.as_str(), "B");
    }

    #[test]
    fn csv_references() {
        let (_d, p) = file("r.csv", "label,x,y\nred,1,0\nblue,0,1\n");
        let rs = read_references(&p).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].vector.components(), &[1.0, 0.0]);
    }

    #[test]
    fn bad_number_is_a_parse_error() {
        let (_d, p) = file("v.csv", "1,2\n3,abc\n");
        assert!(matches!(read_vectors(&p), Err(CliError::Parse { .. })));
    }

    #[test]
    fn missing_file_is_io() {
        let err = read_vectors(Path::new("/nonexistent/v.json")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zero_reference_rejected() {
        let (_d, p) = file("r.json", r#"[{"label":"A","vector":[0,0]}]"#);
        assert_eq!(read_references(&p).unwrap_err().exit_code(), 1);
    }
}
