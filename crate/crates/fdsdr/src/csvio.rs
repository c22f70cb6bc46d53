//! Plain-text CSV readers and writers for matrices and response samples.
//!
//! Matrices are written one row per line with comma-separated values using
//! the shortest round-trip float formatting. Response files hold one
//! response per row: vector/sphere/quantile responses as their raw values,
//! symmetric matrices as row-major entries with the dimension declared in a
//! `# q=<dim>` header line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::metric::{ResponseKind, ResponseObject, ResponseSample};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn format_row(values: impl Iterator<Item = f64>) -> String {
    let mut s = String::new();
    for (i, v) in values.enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v}");
    }
    s
}

fn parse_row(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(path, line_no, format!("not a number: '{}'", field.trim())))
        })
        .collect()
}

/// Write a matrix as rows of comma-separated values.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        out.push_str(&format_row(m.row(i).iter().cloned()));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a matrix written by [`write_matrix_csv`]; all rows must have the
/// same number of fields.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let row = parse_row(path, idx + 1, line)?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("row has {} fields, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "file holds no data rows"));
    }
    let (n, p) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
}

/// Write one response per row. Symmetric matrices get a `# q=<dim>` header
/// and row-major entries.
pub fn write_responses_csv(path: &Path, sample: &ResponseSample) -> Result<()> {
    let mut out = String::new();
    if sample.kind() == ResponseKind::SymMatrix {
        let _ = writeln!(out, "# q={}", sample.get(0).len());
    }
    for obj in sample.iter() {
        let row = match obj {
            ResponseObject::Vector(v) | ResponseObject::Quantile(v) | ResponseObject::Sphere(v) => {
                format_row(v.iter().cloned())
            }
            ResponseObject::SymMatrixPoint(m) => {
                let q = m.dim();
                format_row((0..q * q).map(|k| m[(k / q, k % q)]))
            }
        };
        out.push_str(&row);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a response file of the declared kind, validating the variant
/// invariants row by row (monotone quantiles, unit sphere norms, matrix
/// dimension header).
pub fn read_responses_csv(path: &Path, kind: ResponseKind) -> Result<ResponseSample> {
    let text = fs::read_to_string(path)?;
    let mut declared_q: Option<usize> = None;
    let mut objects = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(value) = rest.trim().strip_prefix("q=") {
                let q: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(path, line_no, format!("bad dimension header '{trimmed}'")))?;
                declared_q = Some(q);
            }
            continue;
        }
        let row = parse_row(path, line_no, line)?;
        let object = match kind {
            ResponseKind::Vector => ResponseObject::vector(row),
            ResponseKind::Quantile => ResponseObject::quantile(row),
            ResponseKind::Sphere => ResponseObject::sphere(row),
            ResponseKind::SymMatrix => {
                let q = declared_q
                    .ok_or_else(|| parse_err(path, line_no, "missing '# q=<dim>' header before matrix rows"))?;
                if row.len() != q * q {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("matrix row has {} entries, expected {}", row.len(), q * q),
                    ));
                }
                let m = DMatrix::from_fn(q, q, |i, j| row[i * q + j]);
                SymMatrix::new(m).and_then(ResponseObject::sym_matrix_point)
            }
        }
        .map_err(|e| parse_err(path, line_no, e.to_string()))?;
        objects.push(object);
    }
    if objects.is_empty() {
        return Err(parse_err(path, 1, "file holds no responses"));
    }
    ResponseSample::new(objects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().expect("tempdir")
    }

    #[test]
    fn matrix_roundtrip_is_bit_exact() {
        let dir = tmpdir();
        let path = dir.path().join("m.csv");
        let mut r = rng::seeded(1);
        let m = DMatrix::from_fn(7, 3, |_, _| r.random_range(-5.0..5.0));
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(
            m.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            back.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn ragged_rows_are_reported_with_line_number() {
        let dir = tmpdir();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2,3\n4,5\n").unwrap();
        let err = read_matrix_csv(&path).unwrap_err();
        let Error::Parse { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
    }

    #[test]
    fn non_numeric_field_is_reported() {
        let dir = tmpdir();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3,oops\n").unwrap();
        let err = read_matrix_csv(&path).unwrap_err();
        let Error::Parse { line, message, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
        assert!(message.contains("oops"));
    }

    #[test]
    fn quantile_responses_roundtrip_and_validate() {
        let dir = tmpdir();
        let path = dir.path().join("resp.csv");
        let sample = ResponseSample::new(vec![
            ResponseObject::quantile(vec![0.0, 0.5, 1.5]).unwrap(),
            ResponseObject::quantile(vec![-1.0, 0.0, 0.25]).unwrap(),
        ])
        .unwrap();
        write_responses_csv(&path, &sample).unwrap();
        let back = read_responses_csv(&path, ResponseKind::Quantile).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.get(0), sample.get(0));

        // a decreasing row names the offending line
        std::fs::write(&path, "0,0.5,1.5\n1,0.5,2\n").unwrap();
        let err = read_responses_csv(&path, ResponseKind::Quantile).unwrap_err();
        let Error::Parse { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
    }

    #[test]
    fn symmatrix_responses_need_dimension_header() {
        let dir = tmpdir();
        let path = dir.path().join("mats.csv");
        let sample = ResponseSample::new(vec![
            ResponseObject::sym_matrix_point(SymMatrix::from_fn(2, |i, j| (i + j) as f64)).unwrap(),
            ResponseObject::sym_matrix_point(SymMatrix::from_fn(2, |i, j| (i * j) as f64)).unwrap(),
        ])
        .unwrap();
        write_responses_csv(&path, &sample).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# q=2\n"));
        let back = read_responses_csv(&path, ResponseKind::SymMatrix).unwrap();
        assert_eq!(back.get(1), sample.get(1));

        std::fs::write(&path, "0,1,1,0\n").unwrap();
        assert!(read_responses_csv(&path, ResponseKind::SymMatrix).is_err());
    }

    #[test]
    fn sphere_responses_validate_norm() {
        let dir = tmpdir();
        let path = dir.path().join("sph.csv");
        std::fs::write(&path, "1,0\n0.5,0.5\n").unwrap();
        let err = read_responses_csv(&path, ResponseKind::Sphere).unwrap_err();
        let Error::Parse { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
    }
}
