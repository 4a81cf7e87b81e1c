//! Comma-separated point files: one point per row, `.` decimal separator,
//! optional header.

use std::io::Write;
use std::path::Path;

use cjl_core::PointSet;

use crate::error::{io_error, CliError};

/// Reads a point set. Unparseable fields and empty input are usage errors;
/// rows of differing length (or a length other than `expected_d`) are data
/// errors.
pub fn read_points(
    path: &Path,
    header: bool,
    expected_d: Option<usize>,
) -> Result<PointSet, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_error(path, e))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Usage(format!("{}: malformed CSV: {e}", path.display())))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    CliError::Usage(format!(
                        "{}: row {}, column {}: `{field}` is not a number",
                        path.display(),
                        i + 1,
                        j + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }

    let Some(first) = rows.first() else {
        return Err(CliError::Usage(format!("{}: no rows", path.display())));
    };
    let d = expected_d.unwrap_or(first.len());
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(CliError::Data(format!(
            "{}: row {} has {} columns, expected {d}",
            path.display(),
            i + 1,
            row.len()
        )));
    }
    PointSet::from_rows(rows).map_err(CliError::from)
}

/// Writes one row per point using the shortest representation that parses
/// back to the same `f64`.
pub fn write_points(path: &Path, points: &PointSet) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_rows(&mut out, points).map_err(|e| io_error(path, e))
}

fn write_rows(out: &mut impl Write, points: &PointSet) -> std::io::Result<()> {
    for row in points.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.write_all(b",")?;
            }
            write!(out, "{v:?}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}
