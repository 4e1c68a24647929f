//! `wavelength_nm,n,k` tables.

use std::path::Path;

use standwave_core::optics::{DispersionRow, DispersionTable};

use crate::error::{read_file, CliError, CliResult};

const HEADER: [&str; 3] = ["wavelength_nm", "n", "k"];

pub fn read_dispersion_csv(path: &Path) -> CliResult<DispersionTable> {
    let text = read_file(path)?;
    parse_dispersion_csv(&text, path)
}

/// Parse table text; `path` only labels errors.
pub fn parse_dispersion_csv(text: &str, path: &Path) -> CliResult<DispersionTable> {
    let fail = |line: u64, message: String| CliError::DispersionCsv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| fail(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(fail(1, format!("header must be `{}`", HEADER.join(","))));
    }

    let mut rows: Vec<DispersionRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            fail(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> CliResult<f64> {
            let raw = &record[i];
            let value: f64 = raw
                .parse()
                .map_err(|_| fail(line, format!("{}: `{raw}` is not a number", HEADER[i])))?;
            if !value.is_finite() {
                return Err(fail(line, format!("{}: must be finite", HEADER[i])));
            }
            Ok(value)
        };
        let row = DispersionRow {
            wavelength_nm: field(0)?,
            n: field(1)?,
            k: field(2)?,
        };
        if row.wavelength_nm <= 0.0 {
            return Err(fail(line, "wavelength_nm: must be positive".into()));
        }
        if row.n < 0.0 || row.k < 0.0 {
            return Err(fail(line, "n and k must be non-negative".into()));
        }
        if let Some(prev) = rows.last() {
            if row.wavelength_nm <= prev.wavelength_nm {
                return Err(fail(line, "wavelengths must be strictly increasing".into()));
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(fail(reader.position().line(), "at least 2 rows required".into()));
    }
    Ok(DispersionTable::new(rows)?)
}
