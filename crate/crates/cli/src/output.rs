use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Locale-independent number text: fixed notation with up to 12 decimals for
/// ordinary magnitudes, scientific otherwise; trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs();
    if (1e-4..1e12).contains(&magnitude) {
        trim_zeros(format!("{x:.12}"))
    } else {
        let text = format!("{x:.12e}");
        let (mantissa, exponent) = text.split_once('e').expect("scientific format");
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// A CSV table held as text cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Two-column `quantity,value` table.
    pub fn key_values(pairs: &[(String, f64)]) -> Self {
        let mut t = Self::new(["quantity", "value"]);
        for (k, v) in pairs {
            t.push(vec![k.clone(), fmt_num(*v)]);
        }
        t
    }

    pub fn write_to(&self, writer: impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

/// CSV to stdout, or `<name>.csv` and `<name>.json` under `out`.
pub fn emit<S: Serialize>(name: &str, table: &Table, summary: &S, out: Option<&Path>) -> CliResult<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    match out {
        None => {
            let stdout = std::io::stdout();
            table.write_to(stdout.lock()).map_err(io(Path::new("<stdout>")))
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io(dir))?;
            let csv_path = dir.join(format!("{name}.csv"));
            let file = std::fs::File::create(&csv_path).map_err(io(&csv_path))?;
            table.write_to(std::io::BufWriter::new(file)).map_err(io(&csv_path))?;
            let json_path = dir.join(format!("{name}.json"));
            let json = serde_json::to_string_pretty(summary).expect("summaries serialize");
            std::fs::write(&json_path, json + "\n").map_err(io(&json_path))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_text() {
        assert_eq!(fmt_num(0.9), "0.9");
        assert_eq!(fmt_num(0.9000000000000001), "0.9");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(30.0123456789012345), "30.012345678901");
        assert_eq!(fmt_num(3.4e-15), "3.4e-15");
        assert_eq!(fmt_num(-1.25e-7), "-1.25e-7");
        assert_eq!(fmt_num(-1e-20), "-1e-20");
    }

    #[test]
    fn csv_text() {
        let mut t = Table::new(["k", "probability"]);
        t.push(vec!["2".into(), fmt_num(0.9)]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,probability\n2,0.9\n");
    }
}
