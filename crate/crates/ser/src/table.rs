//! Error tables as CSV: `N,M,max_err_u,max_err_s,variant`.
//!
//! Errors are written with three significant digits (`7.38e-03`). Rows whose study had failed
//! solves carry `;incomplete=<count>` after the variant label; the failed parameters themselves
//! are not stored.

use std::path::Path;

use ser_core::study::StudyRow;

use crate::error::{CliError, Result};

/// Column names.
pub const HEADER: [&str; 5] = ["N", "M", "max_err_u", "max_err_s", "variant"];

const INCOMPLETE: &str = ";incomplete=";

/// `x` in scientific notation with three significant digits and a two-digit exponent.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn variant_field(row: &StudyRow) -> String {
    if row.is_complete() {
        row.variant.clone()
    } else {
        format!("{}{INCOMPLETE}{}", row.variant, row.failures)
    }
}

/// Rows sorted by `(variant, N)`, rendered as CSV text.
pub fn render_table(rows: &[StudyRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::Config("no study rows to write".into()));
    }
    let mut sorted: Vec<&StudyRow> = rows.iter().collect();
    sorted.sort_by(|a, b| (&a.variant, a.n).cmp(&(&b.variant, b.n)));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let write_err = |e: csv::Error| CliError::Config(format!("cannot render table: {e}"));
    w.write_record(HEADER).map_err(write_err)?;
    for row in sorted {
        w.write_record([
            row.n.to_string(),
            row.m.to_string(),
            format_sci(row.max_err_u),
            format_sci(row.max_err_s),
            variant_field(row),
        ])
        .map_err(write_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("cannot render table: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

/// Writes the table to `path`.
pub fn emit_table(rows: &[StudyRow], path: &Path) -> Result<()> {
    let text = render_table(rows)?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses table text back into rows (errors keep their three digits).
pub fn parse_table(text: &str) -> std::result::Result<Vec<StudyRow>, String> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            let field = |i: usize| rec.get(i).ok_or_else(|| format!("short record {rec:?}"));
            let num = |i: usize| field(i)?.parse::<f64>().map_err(|e| format!("{}: {e}", field(i).unwrap_or("")));
            let int = |i: usize| field(i)?.parse::<usize>().map_err(|e| format!("{}: {e}", field(i).unwrap_or("")));
            let (variant, failures) = match field(4)?.split_once(INCOMPLETE) {
                Some((v, k)) => (v.to_string(), k.parse::<usize>().map_err(|e| e.to_string())?),
                None => (field(4)?.to_string(), 0),
            };
            Ok(StudyRow {
                n: int(0)?,
                m: int(1)?,
                max_err_u: num(2)?,
                max_err_s: num(3)?,
                variant,
                failures,
                failed: Vec::new(),
            })
        })
        .collect()
}

/// Reads and parses a table file.
pub fn read_table(path: &Path) -> Result<Vec<StudyRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text).map_err(|reason| CliError::Format {
        path: path.into(),
        reason,
    })
}
