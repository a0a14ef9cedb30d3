use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One homodyne sample: LO phase in [0, π) and quadrature in SNL units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRecord {
    #[serde(rename = "phase_rad")]
    pub phase: f64,
    #[serde(rename = "quadrature_snl")]
    pub value: f64,
}

impl QuadratureRecord {
    /// Folds any angle onto [0, π) using x_{θ+π} = −x_θ.
    pub fn new(phase: f64, value: f64) -> Self {
        let t = phase.rem_euclid(2.0 * PI);
        let (mut phase, value) = if t >= PI { (t - PI, -value) } else { (t, value) };
        if phase >= PI {
            phase = 0.0;
        }
        Self { phase, value }
    }
}

pub const QUADRATURE_HEADER: [&str; 2] = ["phase_rad", "quadrature_snl"];
pub const TRACE_HEADER: [&str; 2] = ["time_us", "variance_snl"];

pub fn write_quadratures<W: Write>(records: &[QuadratureRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(QUADRATURE_HEADER).map_err(csv_io)?;
    for r in records {
        w.write_record([r.phase.to_string(), r.value.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_quadratures_file(records: &[QuadratureRecord], path: &Path) -> Result<()> {
    write_quadratures(records, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Parses a quadrature CSV, reporting the 1-based line of the first defect.
pub fn read_quadratures<R: Read>(input: R) -> Result<Vec<QuadratureRecord>> {
    let rows = read_pairs(input, QUADRATURE_HEADER)?;
    Ok(rows.into_iter().map(|(p, v)| QuadratureRecord::new(p, v)).collect())
}

pub fn read_quadratures_file(path: &Path) -> Result<Vec<QuadratureRecord>> {
    read_quadratures(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Two-column numeric table with a fixed header.
pub fn write_columns<W: Write>(header: [&str; 2], a: &[f64], b: &[f64], out: W) -> Result<()> {
    write_table(&header, &[a, b], out)
}

/// Numeric table; all columns must have the same length.
pub fn write_table<W: Write>(header: &[&str], columns: &[&[f64]], out: W) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) || columns.len() != header.len() {
        return Err(Error::InvalidParameter("table columns differ in length".into()));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header).map_err(csv_io)?;
    for i in 0..n {
        w.write_record(columns.iter().map(|c| c[i].to_string())).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pairs<R: Read>(input: R, header: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut rows = rdr.records();
    let first = match rows.next() {
        None => return Err(Error::MalformedCsv { line: 1, msg: "empty file".into() }),
        Some(r) => r.map_err(|e| malformed(&e))?,
    };
    if first.len() != 2 || first.get(0) != Some(header[0]) || first.get(1) != Some(header[1]) {
        return Err(Error::MalformedCsv { line: 1, msg: format!("expected header {},{}", header[0], header[1]) });
    }
    let mut out = Vec::new();
    for row in rows {
        let row = row.map_err(|e| malformed(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 2 {
            return Err(Error::MalformedCsv { line, msg: format!("expected 2 fields, found {}", row.len()) });
        }
        let parse = |i: usize| -> Result<f64> {
            let field = row.get(i).unwrap_or("").trim();
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::MalformedCsv { line, msg: format!("'{field}' is not a finite number") }),
            }
        };
        out.push((parse(0)?, parse(1)?));
    }
    Ok(out)
}

fn malformed(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::MalformedCsv { line, msg: e.to_string() }
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let recs = vec![QuadratureRecord::new(0.1, -1.234567890123), QuadratureRecord::new(3.0, 0.5e-17)];
        let mut buf = Vec::new();
        write_quadratures(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("phase_rad,quadrature_snl\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_quadratures(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn phases_fold_with_sign_flip() {
        let r = QuadratureRecord::new(PI + 0.25, 1.5);
        assert!((r.phase - 0.25).abs() < 1e-12);
        assert_eq!(r.value, -1.5);
        let r = QuadratureRecord::new(-0.25, 1.5);
        assert!((r.phase - (PI - 0.25)).abs() < 1e-12);
        assert_eq!(r.value, -1.5);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let err = read_quadratures(&b""[..]).unwrap_err();
        assert!(matches!(err, Error::MalformedCsv { line: 1, .. }));
        let err = read_quadratures(&b"phase,value\n"[..]).unwrap_err();
        assert!(matches!(err, Error::MalformedCsv { line: 1, .. }));
        let err = read_quadratures(&b"phase_rad,quadrature_snl\n0.1,0.2\n0.3,abc\n"[..]).unwrap_err();
        assert!(matches!(err, Error::MalformedCsv { line: 3, .. }), "{err:?}");
        let err = read_quadratures(&b"phase_rad,quadrature_snl\n0.1,0.2,0.4\n"[..]).unwrap_err();
        assert!(matches!(err, Error::MalformedCsv { line: 2, .. }), "{err:?}");
        let err = read_quadratures(&b"phase_rad,quadrature_snl\nNaN,0.2\n"[..]).unwrap_err();
        assert!(matches!(err, Error::MalformedCsv { line: 2, .. }));
    }
}
