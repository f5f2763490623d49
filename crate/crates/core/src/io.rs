//! Numeric CSV input and output, and a minimal SVG scatter for DD-plots.
//!
//! Files are comma separated with a decimal point. A header row is detected
//! when some field of the first row does not parse as a number. Values are
//! written in shortest round-trip form, so write-then-read is exact.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::two_sample::DdPoint;

/// A parsed CSV table: optional header and the numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Option<Vec<String>>,
    pub data: DataMatrix,
}

fn parse_field(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok()
}

pub fn read_csv<R: Read>(input: R) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut header: Option<Vec<String>> = None;
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if line == 0 && header.is_none() && record.iter().any(|f| parse_field(f).is_none()) {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let expected = *cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {expected}",
                rows + 1,
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let v = parse_field(field).ok_or_else(|| {
                Error::Parse(format!("row {}, column {}: '{field}' is not a number", rows + 1, col + 1))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if let (Some(h), Some(c)) = (&header, cols) {
        if h.len() != c {
            return Err(Error::Parse(format!(
                "header has {} fields but rows have {c}",
                h.len()
            )));
        }
    }
    let cols = cols.ok_or(Error::EmptyData)?;
    let data = DataMatrix::from_row_major(values, rows, cols)?;
    Ok(CsvTable { header, data })
}

pub fn read_csv_file(path: &Path) -> Result<CsvTable> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(file))
}

pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    Ok(read_csv_file(path)?.data)
}

pub fn write_csv<W: Write>(m: &DataMatrix, header: Option<&[&str]>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    if let Some(h) = header {
        if h.len() != m.ncols() {
            return Err(Error::InvalidArgument("header length differs from column count".into()));
        }
        w.write_record(h).map_err(err)?;
    }
    for row in m.rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// A 600x600 SVG scatter of DD-plot points with the diagonal drawn.
pub fn ddplot_svg(points: &[DdPoint], x_label: &str, y_label: &str) -> String {
    const SIZE: f64 = 600.0;
    const PAD: f64 = 60.0;
    let span = SIZE - 2.0 * PAD;
    let px = |v: f64| PAD + v * span;
    let py = |v: f64| SIZE - PAD - v * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for p in points {
        if p.from_x {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue" fill-opacity="0.7"/>"#,
                px(p.depth_x),
                py(p.depth_y)
            );
        } else {
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="firebrick" fill-opacity="0.7"/>"#,
                px(p.depth_x) - 3.5,
                py(p.depth_y) - 3.5
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="300" y="585" text-anchor="middle" font-size="14">{}</text>"#,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="300" text-anchor="middle" font-size="14" transform="rotate(-90 18 300)">{}</text>"#,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
