//! Point set CSV files and the scatter plot.

use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use unitdist_core::arith::parse_rational;
use unitdist_core::construct::PointSet;
use unitdist_core::Error;

use crate::commands::CliError;

pub struct CsvPoints {
    pub approx: Vec<(f64, f64)>,
    /// Basis coordinates when the file carries `c0, c1, ...` columns.
    pub coords: Option<Vec<Vec<BigRational>>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Core(Error::Parse { line, msg: msg.into() })
}

/// Reads a CSV with a header naming `re` and `im`; further `c<j>` columns are
/// read as exact coordinates.
pub fn read_points(path: &Path) -> Result<CsvPoints, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (re, im) = match (col("re"), col("im")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(parse_err(1, "header must name columns re and im")),
    };
    let mut cj = Vec::new();
    while let Some(c) = col(&format!("c{}", cj.len())) {
        cj.push(c);
    }
    let mut approx = Vec::new();
    let mut coords = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let num = |c: usize| -> Result<f64, CliError> {
            let s = rec.get(c).ok_or_else(|| parse_err(line, "missing field"))?;
            s.parse::<f64>().map_err(|_| parse_err(line, format!("bad number {s:?}")))
        };
        approx.push((num(re)?, num(im)?));
        if !cj.is_empty() {
            let row = cj
                .iter()
                .map(|&c| {
                    let s = rec.get(c).ok_or_else(|| parse_err(line, "missing coordinate"))?;
                    parse_rational(s).ok_or_else(|| parse_err(line, format!("bad rational {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            coords.push(row);
        }
    }
    Ok(CsvPoints { approx, coords: (!cj.is_empty()).then_some(coords) })
}

pub fn write_pointset(path: &Path, ps: &PointSet) -> Result<(), CliError> {
    let (header, rows) = ps.csv_rows();
    write_rows(path, &header, &rows)
}

pub fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Points and unit-pair segments, fitted into a 640 x 640 view.
pub fn scatter_svg(points: &[(f64, f64)], pairs: &[(usize, usize)]) -> String {
    let size = 640.0;
    let pad = 20.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let s = (size - 2.0 * pad) / span;
    let px = |p: (f64, f64)| (pad + (p.0 - x0) * s, size - pad - (p.1 - y0) * s);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r##"<g stroke="#4a7fb5" stroke-width="0.6" stroke-opacity="0.7">"##);
    for &(i, j) in pairs {
        let (a, b) = (px(points[i]), px(points[j]));
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, a.0, a.1, b.0, b.1);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g fill="#202020">"##);
    for &p in points {
        let (x, y) = px(p);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5"/>"#);
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}
