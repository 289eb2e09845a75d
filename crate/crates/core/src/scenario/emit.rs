//! CSV and SVG output for time series.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Columns sharing a time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub names: Vec<String>,
    pub t: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(t: Vec<f64>) -> Self {
        Series {
            names: Vec::new(),
            t,
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.t.len() {
            return Err(Error::InvalidSpec(format!(
                "column has {} values for {} times",
                values.len(),
                self.t.len()
            )));
        }
        self.names.push(name.into());
        self.columns.push(values);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Header `t,<names...>`, 17 significant digits, LF line endings.
pub fn csv_string(series: &Series) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = String::from("t");
    for n in &series.names {
        out.push(',');
        if n.contains([',', '"', '\n']) {
            out.push('"');
            out.push_str(&n.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(n);
        }
    }
    out.push('\n');
    for (k, t) in series.t.iter().enumerate() {
        out.push_str(&num(*t));
        for c in &series.columns {
            out.push(',');
            out.push_str(&num(c[k]));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(series: &Series, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(series)?)?;
    Ok(())
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A single polyline of `column` against `t`, with axes and labels.
pub fn svg_string(series: &Series, column: &str, title: &str) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let ys = series
        .column(column)
        .ok_or_else(|| Error::InvalidSpec(format!("no column named {column}")))?;
    let pts: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(ys)
        .filter(|(t, y)| t.is_finite() && y.is_finite())
        .map(|(t, y)| (*t, *y))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 <= 0.0 {
        let pad = if y0 == 0.0 { 1.0 } else { 0.5 * y0.abs() };
        y0 -= pad;
        y1 += pad;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (ax0, ax1, ay0, ay1) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<line x1="{ax0}" y1="{ay0}" x2="{ax1}" y2="{ay0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ax0}" y1="{ay0}" x2="{ax0}" y2="{ay1}" stroke="black"/>"#
    );
    let label = |v: f64| format!("{v:.3e}");
    let _ = writeln!(
        s,
        r#"<text x="{ax0}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
        ay0 + 16.0,
        label(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{ax1}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
        ay0 + 16.0,
        label(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{ay0}" font-size="11" text-anchor="end">{}</text>"#,
        ax0 - 4.0,
        label(y0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        ax0 - 4.0,
        ay1 + 4.0,
        label(y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">t</text>"#,
        W / 2.0,
        H - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(column)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points=""#);
    for (i, &(x, y)) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.3},{:.3}", sx(x), sy(y));
    }
    s.push_str("\"/>\n</svg>\n");
    Ok(s)
}

pub fn emit_svg(series: &Series, column: &str, title: &str, path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(series, column, title)?)?;
    Ok(())
}
