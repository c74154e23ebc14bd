//! File emitters: sweep report CSV, embedding CSV, hit-curve CSV, SVG scatter.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{DataMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::metrics::Embedding;

/// One grid cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    /// `(column name, formatted value)` in column order.
    pub params: Vec<(String, String)>,
    /// Absent when the cell failed.
    pub silhouette: Option<f64>,
    pub seconds: f64,
    pub seed: u64,
    pub error: Option<String>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_string<F>(fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(format!("csv utf-8: {e}")))
}

/// `method,<params...>,silhouette,seconds,seed,error`. Scores use four
/// decimals; `seconds` is left empty unless `include_seconds` is set.
pub fn render_report_csv(rows: &[ReportRow], include_seconds: bool) -> Result<String> {
    let first = rows.first().ok_or_else(|| Error::Empty("report has no rows".into()))?;
    let names: Vec<&str> = first.params.iter().map(|(k, _)| k.as_str()).collect();
    if let Some(bad) = rows
        .iter()
        .find(|r| r.params.iter().map(|(k, _)| k.as_str()).ne(names.iter().copied()))
    {
        return Err(Error::Invariant(format!(
            "report rows disagree on parameter columns ({} vs {})",
            first.method, bad.method
        )));
    }
    csv_string(|w| {
        let mut header = vec!["method"];
        header.extend(&names);
        header.extend(["silhouette", "seconds", "seed", "error"]);
        w.write_record(&header)?;
        for r in rows {
            let mut rec = vec![r.method.clone()];
            rec.extend(r.params.iter().map(|(_, v)| v.clone()));
            rec.push(r.silhouette.map(|s| format!("{s:.4}")).unwrap_or_default());
            rec.push(if include_seconds { format!("{:.3}", r.seconds) } else { String::new() });
            rec.push(r.seed.to_string());
            rec.push(r.error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn write_report_csv(rows: &[ReportRow], path: impl AsRef<Path>, include_seconds: bool) -> Result<()> {
    write_file(path.as_ref(), &render_report_csv(rows, include_seconds)?)
}

fn coordinate_names(dim: usize) -> Vec<String> {
    (0..dim)
        .map(|k| match k {
            0 => "x".to_string(),
            1 => "y".to_string(),
            2 => "z".to_string(),
            k => format!("c{k}"),
        })
        .collect()
}

/// `index,x,y,label`, coordinates with nine significant digits.
pub fn render_embedding_csv(emb: &Embedding) -> Result<String> {
    csv_string(|w| {
        let mut header = vec!["index".to_string()];
        header.extend(coordinate_names(emb.dim()));
        header.push("label".to_string());
        w.write_record(&header)?;
        for i in 0..emb.len() {
            let mut rec = vec![i.to_string()];
            rec.extend(emb.point(i).iter().map(|v| format!("{v:.8e}")));
            rec.push(emb.labels.name_of(i).to_string());
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn write_embedding_csv(emb: &Embedding, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_embedding_csv(emb)?)
}

/// Reads a file written by [`write_embedding_csv`]; label codes follow
/// first appearance.
pub fn read_embedding_csv(path: impl AsRef<Path>) -> Result<Embedding> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "index" || &headers[headers.len() - 1] != "label" {
        return Err(Error::Invariant(format!("{} is not an embedding csv", path.display())));
    }
    let dim = headers.len() - 2;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        for k in 0..dim {
            let field = &rec[k + 1];
            values.push(field.parse::<f64>().map_err(|_| Error::NonNumeric {
                line,
                column: headers[k + 1].to_string(),
                value: field.to_string(),
            })?);
        }
        labels.push(rec[dim + 1].to_string());
    }
    Embedding::new(DataMatrix::new(labels.len(), dim, values)?, LabelVector::from_strings(&labels)?)
}

/// `k,<name1>,<name2>,...`, one row per neighborhood size.
pub fn render_hit_curves_csv(curves: &[(String, Vec<(usize, f64)>)]) -> Result<String> {
    let (_, first) = curves.first().ok_or_else(|| Error::Empty("no hit curves".into()))?;
    let ks: Vec<usize> = first.iter().map(|&(k, _)| k).collect();
    for (name, c) in curves {
        if c.iter().map(|&(k, _)| k).ne(ks.iter().copied()) {
            return Err(Error::InvalidParameter(format!("hit curve `{name}` has a different k range")));
        }
    }
    csv_string(|w| {
        let mut header = vec!["k".to_string()];
        header.extend(curves.iter().map(|(n, _)| n.clone()));
        w.write_record(&header)?;
        for (row, k) in ks.iter().enumerate() {
            let mut rec = vec![k.to_string()];
            rec.extend(curves.iter().map(|(_, c)| format!("{:.6}", c[row].1)));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn write_hit_curves_csv(curves: &[(String, Vec<(usize, f64)>)], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_hit_curves_csv(curves)?)
}

pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 0.05 * CANVAS;

/// Marker style for a label code: palette color plus a variant that changes
/// each time the palette wraps (filled, ring, outlined).
fn marker_style(code: usize) -> String {
    let color = PALETTE[code % PALETTE.len()];
    match (code / PALETTE.len()) % 3 {
        0 => format!(r#"fill="{color}""#),
        1 => format!(r#"fill="none" stroke="{color}" stroke-width="2""#),
        _ => format!(r##"fill="{color}" stroke="#000000" stroke-width="1.5""##),
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn axis_map(values: impl Iterator<Item = f64> + Clone, flip: bool) -> impl Fn(f64) -> f64 {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    move |v| {
        if hi > lo {
            let t = (v - lo) / (hi - lo);
            let t = if flip { 1.0 - t } else { t };
            MARGIN + t * (CANVAS - 2.0 * MARGIN)
        } else {
            CANVAS / 2.0
        }
    }
}

/// Standalone SVG: one circle per point, colored by label, with a legend.
pub fn render_svg_scatter(emb: &Embedding) -> Result<String> {
    if emb.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: emb.dim(),
        });
    }
    let xs = (0..emb.len()).map(|i| emb.point(i)[0]);
    let ys = (0..emb.len()).map(|i| emb.point(i)[1]);
    let mx = axis_map(xs, false);
    let my = axis_map(ys, true);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {CANVAS} {CANVAS}" width="{CANVAS}" height="{CANVAS}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(svg, r#"<g class="points" fill-opacity="0.8">"#);
    for i in 0..emb.len() {
        let p = emb.point(i);
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" {}/>"#,
            mx(p[0]),
            my(p[1]),
            marker_style(emb.labels.code(i))
        );
    }
    let _ = writeln!(svg, "</g>");

    let names = emb.labels.names();
    let _ = writeln!(svg, r#"<g class="legend" font-family="sans-serif" font-size="14">"#);
    let _ = writeln!(
        svg,
        r##"<rect x="8" y="8" width="180" height="{}" fill="#ffffff" fill-opacity="0.85" stroke="#999999"/>"##,
        names.len() * 20 + 8
    );
    for (code, name) in names.iter().enumerate() {
        let y = 14 + code * 20;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><rect x="16" y="{y}" width="12" height="12" {}/><text x="36" y="{}">{}</text></g>"#,
            marker_style(code),
            y + 11,
            escape_xml(name)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg_scatter(emb: &Embedding, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_svg_scatter(emb)?)
}
