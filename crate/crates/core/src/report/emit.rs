use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::Report;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::invalid(format!("unknown format {s}"))),
        }
    }
}

pub fn to_json(report: &Report) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::invalid(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("report: {e}")))
}

/// Rows only, with a header line.
pub fn to_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::invalid(e.to_string());
    w.write_record(&report.columns).map_err(io)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|c| c.csv())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Line plot of the report's sweep columns; divergent points are drawn as
/// red crosses along the top edge.
pub fn to_svg(report: &Report) -> Result<String> {
    let plot = report.plot.as_ref().ok_or_else(|| {
        Error::invalid(format!("command {} has no sweep to plot", report.command))
    })?;
    let (xi, yi) = match (report.column(&plot.x), report.column(&plot.y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("plot columns are missing from the report")),
    };
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
        .collect();
    let (w, h, m) = (640.0, 400.0, 50.0);
    let finite: Vec<&(f64, f64)> = pts.iter().filter(|p| p.1.is_finite()).collect();
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| {
            (a.0.min(x), a.1.max(x))
        });
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut finite.iter().map(|p| p.1));
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        h - 12.0,
        plot.x
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        plot.y
    );
    for (v, x, y, anchor) in [
        (x0, sx(x0), h - m + 16.0, "start"),
        (x1, sx(x1), h - m + 16.0, "end"),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{v:.4}</text>"#
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{v:.4}</text>"#,
            m - 4.0,
            sy(v) + 4.0
        );
    }
    if !finite.is_empty() {
        let path: Vec<String> = finite
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for p in &finite {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                sx(p.0),
                sy(p.1)
            );
        }
    }
    for p in pts.iter().filter(|p| !p.1.is_finite()) {
        let (cx, cy) = (sx(p.0), m - 10.0);
        let _ = writeln!(
            s,
            r#"<path class="divergent" d="M{a:.2},{c:.2} L{b:.2},{d:.2} M{a:.2},{d:.2} L{b:.2},{c:.2}" stroke="red" stroke-width="2"/>"#,
            a = cx - 5.0,
            b = cx + 5.0,
            c = cy - 5.0,
            d = cy + 5.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
        Format::Svg => to_svg(report),
    }
}

/// Write `<dir>/<command>.<ext>` and return the path.
pub fn emit(report: &Report, format: Format, dir: &Path) -> Result<PathBuf> {
    let text = render(report, format)?;
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::invalid(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.{}", report.command, format.extension()));
    std::fs::write(&path, text)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::model::{Cell, PlotSpec};

    fn sweep(n: usize) -> Report {
        let mut r = Report::new(
            "openness",
            serde_json::json!({}),
            &["s", "sup", "divergent"],
        );
        for k in 0..n {
            let s = 1.0 + 0.1 * k as f64;
            let v = if k + 1 == n {
                Cell::Divergent
            } else {
                Cell::Num(s)
            };
            r.row(vec![Cell::Num(s), v, Cell::Bool(k + 1 == n)]);
        }
        r.plot = Some(PlotSpec {
            x: "s".into(),
            y: "sup".into(),
        });
        r
    }

    #[test]
    fn csv_rows_and_divergence() {
        assert_eq!(to_csv(&sweep(0)).unwrap(), "s,sup,divergent\n");
        let text = to_csv(&sweep(5)).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().last().unwrap().contains(",inf,"));
    }

    #[test]
    fn svg_marks_divergence() {
        let svg = to_svg(&sweep(5)).unwrap();
        assert_eq!(svg.matches("class=\"divergent\"").count(), 1);
        assert!(to_svg(&Report::new("norm", serde_json::json!({}), &["v"])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut r = sweep(3);
        r.set("boundary", 1.2);
        r.set("sup", Cell::Divergent);
        let back = from_json(&to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
