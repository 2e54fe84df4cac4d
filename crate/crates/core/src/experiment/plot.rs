//! Static SVG plots from the CSV artifacts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 150.0, 30.0, 50.0); // left, right, top, bottom
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Debug, Default)]
pub struct PlotOptions {
    /// Columns to draw; empty picks a default for the file's schema.
    pub columns: Vec<String>,
    pub log_y: Option<bool>,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(|s| s.trim().parse().unwrap_or(f64::NAN)).collect());
        }
        if headers.len() < 2 || rows.is_empty() {
            return Err(Error::Parse(format!("{}: need a header, two columns and one row", path.display())));
        }
        Ok(Self { headers, rows })
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Usage(format!("no column {name:?}; columns are {}", self.headers.join(", "))))
    }

    fn values(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r.get(c).copied().unwrap_or(f64::NAN))
    }
}

/// Renders `csv` to an SVG document. Files whose second column is `lambda`
/// become a heat map of one column; everything else becomes line plots
/// against the first column.
pub fn plot_csv(csv: impl AsRef<Path>, options: &PlotOptions) -> Result<String> {
    let table = Table::read(csv.as_ref())?;
    let title = csv.as_ref().file_name().map_or(String::new(), |f| f.to_string_lossy().into_owned());
    if table.headers[1] == "lambda" {
        let name = options.columns.first().map_or("rel_err", String::as_str);
        heatmap(&table, table.column(name)?, &title, options.log_y.unwrap_or(true))
    } else {
        let names: Vec<String> = if options.columns.is_empty() {
            default_columns(&table.headers)
        } else {
            options.columns.clone()
        };
        let cols = names.iter().map(|n| table.column(n)).collect::<Result<Vec<_>>>()?;
        let log = options.log_y.unwrap_or_else(|| names.iter().all(|n| n.contains("rel_err") || n.contains("param_update")));
        lines(&table, &cols, &title, log)
    }
}

fn default_columns(headers: &[String]) -> Vec<String> {
    for preferred in [&["rel_err"][..], &["nn_rel_err_mean", "vqe_rel_err_mean"], &["cost"], &["test_max_rel_err"], &["nn_rate", "vqe_rate"]] {
        if preferred.iter().all(|p| headers.iter().any(|h| h == p)) {
            return preferred.iter().map(|s| s.to_string()).collect();
        }
    }
    headers[1..].iter().take(PALETTE.len()).cloned().collect()
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    log: bool,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let (l, r, ..) = MARGIN;
        l + (x - self.x.0) / (self.x.1 - self.x.0).max(f64::MIN_POSITIVE) * (WIDTH - l - r)
    }

    fn py(&self, y: f64) -> f64 {
        let (.., t, b) = MARGIN;
        let y = if self.log { y.log10() } else { y };
        HEIGHT - b - (y - self.y.0) / (self.y.1 - self.y.0).max(f64::MIN_POSITIVE) * (HEIGHT - t - b)
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = MARGIN;
    let _ = writeln!(
        svg,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - l - r,
        HEIGHT - t - b
    );
    for i in 0..=4 {
        let x = f.x.0 + (f.x.1 - f.x.0) * i as f64 / 4.0;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, f.px(x), HEIGHT - b + 16.0, tick(x));
        let y = f.y.0 + (f.y.1 - f.y.0) * i as f64 / 4.0;
        let shown = if f.log { 10f64.powf(y) } else { y };
        let py = f.py(shown);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, py + 4.0, tick(shown));
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, l + (WIDTH - l - r) / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        t + (HEIGHT - t - b) / 2.0,
        t + (HEIGHT - t - b) / 2.0,
        escape(y_label)
    );
}

fn lines(table: &Table, cols: &[usize], title: &str, log: bool) -> Result<String> {
    let keep = |v: f64| v.is_finite() && (!log || v > 0.0);
    let x = range(table.values(0));
    let y_values = cols.iter().flat_map(|&c| table.values(c)).filter(|&v| keep(v));
    let y = range(y_values.map(|v| if log { v.log10() } else { v }));
    let f = Frame { x, y, log };
    let mut svg = String::new();
    header(&mut svg, title);
    let y_label = if log { "value (log scale)" } else { "value" };
    axes(&mut svg, &f, &table.headers[0], y_label);
    for (i, &c) in cols.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = table
            .rows
            .iter()
            .filter(|r| r[0].is_finite() && keep(r[c]))
            .map(|r| format!("{:.2},{:.2}", f.px(r[0]), f.py(r[c])))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        let ly = MARGIN.2 + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN.1 + 10.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&table.headers[c]));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn heatmap(table: &Table, c: usize, title: &str, log: bool) -> Result<String> {
    let mut xs: Vec<f64> = table.values(0).collect();
    let mut ys: Vec<f64> = table.values(1).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let transform = |v: f64| if log { v.max(1e-16).log10() } else { v };
    let (lo, hi) = range(table.values(c).map(transform));
    let f = Frame { x: range(xs.iter().copied()), y: range(ys.iter().copied()), log: false };
    let (dx, dy) = (cell(&xs), cell(&ys));
    let mut svg = String::new();
    header(&mut svg, &format!("{title}: {}", table.headers[c]));
    for r in &table.rows {
        let t = ((transform(r[c]) - lo) / (hi - lo)).clamp(0.0, 1.0);
        let (x0, x1) = (f.px(r[0] - dx / 2.0), f.px(r[0] + dx / 2.0));
        let (y0, y1) = (f.py(r[1] + dy / 2.0), f.py(r[1] - dy / 2.0));
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x0,
            y0,
            (x1 - x0).abs() + 0.3,
            (y1 - y0).abs() + 0.3,
            colour_map(t)
        );
    }
    for (name, colour) in [("hs", "white"), ("hc", "black")] {
        if let Ok(k) = table.column(name) {
            let mut seen: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[0], r[k])).filter(|(_, v)| v.is_finite()).collect();
            seen.dedup_by(|a, b| a.0 == b.0);
            let pts: Vec<String> = seen
                .iter()
                .filter(|(_, v)| *v >= f.y.0 && *v <= f.y.1)
                .map(|(x, v)| format!("{:.2},{:.2}", f.px(*x), f.py(*v)))
                .collect();
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-dasharray="5,3" points="{}"/>"#, pts.join(" "));
        }
    }
    axes(&mut svg, &f, &table.headers[0], &table.headers[1]);
    let lx = WIDTH - MARGIN.1 + 20.0;
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let y = HEIGHT - MARGIN.3 - t * (HEIGHT - MARGIN.2 - MARGIN.3);
        let _ = writeln!(svg, r#"<rect x="{lx}" y="{:.1}" width="16" height="{:.1}" fill="{}"/>"#, y - 30.0, 30.0, colour_map(t));
        if i % 5 == 0 {
            let v = lo + t * (hi - lo);
            let shown = if log { 10f64.powf(v) } else { v };
            let _ = writeln!(svg, r#"<text x="{}" y="{:.1}">{}</text>"#, lx + 22.0, y - 26.0, tick(shown));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn cell(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        1.0
    } else {
        (sorted[sorted.len() - 1] - sorted[0]) / (sorted.len() - 1) as f64
    }
}

/// Dark blue through teal to yellow.
fn colour_map(t: f64) -> String {
    let stops = [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let s = t * (stops.len() - 1) as f64;
    let i = (s.floor() as usize).min(stops.len() - 2);
    let u = s - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * u).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_map_endpoints() {
        assert_eq!(colour_map(0.0), "#440154");
        assert_eq!(colour_map(1.0), "#fde725");
    }

    #[test]
    fn ticks() {
        assert_eq!(tick(0.5), "0.5");
        assert_eq!(tick(2.0), "2");
        assert_eq!(tick(0.001), "1.0e-3");
    }
}
