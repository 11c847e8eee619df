use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Compact JSON with every finite float written with 17 significant digits.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", float17(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{}", float17(value as f64))
    }
}

/// `d.dddddddddddddddde[-]x`.
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    value.serialize(&mut ser).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes artifacts into one directory and nowhere else.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

pub const FAILED: &str = "FAILED";

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        let marker = root.join(FAILED);
        if marker.exists() {
            std::fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
        }
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(|e| CliError::io(&p, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = to_json(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// One JSON document per line.
    pub fn json_lines<T: Serialize>(&mut self, name: &str, values: &[T]) -> Result<(), CliError> {
        let mut text = String::new();
        for v in values {
            text.push_str(&to_json(v)?);
            text.push('\n');
        }
        self.write(name, &text)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Leave a marker describing why the run did not complete or pass.
    pub fn mark_failed(root: &Path, reason: &str) {
        if root.is_dir() {
            let _ = std::fs::write(root.join(FAILED), format!("{reason}\n"));
        }
    }
}

/// CSV with a header row; floats use 17 significant digits.
pub struct Csv {
    text: String,
}

pub enum Cell<'a> {
    F(f64),
    U(usize),
    S(&'a str),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let parts: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::F(v) => float17(*v),
                Cell::U(v) => v.to_string(),
                Cell::S(s) => s.to_string(),
            })
            .collect();
        self.text.push_str(&parts.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// A named polyline of a plot.
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Self-contained SVG line plot; logarithmic axes plot `log10` of the data
/// and drop nonpositive values.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_x: bool, log_y: bool) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let ok = |&(x, y): &(f64, f64)| (!log_x || x > 0.0) && (!log_y || y > 0.0) && x.is_finite() && y.is_finite();
    let data: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().filter(|p| ok(p)).map(|&(x, y)| (tx(x), ty(y))).collect())
        .collect();
    let all: Vec<(f64, f64)> = data.iter().flatten().copied().collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let label = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.3}") };
    for (v, anchor_x) in [(x0, m), (x1, w - m)] {
        let _ = writeln!(s, r#"<text x="{anchor_x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, h - m + 16.0, label(v, log_x));
    }
    for (v, anchor_y) in [(y0, h - m), (y1, m)] {
        let _ = writeln!(s, r#"<text x="{}" y="{anchor_y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, m - 4.0, label(v, log_y));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#, w / 2.0, h - 18.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(ylabel)
    );
    for (i, (ser, pts)) in series.iter().zip(&data).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        if !path.is_empty() {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            w - m - 120.0,
            m + 16.0 * (i as f64 + 1.0),
            escape(ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_and_null_for_non_finite() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            b: f64,
            c: Vec<f64>,
        }
        let s = to_json(&R {
            a: 0.1,
            b: f64::NAN,
            c: vec![-0.75, 3.0],
        })
        .unwrap();
        assert_eq!(s, r#"{"a":1.0000000000000001e-1,"b":null,"c":[-7.5000000000000000e-1,3.0000000000000000e0]}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn plot_is_standalone_svg() {
        let svg = line_plot(
            "t<1",
            "x",
            "y",
            &[Series {
                name: "a",
                points: vec![(1.0, 1.0), (10.0, 0.1), (0.0, 5.0)],
            }],
            true,
            true,
        );
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.contains("t&lt;1"));
        assert!(!svg.contains("href"));
    }
}
