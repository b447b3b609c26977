//! Result tables and the files derived from them: CSV, gnuplot-style `.dat`
//! blocks and standalone SVG line plots.

use std::fmt::Write as _;
use anyhow::{Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats use 17 significant digits so that parsing recovers them exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// A rectangular table whose row order is the order rows were pushed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    fn numeric(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self
            .column_index(name)
            .with_context(|| format!("no column named {name}"))?;
        Ok(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    /// `# units: name=unit ...` followed by the header and the rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("# units:");
        for c in &self.columns {
            write!(out, " {}={}", c.name, c.unit).unwrap();
        }
        out.push('\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    /// Two whitespace-separated columns, one line per row with both values.
    pub fn line_dat(&self, x: &str, y: &str) -> Result<String> {
        let xs = self.numeric(x)?;
        let ys = self.numeric(y)?;
        let mut out = format!("# {x} {y}\n");
        for (a, b) in xs.iter().zip(&ys) {
            if let (Some(a), Some(b)) = (a, b) {
                writeln!(out, "{} {}", Cell::Float(*a).render(), Cell::Float(*b).render()).unwrap();
            }
        }
        Ok(out)
    }

    /// One block per distinct value of `outer`, blank-line separated, each
    /// holding `outer inner value` rows in table order.
    pub fn heatmap_dat(&self, outer: &str, inner: &str, value: &str) -> Result<String> {
        let os = self.numeric(outer)?;
        let is = self.numeric(inner)?;
        let vs = self.numeric(value)?;
        let mut out = format!("# {outer} {inner} {value}\n");
        let mut current: Option<f64> = None;
        for ((o, i), v) in os.iter().zip(&is).zip(&vs) {
            let (Some(o), Some(i)) = (o, i) else { continue };
            if current.is_some_and(|c| c != *o) {
                out.push('\n');
            }
            current = Some(*o);
            let v = v.map_or("nan".to_string(), |v| Cell::Float(v).render());
            writeln!(out, "{} {} {v}", Cell::Float(*o).render(), Cell::Float(*i).render()).unwrap();
        }
        Ok(out)
    }

    pub fn axis_label(&self, name: &str) -> String {
        match self.columns.iter().find(|c| c.name == name) {
            Some(c) if !c.unit.is_empty() && c.unit != "1" => format!("{} [{}]", c.name, c.unit),
            _ => name.to_string(),
        }
    }

    /// Curves `(label, ys)` against column `x` as a self-contained SVG.
    pub fn line_svg(&self, x: &str, ys: &[&str], title: &str) -> Result<String> {
        let xs = self.numeric(x)?;
        let mut series = Vec::new();
        for &y in ys {
            let vals = self.numeric(y)?;
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(&vals)
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .collect();
            series.push((y, pts));
        }
        let label_y = if ys.len() == 1 {
            self.axis_label(ys[0])
        } else {
            ys.join(", ")
        };
        Ok(svg_plot(&series, &self.axis_label(x), &label_y, title))
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn svg_plot(series: &[(&str, Vec<(f64, f64)>)], xlabel: &str, ylabel: &str, title: &str) -> String {
    let (w, h) = (720.0, 440.0);
    let (ml, mr, mt, mb) = (80.0, 20.0, 40.0, 60.0);
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title)).unwrap();
    writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    )
    .unwrap();
    for t in nice_ticks(x0, x1) {
        let x = px(t);
        writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, h - mb, h - mb + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, h - mb + 18.0, fmt_tick(t)).unwrap();
    }
    for t in nice_ticks(y0, y1) {
        let y = py(t);
        writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="black"/>"#, ml - 5.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ml - 8.0, y + 4.0, fmt_tick(t)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ml + w - mr) / 2.0, h - 15.0, escape(xlabel)).unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (mt + h - mb) / 2.0,
        escape(ylabel)
    )
    .unwrap();
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, path.join(" ")).unwrap();
        if series.len() > 1 {
            let ly = mt + 16.0 + 16.0 * k as f64;
            writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - mr - 120.0, w - mr - 100.0).unwrap();
            writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - mr - 95.0, ly + 4.0, escape(name)).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}
