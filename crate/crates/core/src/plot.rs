//! Minimal static SVG line charts for scan tables.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Horizontal dashed line, e.g. the isotropic level `xi / N`.
    pub reference: Option<(f64, &'a str)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    }
}

impl LineChart<'_> {
    /// Renders the chart. Points with non-finite coordinates are skipped.
    pub fn to_svg(&self) -> Result<String> {
        if self.x.len() != self.y.len() {
            return Err(Error::InvalidInput("plot needs as many x as y values".into()));
        }
        let points: Vec<(f64, f64)> =
            self.x.iter().zip(self.y).map(|(&x, &y)| (x, y)).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        if points.is_empty() {
            return Err(Error::InvalidInput("nothing to plot".into()));
        }
        let (x0, x1) = span(points.iter().map(|p| p.0));
        let (y0, y1) = span(points.iter().map(|p| p.1).chain(self.reference.map(|r| r.0)));
        let (y0, y1) = (y0.min(0.0), y1 + 0.05 * (y1 - y0.min(0.0)));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(self.title));
        let (bx, by) = (MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            s,
            r#"<path d="M{bx} {top} V{by} H{right}" fill="none" stroke="black"/>"#,
            top = MARGIN,
            right = WIDTH - MARGIN
        );
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<line x1="{0:.2}" y1="{by}" x2="{0:.2}" y2="{1}" stroke="black"/><text x="{0:.2}" y="{2}" text-anchor="middle">{3:.3e}</text>"#,
                px(xv),
                by + 5.0,
                by + 20.0,
                xv
            );
            let _ = writeln!(
                s,
                r#"<line x1="{0}" y1="{1:.2}" x2="{bx}" y2="{1:.2}" stroke="black"/><text x="{2}" y="{3:.2}" text-anchor="end">{4:.3e}</text>"#,
                bx - 5.0,
                py(yv),
                bx - 8.0,
                py(yv) + 4.0,
                yv
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 15.0, escape(self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="15" y="{0}" text-anchor="middle" transform="rotate(-90 15 {0})">{1}</text>"#,
            HEIGHT / 2.0,
            escape(self.y_label)
        );
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path.join(" "));
        if let Some((level, label)) = self.reference {
            let _ = writeln!(
                s,
                r#"<line x1="{bx}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="firebrick" stroke-dasharray="6 4"/><text x="{2}" y="{3:.2}" text-anchor="end" fill="firebrick">{4}</text>"#,
                py(level),
                WIDTH - MARGIN,
                WIDTH - MARGIN,
                py(level) - 5.0,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}
