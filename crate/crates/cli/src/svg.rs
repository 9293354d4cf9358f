//! Minimal scatter plots: points, an optional fitted line and an optional
//! horizontal reference rule.

use std::fmt::Write;

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// `(intercept, slope)`, drawn from `x = 0` when the axes are linear.
    pub line: Option<(f64, f64)>,
    pub reference: Option<f64>,
    /// Points are already logarithms; the fit is drawn over their range only.
    pub log_axes: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 70.0;

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-12) };
    (lo - pad, hi + pad)
}

impl Plot {
    pub fn render(&self) -> String {
        let x_min_data = if self.log_axes { f64::INFINITY } else { 0.0 };
        let (x0, x1) = extent(self.points.iter().map(|p| p.0).chain(std::iter::once(x_min_data).filter(|v| v.is_finite())));
        let mut ys: Vec<f64> = self.points.iter().map(|p| p.1).collect();
        ys.extend(self.reference);
        if let (Some((a, _)), false) = (self.line, self.log_axes) {
            ys.push(a);
        }
        let (y0, y1) = extent(ys.into_iter());
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#, right - left, bottom - top);
        for (x, anchor, v) in [(left, "start", x0), (right, "end", x1)] {
            let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="{anchor}">{v:.4e}</text>"#, bottom + 16.0);
        }
        for (y, v) in [(bottom, y0), (top + 10.0, y1)] {
            let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{v:.6}</text>"#, left - 4.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 24.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        if let Some(r) = self.reference {
            let _ = writeln!(s, r#"<line x1="{left}" x2="{right}" y1="{y:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="6 4"/>"#, y = sy(r));
        }
        for &(x, y) in &self.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#, sx(x), sy(y));
        }
        if let Some((a, b)) = self.line {
            let (xa, xb) = (x0, x1);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="1.5"/>"#,
                sx(xa),
                sy(a + b * xa),
                sx(xb),
                sy(a + b * xb)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
