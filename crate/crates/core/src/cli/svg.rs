//! Minimal deterministic SVG plots: `g_K` over the hull and a weighted
//! Chebyshev polynomial against its alternation envelope.

use std::fmt::Write as _;

use crate::interval_sets::IntervalSet;

const WIDTH: f64 = 800.0;
const PANEL: f64 = 280.0;
const MARGIN: f64 = 40.0;

/// The weighted polynomial panel.
pub struct PolyPanel {
    pub degree: usize,
    /// `(x, w(x)·T(x))` samples over the hull.
    pub samples: Vec<(f64, f64)>,
    pub norm: f64,
    pub alternation: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.top + PANEL - (y - self.y0) / (self.y1 - self.y0) * PANEL
    }

    fn polyline(&self, out: &mut String, pts: &[(f64, f64)], style: &str) {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
    }

    fn axes(&self, out: &mut String, set: &IntervalSet, title: &str) {
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN}" y="{:.2}" width="{:.2}" height="{PANEL}" fill="none" stroke="#999"/>"##,
            self.top,
            WIDTH - 2.0 * MARGIN
        );
        let _ = writeln!(out, r#"<text x="{MARGIN}" y="{:.2}" font-size="13">{title}</text>"#, self.top - 8.0);
        if self.y0 < 0.0 && self.y1 > 0.0 {
            self.polyline(out, &[(self.x0, 0.0), (self.x1, 0.0)], r##"stroke="#ccc""##);
        }
        for &(a, b) in set.bands() {
            let y = self.top + PANEL;
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#2a7" stroke-width="4"/>"##,
                self.px(a),
                self.px(b)
            );
        }
        for (x, anchor) in [(self.x0, "start"), (self.x1, "end")] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="{anchor}">{x:.4}</text>"#,
                self.px(x),
                self.top + PANEL + 16.0
            );
        }
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}

pub fn render(set: &IntervalSet, green: &[(f64, f64)], poly: Option<&PolyPanel>) -> String {
    let panels = 1 + poly.is_some() as usize;
    let height = panels as f64 * (PANEL + 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, x1) = (green.first().map_or(0.0, |p| p.0), green.last().map_or(1.0, |p| p.0));
    let (y0, y1) = range(green.iter().map(|p| p.1).chain([0.0]));
    let frame = Frame { x0, x1, y0, y1, top: MARGIN };
    frame.axes(&mut out, set, "Green function g_K (bands in green)");
    frame.polyline(&mut out, green, r##"stroke="#14c" stroke-width="1.5""##);

    if let Some(p) = poly {
        let (x0, x1) = (p.samples.first().map_or(0.0, |s| s.0), p.samples.last().map_or(1.0, |s| s.0));
        let (y0, y1) = range(
            [-p.norm, p.norm].into_iter().chain(p.samples.iter().map(|s| s.1.clamp(-3.0 * p.norm, 3.0 * p.norm))),
        );
        let frame = Frame { x0, x1, y0, y1, top: 2.0 * MARGIN + PANEL + MARGIN };
        frame.axes(&mut out, set, &format!("w*T_{} with envelope +-t_n", p.degree));
        for level in [p.norm, -p.norm] {
            frame.polyline(&mut out, &[(x0, level), (x1, level)], r##"stroke="#c41" stroke-dasharray="5,4""##);
        }
        let clipped: Vec<(f64, f64)> = p.samples.iter().map(|&(x, y)| (x, y.clamp(y0, y1))).collect();
        frame.polyline(&mut out, &clipped, r##"stroke="#14c" stroke-width="1.5""##);
        for &(x, y) in &p.alternation {
            let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#c41"/>"##, frame.px(x), frame.py(y));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_panels() {
        let set = IntervalSet::interval(-1.0, 1.0).unwrap();
        let green: Vec<(f64, f64)> = (0..=10).map(|i| (-1.2 + 0.24 * i as f64, 0.1 * i as f64)).collect();
        let panel = PolyPanel {
            degree: 1,
            samples: vec![(-1.0, -1.0), (1.0, 1.0)],
            norm: 1.0,
            alternation: vec![(-1.0, -1.0), (1.0, 1.0)],
        };
        let svg = render(&set, &green, Some(&panel));
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg, render(&set, &green, Some(&panel)));
    }
}
