//! Minimal bar and line charts. Coordinates are printed with two decimals,
//! which keeps the output deterministic and small.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (mut y0, mut y1) = bounds(ys);
        y0 = y0.min(0.0);
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn header(out: &mut String, manifest_hash: &str, title: &str) {
    let _ = writeln!(out, "<!-- manifest={manifest_hash} -->");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, b, t) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(out, r#"<path d="M{l:.2} {t:.2} V{b:.2} H{r:.2}" stroke="black" fill="none"/>"#);
    for (v, anchor, x) in [(f.x0, "start", l), (f.x1, "end", r)] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            b + 15.0,
            tick(v)
        );
    }
    for (v, y) in [(f.y0, b), (f.y1, t)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            l - 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Bars of width `bar_width` centred at each `(x, height)`.
pub fn bar_chart(manifest_hash: &str, title: &str, x_label: &str, bars: &[(f64, f64)], bar_width: f64) -> String {
    let half = 0.5 * bar_width;
    let f = Frame::new(
        bars.iter().flat_map(|b| [b.0 - half, b.0 + half]),
        bars.iter().map(|b| b.1),
    );
    let mut out = String::new();
    header(&mut out, manifest_hash, title);
    for &(x, h) in bars {
        let (xa, xb) = (f.px(x - half), f.px(x + half));
        let (ya, yb) = (f.py(h.max(0.0)), f.py(0.0));
        let _ = writeln!(
            out,
            r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            xb - xa,
            yb - ya,
            COLORS[0]
        );
    }
    axes(&mut out, &f, x_label, "count");
    out.push_str("</svg>\n");
    out
}

/// One polyline per series, with a legend in the top-right corner.
pub fn line_chart(manifest_hash: &str, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let pts = || series.iter().flat_map(|s| s.points.iter().copied());
    let f = Frame::new(pts().map(|p| p.0), pts().map(|p| p.1));
    let mut out = String::new();
    header(&mut out, manifest_hash, title);
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#,
            path.join(" ")
        );
        let ly = MARGIN + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11" text-anchor="end" fill="{color}">{}</text>"#,
            WIDTH - MARGIN,
            escape(&s.name)
        );
    }
    axes(&mut out, &f, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_chart_has_reference_and_bars() {
        let svg = bar_chart("abc", "h <1>", "x", &[(-1.0, 3.0), (0.0, 5.0), (1.0, 0.0)], 1.0);
        assert!(svg.starts_with("<!-- manifest=abc -->\n<svg"));
        assert_eq!(svg.matches("<rect x=").count(), 3);
        assert!(svg.contains("h &lt;1&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn line_chart_skips_non_finite_points() {
        let s = Series {
            name: "a".into(),
            points: vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 0.5)],
        };
        let svg = line_chart("h", "t", "x", "y", &[s]);
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(line.matches(',').count(), 2);
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let svg = bar_chart("h", "t", "x", &[(2.0, 0.0)], 0.0);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
