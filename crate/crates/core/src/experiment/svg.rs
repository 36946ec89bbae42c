//! Minimal self-contained SVG charts: line plots and cell heatmaps.

use std::fmt::Write;

use super::fmt_num;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {y})">{}</text>"#,
        escape(y_label),
        y = HEIGHT / 2.0
    );
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

/// Line chart with an optional dashed horizontal reference line.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    reference: Option<(&str, f64)>,
) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(reference.map(|r| r.1)),
    );
    let pad = (y1 - y0) * 0.05;
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let _ = writeln!(
        out,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN,
        m = MARGIN
    );
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{:.3}</text>"#,
            MARGIN - 4.0,
            fmt_num(sy(y) + 3.0),
            y
        );
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{:.2}</text>"#,
            fmt_num(sx(x)),
            HEIGHT - MARGIN + 14.0,
            x
        );
    }
    if let Some((label, y)) = reference {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="2" stroke-dasharray="6 4"><title>{}</title></line>"#,
            MARGIN,
            WIDTH - MARGIN,
            escape(label),
            y = fmt_num(sy(y))
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_num(sx(x)), fmt_num(sy(y))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                fmt_num(sx(x)),
                fmt_num(sy(y))
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 6.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(&s.label)
        );
    }
    axis_labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// A boolean cell mask drawn as an outline layer over a heatmap.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub label: String,
    pub color: String,
    /// Row-major, same shape as the heatmap values.
    pub mask: Vec<bool>,
}

/// Heatmap over `xs × ys`; `values[iy * xs.len() + ix]`. Rows with larger
/// `y` are drawn higher.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
    overlays: &[Overlay],
) -> String {
    assert_eq!(values.len(), xs.len() * ys.len());
    let mut out = String::new();
    header(&mut out, title);
    let plot_w = WIDTH - 2.0 * MARGIN - 80.0;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let cw = plot_w / xs.len().max(1) as f64;
    let ch = plot_h / ys.len().max(1) as f64;
    let (v0, v1) = range(values.iter().copied());
    let cell = |ix: usize, iy: usize| -> (f64, f64) {
        (
            MARGIN + ix as f64 * cw,
            MARGIN + plot_h - (iy as f64 + 1.0) * ch,
        )
    };
    for iy in 0..ys.len() {
        for ix in 0..xs.len() {
            let v = values[iy * xs.len() + ix];
            let t = ((v - v0) / (v1 - v0)).clamp(0.0, 1.0);
            let (x, y) = cell(ix, iy);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{:.4}</title></rect>"#,
                fmt_num(x),
                fmt_num(y),
                fmt_num(cw),
                fmt_num(ch),
                viridis_like(t),
                v
            );
        }
    }
    for (li, o) in overlays.iter().enumerate() {
        for iy in 0..ys.len() {
            for ix in 0..xs.len() {
                if o.mask[iy * xs.len() + ix] {
                    let (x, y) = cell(ix, iy);
                    let inset = 1.0 + li as f64;
                    let _ = writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
                        fmt_num(x + inset),
                        fmt_num(y + inset),
                        fmt_num((cw - 2.0 * inset).max(0.5)),
                        fmt_num((ch - 2.0 * inset).max(0.5)),
                        escape(&o.color)
                    );
                }
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 70.0,
            MARGIN + 14.0 * (li as f64 + 1.0),
            escape(&o.color),
            escape(&o.label)
        );
    }
    for (ix, x) in xs.iter().enumerate().step_by((xs.len() / 6).max(1)) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{:.2}</text>"#,
            fmt_num(MARGIN + (ix as f64 + 0.5) * cw),
            HEIGHT - MARGIN + 14.0,
            x
        );
    }
    for (iy, y) in ys.iter().enumerate().step_by((ys.len() / 6).max(1)) {
        let (_, cy) = cell(0, iy);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{:.2}</text>"#,
            MARGIN - 4.0,
            fmt_num(cy + ch / 2.0 + 3.0),
            y
        );
    }
    axis_labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// Dark purple to yellow.
fn viridis_like(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 4] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (253.0, 231.0, 37.0),
    ];
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(a.0, b.0),
        lerp(a.1, b.1),
        lerp(a.2, b.2)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_is_self_contained() {
        let s = line_chart(
            "a < b & c",
            "k",
            "p",
            &[Series {
                label: "w=0".into(),
                points: vec![(1.0, 0.5), (2.0, 0.6)],
            }],
            Some(("algorithm alone", 0.55)),
        );
        assert!(s.starts_with("<svg"));
        assert!(s.contains("a &lt; b &amp; c"));
        assert!(!s.contains("href"));
    }

    #[test]
    fn heatmap_counts_cells() {
        let s = heatmap(
            "t",
            "x",
            "y",
            &[0.0, 1.0],
            &[0.0, 1.0, 2.0],
            &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            &[Overlay {
                label: "mask".into(),
                color: "red".into(),
                mask: vec![true, false, false, false, false, true],
            }],
        );
        assert_eq!(s.matches("<title>").count(), 6);
        assert_eq!(s.matches(r#"stroke="red""#).count(), 2);
        assert_eq!(viridis_like(0.0), "#440154");
        assert_eq!(viridis_like(1.0), "#fde725");
    }
}
