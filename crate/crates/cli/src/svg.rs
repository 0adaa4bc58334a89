//! A single line chart: the empirical success curve against m, with two
//! labelled vertical rules.

use std::fmt::Write;

use onebit_core::EstimateRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureLine {
    pub m: f64,
    pub colour: &'static str,
    pub label: String,
}

/// `rows` must be non-empty; the x range covers the rows and both lines.
pub fn render_figure(title: &str, rows: &[EstimateRow], lines: &[FigureLine]) -> String {
    let ms = rows.iter().map(|r| r.m as f64).chain(lines.iter().map(|l| l.m));
    let (lo, hi) = ms.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), m| (a.min(m), b.max(m)));
    let pad = ((hi - lo) * 0.04).max(1.0);
    let (x0, x1) = (lo - pad, hi + pad);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |m: f64| LEFT + (m - x0) / (x1 - x0) * plot_w;
    let sy = |p: f64| TOP + (1.0 - p) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let _ = writeln!(s, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#, sy(0.0), LEFT + plot_w, sy(0.0));
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{LEFT}" y2="{}"/>"#, sy(0.0), sy(1.0));
    for k in 0..=4 {
        let y = sy(k as f64 / 4.0);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}"/>"#, LEFT - 4.0);
    }
    for m in x_ticks(x0, x1) {
        let x = sx(m);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}"/>"#, sy(0.0), sy(0.0) + 4.0);
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="tick-labels" fill="black">"#);
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{p}</text>"#, LEFT - 8.0, sy(p) + 4.0);
    }
    for m in x_ticks(x0, x1) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{m}</text>"#, sx(m), sy(0.0) + 18.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">m</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">P(success)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    let points: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.m as f64), sy(r.p_hat))).collect();
    let _ = writeln!(
        s,
        r#"<polyline class="empirical" fill="none" stroke="blue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );

    for (k, line) in lines.iter().enumerate() {
        let x = sx(line.m);
        let _ = writeln!(
            s,
            r#"<line class="rule" x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="{}" stroke-width="1.5"/>"#,
            sy(0.0),
            sy(1.0),
            line.colour
        );
        let _ = writeln!(
            s,
            r#"<text class="rule-label" x="{:.2}" y="{:.2}" fill="{}">{}</text>"#,
            x + 4.0,
            sy(1.0) + 14.0 + 16.0 * k as f64,
            line.colour,
            escape(&line.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Round ticks, at most nine of them.
fn x_ticks(x0: f64, x1: f64) -> Vec<f64> {
    let raw = (x1 - x0) / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut t = (x0 / step).ceil() * step;
    while t <= x1 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(x_ticks(88.0, 228.0), vec![100.0, 120.0, 140.0, 160.0, 180.0, 200.0, 220.0]);
        assert_eq!(x_ticks(3.0, 15.0), vec![4.0, 6.0, 8.0, 10.0, 12.0, 14.0]);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
