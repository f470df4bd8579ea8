//! Self-contained SVG line plots: axes, tick labels, up to a handful of
//! polylines, and a legend. No plotting stack, no fonts beyond the SVG
//! default, and fully deterministic output (fixed-precision coordinates,
//! no timestamps or ids).

use std::fmt::Write as _;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

const W: f64 = 800.0;
const H: f64 = 520.0;
const ML: f64 = 78.0; // left margin (room for y tick labels)
const MR: f64 = 24.0;
const MT: f64 = 42.0;
const MB: f64 = 56.0;

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.2e}")
    }
}

fn range_of(series: &[Series], pick: fn(&(f64, f64)) -> f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for p in s.points {
            let v = pick(p);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (x0, x1) = range_of(series, |p| p.0);
    let (y0, y1) = range_of(series, |p| p.1);
    let sx = |v: f64| ML + (v - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |v: f64| H - MB - (v - y0) / (y1 - y0) * (H - MT - MB);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
        (ML + W - MR) / 2.0,
        escape(title)
    );

    // Grid, ticks, labels: 6 divisions on each axis.
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let px = sx(fx);
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{MT}\" x2=\"{px:.2}\" y2=\"{:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            H - MB
        );
        let _ = writeln!(
            out,
            "<text x=\"{px:.2}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            H - MB + 18.0,
            tick_label(fx)
        );
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let py = sy(fy);
        let _ = writeln!(
            out,
            "<line x1=\"{ML}\" y1=\"{py:.2}\" x2=\"{:.1}\" y2=\"{py:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            W - MR
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            ML - 6.0,
            py + 4.0,
            tick_label(fy)
        );
    }

    // Axes on top of the grid.
    let _ = writeln!(
        out,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        W - ML - MR,
        H - MT - MB
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        (ML + W - MR) / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        escape(ylabel)
    );

    for s in series {
        let mut pts = String::new();
        for (x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            pts.trim_end(),
            s.color
        );
    }

    // Legend, top-right inside the frame.
    for (i, s) in series.iter().enumerate() {
        let ly = MT + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
            W - MR - 150.0,
            W - MR - 122.0,
            s.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            W - MR - 116.0,
            ly + 4.0,
            escape(s.label)
        );
    }

    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
