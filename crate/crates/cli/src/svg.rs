//! A minimal self-contained SVG line plot: discrepancy (log scale) against
//! the bit length r. No external renderer, stylesheet, or font reference —
//! the file is complete as written.

use digitweyl::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 72.0; // left margin
const MR: f64 = 24.0;
const MT: f64 = 28.0;
const MB: f64 = 48.0;

fn x_pos(r: f64, r_min: f64, r_max: f64) -> f64 {
    let span = (r_max - r_min).max(1e-12);
    ML + (r - r_min) / span * (W - ML - MR)
}

fn y_pos(log_d: f64, lo: f64, hi: f64) -> f64 {
    let span = (hi - lo).max(1e-12);
    MT + (hi - log_d) / span * (H - MT - MB)
}

/// Render `(r, D)` samples, `D` on a base-10 log scale. Returns the SVG text.
pub fn discrepancy_plot(points: &[(u32, f64)], title: &str) -> Result<String> {
    if points.is_empty() {
        return Err(Error::description("nothing to plot"));
    }
    for (r, d) in points {
        if !(*d > 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("D = {d} at r = {r} cannot go on a log scale")));
        }
    }
    let r_min = points.iter().map(|p| p.0).min().unwrap() as f64;
    let r_max = points.iter().map(|p| p.0).max().unwrap() as f64;
    let logs: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    // Pad the y-window to whole decades so the tick labels are exact powers.
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
    let (lo, hi) = if lo == hi { (lo - 1.0, hi) } else { (lo, hi) };

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str(&format!(
        "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n  <text x=\"{}\" y=\"18\" \
         font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{title}</text>\n",
        (ML + W - MR) / 2.0
    ));
    // Axes.
    s.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    s.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR
    ));
    // y ticks at whole decades.
    let mut dec = lo as i64;
    while dec <= hi as i64 {
        let y = y_pos(dec as f64, lo, hi);
        s.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{y}\" x2=\"{ML}\" y2=\"{y}\" stroke=\"black\"/>\n",
            ML - 5.0
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">1e{dec}</text>\n",
            ML - 8.0,
            y + 4.0
        ));
        s.push_str(&format!(
            "  <line x1=\"{ML}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#cccccc\" \
             stroke-dasharray=\"3,3\"/>\n",
            W - MR
        ));
        dec += 1;
    }
    // x ticks at the sampled r values.
    for (r, _) in points {
        let x = x_pos(*r as f64, r_min, r_max);
        s.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{0}\" x2=\"{x}\" y2=\"{1}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        s.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{r}</text>\n",
            H - MB + 18.0
        ));
    }
    // Axis labels.
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\">r</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0
    ));
    s.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">D (log scale)</text>\n",
        (MT + H - MB) / 2.0
    ));
    // The curve.
    let path: Vec<String> = points
        .iter()
        .zip(&logs)
        .map(|((r, _), ld)| {
            format!("{:.2},{:.2}", x_pos(*r as f64, r_min, r_max), y_pos(*ld, lo, hi))
        })
        .collect();
    if path.len() > 1 {
        s.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
    }
    for p in &path {
        let (x, y) = p.split_once(',').expect("formatted above");
        s.push_str(&format!("  <circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"#1f6fb2\"/>\n"));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
