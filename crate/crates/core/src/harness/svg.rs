//! Minimal SVG line charts, enough for the usual curve-versus-round plots
//! without any external tooling.

use std::path::Path;

use crate::error::Result;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub fn write_line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    path: &Path,
) -> Result<()> {
    const W: f64 = 840.0;
    const H: f64 = 520.0;
    const M: f64 = 60.0;

    let mut xs_min = f64::INFINITY;
    let mut xs_max = f64::NEG_INFINITY;
    let mut ys_min = f64::INFINITY;
    let mut ys_max = f64::NEG_INFINITY;
    for s in series {
        for (x, y) in &s.points {
            xs_min = xs_min.min(*x);
            xs_max = xs_max.max(*x);
            ys_min = ys_min.min(*y);
            ys_max = ys_max.max(*y);
        }
    }
    if !xs_min.is_finite() {
        xs_min = 0.0;
        xs_max = 1.0;
        ys_min = 0.0;
        ys_max = 1.0;
    }
    if (xs_max - xs_min).abs() < 1e-30 {
        xs_max = xs_min + 1.0;
    }
    if (ys_max - ys_min).abs() < 1e-30 {
        ys_max = ys_min + 1.0;
    }
    let sx = |x: f64| M + (x - xs_min) / (xs_max - xs_min) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - ys_min) / (ys_max - ys_min) * (H - 2.0 * M);

    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut body = String::new();
    body.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    body.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        W / 2.0,
        title
    ));
    // axes
    body.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#333\"/>\n",
        H - M,
        W - M
    ));
    body.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"#333\"/>\n",
        H - M
    ));
    body.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        H - 16.0,
        x_label
    ));
    body.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        y_label
    ));
    for (tick, frac) in [(xs_min, 0.0f64), (xs_max, 1.0)] {
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#555\">{:.4}</text>\n",
            M + frac * (W - 2.0 * M),
            H - M + 18.0,
            tick
        ));
    }
    for (tick, frac) in [(ys_min, 0.0f64), (ys_max, 1.0)] {
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#555\">{:.4}</text>\n",
            M - 6.0,
            H - M - frac * (H - 2.0 * M) + 4.0,
            tick
        ));
    }
    for (k, s) in series.iter().enumerate() {
        let color = palette[k % palette.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color,
            pts.join(" ")
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n",
            W - M + 4.0,
            M + 16.0 * k as f64,
            color,
            s.label
        ));
    }
    body.push_str("</svg>\n");
    super::output::atomic_write(path, body.as_bytes())
}
