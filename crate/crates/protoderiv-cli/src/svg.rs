//! Minimal deterministic SVG line plots; no external renderer.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Renders one polyline per labeled series. Coordinates are formatted with
/// fixed precision so identical input yields identical bytes.
pub fn line_plot(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let x_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.0))
        .fold(1e-9, f64::max);
    let y_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.1))
        .fold(1e-9, f64::max);
    let px = |x: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * x / x_max;
    let py = |y: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * y / (y_max * 1.08);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>",
        WIDTH / 2.0
    );
    // Axes.
    let _ = writeln!(
        s,
        "<line x1=\"{m:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        "<line x1=\"{m:.1}\" y1=\"{t:.1}\" x2=\"{m:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{x_max}</text>",
        px(x_max),
        HEIGHT - MARGIN + 18.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y_max}</text>",
        MARGIN - 6.0,
        py(y_max) + 4.0
    );
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (j, (x, y)) in pts.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2} {:.2}", px(*x), py(*y));
        }
        let _ = writeln!(
            s,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{label}</text>",
            WIDTH - MARGIN + 6.0,
            MARGIN + 16.0 * i as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
