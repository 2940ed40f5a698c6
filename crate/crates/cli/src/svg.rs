//! Static log-log scatter plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

/// Plots positive `(x, y)` pairs on log axes, with `ln y = slope ln x + b`
/// overlaid when `fit` is given.
pub fn loglog(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = logs.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = logs.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{} (log10 {:.2} to {:.2})</text>"#,
        W / 2.0,
        H - 20.0,
        escape(x_label),
        x0,
        x1
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{} (log10 {:.2} to {:.2})</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label),
        y0,
        y1
    );
    for (x, y) in &logs {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(*x), sy(*y));
    }
    if let Some((slope, intercept)) = fit {
        // ln y = m ln x + b  ⇒  log y = m log x + b / ln 10.
        let line = |x: f64| slope * x + intercept / std::f64::consts::LN_10;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick"/>"#,
            sx(x0),
            sy(line(x0)),
            sx(x1),
            sy(line(x1))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" fill="firebrick">slope {slope:.4}</text>"#,
            W - PAD,
            PAD - 8.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
