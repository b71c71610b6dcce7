//! Static SVG scatter of averaged discord against averaged distortion,
//! colored by channel entropy, with the fitted parabola overlaid.
//!
//! The document holds one `<circle>` per point and, when a fit is given,
//! exactly one `<path>`. Axes are `<line>`/`<text>`; the color bar is `<rect>`s.

use std::fmt::Write;

use crate::experiment::ScatterPoint;
use crate::fitting::QuadraticFit;
use crate::permutations::factorial;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const BAR_STEPS: usize = 64;

/// Viridis control points, low to high.
const STOPS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

/// Largest channel entropy at message size `m`: `log₂ m!`.
pub fn max_entropy(m: usize) -> f64 {
    (factorial(m) as f64).log2()
}

/// Color for `t ∈ [0, 1]`, clamped, as `#rrggbb`.
pub fn color_at(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Color of a channel with entropy `h` on the scale `[0, log₂ m!]`.
pub fn entropy_color(h: f64, m: usize) -> String {
    let top = max_entropy(m);
    color_at(if top > 0.0 { h / top } else { 0.0 })
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 0.0 {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders the scatter; `m` fixes the color scale.
pub fn render_scatter_svg(points: &[ScatterPoint], m: usize, fit: Option<&QuadraticFit>) -> String {
    let xs = points.iter().map(|p| p.avg_distortion);
    let ys = points.iter().map(|p| p.avg_discord);
    let (x_lo, x_hi) = padded(xs.clone().fold(0.0, f64::min), xs.fold(0.0, f64::max));
    let (y_lo, y_hi) = padded(ys.clone().fold(0.0, f64::min), ys.fold(0.0, f64::max));
    let frame = Frame { x0: x_lo, x1: x_hi, y0: y_lo, y1: y_hi };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes through the frame's lower-left corner
    let (ax, ay) = (frame.px(x_lo), frame.py(y_lo));
    let _ = writeln!(s, r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}" stroke="black"/>"#, frame.px(x_hi));
    let _ = writeln!(s, r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{ax:.2}" y2="{:.2}" stroke="black"/>"#, frame.py(y_hi));
    for k in 0..=4 {
        let x = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
        let y = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let (px, py) = (frame.px(x), frame.py(y));
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{ay:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, ay + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.3}</text>"#, ay + 18.0);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{ax:.2}" y2="{py:.2}" stroke="black"/>"#, ax - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#, ax - 8.0, py + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">average distortion</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">average discord (bits)</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    );

    for p in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            frame.px(p.avg_distortion),
            frame.py(p.avg_discord),
            entropy_color(p.weight_entropy, m)
        );
    }

    if let Some(fit) = fit {
        let lo = points.iter().map(|p| p.avg_distortion).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.avg_distortion).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (x_lo, x_hi) };
        let mut d = String::new();
        for k in 0..=200 {
            let x = lo + (hi - lo) * k as f64 / 200.0;
            let y = fit.eval(x).clamp(y_lo, y_hi);
            let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { 'M' } else { 'L' }, frame.px(x), frame.py(y));
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, d.trim_end());
    }

    // color bar over [0, log₂ m!]
    let bar_x = WIDTH - RIGHT + 30.0;
    let bar_h = HEIGHT - TOP - BOTTOM;
    let cell = bar_h / BAR_STEPS as f64;
    for k in 0..BAR_STEPS {
        let t = (k as f64 + 0.5) / BAR_STEPS as f64;
        let y = TOP + bar_h - (k + 1) as f64 * cell;
        let _ = writeln!(
            s,
            r#"<rect x="{bar_x:.2}" y="{y:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            cell + 0.5,
            color_at(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{:.3}</text>"#, bar_x + 24.0, TOP + 4.0, max_entropy(m));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">0</text>"#, bar_x + 24.0, TOP + bar_h + 4.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">H (bits)</text>"#, bar_x - 4.0, TOP - 10.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(id: usize, h: f64, x: f64, y: f64) -> ScatterPoint {
        ScatterPoint {
            channel_id: id,
            a: None,
            weight_entropy: h,
            avg_discord: y,
            avg_distortion: x,
            n_states: 1,
            argmin_mode: 0,
        }
    }

    #[test]
    fn element_counts() {
        let pts: Vec<_> = (0..61).map(|k| point(k, k as f64 * 0.07, k as f64 / 61.0, (k as f64 / 61.0).sqrt())).collect();
        let fit = QuadraticFit { t1: -1.0, t2: 2.0, t3: 0.0, rmse: 0.1, n_points: 61 };
        let svg = render_scatter_svg(&pts, 4, Some(&fit));
        assert_eq!(svg.matches("<circle").count(), 61);
        assert_eq!(svg.matches("<path").count(), 1);
        let svg = render_scatter_svg(&pts, 4, None);
        assert_eq!(svg.matches("<path").count(), 0);
    }

    #[test]
    fn color_scale_endpoints() {
        assert_eq!(entropy_color(max_entropy(6), 6), color_at(1.0));
        assert_eq!(color_at(1.0), "#fde725");
        assert_eq!(entropy_color(0.0, 6), "#440154");
        assert_eq!(color_at(2.0), color_at(1.0));
        assert!((max_entropy(6) - 720f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn single_identity_point() {
        let svg = render_scatter_svg(&[point(0, 0.0, 0.0, 0.0)], 6, None);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r##"fill="#440154""##));
    }
}
