//! Static SVG scatter of log2 hcost against log2 vcost, in bits.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use annostream::protocol::CostReport;

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

pub fn render_svg(rows: &[CostReport]) -> String {
    let pts: Vec<(f64, f64, usize)> =
        rows.iter().map(|r| ((r.hbits.max(1) as f64).log2(), (r.vbits.max(1) as f64).log2(), r.t)).collect();
    let range = |f: fn(&(f64, f64, usize)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if pts.is_empty() {
            (0.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">log2 hcost (bits)</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(svg, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">log2 vcost (bits)</text>"#, H / 2.0, H / 2.0);
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}">{x0:.1}</text><text x="{}" y="{}" text-anchor="end">{x1:.1}</text>"#, H - PAD + 14.0, W - PAD, H - PAD + 14.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y0:.1}</text><text x="{}" y="{PAD}" text-anchor="end">{y1:.1}</text>"#, PAD - 4.0, H - PAD, PAD - 4.0);
    if let Some(r) = rows.first() {
        let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{} n={}</text>"#, W / 2.0, r.scheme, r.n);
    }
    for &(x, y, t) in &pts {
        let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="steelblue"/>"#, sx(x), sy(y));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">t={t}</text>"#, sx(x) + 6.0, sy(y) - 6.0);
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, rows: &[CostReport]) -> io::Result<()> {
    std::fs::write(path, render_svg(rows))
}
