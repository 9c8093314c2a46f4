//! Bare static SVG renders of the profile and the histogram.

use std::fmt::Write;

use crate::report::{HistogramBin, ProfilePoint, Summary, REFERENCE_GE10, REFERENCE_LE5, REFERENCE_ZERO};

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let (x0, y0, x1, y1) = (PAD, H - PAD, W - PAD / 2.0, PAD / 1.5);
    let _ = writeln!(
        out,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
}

/// Step plot of solved fraction against log time budget.
pub fn profile(points: &[ProfilePoint]) -> String {
    let mut out = String::new();
    open(&mut out, "Performance profile (non-diagonal instances)");
    if points.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let lo = points[0].budget_s.log10();
    let hi = points[points.len() - 1].budget_s.log10().max(lo + 1e-9);
    let px = |b: f64| PAD + (b.log10() - lo) / (hi - lo) * (W - 1.5 * PAD);
    let py = |f: f64| (H - PAD) - f * (H - 1.75 * PAD);
    for (name, color, pick) in [
        ("exact", "#c0392b", (|p: &ProfilePoint| p.exact_fraction) as fn(&ProfilePoint) -> f64),
        ("approx", "#2471a3", |p: &ProfilePoint| p.approx_fraction),
    ] {
        let mut d = String::new();
        let mut prev = None;
        for p in points {
            let (x, y) = (px(p.budget_s), py(pick(p)));
            match prev {
                None => {
                    let _ = write!(d, "M{x:.1},{y:.1}");
                }
                Some(py_prev) => {
                    let _ = write!(d, " L{x:.1},{py_prev:.1} L{x:.1},{y:.1}");
                }
            }
            prev = Some(y);
        }
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"><title>{name}</title></path>"#);
    }
    let _ = writeln!(
        out,
        r#"<text x="{PAD}" y="{}">10^{lo:.1} s</text><text x="{}" y="{}" text-anchor="end">10^{hi:.1} s</text>"#,
        H - PAD + 16.0,
        W - PAD / 2.0,
        H - PAD + 16.0
    );
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" fill="#c0392b">exact</text><text x="{}" y="{}" fill="#2471a3">approx</text>"##,
        W - 120.0,
        H - PAD - 40.0,
        W - 120.0,
        H - PAD - 24.0
    );
    out.push_str("</svg>\n");
    out
}

/// Bars of Δf counts, annotated with observed and reference fractions.
pub fn histogram(bins: &[HistogramBin], summary: &Summary) -> String {
    let mut out = String::new();
    open(&mut out, "Histogram of leader objective difference");
    let max = bins.iter().map(|b| b.count).max().unwrap_or(0).max(1) as f64;
    let n = bins.len().max(1) as f64;
    let bw = (W - 1.5 * PAD) / n;
    for (i, b) in bins.iter().enumerate() {
        let h = b.count as f64 / max * (H - 1.75 * PAD);
        let x = PAD + i as f64 * bw;
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="#5d6d7e"><title>{}: {}</title></rect>"##,
            x + 1.0,
            H - PAD - h,
            (bw - 2.0).max(1.0),
            b.delta_f,
            b.count
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
            x + bw / 2.0,
            H - PAD + 14.0,
            b.delta_f
        );
    }
    let rows = [
        format!("Δf = 0: {:.1}% (ref {:.1}%)", 100.0 * summary.frac_zero, 100.0 * REFERENCE_ZERO),
        format!("Δf ≤ 5: {:.1}% (ref {:.1}%)", 100.0 * summary.frac_le5, 100.0 * REFERENCE_LE5),
        format!("Δf ≥ 10: {:.1}% (ref {:.1}%)", 100.0 * summary.frac_ge10, 100.0 * REFERENCE_GE10),
    ];
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{r}</text>"#, W - PAD, 50.0 + 16.0 * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
