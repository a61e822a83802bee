//! Static SVG plots. Coordinates are printed with two decimals so the output
//! is stable across runs.

use std::fmt::Write as _;

use topokit::format::format_float;
use topokit::optimizer::{LossTrace, TraceRow};
use topokit::persistence::PersistenceDiagram;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn open(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">
<rect width="100%" height="100%" fill="white"/>
<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        width / 2.0
    );
}

fn legend(out: &mut String, x: f64, y: f64, entries: &[(&str, &str)]) {
    for (i, (color, label)) in entries.iter().enumerate() {
        let yy = y + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{label}</text>"#,
            yy - 9.0,
            x + 14.0,
            yy
        );
    }
}

/// Largest finite value of the diagram, or 1 for an empty one.
fn finite_extent(d: &PersistenceDiagram) -> f64 {
    let m = d.sorted_triples().iter().flat_map(|&(_, b, e)| [b, e]).filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn dims_present(d: &PersistenceDiagram) -> Vec<usize> {
    let mut dims: Vec<usize> = d.sorted_triples().iter().map(|t| t.0).collect();
    dims.dedup();
    dims
}

/// Birth against death with the diagonal. Essential points sit on a dashed
/// line above the plot area.
pub fn diagram_svg(d: &PersistenceDiagram) -> String {
    let extent = finite_extent(d) * 1.05;
    let plot = SIZE - 2.0 * MARGIN;
    let inf_y = MARGIN - 12.0;
    let sx = |v: f64| MARGIN + v / extent * plot;
    let sy = |v: f64| if v.is_finite() { SIZE - MARGIN - v / extent * plot } else { inf_y };
    let mut out = String::new();
    open(&mut out, SIZE, SIZE + 12.0, "persistence diagram");
    let _ = writeln!(
        out,
        r#"<g transform="translate(0,12)">
<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{plot:.2}" height="{plot:.2}" fill="none" stroke="black"/>
<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>
<line x1="{MARGIN:.2}" y1="{inf_y:.2}" x2="{:.2}" y2="{inf_y:.2}" stroke="gray" stroke-dasharray="4,3"/>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">inf</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">birth</text>
<text x="14" y="{:.2}" font-family="sans-serif" font-size="11" transform="rotate(-90 14 {:.2})" text-anchor="middle">death</text>
<text x="{MARGIN:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">0</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
        sx(0.0),
        sy(0.0),
        sx(extent),
        sy(extent),
        SIZE - MARGIN,
        SIZE - MARGIN + 4.0,
        inf_y + 4.0,
        SIZE / 2.0,
        SIZE - 14.0,
        SIZE / 2.0,
        SIZE / 2.0,
        SIZE - MARGIN + 14.0,
        SIZE - MARGIN,
        SIZE - MARGIN + 14.0,
        format_float(extent),
    );
    for (dim, b, e) in d.sorted_triples() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#,
            sx(b),
            sy(e),
            COLORS[dim.min(3)]
        );
    }
    let labels: Vec<String> = dims_present(d).iter().map(|k| format!("H{k}")).collect();
    let entries: Vec<(&str, &str)> =
        dims_present(d).iter().zip(&labels).map(|(&k, l)| (COLORS[k.min(3)], l.as_str())).collect();
    legend(&mut out, SIZE - MARGIN - 50.0, SIZE - MARGIN - 12.0 - 16.0 * entries.len() as f64, &entries);
    out.push_str("</g>\n</svg>\n");
    out
}

/// One horizontal bar per pair, grouped by dimension; essential bars run to
/// the right edge and end in an arrow head.
pub fn barcode_svg(d: &PersistenceDiagram) -> String {
    let triples = d.sorted_triples();
    let extent = finite_extent(d) * 1.05;
    let row = 6.0;
    let height = 2.0 * MARGIN + row * triples.len().max(1) as f64;
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + v.min(extent) / extent * plot;
    let mut out = String::new();
    open(&mut out, SIZE, height, "persistence barcode");
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        height - MARGIN + 4.0,
        SIZE - MARGIN,
        height - MARGIN + 4.0
    );
    for (i, &(dim, b, e)) in triples.iter().enumerate() {
        let y = MARGIN + row * (i as f64 + 0.5);
        let color = COLORS[dim.min(3)];
        let x2 = if e.is_finite() { sx(e) } else { SIZE - MARGIN };
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/>"#,
            sx(b)
        );
        if !e.is_finite() {
            let _ = writeln!(
                out,
                r#"<path d="M{x2:.2},{:.2} L{:.2},{y:.2} L{x2:.2},{:.2} Z" fill="{color}"/>"#,
                y - 3.0,
                x2 + 6.0,
                y + 3.0
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">0</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
        height - MARGIN + 18.0,
        SIZE - MARGIN,
        height - MARGIN + 18.0,
        format_float(extent)
    );
    let labels: Vec<String> = dims_present(d).iter().map(|k| format!("H{k}")).collect();
    let entries: Vec<(&str, &str)> =
        dims_present(d).iter().zip(&labels).map(|(&k, l)| (COLORS[k.min(3)], l.as_str())).collect();
    legend(&mut out, SIZE - MARGIN + 4.0, MARGIN, &entries);
    out.push_str("</svg>\n");
    out
}

/// Colour, label and the quantity plotted.
type Series = (&'static str, &'static str, fn(&TraceRow) -> f64);

/// Rows kept when plotting a long trace; the last row is always kept.
const MAX_PLOTTED: usize = 1000;

/// The total loss before and after each refresh, with its two components.
/// Iterations where the refresh raised the loss are marked.
pub fn trace_svg(trace: &LossTrace) -> String {
    let width = 720.0;
    let height = SIZE;
    let rows = &trace.rows;
    let mut out = String::new();
    open(&mut out, width, height, "total loss per iteration");
    let t_max = rows.last().map_or(1, |r| r.t.max(1)) as f64;
    let y_max = rows
        .iter()
        .flat_map(|r| [r.g_t_wt, r.g_t1_wt1, r.l_supv, r.l_topo_refreshed])
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.05;
    let (pw, ph) = (width - 2.0 * MARGIN, height - 2.0 * MARGIN);
    let sx = |t: f64| MARGIN + t / t_max * pw;
    let sy = |v: f64| height - MARGIN - v / y_max * ph;
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">iteration</text>
<text x="{MARGIN:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">0</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
        width / 2.0,
        height - 14.0,
        height - MARGIN + 14.0,
        width - MARGIN,
        height - MARGIN + 14.0,
        t_max,
        MARGIN - 4.0,
        MARGIN + 4.0,
        format_float(y_max),
    );
    let stride = rows.len().div_ceil(MAX_PLOTTED).max(1);
    let kept: Vec<usize> = (0..rows.len()).filter(|i| i % stride == 0 || i + 1 == rows.len()).collect();
    let series: [Series; 3] = [
        (COLORS[0], "G_t(W_t)", |r| r.g_t_wt),
        (COLORS[2], "L_supv", |r| r.l_supv),
        (COLORS[3], "L_topo", |r| r.l_topo_refreshed),
    ];
    for (color, _, f) in &series {
        let pts: Vec<String> =
            kept.iter().map(|&i| format!("{:.2},{:.2}", sx(rows[i].t as f64), sy(f(&rows[i])))).collect();
        let _ =
            writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
    }
    for r in rows.iter().filter(|r| r.g_t1_wt1 > r.g_t_wt1) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{}"/>"#,
            sx(r.t as f64),
            sy(r.g_t1_wt1),
            COLORS[1]
        );
    }
    let mut entries: Vec<(&str, &str)> = series.iter().map(|(c, l, _)| (*c, *l)).collect();
    entries.push((COLORS[1], "refresh increase"));
    legend(&mut out, width - MARGIN - 130.0, MARGIN + 16.0, &entries);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_plot_has_one_marker_per_pair() {
        let d = PersistenceDiagram::from_triples(&[(0, 0.0, f64::INFINITY), (0, 0.0, 0.5), (1, 0.25, 0.5)]);
        let s = diagram_svg(&d);
        assert_eq!(s.matches("<circle").count(), 3);
        assert!(s.starts_with("<?xml") && s.ends_with("</svg>\n"));
        assert_eq!(s, diagram_svg(&d));
        let b = barcode_svg(&d);
        assert_eq!(b.matches("stroke-width=\"3\"").count(), 3);
        assert_eq!(b.matches("<path").count(), 1);
    }

    #[test]
    fn empty_diagram_still_plots() {
        let d = PersistenceDiagram::empty();
        assert!(diagram_svg(&d).contains("</svg>"));
        assert!(barcode_svg(&d).contains("</svg>"));
    }
}
