//! Deterministic SVG rendering of colored drawings.

use std::fmt::Write;

use crate::format::ColoredDrawingDoc;

const STROKE_COLOR: &str = "#1a1a1a";
const EMPTY_BACKGROUND: &str = "#ffffff";

fn push_coords(out: &mut String, ring: &[[f64; 2]]) {
    for (k, [x, y]) in ring.iter().enumerate() {
        let _ = write!(out, "{}{} {}", if k == 0 { "M" } else { " L" }, x, y);
    }
    out.push_str(" Z");
}

/// Renders the drawing as an SVG document `width_px` wide.
///
/// The canvas becomes the view box, with y pointing up. The background takes
/// the unbounded face's color, each bounded face is one even-odd filled
/// path, and the stroke is drawn on top. Identical input gives identical bytes.
pub fn render_svg(drawing: &ColoredDrawingDoc, width_px: u32) -> String {
    let (w, h) = (drawing.canvas.w, drawing.canvas.h);
    let height_px = ((width_px as f64) * h / w).round() as u32;
    let stroke_width = 0.004 * w.hypot(h);
    let background = drawing
        .background()
        .map(|c| c.hex())
        .unwrap_or_else(|| EMPTY_BACKGROUND.to_string());

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="{background}"/>"#);
    let _ = writeln!(out, r#"<g transform="matrix(1 0 0 -1 0 {h})">"#);
    for face in drawing.bounded_faces() {
        let mut d = String::new();
        for (k, ring) in face.rings.iter().enumerate() {
            if k > 0 {
                d.push(' ');
            }
            push_coords(&mut d, ring);
        }
        let _ = writeln!(
            out,
            r#"<path class="face" data-winding="{}" fill="{}" fill-rule="evenodd" d="{}"/>"#,
            face.winding,
            face.color.hex(),
            d
        );
    }
    if !drawing.points.is_empty() {
        let mut pts = String::new();
        for (k, [x, y]) in drawing.points.iter().enumerate() {
            if k > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{x},{y}");
        }
        let _ = writeln!(
            out,
            r#"<polyline class="stroke" fill="none" stroke="{STROKE_COLOR}" stroke-width="{stroke_width}" stroke-linecap="round" stroke-linejoin="round" points="{pts}"/>"#
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
