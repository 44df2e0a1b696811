//! SVG drawings of lattice embeddings.

use std::fmt::Write as _;

use udg_core::genealogy::EdgeSet;
use udg_core::GraphMatrix;

/// Drawing parameters, in pixels.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RenderSpec {
    /// Pixels per unit distance.
    pub scale: f64,
    pub radius: f64,
    pub stroke: f64,
    pub margin: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            scale: 100.0,
            radius: 4.0,
            stroke: 1.0,
            margin: 10.0,
        }
    }
}

impl RenderSpec {
    pub fn is_valid(&self) -> bool {
        self.scale > 0.0 && self.radius >= 0.0 && self.stroke >= 0.0 && self.margin >= 0.0
    }
}

/// Pixel positions of the vertices: `embed(p)·scale`, with y pointing down
/// and the drawing shifted into the canvas.
pub fn layout(g: &GraphMatrix, spec: &RenderSpec) -> (Vec<(f64, f64)>, f64, f64) {
    let pts: Vec<(f64, f64)> = g
        .rows()
        .iter()
        .map(|p| {
            let z = p.embed();
            (z.re * spec.scale, -z.im * spec.scale)
        })
        .collect();
    let pad = spec.margin + spec.radius;
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if pts.is_empty() {
        return (pts, 2.0 * pad, 2.0 * pad);
    }
    let shifted = pts.iter().map(|&(x, y)| (x - min_x + pad, y - min_y + pad)).collect();
    (shifted, max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad)
}

pub fn render_svg(g: &GraphMatrix, spec: &RenderSpec) -> String {
    let (pts, width, height) = layout(g, spec);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="{:.3}">"#, spec.stroke);
    for &(i, j) in EdgeSet::of(g.rows()).pairs() {
        let (a, b) = (pts[i as usize], pts[j as usize]);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<g fill="white" stroke="black" stroke-width="{:.3}">"#,
        spec.stroke
    );
    for &(x, y) in &pts {
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#, spec.radius);
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attr(tag: &str, name: &str) -> f64 {
        let key = format!(" {name}=\"");
        let start = tag.find(&key).unwrap() + key.len();
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    }

    #[test]
    fn spindle_counts_and_lengths() {
        let spec = RenderSpec::default();
        let svg = render_svg(&GraphMatrix::moser_spindle(), &spec);
        assert_eq!(svg.matches("<circle").count(), 7);
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<line")).collect();
        assert_eq!(lines.len(), 11);
        for l in lines {
            let len = (attr(l, "x2") - attr(l, "x1")).hypot(attr(l, "y2") - attr(l, "y1"));
            assert!((len - spec.scale).abs() < 0.005 * spec.scale, "{len}");
        }
    }

    #[test]
    fn single_vertex() {
        let g = GraphMatrix::from_coords(&[[0, 0, 0, 0]]).unwrap();
        let svg = render_svg(&g, &RenderSpec::default());
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<line").count(), 0);
    }

    #[test]
    fn vertices_inside_canvas() {
        let spec = RenderSpec::default();
        let (pts, w, h) = layout(&GraphMatrix::moser_spindle(), &spec);
        for (x, y) in pts {
            assert!(x >= spec.margin && x <= w - spec.margin);
            assert!(y >= spec.margin && y <= h - spec.margin);
        }
    }
}
