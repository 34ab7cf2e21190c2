//! SVG figures in the disc model.
//!
//! Boundary points are sent to the unit circle by
//! ψ(z) = (z - e^{iπ/q}) / (z - e^{-iπ/q}), or (z - i)/(z + i) for the theta
//! group, and edges are drawn as arcs of circles orthogonal to the unit
//! circle. Coordinates are plain floating point: the pictures are
//! illustrations only.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rosen_core::{BoundaryPoint, HeckeIndex, QChain, QContext};

const SIZE: f64 = 520.0;
const RADIUS: f64 = 240.0;

/// Something to draw: shaded faces and a highlighted path.
pub struct Figure {
    q: HeckeIndex,
    faces: Vec<Vec<BoundaryPoint>>,
    path: Vec<BoundaryPoint>,
}

impl Figure {
    pub fn path(ctx: &QContext, path: Vec<BoundaryPoint>) -> Figure {
        Figure {
            q: ctx.q(),
            faces: Vec::new(),
            path,
        }
    }

    pub fn chain(ctx: &QContext, chain: &QChain, path: Option<Vec<BoundaryPoint>>) -> Figure {
        Figure {
            q: ctx.q(),
            faces: chain
                .faces()
                .iter()
                .map(|f| f.vertices().iter().map(|v| v.point().clone()).collect())
                .collect(),
            path: path.unwrap_or_default(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.path.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
}

/// ψ applied to a boundary point, as a point of the unit circle.
fn psi(q: HeckeIndex, p: &BoundaryPoint) -> (f64, f64) {
    let BoundaryPoint::Finite(x) = p else {
        return (1.0, 0.0);
    };
    let z = Complex64::new(x.to_f64(), 0.0);
    let w = match q {
        HeckeIndex::Finite(q) => {
            let e = Complex64::from_polar(1.0, PI / f64::from(q));
            (z - e) / (z - e.conj())
        }
        HeckeIndex::Infinity => (z - Complex64::i()) / (z + Complex64::i()),
    };
    (w.re, w.im)
}

fn screen((x, y): (f64, f64)) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * x, SIZE / 2.0 - RADIUS * y)
}

/// Path command continuing from `a` to `b` along the hyperbolic geodesic.
fn arc_to(a: (f64, f64), b: (f64, f64)) -> String {
    let dot = a.0 * b.0 + a.1 * b.1;
    let (bx, by) = screen(b);
    if 1.0 + dot < 1e-9 || (a.0 - b.0).hypot(a.1 - b.1) < 1e-12 {
        return format!("L {bx:.3} {by:.3}");
    }
    // The orthogonal circle through a and b has centre (a + b)/(1 + a·b).
    let c = ((a.0 + b.0) / (1.0 + dot), (a.1 + b.1) / (1.0 + dot));
    let r = (c.0 - a.0).hypot(c.1 - a.1) * RADIUS;
    let cross = a.0 * b.1 - a.1 * b.0;
    let sweep = if cross > 0.0 { 0 } else { 1 };
    format!("A {r:.3} {r:.3} 0 0 {sweep} {bx:.3} {by:.3}")
}

fn polyline(q: HeckeIndex, points: &[BoundaryPoint], close: bool) -> String {
    let pts: Vec<(f64, f64)> = points.iter().map(|p| psi(q, p)).collect();
    let Some(&first) = pts.first() else {
        return String::new();
    };
    let (x0, y0) = screen(first);
    let mut d = format!("M {x0:.3} {y0:.3}");
    for w in pts.windows(2) {
        d.push(' ');
        d.push_str(&arc_to(w[0], w[1]));
    }
    if close && pts.len() > 2 {
        d.push(' ');
        d.push_str(&arc_to(*pts.last().expect("non-empty"), first));
        d.push_str(" Z");
    }
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn svg(fig: &Figure) -> String {
    let mut out = String::new();
    let c = SIZE / 2.0;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<circle cx="{c}" cy="{c}" r="{RADIUS}" fill="none" stroke="#222" stroke-width="1.5"/>"##
    );
    for (i, face) in fig.faces.iter().enumerate() {
        let shade = if i % 2 == 0 { "#cfe0f5" } else { "#e3edf9" };
        let _ = writeln!(
            out,
            r##"<path class="face" d="{}" fill="{shade}" stroke="#5577aa" stroke-width="1"/>"##,
            polyline(fig.q, face, true)
        );
    }
    if fig.path.len() > 1 {
        let _ = writeln!(
            out,
            r##"<path class="path" d="{}" fill="none" stroke="#c0392b" stroke-width="2.5"/>"##,
            polyline(fig.q, &fig.path, false)
        );
    }
    for p in &fig.path {
        let (x, y) = screen(psi(fig.q, p));
        let label = escape(&p.to_string());
        let _ = writeln!(
            out,
            r##"<circle class="vertex" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#c0392b"><title>{label}</title></circle>"##
        );
    }
    out.push_str("</svg>\n");
    out
}
