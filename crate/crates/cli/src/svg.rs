//! Deterministic SVG plots: fixed view box, style classes, fixed-precision
//! coordinates.

use std::f64::consts::PI;
use std::fmt::Write;

use cusp3r_core::critical::{CuspPoint, NodePoint, WorkspaceCurve};
use cusp3r_core::reduction::{conic_classify, conic_coefficients, ConicKind, IkSolutionSet};
use cusp3r_core::topology::Analysis;
use cusp3r_core::{CrossSectionPoint, DhParams};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#dbe9f6", "#fde0c5", "#d5f0d5", "#f3d5f0", "#f6f3c9", "#d0eeee", "#e8dccb", "#e2e2f6"];

/// Maps data coordinates to the view box, `y` up.
struct Frame {
    x0: f64,
    y0: f64,
    k: f64,
}

impl Frame {
    fn fit(xr: (f64, f64), yr: (f64, f64)) -> Self {
        let w = (xr.1 - xr.0).max(1e-9);
        let h = (yr.1 - yr.0).max(1e-9);
        let k = (SIZE - 2.0 * MARGIN) / w.max(h);
        Self { x0: xr.0 - 0.5 * ((SIZE - 2.0 * MARGIN) / k - w), y0: yr.0 - 0.5 * ((SIZE - 2.0 * MARGIN) / k - h), k }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) * self.k
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.y0) * self.k
    }
}

fn header(out: &mut String, title: &str, style: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">"
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, "<style>{style}</style>");
    let _ = writeln!(out, "<rect class=\"frame\" x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\"/>");
}

fn polyline(out: &mut String, class: &str, pts: &[(f64, f64)], closed: bool) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { " L" });
    }
    if closed {
        d.push_str(" Z");
    }
    let _ = writeln!(out, "<path class=\"{class}\" d=\"{d}\"/>");
}

pub fn workspace_plot(p: &DhParams, curves: &[WorkspaceCurve], cusps: &[CuspPoint], nodes: &[NodePoint]) -> String {
    let all: Vec<&CrossSectionPoint> = curves.iter().flat_map(|c| c.points.iter()).collect();
    let (mut r0, mut r1, mut z0, mut z1) = (0.0f64, 1.0f64, -1.0f64, 1.0f64);
    if !all.is_empty() {
        r0 = all.iter().map(|q| q.rho).fold(f64::INFINITY, f64::min).min(0.0);
        r1 = all.iter().map(|q| q.rho).fold(f64::NEG_INFINITY, f64::max);
        z0 = all.iter().map(|q| q.z).fold(f64::INFINITY, f64::min);
        z1 = all.iter().map(|q| q.z).fold(f64::NEG_INFINITY, f64::max);
    }
    let fr = Frame::fit((r0, r1), (z0, z1));
    let mut out = String::new();
    header(
        &mut out,
        "critical values in the (rho, z) half-plane",
        ".frame{fill:#fff;stroke:none}.axis{stroke:#999;stroke-width:1}.critical{fill:none;stroke:#1f4e9c;stroke-width:1.5}\
         .collapsed{fill:#1f4e9c}.cusp{fill:#d62728}.node{fill:#2ca02c}",
    );
    let _ = writeln!(out, "<line class=\"axis\" x1=\"{:.2}\" y1=\"0\" x2=\"{:.2}\" y2=\"{SIZE}\"/>", fr.x(0.0), fr.x(0.0));
    for c in curves {
        if c.is_collapsed(p) {
            let q = c.points[0];
            let _ = writeln!(out, "<circle class=\"collapsed\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>", fr.x(q.rho), fr.y(q.z));
            continue;
        }
        let pts: Vec<(f64, f64)> = c.points.iter().map(|q| (fr.x(q.rho), fr.y(q.z))).collect();
        polyline(&mut out, "critical", &pts, true);
    }
    for c in cusps {
        let _ = writeln!(
            out,
            "<circle class=\"cusp\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\"/>",
            fr.x(c.point.rho),
            fr.y(c.point.z)
        );
    }
    for n in nodes {
        let _ = writeln!(
            out,
            "<rect class=\"node\" x=\"{:.2}\" y=\"{:.2}\" width=\"9\" height=\"9\"/>",
            fr.x(n.point.rho) - 4.5,
            fr.y(n.point.z) - 4.5
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Splits a torus polyline wherever it wraps around an edge of the square.
fn unwrap_pieces(pts: &[(f64, f64)], closed: bool) -> Vec<Vec<(f64, f64)>> {
    let mut pieces = vec![Vec::new()];
    let n = pts.len();
    let steps = if closed { n + 1 } else { n };
    for k in 0..steps {
        let q = pts[k % n];
        if let Some(prev) = pieces.last().and_then(|v: &Vec<(f64, f64)>| v.last()) {
            if (q.0 - prev.0).abs() > PI || (q.1 - prev.1).abs() > PI {
                pieces.push(Vec::new());
            }
        }
        pieces.last_mut().unwrap().push(q);
    }
    pieces
}

pub fn jointspace_plot(a: &Analysis) -> String {
    let fr = Frame::fit((-PI, PI), (-PI, PI));
    let mut out = String::new();
    header(
        &mut out,
        "critical points, pseudosingularities and aspects on the (theta2, theta3) torus",
        ".frame{fill:#fff;stroke:none}.singular{fill:none;stroke:#111;stroke-width:1.5}\
         .pseudo{fill:none;stroke:#d62728;stroke-width:1.2}.border{fill:none;stroke:#999}",
    );
    // aspect shading, one rect per run of equal labels on a coarse raster
    let n = a.aspects.n;
    let step = (n / 160).max(1);
    let cell = fr.k * std::f64::consts::TAU / n as f64 * step as f64;
    for j in (0..n).step_by(step) {
        let mut i = 0;
        while i < n {
            let l = a.aspects.label(i, j);
            let mut e = i + step;
            while e < n && a.aspects.label(e, j) == l {
                e += step;
            }
            if l >= 0 {
                let g = &a.grid;
                let _ = writeln!(
                    out,
                    "<rect class=\"aspect-{l}\" fill=\"{}\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
                    PALETTE[l as usize % PALETTE.len()],
                    fr.x(g.angle(i)),
                    fr.y(g.angle(j)) - cell,
                    fr.k * (g.angle(e.min(n) - 1) - g.angle(i)) + fr.k * std::f64::consts::TAU / n as f64,
                    cell
                );
            }
            i = e;
        }
    }
    let map = |v: &[(f64, f64)]| v.iter().map(|q| (fr.x(q.0), fr.y(q.1))).collect::<Vec<_>>();
    for c in &a.curves {
        for piece in unwrap_pieces(&c.vertices, c.closed) {
            polyline(&mut out, "singular", &map(&piece), false);
        }
    }
    for c in &a.pseudo.curves {
        for piece in unwrap_pieces(c, false) {
            polyline(&mut out, "pseudo", &map(&piece), false);
        }
    }
    let _ = writeln!(
        out,
        "<rect class=\"border\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
        fr.x(-PI),
        fr.y(PI),
        fr.k * std::f64::consts::TAU,
        fr.k * std::f64::consts::TAU
    );
    out.push_str("</svg>\n");
    out
}

/// Unit circle, the conic of `target` and one marker per IK root.
pub fn c3s3_plot(p: &DhParams, target: &CrossSectionPoint, iks: &IkSolutionSet) -> String {
    let fr = Frame::fit((-2.5, 2.5), (-2.5, 2.5));
    let kind = match conic_classify(p).map(|c| c.kind) {
        Ok(ConicKind::Ellipse) => "ellipse",
        Ok(ConicKind::Parabola) => "parabola",
        Ok(ConicKind::Hyperbola) => "hyperbola",
        Err(_) => "degenerate",
    };
    let mut out = String::new();
    header(
        &mut out,
        &format!("conic and unit circle in the (c3, s3) plane at rho={:.4}, z={:.4}", target.rho, target.z),
        ".frame{fill:#fff;stroke:none}.axis{stroke:#bbb}.circle{fill:none;stroke:#111;stroke-width:1.5}\
         .ellipse,.parabola,.hyperbola,.degenerate{fill:none;stroke:#1f4e9c;stroke-width:1.5}.iks{fill:#d62728}",
    );
    let _ = writeln!(out, "<line class=\"axis\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", fr.x(-2.5), fr.y(0.0), fr.x(2.5), fr.y(0.0));
    let _ = writeln!(out, "<line class=\"axis\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", fr.x(0.0), fr.y(-2.5), fr.x(0.0), fr.y(2.5));
    let _ = writeln!(out, "<circle class=\"circle\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\"/>", fr.x(0.0), fr.y(0.0), fr.k);
    if let Ok(c) = conic_coefficients(p, target) {
        // marching squares on the conic over the plotting window
        let m = 240;
        let h = 5.0 / m as f64;
        let at = |i: usize, j: usize| c.eval(-2.5 + i as f64 * h, -2.5 + j as f64 * h);
        let mut d = String::new();
        for j in 0..m {
            for i in 0..m {
                let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let mut cuts = Vec::new();
                for e in 0..4 {
                    let (a, b) = (v[e], v[(e + 1) % 4]);
                    if (a >= 0.0) != (b >= 0.0) {
                        let s = a / (a - b);
                        let (ca, cb) = (corners[e], corners[(e + 1) % 4]);
                        let x = -2.5 + (ca.0 as f64 + s * (cb.0 as f64 - ca.0 as f64)) * h;
                        let y = -2.5 + (ca.1 as f64 + s * (cb.1 as f64 - ca.1 as f64)) * h;
                        cuts.push((x, y));
                    }
                }
                for pair in cuts.chunks(2) {
                    if let [a, b] = pair {
                        let _ = write!(d, "M{:.2},{:.2} L{:.2},{:.2} ", fr.x(a.0), fr.y(a.1), fr.x(b.0), fr.y(b.1));
                    }
                }
            }
        }
        let _ = writeln!(out, "<path class=\"{kind}\" d=\"{}\"/>", d.trim_end());
    }
    for s in &iks.solutions {
        let t3 = s.config.theta3();
        let _ = writeln!(
            out,
            "<circle class=\"iks\" data-multiplicity=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\"/>",
            s.multiplicity,
            fr.x(t3.cos()),
            fr.y(t3.sin())
        );
    }
    for f in &iks.flagged {
        let _ = writeln!(
            out,
            "<circle class=\"iks flagged\" data-multiplicity=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\"/>",
            f.multiplicity,
            fr.x(f.theta3.cos()),
            fr.y(f.theta3.sin())
        );
    }
    out.push_str("</svg>\n");
    out
}
