//! Nodes: workspace points whose quartic has two distinct double roots.

use log::debug;
use nalgebra::DMatrix;

use crate::angle::{diff, mid, normalize};
use crate::dh::{CrossSectionPoint, DhParams};
use crate::error::Result;
use crate::par;
use crate::reduction::{f_coefficients, local_rz, FCoefficients, QuarticFamily};

use super::{centred_residuals, newton, WorkspaceCurve};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePoint {
    pub point: CrossSectionPoint,
    /// θ₃ of the two double roots, ascending.
    pub theta3: [f64; 2],
    /// `tan(θ₃/2)` of both roots.
    pub t: [f64; 2],
    /// `(|M|, |M'|)` at each root, normalized quartic, root-centred chart.
    pub residuals: [f64; 4],
}

/// A crossing between segment `a` of curve `ca` and segment `b` of curve `cb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCrossing {
    pub ca: usize,
    pub a: usize,
    pub sa: f64,
    pub cb: usize,
    pub b: usize,
    pub sb: f64,
    pub point: CrossSectionPoint,
}

/// All proper crossings between segments of the closed polylines, including
/// self-crossings (segments sharing a vertex are skipped). Sort-and-sweep on
/// `ρ`.
pub fn segment_intersections(curves: &[WorkspaceCurve]) -> Vec<SegmentCrossing> {
    struct Seg {
        c: usize,
        i: usize,
        p0: CrossSectionPoint,
        p1: CrossSectionPoint,
        lo: f64,
        hi: f64,
    }
    let mut segs = Vec::new();
    for (c, wc) in curves.iter().enumerate() {
        let n = wc.points.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let p0 = wc.points[i];
            let p1 = wc.points[(i + 1) % n];
            segs.push(Seg { c, i, p0, p1, lo: p0.rho.min(p1.rho), hi: p0.rho.max(p1.rho) });
        }
    }
    segs.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut out = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for k in 0..segs.len() {
        let s = &segs[k];
        active.retain(|&a| segs[a].hi >= s.lo);
        for &a in &active {
            let o = &segs[a];
            if o.c == s.c {
                let n = curves[s.c].points.len();
                let d = (o.i + n - s.i) % n;
                if d <= 1 || d == n - 1 {
                    continue;
                }
            }
            if let Some((u, v, pt)) = intersect(&o.p0, &o.p1, &s.p0, &s.p1) {
                let (first, second, su, sv) = if (o.c, o.i) < (s.c, s.i) { (o, s, u, v) } else { (s, o, v, u) };
                out.push(SegmentCrossing {
                    ca: first.c,
                    a: first.i,
                    sa: su,
                    cb: second.c,
                    b: second.i,
                    sb: sv,
                    point: pt,
                });
            }
        }
        active.push(k);
    }
    out.sort_by(|x, y| (x.ca, x.a, x.cb, x.b).cmp(&(y.ca, y.a, y.cb, y.b)));
    out
}

fn intersect(
    a0: &CrossSectionPoint,
    a1: &CrossSectionPoint,
    b0: &CrossSectionPoint,
    b1: &CrossSectionPoint,
) -> Option<(f64, f64, CrossSectionPoint)> {
    let (dax, daz) = (a1.rho - a0.rho, a1.z - a0.z);
    let (dbx, dbz) = (b1.rho - b0.rho, b1.z - b0.z);
    let den = dax * dbz - daz * dbx;
    if den == 0.0 {
        return None;
    }
    let (ex, ez) = (b0.rho - a0.rho, b0.z - a0.z);
    let u = (ex * dbz - ez * dbx) / den;
    let v = (ex * daz - ez * dax) / den;
    if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
        Some((u, v, CrossSectionPoint { rho: a0.rho + u * dax, z: a0.z + u * daz }))
    } else {
        None
    }
}

fn lerp_angle(a: f64, b: f64, s: f64) -> f64 {
    normalize(a + s * diff(a, b))
}

/// Seeds from polyline crossings, refined by Newton on
/// `{M(t₁), M'(t₁), M(t₂), M'(t₂)}` in `(t₁, t₂, R, z)`.
pub fn find_nodes(p: &DhParams, curves: &[WorkspaceCurve]) -> Result<Vec<NodePoint>> {
    let f = f_coefficients(p)?;
    // collapsed components bound nothing; their numerical noise only adds
    // spurious crossings
    let live: Vec<WorkspaceCurve> = curves.iter().filter(|c| !c.is_collapsed(p)).cloned().collect();
    let curves = &live[..];
    let crossings = segment_intersections(curves);
    let found = par::map_slice(&crossings, |x| {
        let ja = &curves[x.ca].joint;
        let jb = &curves[x.cb].joint;
        let ta = lerp_angle(ja[x.a].1, ja[(x.a + 1) % ja.len()].1, x.sa);
        let tb = lerp_angle(jb[x.b].1, jb[(x.b + 1) % jb.len()].1, x.sb);
        refine_node(p, &f, ta, tb, &x.point)
    });
    let mut nodes: Vec<NodePoint> = Vec::new();
    let dedup = 1e-4 * p.length_scale();
    for (cand, x) in found.into_iter().zip(crossings.iter()) {
        let Some(cand) = cand else {
            debug!("node seed at {:?} rejected", x.point);
            continue;
        };
        if nodes.iter().any(|n| n.point.dist(&cand.point) < dedup) {
            continue;
        }
        nodes.push(cand);
    }
    nodes.sort_by(|a, b| a.point.rho.total_cmp(&b.point.rho).then(a.point.z.total_cmp(&b.point.z)));
    Ok(nodes)
}

/// Newton on the node system from two root angles and a workspace seed.
pub fn refine_node(
    p: &DhParams,
    f: &FCoefficients,
    theta_a: f64,
    theta_b: f64,
    seed: &CrossSectionPoint,
) -> Option<NodePoint> {
    let phi = mid(theta_a, theta_b);
    let fam = QuarticFamily::new(p, f, phi);
    let (r0, z0) = local_rz(p, seed);
    let norm = fam.at(r0, z0).0.max_abs();
    if norm == 0.0 {
        return None;
    }
    let system = |x: &[f64]| {
        let (m, mr, mz) = fam.at(x[2], x[3]);
        let mut r = Vec::with_capacity(4);
        let mut j = DMatrix::zeros(4, 4);
        for (row0, ti) in [(0usize, 0usize), (2, 1)] {
            let t = x[ti];
            for k in 0..2 {
                let row = row0 + k;
                r.push(m.eval_derivative(k, t) / norm);
                j[(row, ti)] = m.eval_derivative(k + 1, t) / norm;
                j[(row, 2)] = mr.eval_derivative(k, t) / norm;
                j[(row, 3)] = mz.eval_derivative(k, t) / norm;
            }
        }
        (r, j)
    };
    let x0 = [fam.t_of(theta_a), fam.t_of(theta_b), r0, z0];
    let out = newton::solve(system, &x0, 1e-14).ok()?;
    let (ta, tb, big_r, zl) = (fam.theta(out.x[0]), fam.theta(out.x[1]), out.x[2], out.x[3]);
    // Collapsed onto a single (triple) root: that is a cusp, not a node.
    if diff(ta, tb).abs() < 1e-3 {
        return None;
    }
    let rho2 = big_r - zl * zl;
    if rho2 < -1e-9 * p.length_scale().powi(2) {
        return None;
    }
    let ra = centred_residuals(p, f, big_r, zl, ta);
    let rb = centred_residuals(p, f, big_r, zl, tb);
    let tol = super::cusps::CUSP_RESIDUAL_TOL;
    if ra[0] >= tol || ra[1] >= tol || rb[0] >= tol || rb[1] >= tol {
        return None;
    }
    // Each root must be exactly double.
    if ra[2] < 1e-4 || rb[2] < 1e-4 {
        return None;
    }
    let (lo, hi, res) = if ta <= tb { (ta, tb, [ra[0], ra[1], rb[0], rb[1]]) } else { (tb, ta, [rb[0], rb[1], ra[0], ra[1]]) };
    Some(NodePoint {
        point: CrossSectionPoint::new(rho2.max(0.0).sqrt(), zl + p.d1),
        theta3: [lo, hi],
        t: [(0.5 * lo).tan(), (0.5 * hi).tan()],
        residuals: res,
    })
}
