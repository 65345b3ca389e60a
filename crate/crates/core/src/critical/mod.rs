//! Critical points on the `(θ₂, θ₃)` torus, their images in the `(ρ, z)`
//! half-plane, and the special critical values (cusps and nodes).

mod census;
mod cusps;
mod genericity;
pub mod newton;
mod nodes;
mod trace;

pub use census::{region_census, BoundarySample, CensusAudit, RegionCensus};
pub use cusps::{find_cusps, CuspPoint};
pub use genericity::{genericity_audit, genericity_check, GenericityEvidence, GenericityReport};
pub use nodes::{find_nodes, segment_intersections, NodePoint};
pub use trace::{trace_critical_points, trace_on_grid, DetGrid};
pub(crate) use trace::{is_crossing_edge, refine_vertex};

use crate::angle::torus_dist;
use crate::dh::{cross_section_at, CrossSectionPoint, DhParams};
use crate::reduction::{local_rz, FCoefficients, QuarticFamily};

/// Default torus resolution (0.5° cells).
pub const DEFAULT_GRID_N: usize = 720;

/// A closed polyline of critical points on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCurve {
    pub vertices: Vec<(f64, f64)>,
    pub closed: bool,
    /// `‖∇ det J‖` at each vertex.
    pub grad_norm: Vec<f64>,
}

/// The image of a [`JointCurve`] in the half cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceCurve {
    pub points: Vec<CrossSectionPoint>,
    /// Index of the source curve.
    pub source: usize,
    /// Joint-space vertex each point is the image of.
    pub joint: Vec<(f64, f64)>,
    /// `‖d(ρ, z)/ds‖` along the source curve (arc length `s` on the torus).
    pub speed: Vec<f64>,
}

impl WorkspaceCurve {
    /// Diameter of the image (max distance from the first point).
    pub fn extent(&self) -> f64 {
        match self.points.first() {
            Some(p0) => self.points.iter().map(|q| q.dist(p0)).fold(0.0, f64::max),
            None => 0.0,
        }
    }

    /// The whole source curve maps to (numerically) one point: the wrist sits
    /// on the second joint axis along it. Such a component bounds no region.
    pub fn is_collapsed(&self, p: &DhParams) -> bool {
        self.extent() < COLLAPSE_TOL * p.length_scale()
    }
}

/// Image diameter below which a workspace curve counts as collapsed.
pub const COLLAPSE_TOL: f64 = 1e-6;

pub fn critical_values(p: &DhParams, curves: &[JointCurve]) -> Vec<WorkspaceCurve> {
    curves
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let points: Vec<CrossSectionPoint> =
                crate::par::map_slice(&c.vertices, |&(a, b)| cross_section_at(p, a, b));
            let n = points.len();
            let speed = (0..n)
                .map(|i| {
                    if n < 3 {
                        return 0.0;
                    }
                    let prev = (i + n - 1) % n;
                    let next = (i + 1) % n;
                    let ds = torus_dist(c.vertices[prev], c.vertices[i]) + torus_dist(c.vertices[i], c.vertices[next]);
                    if ds == 0.0 {
                        0.0
                    } else {
                        points[prev].dist(&points[next]) / ds
                    }
                })
                .collect();
            WorkspaceCurve { points, source: idx, joint: c.vertices.clone(), speed }
        })
        .collect()
}

/// Distance from `pt` to the nearest segment of any workspace curve.
pub fn distance_to_curves(curves: &[WorkspaceCurve], pt: &CrossSectionPoint) -> f64 {
    let mut best = f64::INFINITY;
    for c in curves {
        let n = c.points.len();
        for i in 0..n {
            let a = c.points[i];
            let b = c.points[(i + 1) % n];
            best = best.min(point_segment_dist(pt, &a, &b));
        }
    }
    best
}

pub(crate) fn point_segment_dist(p: &CrossSectionPoint, a: &CrossSectionPoint, b: &CrossSectionPoint) -> f64 {
    let (dx, dz) = (b.rho - a.rho, b.z - a.z);
    let len2 = dx * dx + dz * dz;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.rho - a.rho) * dx + (p.z - a.z) * dz) / len2).clamp(0.0, 1.0)
    };
    (p.rho - (a.rho + s * dx)).hypot(p.z - (a.z + s * dz))
}

/// Residuals `[M, M', M'', M''', M'''']` at a root `theta3` of the quartic of
/// `(R, z_local)`, computed in the chart centred on the root (so `t = 0`) with
/// the quartic scaled to unit max-abs coefficient.
pub fn centred_residuals(p: &DhParams, f: &FCoefficients, big_r: f64, z_local: f64, theta3: f64) -> [f64; 5] {
    let fam = QuarticFamily::new(p, f, theta3);
    let (m, _, _) = fam.at(big_r, z_local);
    let m = m.normalized();
    let [a, b, c, d, e] = m.coeffs;
    [e.abs(), d.abs(), 2.0 * c.abs(), 6.0 * b.abs(), 24.0 * a.abs()]
}

/// Projects a point near the critical-value set onto it: minimum-norm Newton
/// on `{M = 0, M' = 0}` in `(t, R, z)`, with `t` charted at `theta3`.
/// Returns the refined point and the double-root angle.
pub fn refine_critical_value(
    p: &DhParams,
    f: &FCoefficients,
    theta3: f64,
    pt: &CrossSectionPoint,
) -> Option<(CrossSectionPoint, f64)> {
    let fam = QuarticFamily::new(p, f, theta3);
    let (r0, z0) = local_rz(p, pt);
    let norm = fam.at(r0, z0).0.max_abs();
    if norm == 0.0 {
        return None;
    }
    let system = |x: &[f64]| {
        let (m, mr, mz) = fam.at(x[1], x[2]);
        let t = x[0];
        let r = vec![m.eval(t) / norm, m.eval_derivative(1, t) / norm];
        let j = nalgebra::DMatrix::from_row_slice(
            2,
            3,
            &[
                m.eval_derivative(1, t) / norm,
                mr.eval(t) / norm,
                mz.eval(t) / norm,
                m.eval_derivative(2, t) / norm,
                mr.eval_derivative(1, t) / norm,
                mz.eval_derivative(1, t) / norm,
            ],
        );
        (r, j)
    };
    let out = newton::solve(system, &[0.0, r0, z0], 1e-15).ok()?;
    if out.residual > 1e-10 {
        return None;
    }
    let (t, r, zl) = (out.x[0], out.x[1], out.x[2]);
    let rho2 = r - zl * zl;
    if rho2 < -1e-9 * p.length_scale().powi(2) {
        return None;
    }
    Some((CrossSectionPoint::new(rho2.max(0.0).sqrt(), zl + p.d1), fam.theta(t)))
}
