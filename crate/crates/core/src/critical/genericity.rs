//! Numerical genericity audit: no quadruple roots, a smooth critical locus,
//! no isolated singular points.

use nalgebra::DMatrix;

use crate::dh::{CrossSectionPoint, DhParams};
use crate::error::Result;
use crate::par;
use crate::reduction::{f_coefficients, local_rz, FCoefficients, QuarticFamily};

use super::{centred_residuals, newton, CuspPoint, DetGrid, JointCurve, WorkspaceCurve};

#[derive(Debug, Clone, PartialEq)]
pub enum GenericityEvidence {
    /// `M = M' = M'' = M''' = 0` at a reachable point.
    QuadrupleRoot { point: CrossSectionPoint, theta3: f64, residual: f64 },
    /// A traced critical point where `∇ det J` (nearly) vanishes.
    SingularVertex { theta: (f64, f64), grad_norm: f64 },
    /// A local extremum of `det J` touching zero away from every traced curve.
    IsolatedSingularPoint { theta: (f64, f64), predicted: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub is_generic: bool,
    pub evidence: Vec<GenericityEvidence>,
}

pub const QUADRUPLE_TOL: f64 = 1e-8;
pub const GRADIENT_MIN: f64 = 1e-5;
pub const ISOLATED_TOL: f64 = 1e-6;

/// Traces everything at resolution `grid_n` and runs [`genericity_audit`].
pub fn genericity_check(p: &DhParams, grid_n: usize) -> Result<GenericityReport> {
    if grid_n < 64 {
        return Err(crate::error::Error::GridTooCoarse(grid_n));
    }
    let grid = DetGrid::evaluate(p, grid_n);
    let curves = super::trace_on_grid(p, &grid);
    let ws = super::critical_values(p, &curves);
    let cusps = super::find_cusps(p, &ws)?;
    genericity_audit(p, &grid, &curves, &ws, &cusps)
}

pub fn genericity_audit(
    p: &DhParams,
    grid: &DetGrid,
    curves: &[JointCurve],
    workspace: &[WorkspaceCurve],
    cusps: &[CuspPoint],
) -> Result<GenericityReport> {
    let f = f_coefficients(p)?;
    let mut evidence = Vec::new();

    // (a) quadruple roots, seeded at cusps and at extrema of ρ and z along
    // each critical-value curve.
    let mut seeds: Vec<(f64, CrossSectionPoint)> = cusps.iter().map(|c| (c.theta3, c.point)).collect();
    for wc in workspace {
        let n = wc.points.len();
        if n == 0 {
            continue;
        }
        let pick = |key: &dyn Fn(&CrossSectionPoint) -> f64| {
            (0..n).min_by(|&a, &b| key(&wc.points[a]).total_cmp(&key(&wc.points[b]))).unwrap()
        };
        for i in [
            pick(&|q| q.rho),
            pick(&|q| -q.rho),
            pick(&|q| q.z),
            pick(&|q| -q.z),
        ] {
            seeds.push((wc.joint[i].1, wc.points[i]));
        }
    }
    let quads = par::map_slice(&seeds, |(th, pt)| quadruple_search(p, &f, *th, pt));
    for q in quads.into_iter().flatten() {
        if !evidence.iter().any(|e| matches!(e, GenericityEvidence::QuadrupleRoot { point, .. } if point.dist(&q.0) < 1e-4 * p.length_scale())) {
            evidence.push(GenericityEvidence::QuadrupleRoot { point: q.0, theta3: q.1, residual: q.2 });
        }
    }

    // (b) smoothness of the critical locus.
    let gmin = GRADIENT_MIN * p.scale();
    for c in curves {
        for (v, g) in c.vertices.iter().zip(c.grad_norm.iter()) {
            if *g <= gmin {
                evidence.push(GenericityEvidence::SingularVertex { theta: *v, grad_norm: *g });
            }
        }
    }

    // (c) isolated singular points: local extrema of det J with no sign change
    // nearby whose quadratic model reaches zero inside the cell.
    let n = grid.n;
    let h = grid.step();
    let tol = ISOLATED_TOL * p.scale();
    let rows = par::map_range(n, |j| {
        let mut found = Vec::new();
        for i in 0..n {
            let v = grid.at(i, j);
            let mut extremum = true;
            let mut same_sign = true;
            for dj in 0..3 {
                for di in 0..3 {
                    let w = grid.at(i + n + di - 1, j + n + dj - 1);
                    if (w >= 0.0) != (v >= 0.0) {
                        same_sign = false;
                    }
                    if (di, dj) != (1, 1) && w.abs() < v.abs() {
                        extremum = false;
                    }
                }
            }
            if !(extremum && same_sign) {
                continue;
            }
            let fxx = grid.at(i + 1, j) - 2.0 * v + grid.at(i + n - 1, j);
            let fyy = grid.at(i, j + 1) - 2.0 * v + grid.at(i, j + n - 1);
            let fx = 0.5 * (grid.at(i + 1, j) - grid.at(i + n - 1, j));
            let fy = 0.5 * (grid.at(i, j + 1) - grid.at(i, j + n - 1));
            let fxy = 0.25
                * (grid.at(i + 1, j + 1) - grid.at(i + 1, j + n - 1) - grid.at(i + n - 1, j + 1)
                    + grid.at(i + n - 1, j + n - 1));
            let det = fxx * fyy - fxy * fxy;
            if det <= 0.0 {
                continue;
            }
            // stationary point of the quadratic model
            let dx = -(fyy * fx - fxy * fy) / det;
            let dy = -(fxx * fy - fxy * fx) / det;
            if dx.abs() > 1.0 || dy.abs() > 1.0 {
                continue;
            }
            let predicted = v + 0.5 * (fx * dx + fy * dy);
            if predicted.abs() < tol || v.abs() < tol {
                found.push(((grid.angle(i) + dx * h, grid.angle(j) + dy * h), predicted));
            }
        }
        found
    });
    for (theta, predicted) in rows.into_iter().flatten() {
        evidence.push(GenericityEvidence::IsolatedSingularPoint { theta, predicted });
    }

    Ok(GenericityReport { is_generic: evidence.is_empty(), evidence })
}

/// Gauss–Newton on the overdetermined quadruple-root system.
fn quadruple_search(
    p: &DhParams,
    f: &FCoefficients,
    theta3: f64,
    seed: &CrossSectionPoint,
) -> Option<(CrossSectionPoint, f64, f64)> {
    let fam = QuarticFamily::new(p, f, theta3);
    let (r0, z0) = local_rz(p, seed);
    let norm = fam.at(r0, z0).0.max_abs();
    if norm == 0.0 {
        return None;
    }
    let system = |x: &[f64]| {
        let (m, mr, mz) = fam.at(x[1], x[2]);
        let t = x[0];
        let r: Vec<f64> = (0..4).map(|k| m.eval_derivative(k, t) / norm).collect();
        let mut j = DMatrix::zeros(4, 3);
        for k in 0..4 {
            j[(k, 0)] = m.eval_derivative(k + 1, t) / norm;
            j[(k, 1)] = mr.eval_derivative(k, t) / norm;
            j[(k, 2)] = mz.eval_derivative(k, t) / norm;
        }
        (r, j)
    };
    let out = newton::solve(system, &[0.0, r0, z0], 1e-15).ok()?;
    let (th, big_r, zl) = (fam.theta(out.x[0]), out.x[1], out.x[2]);
    let rho2 = big_r - zl * zl;
    if rho2 < -1e-9 * p.length_scale().powi(2) || out.x[0].abs() > 10.0 {
        return None;
    }
    let res = centred_residuals(p, f, big_r, zl, th);
    let worst = res[..4].iter().fold(0.0f64, |m, v| m.max(*v));
    (worst < QUADRUPLE_TOL).then(|| (CrossSectionPoint::new(rho2.max(0.0).sqrt(), zl + p.d1), th, worst))
}
