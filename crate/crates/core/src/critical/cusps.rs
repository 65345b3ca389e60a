//! Cusps: workspace points where `M = M' = M'' = 0` and `M''' ≠ 0`.

use log::debug;
use nalgebra::DMatrix;

use crate::dh::{CrossSectionPoint, DhParams};
use crate::error::Result;
use crate::par;
use crate::reduction::{f_coefficients, local_rz, FCoefficients, QuarticFamily};

use super::{centred_residuals, distance_to_curves, newton, WorkspaceCurve};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspPoint {
    pub point: CrossSectionPoint,
    /// `tan(θ₃/2)` of the triple root in the standard chart.
    pub t: f64,
    pub theta3: f64,
    /// `(|M|, |M'|, |M''|)` of the normalized quartic, root-centred chart.
    pub residuals: [f64; 3],
    /// `|M'''|` in the same chart.
    pub abs_m3: f64,
    /// Workspace curve the seed came from.
    pub source: usize,
}

pub const CUSP_RESIDUAL_TOL: f64 = 1e-7;
pub const CUSP_M3_MIN: f64 = 1e-4;

/// Seeds: local minima of the image speed. Each seed is refined by Newton on
/// `{M, M', M''}` in `(t, R, z)` and then certified.
pub fn find_cusps(p: &DhParams, curves: &[WorkspaceCurve]) -> Result<Vec<CuspPoint>> {
    let f = f_coefficients(p)?;
    let mut seeds = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        let n = c.speed.len();
        if n < 5 || c.is_collapsed(p) {
            continue;
        }
        for i in 0..n {
            let s = c.speed[i];
            let is_min = (1..=2).all(|k| s <= c.speed[(i + k) % n] && s < c.speed[(i + n - k) % n]);
            if is_min {
                seeds.push((ci, i));
            }
        }
    }
    let found = par::map_slice(&seeds, |&(ci, i)| {
        let c = &curves[ci];
        refine_cusp(p, &f, c.joint[i].1, &c.points[i]).map(|mut cp| {
            cp.source = c.source;
            cp
        })
    });
    let on_curve_tol = 1e-2 * p.length_scale();
    let mut cusps: Vec<CuspPoint> = Vec::new();
    for (cand, &(ci, i)) in found.into_iter().zip(seeds.iter()) {
        let Some(cand) = cand else {
            debug!("cusp seed {ci}:{i} diverged");
            continue;
        };
        if distance_to_curves(curves, &cand.point) > on_curve_tol {
            debug!("cusp candidate {:?} is off the critical-value set", cand.point);
            continue;
        }
        let dedup = 1e-4 * p.length_scale();
        if cusps.iter().any(|c| c.point.dist(&cand.point) < dedup) {
            continue;
        }
        cusps.push(cand);
    }
    cusps.sort_by(|a, b| a.point.rho.total_cmp(&b.point.rho).then(a.point.z.total_cmp(&b.point.z)));
    Ok(cusps)
}

/// Newton on the cusp system from a seed `(θ₃, (ρ, z))`.
pub fn refine_cusp(p: &DhParams, f: &FCoefficients, theta3: f64, seed: &CrossSectionPoint) -> Option<CuspPoint> {
    let fam = QuarticFamily::new(p, f, theta3);
    let (r0, z0) = local_rz(p, seed);
    let norm = fam.at(r0, z0).0.max_abs();
    if norm == 0.0 {
        return None;
    }
    let system = |x: &[f64]| {
        let (m, mr, mz) = fam.at(x[1], x[2]);
        let t = x[0];
        let r: Vec<f64> = (0..3).map(|k| m.eval_derivative(k, t) / norm).collect();
        let mut j = DMatrix::zeros(3, 3);
        for k in 0..3 {
            j[(k, 0)] = m.eval_derivative(k + 1, t) / norm;
            j[(k, 1)] = mr.eval_derivative(k, t) / norm;
            j[(k, 2)] = mz.eval_derivative(k, t) / norm;
        }
        (r, j)
    };
    let out = newton::solve(system, &[0.0, r0, z0], 1e-14).ok()?;
    if out.x[0].abs() > 10.0 {
        return None;
    }
    let theta = fam.theta(out.x[0]);
    certify(p, f, theta, out.x[1], out.x[2])
}

fn certify(p: &DhParams, f: &FCoefficients, theta3: f64, big_r: f64, z_local: f64) -> Option<CuspPoint> {
    let rho2 = big_r - z_local * z_local;
    if rho2 < -1e-9 * p.length_scale().powi(2) {
        return None;
    }
    let res = centred_residuals(p, f, big_r, z_local, theta3);
    if res[..3].iter().any(|&r| r >= CUSP_RESIDUAL_TOL) || res[3] <= CUSP_M3_MIN {
        return None;
    }
    Some(CuspPoint {
        point: CrossSectionPoint::new(rho2.max(0.0).sqrt(), z_local + p.d1),
        t: (0.5 * theta3).tan(),
        theta3,
        residuals: [res[0], res[1], res[2]],
        abs_m3: res[3],
        source: 0,
    })
}
