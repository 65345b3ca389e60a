//! Census of the number of inverse kinematic solutions over the workspace
//! cross-section, with an audit of how counts change across critical values.

use crate::dh::{CrossSectionPoint, DhParams};
use crate::error::Result;
use crate::par;
use crate::reduction::{f_coefficients, solve_ik_with, FCoefficients};

use super::{distance_to_curves, refine_critical_value, CuspPoint, NodePoint, WorkspaceCurve};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    /// A point on the critical-value set, refined onto it.
    pub point: CrossSectionPoint,
    /// Distinct IKS at `point`.
    pub count: usize,
    /// Distinct IKS just off the curve on either side.
    pub sides: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CensusAudit {
    /// Adjacent cell pairs separated by exactly one critical-value crossing.
    pub pairs_checked: usize,
    /// `(cell a, cell b, count a, count b)` for pairs whose counts do not
    /// differ by two.
    pub pair_failures: Vec<((usize, usize), (usize, usize), usize, usize)>,
    pub boundary: Vec<BoundarySample>,
    pub boundary_failures: usize,
}

impl CensusAudit {
    pub fn passed(&self) -> bool {
        self.pair_failures.is_empty() && self.boundary_failures == 0
    }
}

/// IKS counts at cell centres of a rectangular grid over the padded bounding
/// box of the critical values.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCensus {
    pub rho_range: (f64, f64),
    pub z_range: (f64, f64),
    pub nx: usize,
    pub nz: usize,
    /// Distinct real IKS per cell, index `iz * nx + ix`.
    pub counts: Vec<u8>,
    pub audit: CensusAudit,
}

impl RegionCensus {
    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.rho_range.1 - self.rho_range.0) / self.nx as f64,
            (self.z_range.1 - self.z_range.0) / self.nz as f64,
        )
    }

    pub fn center(&self, ix: usize, iz: usize) -> CrossSectionPoint {
        let (dx, dz) = self.cell_size();
        CrossSectionPoint::new(
            self.rho_range.0 + (ix as f64 + 0.5) * dx,
            self.z_range.0 + (iz as f64 + 0.5) * dz,
        )
    }

    pub fn count(&self, ix: usize, iz: usize) -> u8 {
        self.counts[iz * self.nx + ix]
    }

    /// Cell containing `pt`, if inside the box.
    pub fn cell_of(&self, pt: &CrossSectionPoint) -> Option<(usize, usize)> {
        let (dx, dz) = self.cell_size();
        let fx = (pt.rho - self.rho_range.0) / dx;
        let fz = (pt.z - self.z_range.0) / dz;
        if fx < 0.0 || fz < 0.0 || fx >= self.nx as f64 || fz >= self.nz as f64 {
            return None;
        }
        Some((fx as usize, fz as usize))
    }
}

pub(crate) fn distinct_count(p: &DhParams, f: &FCoefficients, pt: &CrossSectionPoint) -> usize {
    solve_ik_with(p, f, pt, None).map(|s| s.distinct()).unwrap_or(0)
}

pub fn region_census(
    p: &DhParams,
    n: usize,
    curves: &[WorkspaceCurve],
    cusps: &[CuspPoint],
    nodes: &[NodePoint],
) -> Result<RegionCensus> {
    let f = f_coefficients(p)?;
    let all: Vec<&CrossSectionPoint> = curves.iter().flat_map(|c| c.points.iter()).collect();
    let (mut r0, mut r1, mut z0, mut z1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for q in &all {
        r0 = r0.min(q.rho);
        r1 = r1.max(q.rho);
        z0 = z0.min(q.z);
        z1 = z1.max(q.z);
    }
    if all.is_empty() {
        // No critical values: census a box of the arm's reach.
        let l = p.length_scale();
        (r0, r1, z0, z1) = (0.0, l, p.d1 - l, p.d1 + l);
    }
    let (pr, pz) = (0.05 * (r1 - r0).max(1e-9), 0.05 * (z1 - z0).max(1e-9));
    let rho_range = ((r0 - pr).max(0.0), r1 + pr);
    let z_range = (z0 - pz, z1 + pz);
    let mut census = RegionCensus { rho_range, z_range, nx: n, nz: n, counts: Vec::new(), audit: CensusAudit::default() };
    let rows = par::map_range(n, |iz| {
        (0..n).map(|ix| distinct_count(p, &f, &census.center(ix, iz)) as u8).collect::<Vec<u8>>()
    });
    census.counts = rows.concat();
    census.audit = audit(p, &f, &census, curves, cusps, nodes);
    Ok(census)
}

fn audit(
    p: &DhParams,
    f: &FCoefficients,
    census: &RegionCensus,
    curves: &[WorkspaceCurve],
    cusps: &[CuspPoint],
    nodes: &[NodePoint],
) -> CensusAudit {
    let (nx, nz) = (census.nx, census.nz);
    let (dx, dz) = census.cell_size();
    let exclusion = 3.0 * dx.max(dz);
    let (collapsed, live): (Vec<&WorkspaceCurve>, Vec<&WorkspaceCurve>) =
        curves.iter().partition(|c| c.is_collapsed(p));
    let special: Vec<CrossSectionPoint> = cusps
        .iter()
        .map(|c| c.point)
        .chain(nodes.iter().map(|n| n.point))
        .chain(collapsed.iter().filter_map(|c| c.points.first().copied()))
        .collect();
    let near_special = |q: &CrossSectionPoint| special.iter().any(|s| s.dist(q) < exclusion);

    // Bin every polyline segment by the cells its bounding box touches.
    let mut bins: Vec<Vec<(CrossSectionPoint, CrossSectionPoint)>> = vec![Vec::new(); nx * nz];
    let clampx = |v: f64| ((v - census.rho_range.0) / dx).floor().clamp(0.0, (nx - 1) as f64) as usize;
    let clampz = |v: f64| ((v - census.z_range.0) / dz).floor().clamp(0.0, (nz - 1) as f64) as usize;
    for c in &live {
        let m = c.points.len();
        for i in 0..m {
            let a = c.points[i];
            let b = c.points[(i + 1) % m];
            for iz in clampz(a.z.min(b.z))..=clampz(a.z.max(b.z)) {
                for ix in clampx(a.rho.min(b.rho))..=clampx(a.rho.max(b.rho)) {
                    bins[iz * nx + ix].push((a, b));
                }
            }
        }
    }

    let mut out = CensusAudit::default();
    for iz in 0..nz {
        for ix in 0..nx {
            for (jx, jz) in [(ix + 1, iz), (ix, iz + 1)] {
                if jx >= nx || jz >= nz {
                    continue;
                }
                let (ca, cb) = (census.center(ix, iz), census.center(jx, jz));
                let mut hits: Vec<CrossSectionPoint> = Vec::new();
                for seg in bins[iz * nx + ix].iter().chain(bins[jz * nx + jx].iter()) {
                    if let Some(x) = cross(&ca, &cb, &seg.0, &seg.1) {
                        if !hits.iter().any(|h| h.dist(&x) < 1e-12) {
                            hits.push(x);
                        }
                    }
                }
                // the half-plane folds at ρ = 0, where mirrored branches meet
                if hits.len() != 1 || near_special(&hits[0]) || hits[0].rho < exclusion {
                    continue;
                }
                out.pairs_checked += 1;
                let (na, nb) = (census.count(ix, iz) as usize, census.count(jx, jz) as usize);
                if na.abs_diff(nb) != 2 {
                    out.pair_failures.push(((ix, iz), (jx, jz), na, nb));
                }
            }
        }
    }

    // Boundary samples: points refined onto the critical-value set, compared
    // with points offset to either side along the normal.
    let delta = 1e-3 * p.length_scale();
    let mut samples = Vec::new();
    for &c in &live {
        let m = c.points.len();
        if m < 8 {
            continue;
        }
        let stride = (m / 24).max(1);
        for i in (0..m).step_by(stride) {
            samples.push((c, i));
        }
    }
    let results = par::map_slice(&samples, |&(c, i)| {
        let m = c.points.len();
        let q = c.points[i];
        if near_special(&q) || q.rho < 10.0 * delta {
            return None;
        }
        let (pt, _) = refine_critical_value(p, f, c.joint[i].1, &q)?;
        if pt.dist(&q) > 0.5 * dx.min(dz) {
            return None;
        }
        let a = c.points[(i + m - 1) % m];
        let b = c.points[(i + 1) % m];
        let (tx, tz) = (b.rho - a.rho, b.z - a.z);
        let len = tx.hypot(tz);
        if len == 0.0 {
            return None;
        }
        let (nxv, nzv) = (-tz / len, tx / len);
        let side = |s: f64| CrossSectionPoint { rho: pt.rho + s * delta * nxv, z: pt.z + s * delta * nzv };
        let (sa, sb) = (side(1.0), side(-1.0));
        // another branch within reach of the offsets makes the sides ambiguous
        if distance_to_curves(curves, &sa) < 0.5 * delta || distance_to_curves(curves, &sb) < 0.5 * delta {
            return None;
        }
        Some(BoundarySample {
            point: pt,
            count: distinct_count(p, f, &pt),
            sides: (distinct_count(p, f, &sa), distinct_count(p, f, &sb)),
        })
    });
    for s in results.into_iter().flatten() {
        let (a, b) = s.sides;
        let ok = a.abs_diff(b) == 2 && 2 * s.count == a + b;
        if !ok {
            out.boundary_failures += 1;
        }
        out.boundary.push(s);
    }
    out
}

fn cross(
    a0: &CrossSectionPoint,
    a1: &CrossSectionPoint,
    b0: &CrossSectionPoint,
    b1: &CrossSectionPoint,
) -> Option<CrossSectionPoint> {
    let (dax, daz) = (a1.rho - a0.rho, a1.z - a0.z);
    let (dbx, dbz) = (b1.rho - b0.rho, b1.z - b0.z);
    let den = dax * dbz - daz * dbx;
    if den == 0.0 {
        return None;
    }
    let (ex, ez) = (b0.rho - a0.rho, b0.z - a0.z);
    let u = (ex * dbz - ez * dbx) / den;
    let v = (ex * daz - ez * dax) / den;
    ((0.0..=1.0).contains(&u) && (0.0..1.0).contains(&v))
        .then(|| CrossSectionPoint { rho: a0.rho + u * dax, z: a0.z + u * daz })
}
