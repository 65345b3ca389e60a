//! Pseudosingularities: nonsingular preimages of critical values.

use crate::angle::{diff, mid, torus_dist};
use crate::critical::{refine_vertex, JointCurve};
use crate::dh::{cross_section_at, det_jacobian, DhParams};
use crate::error::Result;
use crate::par;
use crate::reduction::{f_coefficients, solve_ik_with, FCoefficients};

/// Torus distance from the critical-point curves below which a preimage is
/// not reported.
pub const PS_EXCLUSION: f64 = 1e-2;
/// Reported points satisfy `|det J| > PS_MIN_DET · scale`.
pub const PS_MIN_DET: f64 = 1e-4;
/// Preimages this close to the source vertex are the source itself.
const SOURCE_RADIUS: f64 = 1e-3;
const MAX_DEPTH: u32 = 6;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoSingularitySet {
    /// Polylines of preimages at least [`PS_EXCLUSION`] away from the
    /// critical-point curves.
    pub curves: Vec<Vec<(f64, f64)>>,
    /// The unfiltered chains, with open ends joined to the nearest
    /// critical point. These are what the reduced-aspect fill blocks on.
    pub barriers: Vec<Vec<(f64, f64)>>,
}

impl PseudoSingularitySet {
    pub fn is_empty(&self) -> bool {
        self.barriers.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.curves.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone)]
struct Sample {
    pre: Vec<(f64, f64)>,
}

fn preimages(p: &DhParams, f: &FCoefficients, s: (f64, f64)) -> Vec<(f64, f64)> {
    let cs = cross_section_at(p, s.0, s.1);
    let Ok(set) = solve_ik_with(p, f, &cs, None) else {
        return Vec::new();
    };
    set.solutions
        .iter()
        .map(|sol| sol.config.reduced())
        .filter(|q| torus_dist(*q, s) > SOURCE_RADIUS)
        .collect()
}

fn matched(a: &Sample, b: &Sample, gap: f64) -> bool {
    let near = |x: &(f64, f64), set: &[(f64, f64)]| set.iter().any(|y| torus_dist(*x, *y) <= gap);
    a.pre.len() == b.pre.len() && a.pre.iter().all(|x| near(x, &b.pre)) && b.pre.iter().all(|x| near(x, &a.pre))
}

/// Samples strictly after `a` up to and including `b`, subdividing the
/// critical-point edge until consecutive preimage sets are within `gap`.
#[allow(clippy::too_many_arguments)]
fn densify(
    p: &DhParams,
    f: &FCoefficients,
    sa: (f64, f64),
    a: &Sample,
    sb: (f64, f64),
    b: &Sample,
    gap: f64,
    depth: u32,
    out: &mut Vec<Sample>,
) {
    if depth >= MAX_DEPTH || matched(a, b, gap) {
        out.push(b.clone());
        return;
    }
    let guess = (mid(sa.0, sb.0), mid(sa.1, sb.1));
    let (sm, _, _) = refine_vertex(p, guess, torus_dist(sa, sb));
    let m = Sample { pre: preimages(p, f, sm) };
    densify(p, f, sa, a, sm, &m, gap, depth + 1, out);
    densify(p, f, sm, &m, sb, b, gap, depth + 1, out);
}

struct Chain {
    pts: Vec<(f64, f64)>,
    first: usize,
    last: usize,
}

/// Links preimage sets along one closed curve into polylines by nearest
/// continuation.
fn chain_samples(samples: &[Sample], link: f64) -> Vec<(Vec<(f64, f64)>, bool)> {
    let mut chains: Vec<Chain> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for &c in &active {
            let end = *chains[c].pts.last().unwrap();
            for (bi, b) in s.pre.iter().enumerate() {
                let d = torus_dist(end, *b);
                if d <= link {
                    pairs.push((d, c, bi));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut chain_used = vec![false; chains.len()];
        let mut pt_used = vec![false; s.pre.len()];
        let mut next_active = Vec::new();
        for &(_, c, bi) in &pairs {
            if chain_used[c] || pt_used[bi] {
                continue;
            }
            chain_used[c] = true;
            pt_used[bi] = true;
            chains[c].pts.push(s.pre[bi]);
            chains[c].last = k;
            next_active.push(c);
        }
        // a chain that lost its continuation to another one (two branches
        // merging) still ends at the shared point
        for &(_, c, bi) in &pairs {
            if !chain_used[c] {
                chain_used[c] = true;
                chains[c].pts.push(s.pre[bi]);
                chains[c].last = k;
            }
        }
        for (bi, b) in s.pre.iter().enumerate() {
            if !pt_used[bi] {
                chains.push(Chain { pts: vec![*b], first: k, last: k });
                chain_used.push(true);
                next_active.push(chains.len() - 1);
            }
        }
        next_active.sort_unstable();
        active = next_active;
    }
    // the last sample repeats the first: splice chains running across it
    let last = samples.len() - 1;
    let mut merged: Vec<Option<Chain>> = chains.into_iter().map(Some).collect();
    for a in 0..merged.len() {
        let Some(ca) = &merged[a] else { continue };
        if ca.last != last {
            continue;
        }
        let end = *ca.pts.last().unwrap();
        let partner = (0..merged.len()).find(|&b| {
            merged[b].as_ref().is_some_and(|cb| cb.first == 0 && cb.pts[0] == end)
        });
        match partner {
            Some(b) if b == a => {
                // closed loop; drop the duplicated point
                merged[a].as_mut().unwrap().pts.pop();
                merged[a].as_mut().unwrap().last = usize::MAX;
            }
            Some(b) => {
                let cb = merged[b].take().unwrap();
                let ca = merged[a].as_mut().unwrap();
                ca.pts.extend_from_slice(&cb.pts[1..]);
                ca.last = cb.last;
            }
            None => {}
        }
    }
    merged.into_iter().flatten().filter(|c| !c.pts.is_empty()).map(|c| (c.pts, c.last == usize::MAX)).collect()
}

/// Spatial hash of polyline segments on the torus.
pub(crate) struct SegmentIndex {
    bins: usize,
    cells: Vec<Vec<((f64, f64), (f64, f64))>>,
}

impl SegmentIndex {
    pub(crate) fn new(polylines: &[(&[(f64, f64)], bool)], bins: usize) -> Self {
        let mut cells = vec![Vec::new(); bins * bins];
        let bin = |a: f64| (((a + std::f64::consts::PI) / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1);
        for &(pts, closed) in polylines {
            let m = pts.len();
            let segs = if closed { m } else { m.saturating_sub(1) };
            for i in 0..segs {
                let (a, b) = (pts[i], pts[(i + 1) % m]);
                cells[bin(a.1) * bins + bin(a.0)].push((a, b));
            }
            if m == 1 {
                cells[bin(pts[0].1) * bins + bin(pts[0].0)].push((pts[0], pts[0]));
            }
        }
        Self { bins, cells }
    }

    /// Distance to the nearest indexed segment, exact below one bin width.
    pub(crate) fn distance(&self, q: (f64, f64)) -> f64 {
        let b = self.bins;
        let w = std::f64::consts::TAU / b as f64;
        let bin = |a: f64| (((a + std::f64::consts::PI) / w) as usize).min(b - 1);
        let (bi, bj) = (bin(q.0), bin(q.1));
        let mut best = f64::INFINITY;
        for dj in 0..3 {
            for di in 0..3 {
                let cell = &self.cells[((bj + b + dj - 1) % b) * b + (bi + b + di - 1) % b];
                for &(a, c) in cell {
                    best = best.min(torus_segment_dist(q, a, c));
                }
            }
        }
        best
    }
}

fn torus_segment_dist(q: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (diff(a.0, b.0), diff(a.1, b.1));
    let (qx, qy) = (diff(a.0, q.0), diff(a.1, q.1));
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 { 0.0 } else { ((qx * dx + qy * dy) / len2).clamp(0.0, 1.0) };
    (qx - s * dx).hypot(qy - s * dy)
}

/// Preimages of the critical values that are not critical points, chained by
/// continuity along each source curve. Curves whose image is a single point
/// contribute nothing.
pub fn compute_pseudosingularities(p: &DhParams, curves: &[JointCurve]) -> Result<PseudoSingularitySet> {
    let f = f_coefficients(p)?;
    let live: Vec<&JointCurve> = curves
        .iter()
        .filter(|c| {
            let img: Vec<_> = c.vertices.iter().map(|v| cross_section_at(p, v.0, v.1)).collect();
            img.iter().any(|q| q.dist(&img[0]) >= crate::critical::COLLAPSE_TOL * p.length_scale())
        })
        .collect();
    let spacing = {
        let (mut total, mut count) = (0.0, 0usize);
        for c in &live {
            for w in c.vertices.windows(2) {
                total += torus_dist(w[0], w[1]);
                count += 1;
            }
        }
        if count == 0 {
            return Ok(PseudoSingularitySet::default());
        }
        total / count as f64
    };
    let gap = spacing;
    let link = 8.0 * spacing;

    let mut raw: Vec<(Vec<(f64, f64)>, bool)> = Vec::new();
    for c in &live {
        let m = c.vertices.len();
        let base = par::map_slice(&c.vertices, |&v| Sample { pre: preimages(p, &f, v) });
        let pieces = par::map_range(m, |k| {
            let mut out = Vec::new();
            let (sa, sb) = (c.vertices[k], c.vertices[(k + 1) % m]);
            densify(p, &f, sa, &base[k], sb, &base[(k + 1) % m], gap, 0, &mut out);
            out
        });
        let mut samples = vec![base[0].clone()];
        for piece in pieces {
            samples.extend(piece);
        }
        raw.extend(chain_samples(&samples, link));
    }

    let s_index = SegmentIndex::new(&curves.iter().map(|c| (&c.vertices[..], c.closed)).collect::<Vec<_>>(), 64);
    let s_vertices: Vec<(f64, f64)> = curves.iter().flat_map(|c| c.vertices.iter().copied()).collect();
    let nearest_s = |q: (f64, f64)| {
        s_vertices.iter().copied().min_by(|a, b| torus_dist(q, *a).total_cmp(&torus_dist(q, *b)))
    };

    let mut barriers = Vec::new();
    for (chain, closed) in &raw {
        let mut b = chain.clone();
        if !closed {
            for end in [0, 1] {
                let q = if end == 0 { b[0] } else { b[b.len() - 1] };
                if let Some(s) = nearest_s(q) {
                    if torus_dist(q, s) <= link {
                        if end == 0 {
                            b.insert(0, s);
                        } else {
                            b.push(s);
                        }
                    }
                }
            }
        } else {
            b.push(chain[0]);
        }
        barriers.push(b);
    }

    let min_det = PS_MIN_DET * p.scale();
    let keep = |q: (f64, f64)| s_index.distance(q) >= PS_EXCLUSION && det_jacobian(p, q.0, q.1).abs() > min_det;
    let mut out = Vec::new();
    for (chain, _) in &raw {
        let mut run = Vec::new();
        for &q in chain {
            if keep(q) {
                run.push(q);
            } else if !run.is_empty() {
                out.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            out.push(run);
        }
    }
    Ok(PseudoSingularitySet { curves: out, barriers })
}
