//! Nonsingular posture-change paths on the `(θ₂, θ₃)` torus.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::angle::{diff, normalize, torus_dist};
use crate::critical::DetGrid;
use crate::dh::{det_jacobian, DhParams, JointConfig};
use crate::error::{Error, Result};

use super::aspects::{AspectMap, BlockedEdges};
use super::label::cell_of;

/// Paths are valid when `|det J| > PATH_TOL · scale` everywhere along them.
pub const PATH_TOL: f64 = 1e-4;
/// Subsamples per segment in [`verify_path`].
pub const VERIFY_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct JointPath {
    /// Waypoints on the torus; consecutive ones lie within one grid cell.
    pub waypoints: Vec<(f64, f64)>,
    /// θ₁ at the start and at the end.
    pub theta1: (f64, f64),
    pub min_abs_det: f64,
}

impl JointPath {
    /// Full configurations, θ₁ interpolated linearly in arc length.
    pub fn configs(&self) -> Vec<JointConfig> {
        let mut arc = vec![0.0];
        for w in self.waypoints.windows(2) {
            arc.push(arc[arc.len() - 1] + torus_dist(w[0], w[1]));
        }
        let total = arc[arc.len() - 1];
        let d1 = diff(self.theta1.0, self.theta1.1);
        self.waypoints
            .iter()
            .zip(&arc)
            .map(|(w, s)| {
                let frac = if total > 0.0 { s / total } else { 0.0 };
                JointConfig::new(self.theta1.0 + frac * d1, w.0, w.1)
            })
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| torus_dist(w[0], w[1])).sum()
    }

    /// Appends `next`, which must start where `self` ends.
    pub fn join(mut self, next: JointPath) -> JointPath {
        self.waypoints.extend_from_slice(&next.waypoints[1..]);
        self.theta1.1 = next.theta1.1;
        self.min_abs_det = self.min_abs_det.min(next.min_abs_det);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathCheck {
    pub min_abs_det: f64,
    pub valid: bool,
}

fn segment_min(p: &DhParams, a: (f64, f64), b: (f64, f64)) -> (f64, bool) {
    let (dx, dy) = (diff(a.0, b.0), diff(a.1, b.1));
    let mut m = f64::INFINITY;
    let mut sign = None;
    let mut flips = false;
    for k in 0..=VERIFY_SAMPLES {
        let s = k as f64 / VERIFY_SAMPLES as f64;
        let v = det_jacobian(p, a.0 + s * dx, a.1 + s * dy);
        m = m.min(v.abs());
        let pos = v > 0.0;
        if *sign.get_or_insert(pos) != pos {
            flips = true;
        }
    }
    (m, flips)
}

/// Dense check of `|det J|` along the straight torus segments of a path.
pub fn verify_path(p: &DhParams, path: &JointPath) -> PathCheck {
    let tol = PATH_TOL * p.scale();
    let mut m = f64::INFINITY;
    let mut flips = false;
    if path.waypoints.len() == 1 {
        let w = path.waypoints[0];
        m = det_jacobian(p, w.0, w.1).abs();
    }
    for w in path.waypoints.windows(2) {
        let (sm, f) = segment_min(p, w[0], w[1]);
        m = m.min(sm);
        flips |= f;
    }
    PathCheck { min_abs_det: m, valid: m > tol && !flips }
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Corners of the cell containing `q` that a straight nonsingular segment
/// from `q` reaches.
fn anchors(p: &DhParams, grid: &DetGrid, q: (f64, f64)) -> Vec<usize> {
    let n = grid.n;
    let tol = PATH_TOL * p.scale();
    let (i0, j0) = cell_of(n, q);
    let mut out = Vec::new();
    for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let (i, j) = ((i0 + di) % n, (j0 + dj) % n);
        let node = (grid.angle(i), grid.angle(j));
        let (m, flips) = segment_min(p, q, node);
        if m > tol && !flips {
            out.push(j * n + i);
        }
    }
    out
}

fn astar(
    p: &DhParams,
    grid: &DetGrid,
    aspects: &AspectMap,
    blocked: &BlockedEdges,
    starts: &[usize],
    goals: &[usize],
    goal_pt: (f64, f64),
) -> Option<Vec<usize>> {
    let n = grid.n;
    let h = grid.step();
    let scale = p.scale();
    let tol = PATH_TOL * scale;
    let node_pt = |k: usize| (grid.angle(k % n), grid.angle(k / n));
    let heur = |k: usize| torus_dist(node_pt(k), goal_pt);
    let mut g = vec![f64::INFINITY; n * n];
    let mut from = vec![usize::MAX; n * n];
    let mut heap = BinaryHeap::new();
    for &s in starts {
        g[s] = 0.0;
        heap.push(Open { f: heur(s), node: s });
    }
    while let Some(Open { node, .. }) = heap.pop() {
        if goals.contains(&node) {
            let mut out = vec![node];
            let mut k = node;
            while from[k] != usize::MAX {
                k = from[k];
                out.push(k);
            }
            out.reverse();
            return Some(out);
        }
        let (i, j) = (node % n, node / n);
        let label = aspects.labels[node];
        let moves = [
            ((i + 1) % n, j, blocked.horizontal(i, j)),
            ((i + n - 1) % n, j, blocked.horizontal(i + n - 1, j)),
            (i, (j + 1) % n, blocked.vertical(i, j)),
            (i, (j + n - 1) % n, blocked.vertical(i, j + n - 1)),
        ];
        for (ni, nj, stop) in moves {
            let m = nj * n + ni;
            if stop || aspects.labels[m] != label {
                continue;
            }
            let d = grid.values[m].abs();
            if d <= tol {
                continue;
            }
            // stay clear of the singular set
            let cost = h * (1.0 + 1e-2 / (d / scale + 1e-6));
            let cand = g[node] + cost;
            if cand < g[m] {
                g[m] = cand;
                from[m] = node;
                heap.push(Open { f: cand + heur(m), node: m });
            }
        }
    }
    None
}

/// A path between two configurations that never meets the critical points,
/// or `None` when their `(θ₂, θ₃)` lie in different aspects.
pub fn find_nonsingular_path(
    p: &DhParams,
    grid: &DetGrid,
    aspects: &AspectMap,
    start: &JointConfig,
    goal: &JointConfig,
) -> Result<Option<JointPath>> {
    let tol = PATH_TOL * p.scale();
    let (qs, qg) = (start.reduced(), goal.reduced());
    if det_jacobian(p, qs.0, qs.1).abs() <= tol || det_jacobian(p, qg.0, qg.1).abs() <= tol {
        return Err(Error::StartOrGoalSingular);
    }
    let theta1 = (start.theta1(), goal.theta1());
    let direct = JointPath { waypoints: vec![qs, qg], theta1, min_abs_det: 0.0 };
    if torus_dist(qs, qg) <= grid.step() {
        let check = verify_path(p, &direct);
        if check.valid {
            return Ok(Some(JointPath { min_abs_det: check.min_abs_det, ..direct }));
        }
    }
    let sa = anchors(p, grid, qs);
    let ga = anchors(p, grid, qg);
    let labels = |v: &[usize]| v.iter().map(|&k| aspects.labels[k]).filter(|l| *l >= 0).collect::<Vec<_>>();
    let (ls, lg) = (labels(&sa), labels(&ga));
    if !ls.iter().any(|l| lg.contains(l)) {
        return Ok(None);
    }
    let n = grid.n;
    let mut blocked = aspects.blocked.clone();
    // A grid edge can dip below tolerance between two good nodes; block it
    // and search again.
    for _ in 0..64 {
        let Some(nodes) = astar(p, grid, aspects, &blocked, &sa, &ga, qg) else {
            return Ok(None);
        };
        let mut waypoints = vec![qs];
        waypoints.extend(nodes.iter().map(|&k| (grid.angle(k % n), grid.angle(k / n))));
        waypoints.push(qg);
        let mut worst: Option<(usize, f64)> = None;
        let mut min = f64::INFINITY;
        for (s, w) in waypoints.windows(2).enumerate() {
            let (m, flips) = segment_min(p, w[0], w[1]);
            min = min.min(m);
            if (m <= tol || flips) && worst.is_none_or(|(_, v)| m < v) {
                worst = Some((s, m));
            }
        }
        match worst {
            None => {
                let waypoints = waypoints.into_iter().map(|w| (normalize(w.0), normalize(w.1))).collect();
                return Ok(Some(JointPath { waypoints, theta1, min_abs_det: min }));
            }
            Some((s, _)) if s == 0 || s == nodes.len() => return Ok(None),
            Some((s, _)) => {
                let (a, b) = (nodes[s - 1], nodes[s]);
                let (ai, aj, bi, bj) = (a % n, a / n, b % n, b / n);
                if aj == bj {
                    let i = if (ai + 1) % n == bi { ai } else { bi };
                    blocked.block(i, aj, true);
                } else {
                    let j = if (aj + 1) % n == bj { aj } else { bj };
                    blocked.block(ai, j, false);
                }
            }
        }
    }
    Ok(None)
}
