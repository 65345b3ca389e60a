//! Marching squares for `det J(θ₂, θ₃) = 0` on the periodic `(θ₂, θ₃)` grid.

use std::f64::consts::{PI, TAU};

use crate::angle::{normalize, torus_dist};
use crate::dh::{det_gradient, det_jacobian, DhParams};
use crate::error::{Error, Result};
use crate::par;

use super::JointCurve;

/// Samples of `det J` at `θ₂ = -π + i·h`, `θ₃ = -π + j·h`, `h = 2π/n`,
/// stored row-major in `j`.
#[derive(Debug, Clone)]
pub struct DetGrid {
    pub n: usize,
    pub values: Vec<f64>,
}

impl DetGrid {
    pub fn evaluate(p: &DhParams, n: usize) -> Self {
        let h = TAU / n as f64;
        let rows = par::map_range(n, |j| {
            let t3 = -PI + j as f64 * h;
            (0..n).map(|i| det_jacobian(p, -PI + i as f64 * h, t3)).collect::<Vec<_>>()
        });
        Self { n, values: rows.concat() }
    }

    pub fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(j % self.n) * self.n + (i % self.n)]
    }

    pub fn angle(&self, k: usize) -> f64 {
        -PI + k as f64 * self.step()
    }

    /// Grid node nearest to `(θ₂, θ₃)`.
    pub fn nearest(&self, theta: (f64, f64)) -> (usize, usize) {
        let idx = |a: f64| (((normalize(a) + PI) / self.step()).round() as usize) % self.n;
        (idx(theta.0), idx(theta.1))
    }

    /// `true` where the sample is nonnegative; zero is treated as positive.
    pub fn positive(&self, i: usize, j: usize) -> bool {
        self.at(i, j) >= 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct EdgeId(usize);

impl EdgeId {
    fn horizontal(n: usize, i: usize, j: usize) -> Self {
        EdgeId(2 * ((j % n) * n + (i % n)))
    }
    fn vertical(n: usize, i: usize, j: usize) -> Self {
        EdgeId(2 * ((j % n) * n + (i % n)) + 1)
    }
}

fn edge_point(grid: &DetGrid, e: EdgeId) -> (f64, f64) {
    let n = grid.n;
    let node = e.0 / 2;
    let (i, j) = (node % n, node / n);
    let h = grid.step();
    let v0 = grid.at(i, j);
    if e.0 % 2 == 0 {
        let v1 = grid.at(i + 1, j);
        let frac = v0 / (v0 - v1);
        (normalize(grid.angle(i) + frac * h), grid.angle(j))
    } else {
        let v1 = grid.at(i, j + 1);
        let frac = v0 / (v0 - v1);
        (grid.angle(i), normalize(grid.angle(j) + frac * h))
    }
}

/// Segments of the zero set inside cell `(i, j)`.
fn cell_segments(grid: &DetGrid, i: usize, j: usize, out: &mut Vec<(EdgeId, EdgeId)>) {
    let n = grid.n;
    let s00 = grid.positive(i, j);
    let s10 = grid.positive(i + 1, j);
    let s11 = grid.positive(i + 1, j + 1);
    let s01 = grid.positive(i, j + 1);
    let bottom = EdgeId::horizontal(n, i, j);
    let right = EdgeId::vertical(n, i + 1, j);
    let top = EdgeId::horizontal(n, i, j + 1);
    let left = EdgeId::vertical(n, i, j);
    let mut crossing = Vec::with_capacity(4);
    if s00 != s10 {
        crossing.push(bottom);
    }
    if s10 != s11 {
        crossing.push(right);
    }
    if s01 != s11 {
        crossing.push(top);
    }
    if s00 != s01 {
        crossing.push(left);
    }
    match crossing.len() {
        0 => {}
        2 => out.push((crossing[0], crossing[1])),
        4 => {
            let center = 0.25 * (grid.at(i, j) + grid.at(i + 1, j) + grid.at(i + 1, j + 1) + grid.at(i, j + 1));
            if (center >= 0.0) == s00 {
                // corners 10 and 01 are cut off
                out.push((bottom, right));
                out.push((top, left));
            } else {
                out.push((bottom, left));
                out.push((right, top));
            }
        }
        _ => unreachable!("a cell has an even number of sign changes"),
    }
}

/// Edges of the grid crossed by the zero set, for use by flood fills.
pub(crate) fn is_crossing_edge(grid: &DetGrid, i: usize, j: usize, horizontal: bool) -> bool {
    if horizontal {
        grid.positive(i, j) != grid.positive(i + 1, j)
    } else {
        grid.positive(i, j) != grid.positive(i, j + 1)
    }
}

/// One-dimensional Newton along `∇det` from `x`, limited to one cell.
pub(crate) fn refine_vertex(p: &DhParams, x: (f64, f64), max_shift: f64) -> ((f64, f64), f64, bool) {
    let tol = 1e-13 * p.scale();
    let mut cur = x;
    for _ in 0..12 {
        let f = det_jacobian(p, cur.0, cur.1);
        let (g2, g3) = det_gradient(p, cur.0, cur.1);
        let g2n = g2 * g2 + g3 * g3;
        if f.abs() <= tol {
            return (cur, g2n.sqrt(), true);
        }
        if g2n == 0.0 {
            break;
        }
        let next = (cur.0 - f * g2 / g2n, cur.1 - f * g3 / g2n);
        if crate::angle::torus_dist(next, x) > max_shift {
            break;
        }
        cur = (normalize(next.0), normalize(next.1));
    }
    let f = det_jacobian(p, cur.0, cur.1);
    let (g2, g3) = det_gradient(p, cur.0, cur.1);
    (cur, g2.hypot(g3), f.abs() <= 1e-6 * p.scale())
}

pub fn trace_critical_points(p: &DhParams, grid_n: usize) -> Result<Vec<JointCurve>> {
    if grid_n < 64 {
        return Err(Error::GridTooCoarse(grid_n));
    }
    let grid = DetGrid::evaluate(p, grid_n);
    Ok(trace_on_grid(p, &grid))
}

pub fn trace_on_grid(p: &DhParams, grid: &DetGrid) -> Vec<JointCurve> {
    let n = grid.n;
    let rows = par::map_range(n, |j| {
        let mut segs = Vec::new();
        for i in 0..n {
            cell_segments(grid, i, j, &mut segs);
        }
        segs
    });
    // Each crossed edge borders exactly two cells, hence has degree two.
    let mut adj: std::collections::HashMap<EdgeId, Vec<EdgeId>> = std::collections::HashMap::new();
    let mut order: Vec<EdgeId> = Vec::new();
    for (a, b) in rows.into_iter().flatten() {
        for (x, y) in [(a, b), (b, a)] {
            let e = adj.entry(x).or_default();
            if e.is_empty() {
                order.push(x);
            }
            e.push(y);
        }
    }
    order.sort();
    let mut visited: std::collections::HashSet<EdgeId> = std::collections::HashSet::new();
    let mut loops: Vec<Vec<EdgeId>> = Vec::new();
    for &start in &order {
        if visited.contains(&start) {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start);
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            if !visited.insert(cur) {
                break;
            }
            chain.push(cur);
            let nb = &adj[&cur];
            let next = if nb[0] == prev && nb.len() > 1 { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        loops.push(chain);
    }
    let h = grid.step();
    loops
        .into_iter()
        .map(|chain| {
            let raw: Vec<(f64, f64)> = chain.iter().map(|&e| edge_point(grid, e)).collect();
            let mut refined = par::map_slice(&raw, |&x| refine_vertex(p, x, h));
            // a grid node lying exactly on the zero set is the endpoint of two
            // crossed edges; keep one copy
            refined.dedup_by(|b, a| torus_dist(a.0, b.0) < 1e-9 * h);
            while refined.len() > 1 && torus_dist(refined[0].0, refined[refined.len() - 1].0) < 1e-9 * h {
                refined.pop();
            }
            JointCurve {
                vertices: refined.iter().map(|r| r.0).collect(),
                grad_norm: refined.iter().map(|r| r.1).collect(),
                closed: true,
            }
        })
        .collect()
}
