//! Connected components of the `(θ₂, θ₃)` torus grid with blocked edges.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::angle::diff;
use crate::critical::{DetGrid, JointCurve};
use crate::dh::DhParams;

/// Nodes with `|det J| < SINGULAR_NODE_TOL · scale` get label −1.
pub const SINGULAR_NODE_TOL: f64 = 1e-9;

/// Grid edges that a flood fill may not cross. The horizontal edge `(i, j)`
/// joins nodes `(i, j)` and `(i + 1, j)`, the vertical one `(i, j)` and
/// `(i, j + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedEdges {
    pub n: usize,
    bits: Vec<bool>,
}

impl BlockedEdges {
    pub fn new(n: usize) -> Self {
        Self { n, bits: vec![false; 2 * n * n] }
    }

    fn idx(&self, i: usize, j: usize, horizontal: bool) -> usize {
        let n = self.n;
        2 * ((j % n) * n + (i % n)) + usize::from(!horizontal)
    }

    pub fn horizontal(&self, i: usize, j: usize) -> bool {
        self.bits[self.idx(i, j, true)]
    }

    pub fn vertical(&self, i: usize, j: usize) -> bool {
        self.bits[self.idx(i, j, false)]
    }

    pub fn block(&mut self, i: usize, j: usize, horizontal: bool) {
        let k = self.idx(i, j, horizontal);
        self.bits[k] = true;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn union(&self, other: &BlockedEdges) -> BlockedEdges {
        assert_eq!(self.n, other.n);
        BlockedEdges { n: self.n, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect() }
    }

    /// Blocks every grid edge crossed by the torus geodesic from `a` to `b`.
    pub fn block_segment(&mut self, a: (f64, f64), b: (f64, f64)) {
        let n = self.n as i64;
        let h = std::f64::consts::TAU / self.n as f64;
        let u0 = (a.0 + PI) / h;
        let v0 = (a.1 + PI) / h;
        let u1 = u0 + diff(a.0, b.0) / h;
        let v1 = v0 + diff(a.1, b.1) / h;
        let wrap = |k: f64| (k as i64).rem_euclid(n) as usize;
        // crossings of the lines θ₂ = const block vertical edges
        if u0 != u1 {
            let (lo, hi) = (u0.min(u1), u0.max(u1));
            let mut k = lo.ceil();
            while k <= hi {
                let s = (k - u0) / (u1 - u0);
                let v = v0 + s * (v1 - v0);
                self.block(wrap(k), wrap(v.floor()), false);
                k += 1.0;
            }
        }
        if v0 != v1 {
            let (lo, hi) = (v0.min(v1), v0.max(v1));
            let mut k = lo.ceil();
            while k <= hi {
                let s = (k - v0) / (v1 - v0);
                let u = u0 + s * (u1 - u0);
                self.block(wrap(u.floor()), wrap(k), true);
                k += 1.0;
            }
        }
    }

    pub fn block_polyline(&mut self, pts: &[(f64, f64)], closed: bool) {
        for w in pts.windows(2) {
            self.block_segment(w[0], w[1]);
        }
        if closed && pts.len() > 2 {
            self.block_segment(pts[pts.len() - 1], pts[0]);
        }
    }
}

/// Edges with a sign change of `det J` plus edges crossed by a traced curve.
pub fn singular_blockers(grid: &DetGrid, curves: &[JointCurve]) -> BlockedEdges {
    let n = grid.n;
    let mut b = BlockedEdges::new(n);
    for j in 0..n {
        for i in 0..n {
            if crate::critical::is_crossing_edge(grid, i, j, true) {
                b.block(i, j, true);
            }
            if crate::critical::is_crossing_edge(grid, i, j, false) {
                b.block(i, j, false);
            }
        }
    }
    for c in curves {
        b.block_polyline(&c.vertices, c.closed);
    }
    b
}

/// Labels connected components of the nodes not in `excluded`; returns
/// `(labels, count)` with labels contiguous from 0 in scan order.
pub(crate) fn flood_fill(n: usize, blocked: &BlockedEdges, excluded: &[bool]) -> (Vec<i32>, usize) {
    let mut labels = vec![-2i32; n * n];
    for (k, e) in excluded.iter().enumerate() {
        if *e {
            labels[k] = -1;
        }
    }
    let mut next = 0i32;
    let mut queue = VecDeque::new();
    for start in 0..n * n {
        if labels[start] != -2 {
            continue;
        }
        labels[start] = next;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % n, k / n);
            let moves = [
                ((i + 1) % n, j, blocked.horizontal(i, j)),
                ((i + n - 1) % n, j, blocked.horizontal(i + n - 1, j)),
                (i, (j + 1) % n, blocked.vertical(i, j)),
                (i, (j + n - 1) % n, blocked.vertical(i, j + n - 1)),
            ];
            for (ni, nj, stop) in moves {
                let m = nj * n + ni;
                if !stop && labels[m] == -2 {
                    labels[m] = next;
                    queue.push_back(m);
                }
            }
        }
        next += 1;
    }
    (labels, next as usize)
}

/// Aspects: components of the torus minus the critical-point curves.
#[derive(Debug, Clone, PartialEq)]
pub struct AspectMap {
    pub n: usize,
    /// Label per grid node, row-major in θ₃; −1 on singular nodes.
    pub labels: Vec<i32>,
    pub count: usize,
    pub blocked: BlockedEdges,
}

impl AspectMap {
    pub fn label(&self, i: usize, j: usize) -> i32 {
        self.labels[(j % self.n) * self.n + (i % self.n)]
    }

    /// Nodes per label.
    pub fn sizes(&self) -> Vec<usize> {
        sizes(&self.labels, self.count)
    }
}

pub(crate) fn sizes(labels: &[i32], count: usize) -> Vec<usize> {
    let mut out = vec![0; count];
    for &l in labels {
        if l >= 0 {
            out[l as usize] += 1;
        }
    }
    out
}

pub(crate) fn singular_nodes(p: &DhParams, grid: &DetGrid) -> Vec<bool> {
    let tol = SINGULAR_NODE_TOL * p.scale();
    grid.values.iter().map(|v| v.abs() < tol).collect()
}

/// Flood fill with torus wrap; an edge is blocked when `det J` changes sign
/// across it or a traced polyline crosses it.
pub fn compute_aspects(p: &DhParams, grid: &DetGrid, curves: &[JointCurve]) -> AspectMap {
    let blocked = singular_blockers(grid, curves);
    let (labels, count) = flood_fill(grid.n, &blocked, &singular_nodes(p, grid));
    AspectMap { n: grid.n, labels, count, blocked }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(n: usize, k: f64) -> f64 {
        -PI + k * std::f64::consts::TAU / n as f64
    }

    #[test]
    fn segment_blocks_the_edges_it_crosses() {
        let n = 16;
        let mut b = BlockedEdges::new(n);
        // from the middle of cell (2, 3) to the middle of cell (4, 3)
        b.block_segment((angle(n, 2.5), angle(n, 3.5)), (angle(n, 4.5), angle(n, 3.5)));
        assert!(b.vertical(3, 3) && b.vertical(4, 3));
        assert_eq!(b.count(), 2);
    }

    #[test]
    fn segment_across_the_seam() {
        let n = 16;
        let mut b = BlockedEdges::new(n);
        b.block_segment((angle(n, 15.5), angle(n, 0.5)), (angle(n, 16.5), angle(n, 0.5)));
        assert!(b.vertical(0, 0));
        assert_eq!(b.count(), 1);
    }

    #[test]
    fn ring_splits_the_torus() {
        let n = 8;
        let mut b = BlockedEdges::new(n);
        // a closed band θ₃ = const cuts every vertical edge of one row
        for i in 0..n {
            b.block(i, 3, false);
        }
        let (_, count) = flood_fill(n, &b, &vec![false; n * n]);
        assert_eq!(count, 1, "one band does not disconnect a torus");
        for i in 0..n {
            b.block(i, 6, false);
        }
        let (labels, count) = flood_fill(n, &b, &vec![false; n * n]);
        assert_eq!(count, 2);
        assert_eq!(labels[0], labels[7 * n]);
        assert_ne!(labels[0], labels[4 * n]);
    }
}
