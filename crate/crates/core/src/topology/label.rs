//! Reduced aspects and aspect labels of IK solutions.

use std::f64::consts::{PI, TAU};

use crate::critical::DetGrid;
use crate::dh::{CrossSectionPoint, DhParams, JointConfig};
use crate::error::Result;
use crate::reduction::solve_ik_cross_section;

use super::aspects::{flood_fill, singular_nodes, sizes, AspectMap, BlockedEdges};
use super::pseudo::PseudoSingularitySet;

/// Components of the torus minus critical points and pseudosingularities.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAspectMap {
    pub n: usize,
    pub labels: Vec<i32>,
    pub count: usize,
    /// Aspect containing each reduced aspect.
    pub parent: Vec<i32>,
    pub blocked: BlockedEdges,
}

impl ReducedAspectMap {
    pub fn label(&self, i: usize, j: usize) -> i32 {
        self.labels[(j % self.n) * self.n + (i % self.n)]
    }

    pub fn sizes(&self) -> Vec<usize> {
        sizes(&self.labels, self.count)
    }

    /// Reduced aspects per aspect.
    pub fn children(&self, aspect_count: usize) -> Vec<usize> {
        let mut out = vec![0; aspect_count];
        for &a in &self.parent {
            if a >= 0 {
                out[a as usize] += 1;
            }
        }
        out
    }

    /// `true` when every reduced aspect lies inside a single aspect.
    pub fn refines(&self, aspects: &AspectMap) -> bool {
        self.labels.iter().zip(&aspects.labels).all(|(&r, &a)| r < 0 || self.parent[r as usize] == a)
    }
}

/// Flood fill blocking on the critical points and on the pseudosingularity
/// barriers.
pub fn compute_reduced_aspects(
    p: &DhParams,
    grid: &DetGrid,
    aspects: &AspectMap,
    ps: &PseudoSingularitySet,
) -> ReducedAspectMap {
    let mut extra = BlockedEdges::new(grid.n);
    for b in &ps.barriers {
        extra.block_polyline(b, false);
    }
    let blocked = aspects.blocked.union(&extra);
    let (labels, count) = flood_fill(grid.n, &blocked, &singular_nodes(p, grid));
    let min_nodes = ((MIN_REDUCED_FRACTION * (grid.n * grid.n) as f64) as usize).max(4);
    let (labels, count) = absorb_slivers(grid.n, labels, count, &aspects.blocked, min_nodes);
    let mut parent = vec![-1; count];
    for (r, a) in labels.iter().zip(&aspects.labels) {
        if *r >= 0 && parent[*r as usize] < 0 {
            parent[*r as usize] = *a;
        }
    }
    ReducedAspectMap { n: grid.n, labels, count, parent, blocked }
}

/// Components below this fraction of the grid are discretization slivers
/// left between a barrier and a critical curve running within one cell.
pub const MIN_REDUCED_FRACTION: f64 = 1e-4;

/// Merges each component smaller than `min_nodes` into the neighbour it
/// shares most edges with across a pseudosingularity-only barrier, then
/// relabels contiguously in scan order.
fn absorb_slivers(
    n: usize,
    mut labels: Vec<i32>,
    count: usize,
    singular: &BlockedEdges,
    min_nodes: usize,
) -> (Vec<i32>, usize) {
    loop {
        let size = sizes(&labels, count);
        let mut votes: Vec<std::collections::BTreeMap<i32, usize>> = vec![Default::default(); count];
        for j in 0..n {
            for i in 0..n {
                let a = labels[j * n + i];
                for (ni, nj, hz) in [((i + 1) % n, j, true), (i, (j + 1) % n, false)] {
                    let b = labels[nj * n + ni];
                    let wall = if hz { singular.horizontal(i, j) } else { singular.vertical(i, j) };
                    if a < 0 || b < 0 || a == b || wall {
                        continue;
                    }
                    if size[a as usize] < min_nodes {
                        *votes[a as usize].entry(b).or_default() += 1;
                    }
                    if size[b as usize] < min_nodes {
                        *votes[b as usize].entry(a).or_default() += 1;
                    }
                }
            }
        }
        // smallest first, each into its best-connected neighbour
        let mut target: Vec<i32> = (0..count as i32).collect();
        let mut order: Vec<usize> = (0..count).filter(|&c| size[c] < min_nodes && !votes[c].is_empty()).collect();
        order.sort_by_key(|&c| (size[c], c));
        let mut merged = false;
        for c in order {
            if target[c] != c as i32 {
                continue;
            }
            let best = votes[c].iter().max_by(|x, y| x.1.cmp(y.1).then(size[*x.0 as usize].cmp(&size[*y.0 as usize])));
            if let Some((&b, _)) = best {
                if target[b as usize] == b {
                    target[c] = b;
                    merged = true;
                }
            }
        }
        if !merged {
            break;
        }
        for l in labels.iter_mut() {
            if *l >= 0 {
                *l = target[*l as usize];
            }
        }
    }
    // contiguous relabel
    let mut map = vec![-1i32; count];
    let mut next = 0;
    for l in labels.iter_mut() {
        if *l >= 0 {
            if map[*l as usize] < 0 {
                map[*l as usize] = next;
                next += 1;
            }
            *l = map[*l as usize];
        }
    }
    (labels, next as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionLabel {
    pub config: JointConfig,
    pub multiplicity: u8,
    pub aspect: i32,
    pub reduced: i32,
    /// Within a grid cell of the critical points, or a multiple root.
    pub near_singular: bool,
    /// Within a grid cell of the critical points or the pseudosingularities.
    pub on_boundary: bool,
}

pub(crate) fn cell_of(n: usize, theta: (f64, f64)) -> (usize, usize) {
    let h = TAU / n as f64;
    let idx = |a: f64| ((crate::angle::normalize(a) + PI) / h).floor() as usize % n;
    (idx(theta.0), idx(theta.1))
}

/// Blocked edges or singular nodes in the 3×3 block of cells around the
/// cell containing `theta`.
fn near_blocked(n: usize, blocked: &BlockedEdges, labels: &[i32], theta: (f64, f64)) -> bool {
    let (i0, j0) = cell_of(n, theta);
    for dj in 0..3 {
        for di in 0..3 {
            let (i, j) = ((i0 + n + di - 1) % n, (j0 + n + dj - 1) % n);
            if blocked.horizontal(i, j)
                || blocked.horizontal(i, j + 1)
                || blocked.vertical(i, j)
                || blocked.vertical(i + 1, j)
                || labels[j * n + i] < 0
            {
                return true;
            }
        }
    }
    false
}

pub(crate) fn nearest_node(n: usize, theta: (f64, f64)) -> (usize, usize) {
    let h = TAU / n as f64;
    let idx = |a: f64| ((crate::angle::normalize(a) + PI) / h).round() as usize % n;
    (idx(theta.0), idx(theta.1))
}

/// Labels one joint configuration.
pub fn label_config(aspects: &AspectMap, reduced: &ReducedAspectMap, q: (f64, f64)) -> (i32, i32, bool, bool) {
    let n = aspects.n;
    let (i, j) = nearest_node(n, q);
    (
        aspects.label(i, j),
        reduced.label(i, j),
        near_blocked(n, &aspects.blocked, &aspects.labels, q),
        near_blocked(n, &reduced.blocked, &reduced.labels, q),
    )
}

/// Solves the IK of `target` and attaches aspect and reduced-aspect labels.
pub fn label_solutions(
    p: &DhParams,
    aspects: &AspectMap,
    reduced: &ReducedAspectMap,
    target: &CrossSectionPoint,
) -> Result<Vec<SolutionLabel>> {
    let set = solve_ik_cross_section(p, target)?;
    Ok(set
        .solutions
        .iter()
        .map(|s| {
            let (aspect, red, near_s, near_any) = label_config(aspects, reduced, s.config.reduced());
            SolutionLabel {
                config: s.config,
                multiplicity: s.multiplicity,
                aspect,
                reduced: red,
                near_singular: near_s || s.multiplicity > 1,
                on_boundary: near_any || near_s || s.multiplicity > 1,
            }
        })
        .collect())
}
