mod common;

use std::f64::consts::TAU;

use common::*;
use cusp3r_core::critical::{
    critical_values, find_cusps, find_nodes, genericity_check, region_census, trace_critical_points, GenericityEvidence,
    WorkspaceCurve,
};
use cusp3r_core::reduction::solve_ik_cross_section;
use cusp3r_core::{CrossSectionPoint, DhParams};

const N: usize = 720;

fn workspace(p: &DhParams) -> Vec<WorkspaceCurve> {
    critical_values(p, &trace_critical_points(p, N).unwrap())
}

fn near(ws: &[WorkspaceCurve], target: (f64, f64)) -> f64 {
    ws.iter()
        .flat_map(|c| c.points.iter())
        .map(|q| (q.rho - target.0).hypot(q.z - target.1))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn traced_vertices_are_singular() {
    for (name, p, _) in battery() {
        let curves = trace_critical_points(&p, N).unwrap();
        assert!(!curves.is_empty(), "{name}");
        for c in &curves {
            for &(t2, t3) in &c.vertices {
                // independent determinant from the finite-difference Jacobian
                let d = det3(&oracle_jacobian(&p, [0.0, t2, t3]));
                assert!(d.abs() < 1e-6 * p.scale(), "{name}: det {d} at ({t2}, {t3})");
            }
        }
    }
}

#[test]
fn tracing_converges_under_grid_doubling() {
    let p = reference();
    let coarse = trace_critical_points(&p, N / 2).unwrap();
    let fine = trace_critical_points(&p, N).unwrap();
    let verts = |cs: &[cusp3r_core::critical::JointCurve]| -> Vec<(f64, f64)> {
        cs.iter().flat_map(|c| c.vertices.iter().copied()).collect()
    };
    let (a, b) = (verts(&coarse), verts(&fine));
    let directed = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter().map(|p| y.iter().map(|q| torus_gap(*p, *q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    let hausdorff = directed(&a, &b).max(directed(&b, &a));
    assert!(hausdorff < TAU / (N / 2) as f64, "hausdorff {hausdorff}");
}

#[test]
fn critical_values_pass_the_figure_points() {
    let ws = workspace(&reference());
    assert!(near(&ws, (2.913, 0.1)) < 0.05);
    for c in &ws {
        assert!(c.points.iter().all(|q| q.rho >= 0.0));
    }
    let ws = workspace(&node_robot());
    assert!(near(&ws, (2.84, 3.79)) < 0.05);
}

#[test]
fn reference_robot_has_four_cusps() {
    let p = reference();
    let cusps = find_cusps(&p, &workspace(&p)).unwrap();
    assert_eq!(cusps.len(), 4);
    let best = cusps.iter().map(|c| c.point.dist(&CrossSectionPoint::new(2.48, 1.96))).fold(f64::INFINITY, f64::min);
    assert!(best < 0.05, "closest cusp {best}");
    for c in &cusps {
        // a triple root: three of the four IK solutions coincide
        let set = solve_ik_cross_section(&p, &c.point).unwrap();
        assert!(set.solutions.iter().any(|s| s.multiplicity == 3), "{:?}", c.point);
    }
}

#[test]
fn cusp_counts_over_the_battery() {
    for (name, p, cuspidal) in battery() {
        let n = find_cusps(&p, &workspace(&p)).unwrap().len();
        assert_eq!(n > 0, cuspidal, "{name}: {n} cusps");
    }
    assert_eq!(find_cusps(&oblique_noncuspidal(), &workspace(&oblique_noncuspidal())).unwrap().len(), 0);
}

#[test]
fn node_robot_node_has_two_double_solutions() {
    let p = node_robot();
    let nodes = find_nodes(&p, &workspace(&p)).unwrap();
    let node = nodes
        .iter()
        .min_by(|a, b| {
            let t = CrossSectionPoint::new(2.84, 3.79);
            a.point.dist(&t).total_cmp(&b.point.dist(&t))
        })
        .expect("nodes");
    assert!(node.point.dist(&CrossSectionPoint::new(2.84, 3.79)) < 0.05);
    let set = solve_ik_cross_section(&p, &node.point).unwrap();
    let mut m: Vec<u8> = set.solutions.iter().map(|s| s.multiplicity).collect();
    m.sort();
    assert_eq!(m, vec![2, 2]);
}

#[test]
fn nodes_agree_with_brute_force_crossings() {
    for p in [reference(), node_robot(), oblique_cuspidal()] {
        let ws = workspace(&p);
        let cusps = find_cusps(&p, &ws).unwrap();
        let nodes = find_nodes(&p, &ws).unwrap();
        let live: Vec<Vec<(f64, f64)>> = ws
            .iter()
            .filter(|c| !c.is_collapsed(&p))
            .map(|c| c.points.iter().map(|q| (q.rho, q.z)).collect())
            .collect();
        let hits = brute_force_crossings(&live);
        let tol = 0.05;
        for n in &nodes {
            let d = hits.iter().map(|h| (h.0 - n.point.rho).hypot(h.1 - n.point.z)).fold(f64::INFINITY, f64::min);
            assert!(d < tol, "node {:?} has no crossing nearby", n.point);
        }
        for h in &hits {
            // crossings near a cusp are the polyline cutting its own tip
            let dn = nodes.iter().map(|n| (h.0 - n.point.rho).hypot(h.1 - n.point.z)).fold(f64::INFINITY, f64::min);
            let dc = cusps.iter().map(|c| (h.0 - c.point.rho).hypot(h.1 - c.point.z)).fold(f64::INFINITY, f64::min);
            assert!(dn.min(dc) < tol, "unexplained crossing {h:?}");
        }
    }
}

#[test]
fn genericity_of_the_battery() {
    for (name, p, _) in battery() {
        let g = genericity_check(&p, N).unwrap();
        assert!(g.is_generic, "{name}: {:?}", g.evidence);
    }
    let g = genericity_check(&parabola_robot(), N).unwrap();
    assert!(!g.is_generic);
    assert!(g.evidence.iter().any(|e| matches!(e, GenericityEvidence::QuadrupleRoot { .. })));
    let axes = DhParams::new([0.0, 0.0, 0.0], [1.0, 2.0, 1.5], [-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2]);
    let g = genericity_check(&axes, N).unwrap();
    assert!(!g.is_generic && !g.evidence.is_empty());
}

#[test]
fn census_changes_by_two_across_curves() {
    for p in [reference(), node_robot()] {
        let ws = workspace(&p);
        let cusps = find_cusps(&p, &ws).unwrap();
        let nodes = find_nodes(&p, &ws).unwrap();
        let census = region_census(&p, 160, &ws, &cusps, &nodes).unwrap();
        let a = &census.audit;
        assert!(a.pairs_checked > 0);
        assert!(a.passed(), "pairs {:?} boundary {}", a.pair_failures, a.boundary_failures);
        assert!(a.boundary.iter().any(|b| b.count % 2 == 1), "no boundary sample with an intermediate count");
        assert!(census.counts.iter().all(|c| c % 2 == 0 && *c <= 4));
    }
}

#[test]
fn census_counts_match_direct_ik() {
    let p = reference();
    let ws = workspace(&p);
    let census = region_census(&p, 160, &ws, &[], &[]).unwrap();
    for (ix, iz) in [(10, 10), (40, 80), (80, 80), (120, 60), (150, 150)] {
        let c = census.center(ix, iz);
        assert_eq!(census.count(ix, iz) as usize, solve_ik_cross_section(&p, &c).unwrap().count());
    }
}
