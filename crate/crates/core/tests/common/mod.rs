//! Shared robots and independent oracles. Nothing here calls the kinematics
//! of the crate under test.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI, TAU};

use cusp3r_core::DhParams;
use rand::Rng;

pub fn reference() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2])
}

pub fn node_robot() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [4.0, 2.0, 6.0], [-FRAC_PI_2, FRAC_PI_2])
}

pub fn oblique_cuspidal() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.0], [-FRAC_PI_6, FRAC_PI_2])
}

pub fn oblique_noncuspidal() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 0.2, 2.0], [-FRAC_PI_3, 1.745])
}

pub fn waypoint_robot() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.0], [FRAC_PI_6, FRAC_PI_2])
}

pub fn hyperbola_robot() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [FRAC_PI_2, FRAC_PI_6])
}

pub fn parabola_robot() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [FRAC_PI_3, FRAC_PI_2])
}

pub fn ellipse_robot() -> DhParams {
    DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [FRAC_PI_6, FRAC_PI_2])
}

/// The six robots analysed as generic, with their expected verdict.
pub fn battery() -> Vec<(&'static str, DhParams, bool)> {
    vec![
        ("reference", reference(), true),
        ("node", node_robot(), false),
        ("oblique_cuspidal", oblique_cuspidal(), true),
        ("oblique_noncuspidal", oblique_noncuspidal(), false),
        ("waypoints", waypoint_robot(), true),
        ("hyperbola", hyperbola_robot(), true),
    ]
}

/// A valid robot with link lengths and offsets of order one.
pub fn random_robot(rng: &mut impl Rng) -> DhParams {
    let signed = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| {
        let m = rng.random_range(lo..hi);
        if rng.random_bool(0.5) { m } else { -m }
    };
    let alpha1 = loop {
        let a = rng.random_range(-PI..PI);
        if a.sin().abs() > 0.1 {
            break a;
        }
    };
    DhParams::new(
        [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
        [signed(rng, 0.2, 3.0), rng.random_range(-3.0..3.0), signed(rng, 0.2, 3.0)],
        [alpha1, rng.random_range(-PI..PI)],
    )
}

type M4 = [[f64; 4]; 4];

fn mat_mul(a: &M4, b: &M4) -> M4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn rot_z(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
}

fn rot_x(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [[1.0, 0.0, 0.0, 0.0], [0.0, c, -s, 0.0], [0.0, s, c, 0.0], [0.0, 0.0, 0.0, 1.0]]
}

fn trans(x: f64, z: f64) -> M4 {
    [[1.0, 0.0, 0.0, x], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, z], [0.0, 0.0, 0.0, 1.0]]
}

/// Classical D-H chain built from elementary motions:
/// `RotZ(θ)·TransZ(d)·TransX(a)·RotX(α)` per joint.
pub fn oracle_fk(p: &DhParams, q: [f64; 3]) -> [f64; 3] {
    let links = [(p.d1, p.a1, p.alpha1), (p.d2, p.a2, p.alpha2), (p.d3, p.a3, 0.0)];
    let mut t = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    for (k, (d, a, alpha)) in links.iter().enumerate() {
        t = mat_mul(&t, &rot_z(q[k]));
        t = mat_mul(&t, &trans(0.0, *d));
        t = mat_mul(&t, &trans(*a, 0.0));
        t = mat_mul(&t, &rot_x(*alpha));
    }
    [t[0][3], t[1][3], t[2][3]]
}

pub fn oracle_rho_z(p: &DhParams, theta2: f64, theta3: f64) -> (f64, f64) {
    let e = oracle_fk(p, [0.0, theta2, theta3]);
    (e[0].hypot(e[1]), e[2])
}

/// Central finite-difference Jacobian of [`oracle_fk`].
pub fn oracle_jacobian(p: &DhParams, q: [f64; 3]) -> [[f64; 3]; 3] {
    const H: f64 = 1e-6;
    let mut j = [[0.0; 3]; 3];
    for c in 0..3 {
        let (mut qp, mut qm) = (q, q);
        qp[c] += H;
        qm[c] -= H;
        let (ep, em) = (oracle_fk(p, qp), oracle_fk(p, qm));
        for r in 0..3 {
            j[r][c] = (ep[r] - em[r]) / (2.0 * H);
        }
    }
    j
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Angle difference wrapped to `[0, π]`.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn torus_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    angle_gap(a.0, b.0).hypot(angle_gap(a.1, b.1))
}

/// Distance from `q` to a closed polyline in the plane.
pub fn polyline_distance(pts: &[(f64, f64)], q: (f64, f64)) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let (dx, dz) = (b.0 - a.0, b.1 - a.1);
            let len2 = dx * dx + dz * dz;
            let t = if len2 == 0.0 { 0.0 } else { (((q.0 - a.0) * dx + (q.1 - a.1) * dz) / len2).clamp(0.0, 1.0) };
            (a.0 + t * dx - q.0).hypot(a.1 + t * dz - q.1)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force count of proper crossings among all segment pairs of closed
/// polylines, skipping segments that share an endpoint.
pub fn brute_force_crossings(curves: &[Vec<(f64, f64)>]) -> Vec<(f64, f64)> {
    let segs: Vec<((f64, f64), (f64, f64), usize, usize)> = curves
        .iter()
        .enumerate()
        .flat_map(|(c, pts)| {
            let n = pts.len();
            (0..n).map(move |i| (pts[i], pts[(i + 1) % n], c, i))
        })
        .collect();
    let mut out = Vec::new();
    for x in 0..segs.len() {
        for y in x + 1..segs.len() {
            let (a0, a1, ca, ia) = segs[x];
            let (b0, b1, cb, ib) = segs[y];
            if ca == cb {
                let n = curves[ca].len();
                if ia.abs_diff(ib) <= 1 || ia.abs_diff(ib) == n - 1 {
                    continue;
                }
            }
            let (dax, daz) = (a1.0 - a0.0, a1.1 - a0.1);
            let (dbx, dbz) = (b1.0 - b0.0, b1.1 - b0.1);
            let den = dax * dbz - daz * dbx;
            if den == 0.0 {
                continue;
            }
            let (ex, ez) = (b0.0 - a0.0, b0.1 - a0.1);
            let u = (ex * dbz - ez * dbx) / den;
            let v = (ex * daz - ez * dax) / den;
            if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
                out.push((a0.0 + u * dax, a0.1 + u * daz));
            }
        }
    }
    out
}
