//! Quartic polynomials and a multiplicity-aware real root finder.
//!
//! Roots are computed as eigenvalues of the companion matrix, polished with
//! Newton's method and clustered on the Riemann sphere (chordal metric), so a
//! root at `t = ∞` (θ₃ = π under `t = tan(θ₃/2)`) is handled like any other.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Leading coefficients below this (after max-abs normalization) count as zero.
pub const DEGREE_DROP_TOL: f64 = 1e-10;

/// Merge radius (chordal distance, ≈ radians in θ₃) for a cluster of `m`
/// roots. An `m`-fold root is perturbed by O(ε^(1/m)), hence the widening.
pub fn cluster_radius(m: usize) -> f64 {
    match m {
        0 | 1 => 0.0,
        2 => 1e-5,
        3 => 1e-3,
        _ => 1e-2,
    }
}

/// `M(t) = a t⁴ + b t³ + c t² + d t + e`, highest degree first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub coeffs: [f64; 5],
}

/// A real root of a quartic with its multiplicity. `t` is infinite when the
/// root sits at θ = π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub t: f64,
    /// `2·atan(t)`, in `(-π, π]`.
    pub theta: f64,
    pub multiplicity: u8,
}

impl Quartic {
    pub fn new(coeffs: [f64; 5]) -> Self {
        Self { coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Copy scaled so the largest coefficient has magnitude 1.
    pub fn normalized(&self) -> Quartic {
        let s = self.max_abs();
        if s == 0.0 {
            return *self;
        }
        Quartic::new(self.coeffs.map(|c| c / s))
    }

    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }

    /// `k`-th derivative evaluated at `t`.
    pub fn eval_derivative(&self, k: usize, t: f64) -> f64 {
        horner(&derivative(&self.coeffs, k), t)
    }

    /// `[M, M', M'', M''', M'''']` at `t`.
    pub fn derivatives_at(&self, t: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.eval_derivative(k, t);
        }
        out
    }

    pub fn add(&self, other: &Quartic) -> Quartic {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(other.coeffs.iter()) {
            *a += b;
        }
        Quartic::new(c)
    }

    pub fn scale_by(&self, s: f64) -> Quartic {
        Quartic::new(self.coeffs.map(|c| c * s))
    }
}

pub(crate) fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * t + c)
}

fn horner_c(coeffs: &[f64], z: Complex<f64>) -> Complex<f64> {
    coeffs
        .iter()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of the `k`-th derivative (highest degree first).
pub(crate) fn derivative(coeffs: &[f64], k: usize) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..k {
        let n = c.len();
        if n <= 1 {
            return vec![0.0];
        }
        let deg = n - 1;
        c = c[..deg]
            .iter()
            .enumerate()
            .map(|(i, &v)| v * (deg - i) as f64)
            .collect();
    }
    c
}

/// Product of two polynomials (highest degree first).
pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of two polynomials of possibly different length (highest first).
pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, v) in a.iter().enumerate() {
        out[n - a.len() + i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[n - b.len() + i] += v;
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Pt {
    Finite(Complex<f64>),
    Infinite,
}

fn chordal(a: Pt, b: Pt) -> f64 {
    match (a, b) {
        (Pt::Infinite, Pt::Infinite) => 0.0,
        (Pt::Finite(z), Pt::Infinite) | (Pt::Infinite, Pt::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (Pt::Finite(z), Pt::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

fn finite_roots(c: &[f64]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    match n {
        0 => vec![],
        1 => vec![Complex::new(-c[1] / c[0], 0.0)],
        _ => {
            let mut comp = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                comp[(0, j)] = -c[j + 1] / c[0];
            }
            for i in 1..n {
                comp[(i, i - 1)] = 1.0;
            }
            // the unbounded QR iteration can stall; probe convergence first
            let eig: Vec<Complex<f64>> = match comp.clone().try_schur(f64::EPSILON, SCHUR_MAX_ITER) {
                Some(_) => comp.complex_eigenvalues().iter().copied().collect(),
                None => aberth(c),
            };
            let d1 = derivative(c, 1);
            eig.iter()
                .map(|&z0| {
                    let mut z = z0;
                    let mut fz = horner_c(c, z).norm();
                    for _ in 0..8 {
                        let dz = horner_c(&d1, z);
                        if dz.norm() == 0.0 {
                            break;
                        }
                        let cand = z - horner_c(c, z) / dz;
                        let fc = horner_c(c, cand).norm();
                        if !(fc < fz) {
                            break;
                        }
                        z = cand;
                        fz = fc;
                    }
                    if z0.im == 0.0 {
                        z.im = 0.0;
                    }
                    z
                })
                .collect()
        }
    }
}

const SCHUR_MAX_ITER: usize = 100_000;

/// Simultaneous Aberth iteration, for the rare companion matrices on which the
/// QR iteration stalls.
fn aberth(c: &[f64]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let d1 = derivative(c, 1);
    let bound = 1.0 + c[1..].iter().fold(0.0f64, |m, v| m.max((v / c[0]).abs()));
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(bound, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let ratio = horner_c(c, z[k]) / horner_c(&d1, z[k]);
            let repulsion: Complex<f64> = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Groups at most four points into the fewest clusters whose chordal
/// diameters fit [`cluster_radius`] of their size; ties go to the tighter
/// grouping. Exhaustive over set partitions, so a triple root whose pairwise
/// spread exceeds the double-root radius still forms one cluster.
fn cluster(pts: &[Pt]) -> Vec<Vec<Pt>> {
    fn walk(pts: &[Pt], k: usize, blocks: &mut Vec<Vec<usize>>, best: &mut Option<(usize, f64, Vec<Vec<usize>>)>) {
        if k == pts.len() {
            let mut score = 0.0;
            for b in blocks.iter().filter(|b| b.len() > 1) {
                let mut diam: f64 = 0.0;
                for &i in b {
                    for &j in b {
                        diam = diam.max(chordal(pts[i], pts[j]));
                    }
                }
                if diam >= cluster_radius(b.len()) {
                    return;
                }
                score += diam / cluster_radius(b.len());
            }
            if best.as_ref().is_none_or(|(n, s, _)| blocks.len() < *n || (blocks.len() == *n && score < *s)) {
                *best = Some((blocks.len(), score, blocks.clone()));
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(k);
            walk(pts, k + 1, blocks, best);
            blocks[b].pop();
        }
        blocks.push(vec![k]);
        walk(pts, k + 1, blocks, best);
        blocks.pop();
    }
    let mut best = None;
    walk(pts, 0, &mut Vec::new(), &mut best);
    let (_, _, blocks) = best.expect("singletons always qualify");
    blocks.into_iter().map(|b| b.into_iter().map(|i| pts[i]).collect()).collect()
}

/// All real roots of `m`, with multiplicities, sorted by angle.
///
/// A leading coefficient that vanishes (relative to the largest one) means a
/// root at infinity, reported with `t = ∞`, `theta = π`.
pub fn solve_quartic(m: &Quartic) -> Result<Vec<Root>> {
    let s = m.max_abs();
    if s == 0.0 || !s.is_finite() {
        return Err(Error::ZeroPolynomial);
    }
    let c: Vec<f64> = m.coeffs.iter().map(|v| v / s).collect();
    let lead_zeros = c.iter().take_while(|v| v.abs() < DEGREE_DROP_TOL).count();
    let reduced = &c[lead_zeros..];

    let mut pts: Vec<Pt> = finite_roots(reduced).into_iter().map(Pt::Finite).collect();
    pts.extend(std::iter::repeat_n(Pt::Infinite, lead_zeros));

    let clusters = cluster(&pts);

    let mut roots = Vec::new();
    for cl in clusters {
        let mult = cl.len();
        if cl.iter().any(|p| matches!(p, Pt::Infinite)) {
            roots.push(Root {
                t: f64::INFINITY,
                theta: std::f64::consts::PI,
                multiplicity: mult as u8,
            });
            continue;
        }
        let center = cl.iter().fold(Complex::new(0.0, 0.0), |acc, p| match p {
            Pt::Finite(z) => acc + z,
            Pt::Infinite => acc,
        }) / mult as f64;
        let im_chordal = 2.0 * center.im.abs() / (1.0 + center.norm_sqr());
        let real = if mult == 1 {
            im_chordal < 1e-10
        } else {
            im_chordal < cluster_radius(mult)
        };
        if !real {
            continue;
        }
        let t = polish_multiple(reduced, center.re, mult);
        roots.push(Root {
            t,
            theta: 2.0 * t.atan(),
            multiplicity: mult as u8,
        });
    }
    roots.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(roots)
}

/// Newton on the `(m-1)`-th derivative, where an `m`-fold root is simple.
fn polish_multiple(c: &[f64], t0: f64, m: usize) -> f64 {
    let g = derivative(c, m - 1);
    let dg = derivative(c, m);
    let mut t = t0;
    let mut gt = horner(&g, t).abs();
    for _ in 0..30 {
        let d = horner(&dg, t);
        if d == 0.0 {
            break;
        }
        let cand = t - horner(&g, t) / d;
        let gc = horner(&g, cand).abs();
        if !(gc < gt) {
            break;
        }
        t = cand;
        gt = gc;
    }
    let limit = cluster_radius(m.max(2)) * (1.0 + t0 * t0);
    if (t - t0).abs() > limit {
        t0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(r: &[f64]) -> Quartic {
        let mut p = vec![1.0];
        for &x in r {
            p = mul(&p, &[1.0, -x]);
        }
        let mut c = [0.0; 5];
        let off = 5 - p.len();
        c[off..].copy_from_slice(&p);
        Quartic::new(c)
    }

    #[test]
    fn aberth_fallback_finds_all_roots() {
        let q = from_roots(&[-2.0, 0.5, 1.0, 3.0]);
        let mut re: Vec<f64> = aberth(&q.coeffs).iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-2.0, 0.5, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        // complex pair t² + 1
        let z = aberth(&[1.0, 0.0, 1.0]);
        assert!(z.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
    }

    #[test]
    fn four_simple_roots() {
        let roots = solve_quartic(&from_roots(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let ts: Vec<f64> = roots.iter().map(|r| r.t).collect();
        assert_eq!(roots.len(), 4);
        for (t, e) in ts.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((t - e).abs() < 1e-12);
        }
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_with_complex_pair() {
        // (t-1)^2 (t^2+1) = t^4 - 2t^3 + 2t^2 - 2t + 1
        let roots = solve_quartic(&Quartic::new([1.0, -2.0, 2.0, -2.0, 1.0])).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn triple_and_quadruple() {
        let r = solve_quartic(&from_roots(&[0.5, 0.5, 0.5, -2.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].multiplicity, 3);
        assert!((r[1].t - 0.5).abs() < 1e-9);
        let r = solve_quartic(&from_roots(&[-0.3; 4])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 4);
    }

    #[test]
    fn degree_drop_injects_infinity() {
        // (t-1)(t-2)(t+3), leading quartic coefficient zero
        let mut q = from_roots(&[1.0, 2.0, -3.0]);
        assert_eq!(q.coeffs[0], 0.0);
        let r = solve_quartic(&q).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.last().unwrap().t.is_infinite());
        assert_eq!(r.last().unwrap().theta, std::f64::consts::PI);
        // a tiny but nonzero leading term still counts as a drop
        q.coeffs[0] = 1e-13;
        assert_eq!(solve_quartic(&q).unwrap().len(), 4);
    }

    #[test]
    fn zero_polynomial_is_error() {
        assert_eq!(solve_quartic(&Quartic::new([0.0; 5])), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn no_real_roots() {
        // (t^2+1)(t^2+4)
        assert!(solve_quartic(&Quartic::new([1.0, 0.0, 5.0, 0.0, 4.0])).unwrap().is_empty());
    }

    #[test]
    fn poly_helpers() {
        assert_eq!(derivative(&[1.0, 0.0, 0.0, 0.0, 0.0], 3), vec![24.0, 0.0]);
        assert_eq!(add(&[1.0, 2.0], &[1.0, 1.0, 1.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(mul(&[1.0, 1.0], &[1.0, -1.0]), vec![1.0, 0.0, -1.0]);
    }
}
