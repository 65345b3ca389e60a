//! Reduction of the positional inverse kinematics to a conic in the
//! `(c₃, s₃) = (cos θ₃, sin θ₃)` plane and to the quartic `M(t)`,
//! `t = tan(θ₃/2)`.
//!
//! With `q = (qx, qy, qz)` the end-effector in frame 2 before the θ₂
//! rotation, the workspace radius `R = ρ² + (z - d₁)²` and height obey
//!
//! ```text
//! R      = 2a₁(F₁ c₂ + F₂ s₂) + F₃
//! z - d₁ = sin α₁ (F₁ s₂ - F₂ c₂) + F₄
//! ```
//!
//! with `F₁ = qx`, `F₂ = -qy`, `F₃ = |q|² + a₁²`, `F₄ = cos α₁ qz`, each affine
//! in `(c₃, s₃)`. Eliminating θ₂ gives the conic
//!
//! ```text
//! sin²α₁ (R - F₃)² + 4a₁² (z - d₁ - F₄)² - 4a₁² sin²α₁ (F₁² + F₂²) = 0
//! ```
//!
//! which is the textbook `((R-F₃)/2a₁)² + ((z-d₁-F₄)/sin α₁)² = F₁² + F₂²`
//! multiplied through by `4a₁² sin²α₁ > 0`. Signs of the individual
//! coefficients therefore follow this derivation, not any particular
//! published table; the residual tests pin it down.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};

use crate::angle::normalize;
use crate::dh::{cross_section_at, forward_kinematics, CrossSectionPoint, DhParams, JointConfig, Pose3};
use crate::error::{Error, Result};
use crate::poly::{solve_quartic, Quartic, Root};

/// `u·c₃ + v·s₃ + w`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Affine {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Affine {
    pub fn eval(&self, c3: f64, s3: f64) -> f64 {
        self.u * c3 + self.v * s3 + self.w
    }

    /// The same function of the angle `θ₃ = φ + ψ` written in `(cos ψ, sin ψ)`.
    fn rotated(&self, phi: f64) -> Affine {
        let (sp, cp) = phi.sin_cos();
        Affine {
            u: self.u * cp + self.v * sp,
            v: -self.u * sp + self.v * cp,
            w: self.w,
        }
    }

    /// `(1 + t²)·F` as a quadratic in `t` under `c = (1-t²)/(1+t²)`,
    /// `s = 2t/(1+t²)`.
    fn half_angle(&self) -> [f64; 3] {
        [self.w - self.u, 2.0 * self.v, self.w + self.u]
    }
}

/// The four θ₃-dependent functions of the reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FCoefficients {
    pub f: [Affine; 4],
}

impl FCoefficients {
    pub fn eval(&self, theta3: f64) -> [f64; 4] {
        let (s3, c3) = theta3.sin_cos();
        self.f.map(|a| a.eval(c3, s3))
    }
}

/// Coefficients of `Axx c² + 2Axy cs + Ayy s² + 2Bx c + 2By s + C = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicCoeffs {
    pub axx: f64,
    pub axy: f64,
    pub ayy: f64,
    pub bx: f64,
    pub by: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicClass {
    pub kind: ConicKind,
    /// `det D = Axx·Ayy - Axy²` of the raw (unnormalized) quadratic part.
    pub det: f64,
    /// Unit eigenvectors of `D`, ordered by ascending eigenvalue, each with a
    /// nonnegative leading component.
    pub axes: [[f64; 2]; 2],
    pub eigenvalues: [f64; 2],
}

impl ConicCoeffs {
    fn zero() -> Self {
        Self { axx: 0.0, axy: 0.0, ayy: 0.0, bx: 0.0, by: 0.0, c: 0.0 }
    }

    /// Adds `k·F²`.
    fn add_square(&mut self, k: f64, f: Affine) {
        self.axx += k * f.u * f.u;
        self.axy += k * f.u * f.v;
        self.ayy += k * f.v * f.v;
        self.bx += k * f.u * f.w;
        self.by += k * f.v * f.w;
        self.c += k * f.w * f.w;
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.axx, self.axy, self.ayy, self.bx, self.by, self.c]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn normalized(&self) -> ConicCoeffs {
        let s = self.max_abs();
        if s == 0.0 {
            return *self;
        }
        ConicCoeffs {
            axx: self.axx / s,
            axy: self.axy / s,
            ayy: self.ayy / s,
            bx: self.bx / s,
            by: self.by / s,
            c: self.c / s,
        }
    }

    pub fn eval(&self, c3: f64, s3: f64) -> f64 {
        self.axx * c3 * c3
            + 2.0 * self.axy * c3 * s3
            + self.ayy * s3 * s3
            + 2.0 * self.bx * c3
            + 2.0 * self.by * s3
            + self.c
    }

    pub fn form_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.axx, self.axy, self.axy, self.ayy)
    }

    /// The conic expressed in coordinates rotated by `phi`, i.e. in
    /// `(cos ψ, sin ψ)` with `θ₃ = φ + ψ`.
    pub fn rotated(&self, phi: f64) -> ConicCoeffs {
        let (sp, cp) = phi.sin_cos();
        let rot = Matrix2::new(cp, -sp, sp, cp);
        let d = rot.transpose() * self.form_matrix() * rot;
        let b = rot.transpose() * Vector2::new(self.bx, self.by);
        ConicCoeffs {
            axx: d[(0, 0)],
            axy: d[(0, 1)],
            ayy: d[(1, 1)],
            bx: b[0],
            by: b[1],
            c: self.c,
        }
    }
}

/// F-coefficients obtained by composing `TransZ(d₂)·TransX(a₂)·RotX(α₂)` onto
/// the frame-3 origin seen from frame 2, `(a₃c₃, a₃s₃, d₃)`.
pub fn f_coefficients(p: &DhParams) -> Result<FCoefficients> {
    if p.a1 == 0.0 || p.alpha1.sin() == 0.0 {
        return Err(Error::EliminationUnsupported("a1 = 0 or sin(alpha1) = 0".into()));
    }
    let (sa2, ca2) = p.alpha2.sin_cos();
    let (ca1, a3) = (p.alpha1.cos(), p.a3);
    let qx = Affine { u: a3, v: 0.0, w: p.a2 };
    let qy = Affine { u: 0.0, v: ca2 * a3, w: -sa2 * p.d3 };
    let qz = Affine { u: 0.0, v: sa2 * a3, w: p.d2 + ca2 * p.d3 };

    // |q|² reduced modulo c² + s² = 1. The (u, v) columns of q are a3 times an
    // orthonormal pair, so Σu² = Σv² and Σuv = 0 and the reduction is affine.
    let comps = [qx, qy, qz];
    let suu: f64 = comps.iter().map(|a| a.u * a.u).sum();
    let svv: f64 = comps.iter().map(|a| a.v * a.v).sum();
    let suw: f64 = comps.iter().map(|a| a.u * a.w).sum();
    let svw: f64 = comps.iter().map(|a| a.v * a.w).sum();
    let sww: f64 = comps.iter().map(|a| a.w * a.w).sum();
    let f3 = Affine {
        u: 2.0 * suw,
        v: 2.0 * svw,
        w: 0.5 * (suu + svv) + sww + p.a1 * p.a1,
    };
    Ok(FCoefficients {
        f: [
            qx,
            Affine { u: -qy.u, v: -qy.v, w: -qy.w },
            f3,
            Affine { u: ca1 * qz.u, v: ca1 * qz.v, w: ca1 * qz.w },
        ],
    })
}

/// Unnormalized conic for `R = ρ² + (z-d₁)²` and local height `z - d₁`.
pub fn conic_raw(p: &DhParams, f: &FCoefficients, big_r: f64, z_local: f64) -> ConicCoeffs {
    let sa1 = p.alpha1.sin();
    let [f1, f2, f3, f4] = f.f;
    let mut conic = ConicCoeffs::zero();
    conic.add_square(sa1 * sa1, Affine { u: -f3.u, v: -f3.v, w: big_r - f3.w });
    conic.add_square(4.0 * p.a1 * p.a1, Affine { u: -f4.u, v: -f4.v, w: z_local - f4.w });
    let k = -4.0 * p.a1 * p.a1 * sa1 * sa1;
    conic.add_square(k, f1);
    conic.add_square(k, f2);
    conic
}

/// `(R, z - d₁)` of a cross-section point.
pub fn local_rz(p: &DhParams, target: &CrossSectionPoint) -> (f64, f64) {
    let zl = target.z - p.d1;
    (target.rho * target.rho + zl * zl, zl)
}

/// Conic of the target normalized to unit max-abs coefficient.
pub fn conic_coefficients(p: &DhParams, target: &CrossSectionPoint) -> Result<ConicCoeffs> {
    let f = f_coefficients(p)?;
    let (r, zl) = local_rz(p, target);
    Ok(conic_raw(p, &f, r, zl).normalized())
}

/// Conic type from the sign of `det D`, with a relative dead-band
/// `|det D| < 1e-9·‖D‖²_F` for parabolas.
pub fn conic_classify(p: &DhParams) -> Result<ConicClass> {
    let f = f_coefficients(p)?;
    let raw = conic_raw(p, &f, 0.0, 0.0);
    let d = raw.form_matrix();
    let fro2 = d.norm_squared();
    if fro2.sqrt() <= 1e-12 * p.length_scale().powi(4) {
        return Err(Error::DegenerateConic);
    }
    let det = d.determinant();
    let kind = if det.abs() < 1e-9 * fro2 {
        ConicKind::Parabola
    } else if det > 0.0 {
        ConicKind::Ellipse
    } else {
        ConicKind::Hyperbola
    };
    let eig = SymmetricEigen::new(d);
    let mut pairs: Vec<(f64, [f64; 2])> = (0..2)
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            let mut e = [v[0], v[1]];
            let lead = if e[0].abs() > 1e-12 { e[0] } else { e[1] };
            if lead < 0.0 {
                e = [-e[0], -e[1]];
            }
            (eig.eigenvalues[i], e)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ConicClass {
        kind,
        det,
        axes: [pairs[0].1, pairs[1].1],
        eigenvalues: [pairs[0].0, pairs[1].0],
    })
}

/// Tangent half-angle substitution, with `(1 + t²)²` cleared.
pub fn quartic_from_conic(c: &ConicCoeffs) -> Quartic {
    Quartic::new([
        c.axx - 2.0 * c.bx + c.c,
        4.0 * (c.by - c.axy),
        -2.0 * c.axx + 4.0 * c.ayy + 2.0 * c.c,
        4.0 * (c.axy + c.by),
        c.axx + 2.0 * c.bx + c.c,
    ])
}

/// The quartic of a workspace point in a chart centred at `phi`:
/// `t = tan((θ₃ - φ)/2)`. Built directly as polynomials in `(t, R, z)` so the
/// partial derivatives in `R` and `z` are available to Newton solvers.
#[derive(Debug, Clone)]
pub struct QuarticFamily {
    sa1_sq: f64,
    four_a1_sq: f64,
    p: [[f64; 3]; 4],
    pub phi: f64,
}

impl QuarticFamily {
    pub fn new(params: &DhParams, f: &FCoefficients, phi: f64) -> Self {
        let sa1 = params.alpha1.sin();
        Self {
            sa1_sq: sa1 * sa1,
            four_a1_sq: 4.0 * params.a1 * params.a1,
            p: f.f.map(|a| a.rotated(phi).half_angle()),
            phi,
        }
    }

    /// `(M, ∂M/∂R, ∂M/∂z)` as quartics in `t` at `(R, z_local)`.
    pub fn at(&self, big_r: f64, z_local: f64) -> (Quartic, Quartic, Quartic) {
        use crate::poly::{add, mul};
        let one_t2 = [1.0, 0.0, 1.0];
        let scaled = |k: f64, q: &[f64]| q.iter().map(|v| v * k).collect::<Vec<f64>>();
        let r_term = add(&scaled(big_r, &one_t2), &scaled(-1.0, &self.p[2]));
        let z_term = add(&scaled(z_local, &one_t2), &scaled(-1.0, &self.p[3]));
        let m = add(
            &add(&scaled(self.sa1_sq, &mul(&r_term, &r_term)), &scaled(self.four_a1_sq, &mul(&z_term, &z_term))),
            &scaled(
                -self.four_a1_sq * self.sa1_sq,
                &add(&mul(&self.p[0], &self.p[0]), &mul(&self.p[1], &self.p[1])),
            ),
        );
        let dr = scaled(2.0 * self.sa1_sq, &mul(&one_t2, &r_term));
        let dz = scaled(2.0 * self.four_a1_sq, &mul(&one_t2, &z_term));
        let to_q = |v: Vec<f64>| {
            let mut c = [0.0; 5];
            let off = 5 - v.len();
            c[off..].copy_from_slice(&v);
            Quartic::new(c)
        };
        (to_q(m), to_q(dr), to_q(dz))
    }

    /// θ₃ of a chart parameter.
    pub fn theta(&self, t: f64) -> f64 {
        normalize(self.phi + 2.0 * t.atan())
    }

    /// Chart parameter of an angle.
    pub fn t_of(&self, theta3: f64) -> f64 {
        (0.5 * normalize(theta3 - self.phi)).tan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSolution {
    pub config: JointConfig,
    pub multiplicity: u8,
    /// `‖FK(config) - target‖`.
    pub residual: f64,
}

/// A root whose θ₂ could not be recovered because `F₁² + F₂²` vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlaggedRoot {
    pub theta3: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IkSolutionSet {
    /// Sorted by θ₃.
    pub solutions: Vec<IkSolution>,
    pub flagged: Vec<FlaggedRoot>,
}

impl IkSolutionSet {
    /// Number of real solutions counted with multiplicity.
    pub fn count(&self) -> usize {
        self.solutions.iter().map(|s| s.multiplicity as usize).sum::<usize>()
            + self.flagged.iter().map(|s| s.multiplicity as usize).sum::<usize>()
    }

    /// Number of geometrically distinct solutions.
    pub fn distinct(&self) -> usize {
        self.solutions.len() + self.flagged.len()
    }
}

/// Roots of the target's quartic in the standard chart.
pub fn ik_roots(p: &DhParams, f: &FCoefficients, target: &CrossSectionPoint) -> Result<Vec<Root>> {
    let (r, zl) = local_rz(p, target);
    let conic = conic_raw(p, f, r, zl).normalized();
    let m = quartic_from_conic(&conic);
    if m.max_abs() < 1e-12 {
        return Err(Error::ZeroPolynomial);
    }
    solve_quartic(&m)
}

/// Recovers θ₂ at a given θ₃ from the two linear equations in `(c₂, s₂)`.
pub fn back_substitute(
    p: &DhParams,
    f: &FCoefficients,
    big_r: f64,
    z_local: f64,
    theta3: f64,
) -> Option<f64> {
    let [f1, f2, f3, f4] = f.eval(theta3);
    let den = f1 * f1 + f2 * f2;
    if den < 1e-12 * p.length_scale().powi(2) {
        return None;
    }
    let x = (big_r - f3) / (2.0 * p.a1);
    let y = (z_local - f4) / p.alpha1.sin();
    let c2 = (f1 * x - f2 * y) / den;
    let s2 = (f2 * x + f1 * y) / den;
    Some(s2.atan2(c2))
}

/// IK in the `(θ₂, θ₃)` reduction; θ₁ is left at zero.
pub fn solve_ik_cross_section(p: &DhParams, target: &CrossSectionPoint) -> Result<IkSolutionSet> {
    let f = f_coefficients(p)?;
    solve_ik_with(p, &f, target, None)
}

/// Full inverse kinematics of a Cartesian target.
pub fn solve_ik(p: &DhParams, target: &Pose3) -> Result<IkSolutionSet> {
    let f = f_coefficients(p)?;
    let cs = crate::dh::cross_section(target);
    solve_ik_with(p, &f, &cs, Some(target))
}

pub(crate) fn solve_ik_with(
    p: &DhParams,
    f: &FCoefficients,
    cs: &CrossSectionPoint,
    target: Option<&Pose3>,
) -> Result<IkSolutionSet> {
    let (r, zl) = local_rz(p, cs);
    let roots = ik_roots(p, f, cs)?;
    let mut out = IkSolutionSet::default();
    for root in roots {
        let theta3 = normalize(root.theta);
        let Some(theta2) = back_substitute(p, f, r, zl, theta3) else {
            out.flagged.push(FlaggedRoot { theta3, multiplicity: root.multiplicity });
            continue;
        };
        let theta1 = match target {
            Some(t) if t.x.hypot(t.y) > 1e-14 * p.length_scale() => {
                let e0 = forward_kinematics(p, &JointConfig::new(0.0, theta2, theta3));
                t.y.atan2(t.x) - e0.y.atan2(e0.x)
            }
            _ => 0.0,
        };
        let config = JointConfig::new(theta1, theta2, theta3);
        let residual = match target {
            Some(t) => forward_kinematics(p, &config).dist(t),
            None => cross_section_at(p, theta2, theta3).dist(cs),
        };
        out.solutions.push(IkSolution { config, multiplicity: root.multiplicity, residual });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dh::cross_section;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

    fn robot(a: [f64; 3], alpha: [f64; 2]) -> DhParams {
        DhParams::new([0.0, 1.0, 0.0], a, alpha)
    }

    #[test]
    fn f1_is_linear_in_c3() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let f = f_coefficients(&p).unwrap();
        assert_eq!(f.f[0], Affine { u: 1.5, v: 0.0, w: 2.0 });
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, 0.0]);
        let f = f_coefficients(&p).unwrap();
        assert_eq!((f.f[3].u, f.f[3].v), (0.0, 0.0));
    }

    #[test]
    fn fig2_taxonomy() {
        let h = conic_classify(&robot([1.0, 2.0, 1.5], [FRAC_PI_2, FRAC_PI_6])).unwrap();
        assert_eq!(h.kind, ConicKind::Hyperbola);
        let pb = conic_classify(&robot([1.0, 2.0, 1.5], [FRAC_PI_3, FRAC_PI_2])).unwrap();
        assert_eq!(pb.kind, ConicKind::Parabola);
        let e = conic_classify(&robot([1.0, 2.0, 1.5], [FRAC_PI_6, FRAC_PI_2])).unwrap();
        assert_eq!(e.kind, ConicKind::Ellipse);
    }

    #[test]
    fn hyperbola_robot_has_four_intersections() {
        let p = robot([1.0, 2.0, 1.5], [FRAC_PI_2, FRAC_PI_6]);
        let s = solve_ik_cross_section(&p, &CrossSectionPoint::new(2.46, 0.15)).unwrap();
        assert_eq!(s.count(), 4);
        assert_eq!(s.distinct(), 4);
    }

    #[test]
    fn quadratic_part_independent_of_target() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let f = f_coefficients(&p).unwrap();
        let a = conic_raw(&p, &f, 3.0, 0.2);
        let b = conic_raw(&p, &f, 9.0, -1.7);
        assert_eq!((a.axx, a.axy, a.ayy), (b.axx, b.axy, b.ayy));
    }

    #[test]
    fn leading_coefficient_is_conic_at_theta_pi() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let c = conic_coefficients(&p, &CrossSectionPoint::new(2.0, 0.5)).unwrap();
        let m = quartic_from_conic(&c);
        assert!((m.coeffs[0] - c.eval(-1.0, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn theta3_pi_solution_survives_degree_drop() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let q = JointConfig::new(0.0, 0.7, PI);
        let target = forward_kinematics(&p, &q);
        let s = solve_ik(&p, &target).unwrap();
        assert!(s.solutions.iter().any(|x| x.config.max_angle_dist(&q) < 1e-8));
    }

    #[test]
    fn unreachable_target() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let s = solve_ik(&p, &Pose3::new(10.0, 0.0, 3.0)).unwrap();
        assert_eq!(s.count(), 0);
    }

    #[test]
    fn rotated_conic_matches_on_circle() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let c = conic_coefficients(&p, &CrossSectionPoint::new(2.2, 0.9)).unwrap();
        let phi = 0.83;
        let r = c.rotated(phi);
        for k in 0..12 {
            let psi = 0.5 * k as f64;
            let th = phi + psi;
            assert!((r.eval(psi.cos(), psi.sin()) - c.eval(th.cos(), th.sin())).abs() < 1e-13);
        }
    }

    #[test]
    fn family_matches_conic_quartic() {
        let p = robot([1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2]);
        let f = f_coefficients(&p).unwrap();
        let fam = QuarticFamily::new(&p, &f, 0.0);
        let target = cross_section(&forward_kinematics(&p, &JointConfig::new(0.0, 0.4, 1.1)));
        let (r, zl) = local_rz(&p, &target);
        let (m, _, _) = fam.at(r, zl);
        let direct = quartic_from_conic(&conic_raw(&p, &f, r, zl));
        for (a, b) in m.coeffs.iter().zip(direct.coeffs.iter()) {
            assert!((a - b).abs() < 1e-10 * direct.max_abs());
        }
    }
}
