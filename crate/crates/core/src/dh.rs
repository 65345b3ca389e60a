//! Classical Denavit–Hartenberg kinematics of a 3R positional chain.
//!
//! Each link transform is `RotZ(θᵢ)·TransZ(dᵢ)·TransX(aᵢ)·RotX(αᵢ)` with
//! `α₃ = 0`; the end-effector is the origin of frame 3.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::angle::normalize;
use crate::error::{Error, Result};

/// D-H parameters of a 3R positional chain. `α₃` is fixed to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhParams {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Joint angles, each kept in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointConfig {
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A point of the half cross-section `(ρ, z)` of the workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSectionPoint {
    pub rho: f64,
    pub z: f64,
}

impl CrossSectionPoint {
    /// Builds a point; a negative `rho` is mirrored onto the half-plane.
    pub fn new(rho: f64, z: f64) -> Self {
        Self { rho: rho.abs(), z }
    }

    /// `R = ρ² + z²`.
    pub fn big_r(&self) -> f64 {
        self.rho * self.rho + self.z * self.z
    }

    pub fn dist(&self, other: &CrossSectionPoint) -> f64 {
        (self.rho - other.rho).hypot(self.z - other.z)
    }
}

impl JointConfig {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1: normalize(theta1),
            theta2: normalize(theta2),
            theta3: normalize(theta3),
        }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }

    /// The `(θ₂, θ₃)` projection used by all singularity computations.
    pub fn reduced(&self) -> (f64, f64) {
        (self.theta2, self.theta3)
    }

    /// Largest per-angle torus distance to `other`.
    pub fn max_angle_dist(&self, other: &JointConfig) -> f64 {
        use crate::angle::diff;
        diff(self.theta1, other.theta1)
            .abs()
            .max(diff(self.theta2, other.theta2).abs())
            .max(diff(self.theta3, other.theta3).abs())
    }
}

impl Pose3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dist(&self, other: &Pose3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }
}

impl DhParams {
    /// Builds parameters from the `d`, `a`, `α` triples used in robot files.
    /// The third twist is ignored here; see [`DhParams::from_arrays_checked`].
    pub fn new(d: [f64; 3], a: [f64; 3], alpha: [f64; 2]) -> Self {
        Self {
            d1: d[0],
            d2: d[1],
            d3: d[2],
            a1: a[0],
            a2: a[1],
            a3: a[2],
            alpha1: alpha[0],
            alpha2: alpha[1],
        }
    }

    /// Like [`DhParams::new`] followed by [`validate_params`], additionally
    /// rejecting a nonzero third twist.
    pub fn from_arrays_checked(d: [f64; 3], a: [f64; 3], alpha: [f64; 3]) -> Result<Self> {
        if alpha[2] != 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "alpha3 must be 0, got {}",
                alpha[2]
            )));
        }
        validate_params(Self::new(d, a, [alpha[0], alpha[1]]))
    }

    /// Characteristic length `max(1, Σ|aᵢ| + Σ|dᵢ|)`.
    pub fn length_scale(&self) -> f64 {
        let s = self.a1.abs()
            + self.a2.abs()
            + self.a3.abs()
            + self.d1.abs()
            + self.d2.abs()
            + self.d3.abs();
        s.max(1.0)
    }

    /// Tolerance scale for `det J`, which has dimension length³.
    pub fn scale(&self) -> f64 {
        self.length_scale().powi(3)
    }

    fn link(&self, i: usize, theta: f64) -> Matrix4<f64> {
        let (d, a, alpha) = match i {
            0 => (self.d1, self.a1, self.alpha1),
            1 => (self.d2, self.a2, self.alpha2),
            _ => (self.d3, self.a3, 0.0),
        };
        link_transform(theta, d, a, alpha)
    }
}

fn link_transform(theta: f64, d: f64, a: f64, alpha: f64) -> Matrix4<f64> {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    Matrix4::new(
        ct,
        -st * ca,
        st * sa,
        a * ct,
        st,
        ct * ca,
        -ct * sa,
        a * st,
        0.0,
        sa,
        ca,
        d,
        0.0,
        0.0,
        0.0,
        1.0,
    )
}

/// Checks the invariants every analysis relies on.
pub fn validate_params(p: DhParams) -> Result<DhParams> {
    let fields = [
        ("d1", p.d1),
        ("d2", p.d2),
        ("d3", p.d3),
        ("a1", p.a1),
        ("a2", p.a2),
        ("a3", p.a3),
        ("alpha1", p.alpha1),
        ("alpha2", p.alpha2),
    ];
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    let tiny = 1e-12 * p.length_scale();
    if p.a3.abs() <= tiny {
        return Err(Error::DegenerateGeometry(
            "a3 = 0: the Jacobian determinant vanishes identically".into(),
        ));
    }
    if p.a1.abs() <= tiny {
        return Err(Error::EliminationUnsupported("a1 = 0".into()));
    }
    if p.alpha1.sin().abs() <= 1e-12 {
        return Err(Error::EliminationUnsupported("sin(alpha1) = 0".into()));
    }
    Ok(p)
}

/// Origin of frame 3 expressed in the base frame.
pub fn forward_kinematics(p: &DhParams, q: &JointConfig) -> Pose3 {
    let t = p.link(0, q.theta1) * p.link(1, q.theta2) * p.link(2, q.theta3);
    Pose3::new(t[(0, 3)], t[(1, 3)], t[(2, 3)])
}

pub fn cross_section(pose: &Pose3) -> CrossSectionPoint {
    CrossSectionPoint {
        rho: pose.x.hypot(pose.y),
        z: pose.z,
    }
}

/// Image of `(θ₂, θ₃)` in the half cross-section (θ₁ is irrelevant).
pub fn cross_section_at(p: &DhParams, theta2: f64, theta3: f64) -> CrossSectionPoint {
    cross_section(&forward_kinematics(p, &JointConfig::new(0.0, theta2, theta3)))
}

/// Geometric Jacobian of the end-effector position: column `i` is the joint
/// axis `zᵢ₋₁` crossed with the arm `e - oᵢ₋₁`.
pub fn jacobian(p: &DhParams, q: &JointConfig) -> Matrix3<f64> {
    let t1 = p.link(0, q.theta1);
    let t2 = t1 * p.link(1, q.theta2);
    let t3 = t2 * p.link(2, q.theta3);
    let origin = Vector4::new(0.0, 0.0, 0.0, 1.0);
    let e = (t3 * origin).xyz();
    let frames = [Matrix4::identity(), t1, t2];
    let mut j = Matrix3::zeros();
    for (i, f) in frames.iter().enumerate() {
        let axis = Vector3::new(f[(0, 2)], f[(1, 2)], f[(2, 2)]);
        let o = Vector3::new(f[(0, 3)], f[(1, 3)], f[(2, 3)]);
        j.set_column(i, &axis.cross(&(e - o)));
    }
    j
}

/// Closed-form `det J(θ₂, θ₃)`; independent of θ₁ and d₁.
pub fn det_jacobian(p: &DhParams, theta2: f64, theta3: f64) -> f64 {
    let (s2, c2) = theta2.sin_cos();
    let (s3, c3) = theta3.sin_cos();
    let (sa1, ca1) = p.alpha1.sin_cos();
    let (sa2, ca2) = p.alpha2.sin_cos();
    let (a1, a2, a3, d2, d3) = (p.a1, p.a2, p.a3, p.d2, p.d3);

    let inner_sa2 = -c3 * (a3 * d2 * s2 * s3 + a1 * d3) * ca2 + a2 * c2 * c3 * d2
        + (-c2 * d2 * s3 * s3 + c2 * d2) * a3
        - a2 * d3 * s2 * s3;
    let sa1_term = inner_sa2 * sa2
        + c3 * (a1 * a3 * s3 - d2 * d3 * s2) * ca2 * ca2
        + a2 * a3 * s2 * s3 * s3 * ca2
        + (-s3 * (a2 * c2 + a1) * a3 + d2 * d3 * s2) * c3
        - a2 * s3 * (a2 * c2 + a1);
    let ca1_term = a1
        * ((ca2 * a3 * c2 * c3 * s3 + s2 * (a2 * c3 + (1.0 - s3 * s3) * a3)) * sa2
            + c2 * c3 * d3 * (ca2 - 1.0) * (ca2 + 1.0));
    (sa1_term * sa1 + ca1_term * ca1) * a3
}

/// Central-difference gradient of [`det_jacobian`] in `(θ₂, θ₃)`.
pub fn det_gradient(p: &DhParams, theta2: f64, theta3: f64) -> (f64, f64) {
    const H: f64 = 1e-6;
    let g2 = (det_jacobian(p, theta2 + H, theta3) - det_jacobian(p, theta2 - H, theta3)) / (2.0 * H);
    let g3 = (det_jacobian(p, theta2, theta3 + H) - det_jacobian(p, theta2, theta3 - H)) / (2.0 * H);
    (g2, g3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn reference() -> DhParams {
        DhParams::new([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [-FRAC_PI_2, FRAC_PI_2])
    }

    #[test]
    fn validation() {
        assert!(validate_params(reference()).is_ok());
        let mut p = reference();
        p.a3 = 0.0;
        assert!(matches!(validate_params(p), Err(Error::DegenerateGeometry(_))));
        let mut p = reference();
        p.alpha1 = 0.0;
        assert!(matches!(validate_params(p), Err(Error::EliminationUnsupported(_))));
        let mut p = reference();
        p.a1 = 0.0;
        assert!(matches!(validate_params(p), Err(Error::EliminationUnsupported(_))));
        let mut p = reference();
        p.d2 = f64::NAN;
        assert!(matches!(validate_params(p), Err(Error::NonFinite("d2"))));
        assert!(DhParams::from_arrays_checked([0.0, 1.0, 0.0], [1.0, 2.0, 1.5], [-1.0, 1.0, 0.1]).is_err());
    }

    #[test]
    fn collinear_links() {
        let p = DhParams::new([0.0; 3], [1.0, 1.0, 1.0], [0.0, 0.0]);
        let e = forward_kinematics(&p, &JointConfig::new(0.0, 0.0, 0.0));
        assert!(e.dist(&Pose3::new(3.0, 0.0, 0.0)) < 1e-15);
        let e = forward_kinematics(&p, &JointConfig::new(FRAC_PI_2, 0.0, 0.0));
        assert!(e.dist(&Pose3::new(0.0, 3.0, 0.0)) < 1e-15);
    }

    #[test]
    fn cross_section_examples() {
        let c = cross_section(&Pose3::new(3.0, 4.0, 1.0));
        assert_eq!((c.rho, c.z), (5.0, 1.0));
        let c = cross_section(&Pose3::new(0.0, 0.0, 2.0));
        assert_eq!((c.rho, c.z), (0.0, 2.0));
        let p = reference();
        let base = cross_section(&forward_kinematics(&p, &JointConfig::new(0.3, -0.742, 2.628)));
        for t1 in [-3.0, -1.0, 0.0, 2.5] {
            let c = cross_section(&forward_kinematics(&p, &JointConfig::new(t1, -0.742, 2.628)));
            assert!(c.dist(&base) < 1e-12);
        }
    }

    #[test]
    fn first_column_is_planar_rotation() {
        let p = reference();
        let q = JointConfig::new(0.4, -1.1, 2.0);
        let e = forward_kinematics(&p, &q);
        let j = jacobian(&p, &q);
        assert!((j[(0, 0)] + e.y).abs() < 1e-14);
        assert!((j[(1, 0)] - e.x).abs() < 1e-14);
        assert!(j[(2, 0)].abs() < 1e-14);
    }

    #[test]
    fn zero_a3_zero_det() {
        let mut p = reference();
        p.a3 = 0.0;
        for k in 0..10 {
            assert_eq!(det_jacobian(&p, 0.3 * k as f64, -0.7 * k as f64), 0.0);
        }
    }

    #[test]
    fn joint_config_normalizes() {
        let q = JointConfig::new(PI, 3.0 * PI, -7.0);
        for a in [q.theta1(), q.theta2(), q.theta3()] {
            assert!((-PI..PI).contains(&a));
        }
    }
}
