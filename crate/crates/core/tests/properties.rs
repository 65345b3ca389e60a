mod common;

use common::*;
use cusp3r_core::dh::{cross_section_at, det_jacobian, forward_kinematics, jacobian};
use cusp3r_core::reduction::{conic_coefficients, quartic_from_conic, solve_ik, solve_ik_cross_section};
use cusp3r_core::{CrossSectionPoint, DhParams, JointConfig, Pose3};
use proptest::prelude::*;

fn robot() -> impl Strategy<Value = DhParams> {
    let len = (0.2..3.0f64, any::<bool>()).prop_map(|(m, s)| if s { m } else { -m });
    let twist = (-3.1..3.1f64).prop_filter("sin(alpha1) bounded away from 0", |a: &f64| a.sin().abs() > 0.1);
    (
        [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64],
        len.clone(),
        -3.0..3.0f64,
        len,
        twist,
        -3.1..3.1f64,
    )
        .prop_map(|(d, a1, a2, a3, al1, al2)| DhParams::new(d, [a1, a2, a3], [al1, al2]))
}

fn config() -> impl Strategy<Value = [f64; 3]> {
    [-3.1..3.1f64, -3.1..3.1f64, -3.1..3.1f64]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn fk_ik_round_trip(p in robot(), q in config()) {
        let scale = p.scale();
        // near a singularity the IK roots merge and lose half their digits
        prop_assume!(det_jacobian(&p, q[1], q[2]).abs() > 1e-3 * scale);
        let target = oracle_fk(&p, q);
        let set = solve_ik(&p, &Pose3::new(target[0], target[1], target[2])).unwrap();
        let best = set
            .solutions
            .iter()
            .map(|s| {
                let c = &s.config;
                angle_gap(c.theta1(), q[0]).max(angle_gap(c.theta2(), q[1])).max(angle_gap(c.theta3(), q[2]))
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(best < 1e-8, "closest solution is {best} away");
        for s in &set.solutions {
            let e = oracle_fk(&p, [s.config.theta1(), s.config.theta2(), s.config.theta3()]);
            let err = (e[0] - target[0]).hypot(e[1] - target[1]).hypot(e[2] - target[2]);
            prop_assert!(err < 1e-7 * p.length_scale(), "spurious solution, FK error {err}");
        }
    }

    #[test]
    fn conic_and_quartic_vanish_on_reachable_targets(p in robot(), q in config()) {
        let (rho, z) = oracle_rho_z(&p, q[1], q[2]);
        let c = conic_coefficients(&p, &CrossSectionPoint::new(rho, z)).unwrap();
        let r = c.eval(q[2].cos(), q[2].sin()).abs() / c.max_abs();
        prop_assert!(r < 1e-9, "conic residual {r}");
        let t = (q[2] / 2.0).tan();
        let m = quartic_from_conic(&c);
        let r = m.eval(t).abs() / (m.max_abs() * (1.0 + t * t).powi(2));
        prop_assert!(r < 1e-8, "quartic residual {r}");
    }

    #[test]
    fn closed_form_determinant_matches_numeric(p in robot(), q in config()) {
        let j = jacobian(&p, &JointConfig::new(q[0], q[1], q[2]));
        let numeric = j.determinant();
        let closed = det_jacobian(&p, q[1], q[2]);
        // relative to the magnitude of the matrix, since det itself may vanish
        let norm = j.norm().powi(3).max(1.0);
        prop_assert!((closed - numeric).abs() < 1e-9 * norm, "{closed} vs {numeric}");
    }

    #[test]
    fn jacobian_matches_finite_differences(p in robot(), q in config()) {
        let j = jacobian(&p, &JointConfig::new(q[0], q[1], q[2]));
        let fd = oracle_jacobian(&p, q);
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                err += (j[(r, c)] - fd[r][c]).powi(2);
                norm += fd[r][c].powi(2);
            }
        }
        prop_assert!(err.sqrt() < 1e-6 * norm.sqrt().max(1.0));
    }

    #[test]
    fn cross_section_lies_in_the_half_plane(p in robot(), q in config()) {
        let pt = cross_section_at(&p, q[1], q[2]);
        prop_assert!(pt.rho >= 0.0);
        let e = forward_kinematics(&p, &JointConfig::new(q[0], q[1], q[2]));
        prop_assert!((pt.rho - e.x.hypot(e.y)).abs() < 1e-12 * p.length_scale());
        prop_assert!((pt.z - e.z).abs() < 1e-12 * p.length_scale());
    }

    #[test]
    fn solution_count_is_even_with_multiplicity(p in robot(), q in config(), dr in -1.0..1.0f64, dz in -1.0..1.0f64) {
        let (rho, z) = oracle_rho_z(&p, q[1], q[2]);
        let target = CrossSectionPoint::new((rho + dr).abs(), z + dz);
        let set = solve_ik_cross_section(&p, &target).unwrap();
        prop_assert!(set.count() <= 4);
        // a root flagged at infinity or with unrecoverable θ₂ breaks parity
        if set.flagged.is_empty() {
            prop_assert!(set.count() % 2 == 0, "count {}", set.count());
        }
        for s in &set.solutions {
            let e = forward_kinematics(&p, &s.config);
            prop_assert!((e.x.hypot(e.y) - target.rho).abs() < 1e-6 * p.length_scale());
        }
    }
}
