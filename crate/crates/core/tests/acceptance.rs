//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! the table; the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use cusp3r_core::critical::{critical_values, find_cusps, find_nodes, region_census, trace_critical_points};
use cusp3r_core::dh::{det_jacobian, jacobian};
use cusp3r_core::reduction::{
    conic_classify, conic_coefficients, quartic_from_conic, solve_ik, solve_ik_cross_section, ConicKind,
};
use cusp3r_core::topology::{verify_path, Analysis, AnalysisOptions};
use cusp3r_core::{CrossSectionPoint, DhParams, JointConfig, Pose3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIGURE_TOL: f64 = 0.05;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn analyse(p: &DhParams) -> Analysis {
    Analysis::run(p, &AnalysisOptions::default()).unwrap()
}

fn dist(p: &CrossSectionPoint, q: (f64, f64)) -> f64 {
    (p.rho - q.0).hypot(p.z - q.1)
}

fn reference_robot() -> Outcome {
    let a = analyse(&reference());
    let best = a.cusps.iter().map(|c| dist(&c.point, (2.48, 1.96))).fold(f64::INFINITY, f64::min);
    let msg = format!(
        "cuspidal={} cusps={} nearest cusp {best:.4} aspects={}",
        a.is_cuspidal(),
        a.cusps.len(),
        a.aspects.count
    );
    ensure(a.is_cuspidal() && a.cusps.len() == 4 && best < FIGURE_TOL && a.aspects.count == 2, msg)
}

fn node_robot_node() -> Outcome {
    let p = node_robot();
    let ws = critical_values(&p, &trace_critical_points(&p, 720).unwrap());
    let nodes = find_nodes(&p, &ws).unwrap();
    let n = nodes
        .iter()
        .min_by(|a, b| dist(&a.point, (2.84, 3.79)).total_cmp(&dist(&b.point, (2.84, 3.79))))
        .ok_or("no nodes")?;
    let d = dist(&n.point, (2.84, 3.79));
    let mut m: Vec<u8> = solve_ik_cross_section(&p, &n.point).unwrap().solutions.iter().map(|s| s.multiplicity).collect();
    m.sort();
    ensure(d < FIGURE_TOL && m == [2, 2], format!("node at {d:.4}, IK multiplicities {m:?}"))
}

fn critical_value_point() -> Outcome {
    let p = reference();
    let ws = critical_values(&p, &trace_critical_points(&p, 720).unwrap());
    let d = ws.iter().flat_map(|c| &c.points).map(|q| dist(q, (2.913, 0.1))).fold(f64::INFINITY, f64::min);
    ensure(d < FIGURE_TOL, format!("closest critical value {d:.4}"))
}

fn oblique_robots() -> Outcome {
    let a = analyse(&oblique_cuspidal());
    let b = analyse(&oblique_noncuspidal());
    let msg = format!("cuspidal case: {} cusps; non-cuspidal case: {} cusps", a.cusps.len(), b.cusps.len());
    ensure(a.is_cuspidal() && !b.is_cuspidal() && b.cusps.is_empty(), msg)
}

fn conic_taxonomy() -> Outcome {
    let kinds = [hyperbola_robot(), parabola_robot(), ellipse_robot()].map(|p| conic_classify(&p).unwrap().kind);
    ensure(kinds == [ConicKind::Hyperbola, ConicKind::Parabola, ConicKind::Ellipse], format!("{kinds:?}"))
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let (mut round_trip, mut conic, mut quartic, mut det, mut fd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut round_trips = 0;
    for _ in 0..1000 {
        let p = random_robot(&mut rng);
        let q = [rng.random_range(-3.1..3.1), rng.random_range(-3.1..3.1), rng.random_range(-3.1..3.1)];
        let cfg = JointConfig::new(q[0], q[1], q[2]);

        if det_jacobian(&p, q[1], q[2]).abs() > 1e-3 * p.scale() {
            let o = oracle_fk(&p, q);
            let set = solve_ik(&p, &Pose3::new(o[0], o[1], o[2])).unwrap();
            let best = set.solutions.iter().map(|s| s.config.max_angle_dist(&cfg)).fold(f64::INFINITY, f64::min);
            round_trip = round_trip.max(best);
            round_trips += 1;
        }

        let (rho, z) = oracle_rho_z(&p, q[1], q[2]);
        let c = conic_coefficients(&p, &CrossSectionPoint::new(rho, z)).unwrap();
        conic = conic.max(c.eval(q[2].cos(), q[2].sin()).abs() / c.max_abs());
        let m = quartic_from_conic(&c);
        let t = (q[2] / 2.0).tan();
        quartic = quartic.max(m.eval(t).abs() / (m.max_abs() * (1.0 + t * t).powi(2)));

        let j = jacobian(&p, &cfg);
        det = det.max((det_jacobian(&p, q[1], q[2]) - j.determinant()).abs() / j.norm().powi(3).max(1.0));
        let o = oracle_jacobian(&p, q);
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for r in 0..3 {
            for k in 0..3 {
                err += (j[(r, k)] - o[r][k]).powi(2);
                norm += o[r][k].powi(2);
            }
        }
        fd = fd.max(err.sqrt() / norm.sqrt().max(1.0));
    }
    let msg = format!(
        "round trip {round_trip:.1e} over {round_trips}, conic {conic:.1e}, quartic {quartic:.1e}, det {det:.1e}, jacobian {fd:.1e}"
    );
    ensure(round_trip < 1e-8 && conic < 1e-9 && quartic < 1e-8 && det < 1e-9 && fd < 1e-6, msg)
}

fn census_audit() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, p) in [("reference", reference()), ("node", node_robot())] {
        let ws = critical_values(&p, &trace_critical_points(&p, 720).unwrap());
        let cusps = find_cusps(&p, &ws).unwrap();
        let nodes = find_nodes(&p, &ws).unwrap();
        let a = region_census(&p, 160, &ws, &cusps, &nodes).unwrap().audit;
        let odd = a.boundary.iter().filter(|b| b.count % 2 == 1).count();
        ok &= a.passed() && a.pairs_checked > 0 && odd > 0;
        lines.push(format!(
            "{name}: {} pairs, {} failures, {odd}/{} boundary samples intermediate",
            a.pairs_checked,
            a.pair_failures.len(),
            a.boundary.len()
        ));
    }
    ensure(ok, lines.join("; "))
}

fn reduced_aspect_audit() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, p, _) in battery() {
        let r = analyse(&p).reduced_aspect_audit();
        ok &= r.passed() && r.sampled >= 200;
        lines.push(format!("{name} {}/{}", r.sampled - r.violations.len(), r.sampled));
    }
    ensure(ok, lines.join(", "))
}

fn verdict_equivalence() -> Outcome {
    let mut runs: Vec<(String, Analysis)> = battery().into_iter().map(|(n, p, _)| (n.to_string(), analyse(&p))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e03);
    let mut skipped = 0;
    while runs.len() < 26 {
        let a = analyse(&random_robot(&mut rng));
        if a.genericity.is_generic {
            runs.push((format!("random{}", runs.len() - 5), a));
        } else {
            skipped += 1;
        }
    }
    let cuspidal = runs.iter().filter(|(_, a)| a.is_cuspidal()).count();
    let disagreements: Vec<&String> = runs.iter().filter(|(_, a)| !a.cross_validate().agrees).map(|(n, _)| n).collect();
    let msg = format!(
        "{} robots ({cuspidal} cuspidal), {skipped} non-generic draws skipped, disagreements {disagreements:?}",
        runs.len()
    );
    ensure(disagreements.is_empty(), msg)
}

fn paths() -> Outcome {
    let p = reference();
    let a = analyse(&p);
    let path = a.path(&JointConfig::new(0.0, -0.742, 2.628), &JointConfig::new(0.0, -3.0, -0.5)).unwrap();
    let posture = path.map(|x| verify_path(&p, &x).valid).unwrap_or(false);

    let w = waypoint_robot();
    let b = analyse(&w);
    let legs = [(-3.0, 0.5), (2.0, 3.0), (0.2, 2.8)];
    let waypoints = legs.windows(2).all(|l| {
        b.path(&JointConfig::new(0.0, l[0].0, l[0].1), &JointConfig::new(0.0, l[1].0, l[1].1))
            .unwrap()
            .map(|x| verify_path(&w, &x).valid)
            .unwrap_or(false)
    });

    let n = oblique_noncuspidal();
    let c = analyse(&n);
    let max = *c.census.counts.iter().max().unwrap();
    let mut pairs = 0;
    let mut connected = 0;
    for i in (0..c.census.nx).step_by(7) {
        for j in (0..c.census.nz).step_by(7) {
            if c.census.count(i, j) != max {
                continue;
            }
            let labels = c.label(&c.census.center(i, j)).unwrap();
            if labels.iter().any(|l| l.on_boundary) {
                continue;
            }
            for x in 0..labels.len() {
                for y in x + 1..labels.len() {
                    pairs += 1;
                    connected += c.path(&labels[x].config, &labels[y].config).unwrap().is_some() as usize;
                }
            }
        }
    }
    let msg = format!(
        "posture change {posture}, waypoint legs {waypoints}, non-cuspidal pairs connected {connected}/{pairs}"
    );
    ensure(posture && waypoints && pairs > 0 && connected == 0, msg)
}

fn determinism() -> Outcome {
    let p = reference();
    let a = analyse(&p).report();
    let b = analyse(&p).report();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| analyse(&p).report());
    let same = format!("{a:?}") == format!("{b:?}") && format!("{a:?}") == format!("{c:?}");
    ensure(same, format!("two runs and a single-thread run identical: {same}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("reference robot: cuspidal, 4 cusps, figure cusp, 2 aspects", reference_robot),
        ("node robot: node near figure point, two double solutions", node_robot_node),
        ("reference critical values pass the figure point", critical_value_point),
        ("oblique robots: cuspidal and non-cuspidal", oblique_robots),
        ("conic taxonomy", conic_taxonomy),
        ("property suite over 1000 random robots", property_suite),
        ("region census changes by two across curves", census_audit),
        ("reduced aspects separate solutions", reduced_aspect_audit),
        ("cusp verdict matches same-aspect oracle", verdict_equivalence),
        ("certified posture-change paths", paths),
        ("deterministic analysis", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                println!("FAIL {:>2} {name}: {msg}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
