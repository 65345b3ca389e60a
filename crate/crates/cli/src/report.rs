//! JSON documents. Keys come out sorted (serde_json's map is ordered) and
//! every float is rounded to 12 significant digits.

use cusp3r_core::critical::{CuspPoint, GenericityEvidence, GenericityReport, NodePoint, RegionCensus};
use cusp3r_core::reduction::{ConicClass, ConicKind, IkSolutionSet};
use cusp3r_core::topology::{Analysis, CrossValidation, JointPath, ReducedAspectAudit};
use cusp3r_core::{CrossSectionPoint, JointConfig};
use serde_json::{json, Map, Value};

use crate::csv::round_sig;
use crate::robot_file::RobotSpec;

pub const SCHEMA_VERSION: u64 = 1;

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::Null
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

pub fn point(p: &CrossSectionPoint) -> Value {
    json!({"rho": num(p.rho), "z": num(p.z)})
}

pub fn config(q: &JointConfig) -> Value {
    nums(&[q.theta1(), q.theta2(), q.theta3()])
}

pub fn robot(spec: &RobotSpec) -> Value {
    json!({"name": spec.name, "d": nums(&spec.d), "a": nums(&spec.a), "alpha": nums(&spec.alpha)})
}

pub fn conic(c: &ConicClass) -> Value {
    let kind = match c.kind {
        ConicKind::Ellipse => "ellipse",
        ConicKind::Parabola => "parabola",
        ConicKind::Hyperbola => "hyperbola",
    };
    json!({
        "kind": kind,
        "det": num(c.det),
        "eigenvalues": nums(&c.eigenvalues),
        "axes": [nums(&c.axes[0]), nums(&c.axes[1])],
    })
}

pub fn cusp(c: &CuspPoint) -> Value {
    json!({
        "rho": num(c.point.rho),
        "z": num(c.point.z),
        "t": num(c.t),
        "theta3": num(c.theta3),
        "residuals": nums(&c.residuals),
        "abs_m3": num(c.abs_m3),
        "source_curve": c.source,
    })
}

pub fn node(n: &NodePoint) -> Value {
    json!({
        "rho": num(n.point.rho),
        "z": num(n.point.z),
        "theta3": nums(&n.theta3),
        "t": nums(&n.t),
        "residuals": nums(&n.residuals),
    })
}

pub fn genericity(g: &GenericityReport) -> Value {
    let evidence: Vec<Value> = g
        .evidence
        .iter()
        .map(|e| match e {
            GenericityEvidence::QuadrupleRoot { point: p, theta3, residual } => json!({
                "kind": "quadruple_root", "rho": num(p.rho), "z": num(p.z),
                "theta3": num(*theta3), "residual": num(*residual),
            }),
            GenericityEvidence::SingularVertex { theta, grad_norm } => json!({
                "kind": "singular_vertex", "theta2": num(theta.0), "theta3": num(theta.1),
                "grad_norm": num(*grad_norm),
            }),
            GenericityEvidence::IsolatedSingularPoint { theta, predicted } => json!({
                "kind": "isolated_singular_point", "theta2": num(theta.0), "theta3": num(theta.1),
                "predicted": num(*predicted),
            }),
        })
        .collect();
    json!({"is_generic": g.is_generic, "evidence": evidence})
}

pub fn census(c: &RegionCensus) -> Value {
    let mut hist = Map::new();
    for k in 0..=4u8 {
        let n = c.counts.iter().filter(|v| **v == k).count();
        hist.insert(k.to_string(), json!(n));
    }
    let a = &c.audit;
    let intermediate = a.boundary.iter().filter(|b| b.count % 2 == 1).count();
    json!({
        "n": c.nx,
        "rho_range": nums(&[c.rho_range.0, c.rho_range.1]),
        "z_range": nums(&[c.z_range.0, c.z_range.1]),
        "histogram": hist,
        "audit": {
            "pairs_checked": a.pairs_checked,
            "pair_failures": a.pair_failures.len(),
            "boundary_samples": a.boundary.len(),
            "boundary_odd_counts": intermediate,
            "boundary_failures": a.boundary_failures,
            "passed": a.passed(),
        },
    })
}

pub fn cross_validation(cv: &CrossValidation) -> Value {
    let witnesses: Vec<Value> = cv
        .witnesses
        .iter()
        .take(8)
        .map(|w| json!({"point": point(&w.point), "aspect": w.aspect, "configs": [config(&w.configs[0]), config(&w.configs[1])]}))
        .collect();
    json!({
        "sampled": cv.sampled,
        "attempts": cv.attempts,
        "stratified": cv.stratified,
        "same_aspect_found": cv.same_aspect_found,
        "witness_count": cv.witnesses.len(),
        "witnesses": witnesses,
        "agrees": cv.agrees,
    })
}

pub fn reduced_audit(a: &ReducedAspectAudit) -> Value {
    json!({
        "sampled": a.sampled,
        "attempts": a.attempts,
        "violations": a.violations.len(),
        "passed": a.passed(),
    })
}

pub fn ik(set: &IkSolutionSet) -> Value {
    let sols: Vec<Value> = set
        .solutions
        .iter()
        .map(|s| json!({"config": config(&s.config), "multiplicity": s.multiplicity, "residual": num(s.residual)}))
        .collect();
    let flagged: Vec<Value> =
        set.flagged.iter().map(|f| json!({"theta3": num(f.theta3), "multiplicity": f.multiplicity})).collect();
    json!({"solutions": sols, "flagged": flagged, "count": set.count(), "distinct": set.distinct()})
}

pub fn path(p: Option<&JointPath>) -> Value {
    match p {
        None => Value::Null,
        Some(p) => json!({
            "waypoints": p.configs().iter().map(config).collect::<Vec<_>>(),
            "length": num(p.length()),
            "min_abs_det": num(p.min_abs_det),
        }),
    }
}

pub fn aspects(a: &Analysis) -> Value {
    json!({
        "count": a.aspects.count,
        "sizes": a.aspects.sizes(),
        "reduced_count": a.reduced.count,
        "reduced_sizes": a.reduced.sizes(),
        "reduced_parent": a.reduced.parent,
        "grid_n": a.grid.n,
    })
}

pub fn critical(a: &Analysis) -> Value {
    let curves: Vec<Value> = a
        .curves
        .iter()
        .zip(&a.workspace)
        .map(|(c, w)| {
            json!({
                "vertices": c.vertices.len(),
                "closed": c.closed,
                "collapsed": w.is_collapsed(&a.params),
                "image_extent": num(w.extent()),
            })
        })
        .collect();
    json!({"curves": curves})
}

/// Full document of `classify`.
pub fn classify_document(spec: &RobotSpec, a: &Analysis, conic_class: Option<&ConicClass>) -> Value {
    let generic = a.genericity.is_generic;
    let mut doc = json!({
        "schema": "cusp3r-report",
        "schema_version": SCHEMA_VERSION,
        "robot": robot(spec),
        "options": {
            "grid_n": a.options.grid_n,
            "census_n": a.options.census_n,
            "samples": a.options.samples,
            "seed": a.options.seed,
        },
        "conic": conic_class.map(conic).unwrap_or(Value::Null),
        "genericity": genericity(&a.genericity),
        "critical": critical(a),
        "cusps": a.cusps.iter().map(cusp).collect::<Vec<_>>(),
        "nodes": a.nodes.iter().map(node).collect::<Vec<_>>(),
        "aspects": aspects(a),
        "pseudosingularities": {"curves": a.pseudo.curves.len(), "points": a.pseudo.point_count()},
        "census": census(&a.census),
        "verdict": {
            "cuspidal": if generic { json!(a.is_cuspidal()) } else { Value::Null },
            "generic": generic,
            "cusp_count": a.cusps.len(),
        },
    });
    let map = doc.as_object_mut().expect("object");
    if generic {
        map.insert("cross_validation".into(), cross_validation(&a.cross_validate()));
        map.insert("reduced_aspect_audit".into(), reduced_audit(&a.reduced_aspect_audit()));
    } else {
        map.insert("cross_validation".into(), Value::Null);
        map.insert("reduced_aspect_audit".into(), Value::Null);
    }
    doc
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
