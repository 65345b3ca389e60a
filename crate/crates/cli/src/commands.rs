use std::path::{Path, PathBuf};
use std::time::Instant;

use cusp3r_core::critical::{
    critical_values, find_cusps, find_nodes, trace_on_grid, CuspPoint, DetGrid, JointCurve, NodePoint, WorkspaceCurve,
};
use cusp3r_core::dh::{cross_section, det_jacobian, forward_kinematics};
use cusp3r_core::reduction::{conic_classify, solve_ik_cross_section};
use cusp3r_core::topology::{
    compute_aspects, compute_pseudosingularities, find_nonsingular_path, verify_path, Analysis, AnalysisOptions,
};
use cusp3r_core::{CrossSectionPoint, DhParams, JointConfig};
use serde_json::{json, Value};

use crate::cli::{Cli, Command, Format, PlotKind};
use crate::csv::write_csv;
use crate::report::{self, num};
use crate::robot_file::{parse_robot_file, RobotSpec};
use crate::{svg, CliError, EXIT_CUSPIDAL, EXIT_NON_GENERIC, EXIT_OK};

/// What a command produced: text for standard output, an exit status and the
/// files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub exit: i32,
    pub files: Vec<PathBuf>,
}

struct Ctx<'a> {
    cli: &'a Cli,
    spec: RobotSpec,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn p(&self) -> &DhParams {
        &self.spec.params
    }

    fn wants(&self, f: Format) -> bool {
        self.cli.format.contains(&f)
    }

    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            grid_n: self.cli.grid as usize,
            census_n: self.cli.census,
            samples: self.cli.samples,
            seed: self.cli.seed,
        }
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = self
            .cli
            .out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--out is required for csv and svg output".into()))?;
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        Ok(dir)
    }

    fn csv(&mut self, file: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let path = self.out_dir()?.join(format!("{}_{file}", self.spec.name));
        write_csv(&path, header, rows).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.files.push(path);
        Ok(())
    }

    fn svg(&mut self, file: &str, body: &str) -> Result<(), CliError> {
        let path = self.out_dir()?.join(format!("{}_{file}", self.spec.name));
        std::fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.files.push(path);
        Ok(())
    }

    fn header(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("robot".into(), report::robot(&self.spec));
        m
    }

    fn point(&self) -> Result<CrossSectionPoint, CliError> {
        match self.cli.point.as_deref() {
            Some([rho, z]) => Ok(CrossSectionPoint::new(*rho, *z)),
            _ => Err(CliError::Usage("--point RHO,Z is required".into())),
        }
    }

    fn config(&self, goal: bool) -> Result<JointConfig, CliError> {
        let (v, flag) = if goal { (&self.cli.goal, "--goal") } else { (&self.cli.config, "--config") };
        match v.as_deref() {
            Some([a, b, c]) => Ok(JointConfig::new(*a, *b, *c)),
            _ => Err(CliError::Usage(format!("{flag} T1,T2,T3 is required"))),
        }
    }

    fn traced(&self) -> (DetGrid, Vec<JointCurve>, Vec<WorkspaceCurve>) {
        let grid = DetGrid::evaluate(self.p(), self.cli.grid as usize);
        let curves = trace_on_grid(self.p(), &grid);
        let ws = critical_values(self.p(), &curves);
        (grid, curves, ws)
    }
}

fn select(cli: &Cli) -> Result<RobotSpec, CliError> {
    let file = parse_robot_file(&cli.robot)?;
    match &cli.name {
        Some(n) => file
            .get(n)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("no robot `{n}` in file (have: {})", file.names().join(", ")))),
        None if file.robots.len() == 1 => Ok(file.robots[0].clone()),
        None => Err(CliError::Usage(format!("--name is required, file holds: {}", file.names().join(", ")))),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let spec = select(cli)?;
    let mut ctx = Ctx { cli, spec, files: Vec::new() };
    let (doc, exit) = match cli.command {
        Command::Classify => classify(&mut ctx)?,
        Command::Ik => (ik(&mut ctx)?, EXIT_OK),
        Command::Fk => (fk(&ctx)?, EXIT_OK),
        Command::Critical => (critical(&mut ctx)?, EXIT_OK),
        Command::Cusps => (cusps(&mut ctx)?, EXIT_OK),
        Command::Nodes => (nodes(&mut ctx)?, EXIT_OK),
        Command::Aspects => (aspects(&mut ctx)?, EXIT_OK),
        Command::Pseudo => (pseudo(&mut ctx)?, EXIT_OK),
        Command::Path => (path(&mut ctx)?, EXIT_OK),
        Command::Plot => return plot(ctx),
    };
    let stdout = if ctx.wants(Format::Json) { report::to_text(&doc) } else { String::new() };
    Ok(Outcome { stdout, exit, files: ctx.files })
}

fn curve_files(ctx: &mut Ctx, curves: &[JointCurve], ws: &[WorkspaceCurve]) -> Result<(), CliError> {
    for (k, (c, w)) in curves.iter().zip(ws).enumerate() {
        let rows: Vec<Vec<f64>> = c.vertices.iter().map(|v| vec![v.0, v.1]).collect();
        ctx.csv(&format!("critical_points_{k}.csv"), &["theta2", "theta3"], &rows)?;
        let rows: Vec<Vec<f64>> = w.points.iter().map(|q| vec![q.rho, q.z]).collect();
        ctx.csv(&format!("critical_values_{k}.csv"), &["rho", "z"], &rows)?;
    }
    Ok(())
}

fn cusp_file(ctx: &mut Ctx, cusps: &[CuspPoint]) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = cusps
        .iter()
        .map(|c| vec![c.point.rho, c.point.z, c.t, c.residuals[0], c.residuals[1], c.residuals[2], c.abs_m3])
        .collect();
    ctx.csv("cusps.csv", &["rho", "z", "t", "resM", "resM1", "resM2", "absM3"], &rows)
}

fn node_file(ctx: &mut Ctx, nodes: &[NodePoint]) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = nodes.iter().map(|n| vec![n.point.rho, n.point.z, n.t[0], n.t[1]]).collect();
    ctx.csv("nodes.csv", &["rho", "z", "t1", "t2"], &rows)
}

fn classify(ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let started = Instant::now();
    let a = Analysis::run(ctx.p(), &ctx.options())?;
    let elapsed = started.elapsed().as_secs_f64();
    let conic = conic_classify(ctx.p()).ok();
    let mut doc = report::classify_document(&ctx.spec, &a, conic.as_ref());
    if ctx.cli.timing {
        let total = started.elapsed().as_secs_f64();
        doc.as_object_mut()
            .expect("object")
            .insert("timing".into(), json!({"analysis_s": num(elapsed), "total_s": num(total)}));
    }
    if ctx.wants(Format::Csv) {
        curve_files(ctx, &a.curves, &a.workspace)?;
        cusp_file(ctx, &a.cusps)?;
        node_file(ctx, &a.nodes)?;
    }
    if ctx.wants(Format::Svg) {
        ctx.svg("workspace.svg", &svg::workspace_plot(&a.params, &a.workspace, &a.cusps, &a.nodes))?;
        ctx.svg("jointspace.svg", &svg::jointspace_plot(&a))?;
    }
    let exit = if !a.genericity.is_generic {
        EXIT_NON_GENERIC
    } else if a.is_cuspidal() {
        EXIT_CUSPIDAL
    } else {
        EXIT_OK
    };
    Ok((doc, exit))
}

fn ik(ctx: &mut Ctx) -> Result<Value, CliError> {
    let target = ctx.point()?;
    let set = solve_ik_cross_section(ctx.p(), &target)?;
    if ctx.wants(Format::Csv) {
        let rows: Vec<Vec<f64>> = set
            .solutions
            .iter()
            .map(|s| vec![s.config.theta1(), s.config.theta2(), s.config.theta3(), s.multiplicity as f64])
            .collect();
        ctx.csv("ik.csv", &["theta1", "theta2", "theta3", "multiplicity"], &rows)?;
    }
    let mut m = ctx.header("ik");
    m.insert("point".into(), report::point(&target));
    m.insert("ik".into(), report::ik(&set));
    Ok(Value::Object(m))
}

fn fk(ctx: &Ctx) -> Result<Value, CliError> {
    let q = ctx.config(false)?;
    let pose = forward_kinematics(ctx.p(), &q);
    let cs = cross_section(&pose);
    let mut m = ctx.header("fk");
    m.insert("config".into(), report::config(&q));
    m.insert("pose".into(), json!({"x": num(pose.x), "y": num(pose.y), "z": num(pose.z)}));
    m.insert("cross_section".into(), report::point(&cs));
    m.insert("det_jacobian".into(), num(det_jacobian(ctx.p(), q.theta2(), q.theta3())));
    Ok(Value::Object(m))
}

fn critical(ctx: &mut Ctx) -> Result<Value, CliError> {
    let (_, curves, ws) = ctx.traced();
    if ctx.wants(Format::Csv) {
        curve_files(ctx, &curves, &ws)?;
    }
    if ctx.wants(Format::Svg) {
        ctx.svg("workspace.svg", &svg::workspace_plot(ctx.p(), &ws, &[], &[]))?;
    }
    let list: Vec<Value> = curves
        .iter()
        .zip(&ws)
        .map(|(c, w)| {
            json!({
                "vertices": c.vertices.len(),
                "closed": c.closed,
                "collapsed": w.is_collapsed(ctx.p()),
                "image_extent": num(w.extent()),
                "max_abs_det": num(c.vertices.iter().map(|v| det_jacobian(ctx.p(), v.0, v.1).abs()).fold(0.0, f64::max)),
            })
        })
        .collect();
    let mut m = ctx.header("critical");
    m.insert("grid_n".into(), json!(ctx.cli.grid));
    m.insert("curves".into(), Value::Array(list));
    Ok(Value::Object(m))
}

fn cusps(ctx: &mut Ctx) -> Result<Value, CliError> {
    let (_, _, ws) = ctx.traced();
    let cusps = find_cusps(ctx.p(), &ws)?;
    if ctx.wants(Format::Csv) {
        cusp_file(ctx, &cusps)?;
    }
    if ctx.wants(Format::Svg) {
        ctx.svg("workspace.svg", &svg::workspace_plot(ctx.p(), &ws, &cusps, &[]))?;
    }
    let mut m = ctx.header("cusps");
    m.insert("cusps".into(), cusps.iter().map(report::cusp).collect());
    Ok(Value::Object(m))
}

fn nodes(ctx: &mut Ctx) -> Result<Value, CliError> {
    let (_, _, ws) = ctx.traced();
    let nodes = find_nodes(ctx.p(), &ws)?;
    if ctx.wants(Format::Csv) {
        node_file(ctx, &nodes)?;
    }
    if ctx.wants(Format::Svg) {
        ctx.svg("workspace.svg", &svg::workspace_plot(ctx.p(), &ws, &[], &nodes))?;
    }
    let mut m = ctx.header("nodes");
    m.insert("nodes".into(), nodes.iter().map(report::node).collect());
    Ok(Value::Object(m))
}

fn aspects(ctx: &mut Ctx) -> Result<Value, CliError> {
    let a = Analysis::run(ctx.p(), &ctx.options())?;
    if ctx.wants(Format::Svg) {
        ctx.svg("jointspace.svg", &svg::jointspace_plot(&a))?;
    }
    let mut m = ctx.header("aspects");
    m.insert("aspects".into(), report::aspects(&a));
    if ctx.cli.point.is_some() {
        let target = ctx.point()?;
        let labels: Vec<Value> = a
            .label(&target)?
            .iter()
            .map(|l| {
                json!({
                    "config": report::config(&l.config),
                    "multiplicity": l.multiplicity,
                    "aspect": l.aspect,
                    "reduced_aspect": l.reduced,
                    "near_singular": l.near_singular,
                    "on_boundary": l.on_boundary,
                })
            })
            .collect();
        m.insert("point".into(), report::point(&target));
        m.insert("labels".into(), Value::Array(labels));
    }
    Ok(Value::Object(m))
}

fn pseudo(ctx: &mut Ctx) -> Result<Value, CliError> {
    let (_, curves, _) = ctx.traced();
    let ps = compute_pseudosingularities(ctx.p(), &curves)?;
    if ctx.wants(Format::Csv) {
        for (k, c) in ps.curves.iter().enumerate() {
            let rows: Vec<Vec<f64>> = c.iter().map(|v| vec![v.0, v.1]).collect();
            ctx.csv(&format!("pseudo_{k}.csv"), &["theta2", "theta3"], &rows)?;
        }
    }
    let mut m = ctx.header("pseudo");
    m.insert("curves".into(), ps.curves.iter().map(|c| json!({"points": c.len()})).collect());
    m.insert("point_count".into(), json!(ps.point_count()));
    Ok(Value::Object(m))
}

fn path(ctx: &mut Ctx) -> Result<Value, CliError> {
    let (start, goal) = (ctx.config(false)?, ctx.config(true)?);
    let (grid, curves, _) = ctx.traced();
    let aspects = compute_aspects(ctx.p(), &grid, &curves);
    let found = find_nonsingular_path(ctx.p(), &grid, &aspects, &start, &goal)?;
    let mut m = ctx.header("path");
    m.insert("start".into(), report::config(&start));
    m.insert("goal".into(), report::config(&goal));
    m.insert("path".into(), report::path(found.as_ref()));
    match &found {
        Some(jp) => {
            let check = verify_path(ctx.p(), jp);
            m.insert("verified".into(), json!({"valid": check.valid, "min_abs_det": num(check.min_abs_det)}));
            if ctx.wants(Format::Csv) {
                let rows: Vec<Vec<f64>> =
                    jp.configs().iter().map(|q| vec![q.theta1(), q.theta2(), q.theta3()]).collect();
                ctx.csv("path.csv", &["theta1", "theta2", "theta3"], &rows)?;
            }
        }
        None => {
            m.insert("verified".into(), Value::Null);
        }
    }
    Ok(Value::Object(m))
}

/// Without `--out` the SVG goes to standard output.
fn plot(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let (file, body) = match ctx.cli.what {
        PlotKind::Workspace => {
            let (_, _, ws) = ctx.traced();
            let cusps = find_cusps(ctx.p(), &ws)?;
            let nodes = find_nodes(ctx.p(), &ws)?;
            ("workspace.svg", svg::workspace_plot(ctx.p(), &ws, &cusps, &nodes))
        }
        PlotKind::Jointspace => {
            let a = Analysis::run(ctx.p(), &ctx.options())?;
            ("jointspace.svg", svg::jointspace_plot(&a))
        }
        PlotKind::C3s3 => {
            let target = ctx.point()?;
            let set = solve_ik_cross_section(ctx.p(), &target)?;
            ("c3s3.svg", svg::c3s3_plot(ctx.p(), &target, &set))
        }
    };
    if ctx.cli.out.is_none() {
        return Ok(Outcome { stdout: body, exit: EXIT_OK, files: Vec::new() });
    }
    ctx.svg(file, &body)?;
    let names: Vec<String> = ctx.files.iter().map(|f| f.display().to_string()).collect();
    let mut m = ctx.header("plot");
    m.insert("files".into(), json!(names));
    Ok(Outcome { stdout: report::to_text(&Value::Object(m)), exit: EXIT_OK, files: ctx.files })
}
