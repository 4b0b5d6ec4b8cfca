use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Matrix3;
use serde_json::{json, Value};

use bjorling_core::bjorling::{adjoint_patch, laplacian_convergence, minimality_report, DomainGrid, SurfacePatch};
use bjorling_core::catalog::{builtin, CatalogEntry, ENTRY_NAMES};
use bjorling_core::search::{CurveFamily, SearchOptions, SearchPlan};
use bjorling_core::symmetry::{
    congruence_test, d4_d8_test, diagonal_line_test, dihedral_search, extract_cpg, reflection_checks, self_adjoint_test,
    self_cpg_test, straight_arc_test, theorem_test, SymmetryReport,
};
use bjorling_core::{AnalyticExpr, Error, Vec3};

use crate::args::{CommonArgs, InputArgs};
use crate::input::{self, input_err, CliError, CliResult, Problem, Source};
use crate::mesh::{export_mesh, GridMesh, MeshFormat};
use crate::parallel;
use crate::report::{select_checks, sha256_hex, CheckRecord, GridRecord, InputRecord, ReportDocument, Settings};

/// What a command produced: a report (unless it only prints) and where it goes.
#[derive(Debug)]
pub struct Outcome {
    pub report: Option<ReportDocument>,
    pub report_out: Option<PathBuf>,
    pub stdout: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if !r.passed => 1,
            _ => 0,
        }
    }
}

fn v3(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn m3(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
}

struct Timer {
    enabled: bool,
    start: Instant,
    last: Instant,
    marks: BTreeMap<String, f64>,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        let now = Instant::now();
        Timer {
            enabled,
            start: now,
            last: now,
            marks: BTreeMap::new(),
        }
    }

    fn mark(&mut self, stage: &str) {
        let now = Instant::now();
        self.marks
            .insert(format!("{stage}_ms"), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }

    fn finish(mut self) -> Option<BTreeMap<String, f64>> {
        if !self.enabled {
            return None;
        }
        self.marks.insert("total_ms".into(), self.start.elapsed().as_secs_f64() * 1e3);
        Some(self.marks)
    }
}

struct Draft {
    command: &'static str,
    inputs: Vec<InputRecord>,
    settings: Settings,
    measured: Vec<CheckRecord>,
    data: Value,
}

impl Draft {
    fn new(command: &'static str, p: &Problem) -> Self {
        Draft {
            command,
            inputs: vec![p.input.clone()],
            settings: Settings {
                grid: Some(GridRecord::from(&p.grid)),
                tol: p.tol,
                quad_tol: p.quad_tol,
                registration_tol: p.registration_tol,
            },
            measured: Vec::new(),
            data: json!({}),
        }
    }

    fn finish(self, requested: &[String], strict: bool, defaults: &[&str], timer: Timer) -> CliResult<ReportDocument> {
        let requested: Vec<String> = if strict {
            requested.to_vec()
        } else {
            requested
                .iter()
                .filter(|r| *r == "all" || self.measured.iter().any(|m| &m.name == *r))
                .cloned()
                .collect()
        };
        let (checks, observations) =
            select_checks(self.measured, &requested, defaults).map_err(|e| CliError::Input(format!("{}: {e}", self.command)))?;
        Ok(ReportDocument {
            tool: crate::report::TOOL,
            version: crate::report::VERSION,
            command: self.command.to_string(),
            inputs: self.inputs,
            settings: self.settings,
            passed: checks.iter().all(|c| c.pass),
            checks,
            observations,
            data: self.data,
            timings: timer.finish(),
        })
    }
}

fn source_of(args: &InputArgs) -> CliResult<Source> {
    match (&args.spec, &args.catalog) {
        (Some(p), None) => {
            if !args.params.is_empty() {
                return input_err("--param applies to --catalog entries only");
            }
            Ok(Source::Spec(p.clone()))
        }
        (None, Some(name)) => Ok(Source::Catalog {
            name: name.clone(),
            params: args.params.iter().map(|s| input::parse_param(s)).collect::<CliResult<_>>()?,
        }),
        (None, None) => input_err("give a spec file or --catalog NAME"),
        (Some(_), Some(_)) => input_err("give either a spec file or --catalog, not both"),
    }
}

fn load(args: &InputArgs) -> CliResult<Problem> {
    input::load(&source_of(args)?, &args.common)
}

fn evaluate(p: &Problem) -> CliResult<SurfacePatch> {
    Ok(parallel::evaluate(p.strip()?, &p.grid, p.quad_tol)?)
}

fn write_mesh(patch: &SurfacePatch, format: MeshFormat, path: &Path) -> CliResult<Value> {
    let mesh = GridMesh {
        grid: patch.grid(),
        points: patch.x(),
        normals: patch.normal(),
        singular: patch.singular(),
    };
    export_mesh(&mesh, format, path).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(json!({
        "path": path.display().to_string(),
        "format": format.name(),
        "vertices": mesh.vertex_count(),
        "faces": mesh.face_count(),
    }))
}

fn patch_summary(patch: &SurfacePatch) -> Value {
    json!({
        "nodes": patch.grid().len(),
        "singular_nodes": patch.singular().iter().filter(|s| **s).count(),
        "max_fprime": patch.max_fprime(),
        "scale": patch.scale(),
    })
}

fn symmetry_record(r: &SymmetryReport) -> CheckRecord {
    CheckRecord::new(r.relation.name(), r.residual, r.tol, r.passed)
}

fn symmetry_json(r: &SymmetryReport) -> Value {
    let details: BTreeMap<&str, f64> = r.details.iter().copied().collect();
    json!({
        "relation": r.relation.name(),
        "residual": r.residual,
        "max_deviation": r.max_deviation,
        "passed": r.passed,
        "orientation": r.orientation.map(|o| format!("{o:?}").to_lowercase()),
        "sigma": r.sigma,
        "s": r.s,
        "matrix": r.matrix.as_ref().map(m3),
        "details": details,
        "note": r.note,
    })
}

/// Runs a test that needs a particular grid shape; the shape being absent is not an error.
fn optional<T>(r: bjorling_core::Result<T>, skipped: &mut Vec<String>, what: &str) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::GridNotSymmetric | Error::GridCoverage(_))) => {
            skipped.push(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn transform(args: &InputArgs) -> CliResult<Outcome> {
    let p = load(args)?;
    let mut timer = Timer::new(args.common.timings);
    let patch = evaluate(&p)?;
    timer.mark("evaluate");
    let mut d = Draft::new("transform", &p);
    let mesh = match &p.mesh_out {
        Some(path) => write_mesh(&patch, p.format, path)?,
        None => Value::Null,
    };
    timer.mark("export");
    d.data = json!({ "patch": patch_summary(&patch), "mesh": mesh });
    Ok(Outcome {
        report: Some(d.finish(&p.checks, p.checks_strict, &[], timer)?),
        report_out: p.report_out,
        stdout: None,
    })
}

fn oracle_deviation(entry: &CatalogEntry, patch: &SurfacePatch) -> Option<f64> {
    let oracle = entry.oracle?;
    let g = patch.grid();
    let mut worst: f64 = 0.0;
    for j in 0..g.nv {
        for i in 0..g.nu {
            let x = patch.x()[g.index(i, j)];
            worst = worst.max((x - oracle.eval(g.u(i), g.v(j))).norm());
        }
    }
    Some(worst)
}

pub fn verify(args: &InputArgs) -> CliResult<Outcome> {
    let p = load(args)?;
    let mut timer = Timer::new(args.common.timings);
    let patch = evaluate(&p)?;
    timer.mark("evaluate");
    let geo = minimality_report(&patch, p.strip()?)?;
    let lap = laplacian_convergence(&patch)?;
    timer.mark("checks");
    let mut d = Draft::new("verify", &p);
    let tol = p.tol;
    d.measured = vec![
        CheckRecord::bounded("isotropy", geo.isotropy_max, tol),
        CheckRecord::bounded("conformality", geo.conformal_max, tol),
        CheckRecord::new(
            "laplacian_convergence",
            if lap.at_noise_floor { 0.0 } else { (lap.ratio - 4.0).abs() / 4.0 },
            0.2,
            lap.passed,
        ),
        CheckRecord::bounded("boundary_curve", geo.boundary_curve_max, tol),
        CheckRecord::bounded("boundary_normal", geo.boundary_normal_max, tol),
    ];
    let mut oracle = Value::Null;
    if let Some(entry) = &p.entry {
        if let Some(dev) = oracle_deviation(entry, &patch) {
            d.measured.push(CheckRecord::bounded("oracle", dev, tol));
            let o = entry.oracle.expect("deviation implies an oracle");
            oracle = json!({ "surface": o.form.name(), "scale": o.scale, "max_deviation": dev });
        }
    }
    let defaults: Vec<String> = d.measured.iter().map(|r| r.name.clone()).collect();
    d.data = json!({
        "patch": patch_summary(&patch),
        "laplacian": {
            "coarse": lap.coarse, "fine": lap.fine, "ratio": lap.ratio, "at_noise_floor": lap.at_noise_floor,
        },
        "laplacian_max": geo.laplacian_max,
        "derivative_fd_max": geo.derivative_fd_max,
        "oracle": oracle,
    });
    let defaults: Vec<&str> = defaults.iter().map(String::as_str).collect();
    Ok(Outcome {
        report: Some(d.finish(&p.checks, p.checks_strict, &defaults, timer)?),
        report_out: p.report_out,
        stdout: None,
    })
}

pub fn cpg(args: &InputArgs, samples: usize) -> CliResult<Outcome> {
    if samples < 3 {
        return input_err("--samples must be at least 3");
    }
    let p = load(args)?;
    let mut timer = Timer::new(args.common.timings);
    let patch = evaluate(&p)?;
    timer.mark("evaluate");
    let mut d = Draft::new("cpg", &p);
    let tol = p.tol;
    let cpg_data = match extract_cpg(&patch, samples, tol) {
        Ok(c) => {
            d.measured.push(CheckRecord::bounded("cpg_planar", c.planarity, tol));
            let sym = c.curve.symmetry_residual;
            d.measured
                .push(CheckRecord::new("cpg_symmetric", sym, tol, sym <= tol && !c.curve.degenerate));
            json!({
                "t": c.t,
                "points": c.points.iter().map(v3).collect::<Vec<_>>(),
                "planarity": c.planarity,
                "vertex": v3(&c.curve.vertex_point),
                "degenerate": c.curve.degenerate,
                "second_derivative_at_vertex": v3(&c.curve.second_derivative_at_vertex),
            })
        }
        Err(Error::CpgNotPlanar { residual, .. }) => {
            d.measured.push(CheckRecord::bounded("cpg_planar", residual, tol));
            d.measured.push(CheckRecord::new("cpg_symmetric", f64::INFINITY, tol, false));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    let selfcpg = self_cpg_test(&patch, tol)?;
    let diag = diagonal_line_test(&patch, tol)?;
    timer.mark("checks");
    d.measured.push(symmetry_record(&selfcpg));
    d.measured.push(symmetry_record(&diag));
    let agree = selfcpg.passed == diag.passed;
    d.measured
        .push(CheckRecord::new("cpg_diagonal_agreement", if agree { 0.0 } else { 1.0 }, 0.0, agree));
    let mut defaults = vec!["cpg_planar", "cpg_symmetric", "cpg_diagonal_agreement"];
    let mut partner = Value::Null;
    if let Some(e) = &p.entry {
        let ok = selfcpg.passed == e.expected.self_cpg;
        d.measured
            .push(CheckRecord::new("expected_self_cpg", selfcpg.residual, tol, ok));
        defaults.push("expected_self_cpg");
        partner = json!(e.expected.cpg_partner);
    }
    d.data = json!({
        "cpg": cpg_data,
        "self_cpg": selfcpg.passed,
        "self_cpg_test": symmetry_json(&selfcpg),
        "diagonal_line_test": symmetry_json(&diag),
        "expected_partner": partner,
    });
    Ok(Outcome {
        report: Some(d.finish(&p.checks, p.checks_strict, &defaults, timer)?),
        report_out: p.report_out,
        stdout: None,
    })
}

fn isotropy(patch: &SurfacePatch) -> f64 {
    let fmax = patch.max_fprime().max(f64::MIN_POSITIVE);
    patch
        .fprime()
        .iter()
        .map(|d| (d.x * d.x + d.y * d.y + d.z * d.z).norm() / (fmax * fmax))
        .fold(0.0, f64::max)
}

pub fn adjoint(args: &InputArgs) -> CliResult<Outcome> {
    let p = load(args)?;
    let mut timer = Timer::new(args.common.timings);
    let patch = evaluate(&p)?;
    let adj = adjoint_patch(&patch);
    timer.mark("evaluate");
    let mut d = Draft::new("adjoint", &p);
    let tol = p.tol;
    let normal_gap = (0..patch.grid().len())
        .filter(|&k| !patch.singular()[k] && !adj.singular()[k])
        .map(|k| (patch.normal()[k] - adj.normal()[k]).norm())
        .fold(0.0, f64::max);
    d.measured.push(CheckRecord::bounded("adjoint_isotropy", isotropy(&adj), tol));
    d.measured.push(CheckRecord::bounded("adjoint_normal", normal_gap, tol));
    let mut defaults = vec!["adjoint_isotropy", "adjoint_normal"];
    let mut skipped = Vec::new();
    let arc = optional(straight_arc_test(&patch, tol), &mut skipped, "straight arc")?;
    if let Some(a) = &arc {
        d.measured.push(symmetry_record(a));
        if p.is_planar_geodesic() {
            defaults.push("adjoint_straight_arc");
        }
    }
    timer.mark("checks");
    let mesh = match &p.mesh_out {
        Some(path) => write_mesh(&adj, p.format, path)?,
        None => Value::Null,
    };
    let g = adj.grid();
    let real_axis: Vec<Value> = (0..g.nv)
        .find(|&j| g.v(j) == 0.0)
        .map(|j| (0..g.nu).map(|i| json!([g.u(i), v3(&adj.x()[g.index(i, j)])])).collect())
        .unwrap_or_default();
    d.data = json!({
        "patch": patch_summary(&adj),
        "mesh": mesh,
        "straight_arc": arc.as_ref().map(symmetry_json),
        "real_axis": real_axis,
        "skipped": skipped,
    });
    Ok(Outcome {
        report: Some(d.finish(&p.checks, p.checks_strict, &defaults, timer)?),
        report_out: p.report_out,
        stdout: None,
    })
}

pub fn symmetry(args: &InputArgs, max_order: u32) -> CliResult<Outcome> {
    if max_order < 2 {
        return input_err("--max-order must be at least 2");
    }
    let p = load(args)?;
    let mut timer = Timer::new(args.common.timings);
    let patch = evaluate(&p)?;
    timer.mark("evaluate");
    let mut d = Draft::new("symmetry", &p);
    let (tol, reg) = (p.tol, p.registration_tol);
    let mut skipped = Vec::new();
    let mut data = serde_json::Map::new();

    if let Some(refl) = optional(reflection_checks(&patch, tol), &mut skipped, "reflections")? {
        d.measured.extend(refl.iter().map(symmetry_record));
        data.insert("reflections".into(), refl.iter().map(symmetry_json).collect());
    }
    if let Some(dd) = optional(d4_d8_test(&patch, tol), &mut skipped, "d4/d8 identities")? {
        d.measured.extend(dd.iter().map(symmetry_record));
        data.insert("dihedral_identities".into(), dd.iter().map(symmetry_json).collect());
    }
    let sa = optional(self_adjoint_test(&patch, reg), &mut skipped, "self-adjointness")?;
    if let Some(sa) = &sa {
        d.measured.push(symmetry_record(&sa.report));
        data.insert(
            "self_adjoint".into(),
            json!({
                "test": symmetry_json(&sa.report),
                "rms": sa.rms(),
                "max_distance": sa.max_distance(),
                "rotation": m3(&sa.fitted.rotation),
                "translation": v3(&sa.fitted.translation),
                "reference_element": sa.reference.element,
                "reference_x_sign": sa.reference.x_sign,
                "reference_deviation": sa.reference.deviation,
                "matches_reference": sa.reference.matches,
            }),
        );
    }
    let ds = optional(dihedral_search(&patch, max_order, reg), &mut skipped, "dihedral search")?;
    if let Some(ds) = &ds {
        d.measured.extend(ds.candidates.iter().map(symmetry_record));
        let generator = ds.generator.map(|g| {
            json!({
                "x_sign": g.x_sign,
                "yz_angle": g.yz_angle,
                "yz_angle_degrees": g.yz_angle.to_degrees(),
                "yz_det": g.yz_det,
                "block_defect": g.block_defect,
                "matrix": ds.generator_matrix().as_ref().map(m3),
            })
        });
        let mut search = json!({
            "max_order": ds.max_order,
            "passing_orders": ds.passing_orders,
            "detected_order": ds.detected_order,
            "continuous": ds.continuous,
            "generator": generator,
        });
        if let Some(order) = p.entry.as_ref().and_then(|e| e.expected.weak_cpg_order) {
            let c = ds.compare_with_weak_family(order / 2 - 1);
            search["weak_family_comparison"] = json!({
                "k": c.k,
                "claimed_order": c.claimed_order,
                "claimed_angle": c.claimed_angle,
                "claimed_order_passes": c.claimed_order_passes,
                "detected_order": c.detected_order,
                "detected_angle": c.detected_angle,
                "order_agrees": c.order_agrees,
                "angle_agrees": c.angle_agrees,
                "generator_deviation": c.generator_deviation,
            });
        }
        data.insert("dihedral_search".into(), search);
    }
    if let Some(th) = optional(theorem_test(&patch, tol), &mut skipped, "adjoint diagonals")? {
        d.measured.push(CheckRecord::new("adjoint_diagonals", th.relation.residual, tol, th.passed));
        data.insert(
            "adjoint_diagonals".into(),
            json!({
                "planarity": th.planarity,
                "tangent_cosine": th.tangent_cosine,
                "plane_cosine": th.plane_cosine,
                "relation": symmetry_json(&th.relation),
                "passed": th.passed,
            }),
        );
    }
    timer.mark("checks");

    let mut defaults = Vec::new();
    if let Some(e) = &p.entry {
        if e.expected.self_adjoint {
            if let Some(sa) = &sa {
                d.measured
                    .push(CheckRecord::new("expected_self_adjoint", sa.max_distance(), reg, sa.passed()));
                defaults.push("expected_self_adjoint");
            }
        }
        if e.expected.weak_cpg_order.is_some() {
            if let Some(ds) = &ds {
                let best = ds
                    .candidates
                    .iter()
                    .filter(|c| c.passed)
                    .map(|c| c.residual)
                    .fold(f64::INFINITY, f64::min);
                d.measured
                    .push(CheckRecord::new("weak_cpg_generator", best, reg, ds.detected_order.is_some()));
                defaults.push("weak_cpg_generator");
            }
        }
    }
    data.insert("patch".into(), patch_summary(&patch));
    data.insert("skipped".into(), json!(skipped));
    d.data = Value::Object(data);
    Ok(Outcome {
        report: Some(d.finish(&p.checks, p.checks_strict, &defaults, timer)?),
        report_out: p.report_out,
        stdout: None,
    })
}

pub fn relate(inputs: &[String], allow_scale: bool, common: &CommonArgs) -> CliResult<Outcome> {
    let [a, b] = inputs else {
        return input_err("relate takes exactly two inputs");
    };
    let pa = input::load(&Source::parse_reference(a)?, common)?;
    let pb = input::load(&Source::parse_reference(b)?, common)?;
    let mut timer = Timer::new(common.timings);
    let (xa, xb) = (evaluate(&pa)?, evaluate(&pb)?);
    timer.mark("evaluate");
    let c = congruence_test(&xa, &xb, allow_scale, pa.registration_tol)?;
    timer.mark("checks");
    let mut d = Draft::new("relate", &pa);
    d.inputs.push(pb.input.clone());
    d.measured
        .push(CheckRecord::new("congruence", c.normalized_residual, c.tol, c.passed));
    d.data = json!({
        "rotation": m3(&c.rotation),
        "translation": v3(&c.translation),
        "scale": c.scale,
        "rms": c.residual,
        "normalized_rms": c.normalized_residual,
        "max_deviation": c.max_deviation,
        "grids": [GridRecord::from(xa.grid()), GridRecord::from(xb.grid())],
    });
    Ok(Outcome {
        report: Some(d.finish(&pa.checks, pa.checks_strict, &["congruence"], timer)?),
        report_out: pa.report_out,
        stdout: None,
    })
}

fn expr(s: &str) -> CliResult<AnalyticExpr> {
    AnalyticExpr::parse(s).map_err(|e| CliError::Input(format!("expression `{s}`: {e}")))
}

/// Default start of the built-in family, a perturbation of the Enneper cubic's coefficients.
pub const NEAR_ENNEPER: [f64; 4] = [1.1, 0.05, -0.9, 0.3];

pub struct SearchArgs<'a> {
    pub spec: Option<&'a Path>,
    pub budget: Option<usize>,
    pub start: Option<Vec<f64>>,
    pub restarts: Option<usize>,
    pub common: &'a CommonArgs,
}

pub fn search(a: SearchArgs<'_>) -> CliResult<Outcome> {
    let common = a.common;
    let (spec, input) = match a.spec {
        Some(path) => {
            let (spec, bytes) = input::read_spec(path)?;
            let input = InputRecord {
                label: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            };
            (Some(spec), input)
        }
        None => (
            None,
            InputRecord {
                label: "builtin:enneper_quartic".into(),
                sha256: sha256_hex(b"builtin:enneper_quartic"),
            },
        ),
    };
    let section = match &spec {
        Some(s) => Some(
            s.search
                .clone()
                .ok_or_else(|| CliError::Input("the spec file has no [search] section".into()))?,
        ),
        None => None,
    };
    let family = match &section {
        Some(s) => CurveFamily::new(
            expr(&s.x_fixed)?,
            s.x_basis.iter().map(|e| expr(e)).collect::<CliResult<_>>()?,
            expr(&s.y_fixed)?,
            s.y_basis.iter().map(|e| expr(e)).collect::<CliResult<_>>()?,
            s.bounds.clone(),
        )?,
        None => CurveFamily::enneper_quartic(2.0),
    };
    let base_grid = match &spec {
        Some(s) => {
            let d = &s.domain;
            DomainGrid::with_base(d.u, d.v, d.nu, d.nv, num_complex::Complex64::new(d.base.0, d.base.1))?
        }
        None => DomainGrid::centered(0.7, 11)?,
    };
    let mut grid = base_grid;
    if let Some(g) = &common.grid {
        let (nu, nv) = input::parse_grid_counts(g)?;
        grid = DomainGrid::with_base(grid.u_range, grid.v_range, nu, nv, grid.base)?;
    }
    if let Some(dm) = &common.domain {
        let (u, v) = input::parse_domain(dm)?;
        grid = DomainGrid::with_base(u, v, grid.nu, grid.nv, grid.base)?;
    }
    let s = section.as_ref();
    let tol = common.tol.or(s.and_then(|s| s.tol)).unwrap_or(input::DEFAULT_TOL);
    let quad_tol = common
        .quad_tol
        .or(spec.as_ref().and_then(|s| s.checks.quad_tol))
        .unwrap_or(input::DEFAULT_QUAD_TOL);
    let budget = a.budget.or(s.and_then(|s| s.budget)).unwrap_or(2000);
    let opts = SearchOptions {
        seed: common.seed.or(s.and_then(|s| s.seed)).unwrap_or(0),
        restarts: a.restarts.or(s.and_then(|s| s.restarts)).unwrap_or(5),
        start: a
            .start
            .or(s.and_then(|s| s.start.clone()))
            .or_else(|| spec.is_none().then(|| NEAR_ENNEPER.to_vec())),
        step_fraction: s.and_then(|s| s.step).unwrap_or(0.05),
        quad_tol,
    };
    let mut timer = Timer::new(common.timings);
    let plan = SearchPlan::new(family.clone(), budget, grid, tol, opts.clone())?;
    let r = parallel::search(&plan)?;
    timer.mark("search");

    let best_curve = family.instantiate(&r.best_theta)?;
    let [x, y, _] = best_curve.components();
    let mut d = Draft {
        command: "search",
        inputs: vec![input],
        settings: Settings {
            grid: Some(GridRecord::from(&grid)),
            tol,
            quad_tol,
            registration_tol: common.registration_tol.unwrap_or(input::DEFAULT_REGISTRATION_TOL),
        },
        measured: vec![CheckRecord::bounded("search_converged", r.residual, tol)],
        data: Value::Null,
    };
    d.data = json!({
        "seed": opts.seed,
        "budget": budget,
        "best_theta": r.best_theta,
        "residual": r.residual,
        "best_restart": r.best_restart,
        "evaluations": r.evaluations,
        "best_curve": { "x": x.to_string(), "y": y.to_string() },
        "restarts": r.restarts.iter().map(|o| json!({
            "index": o.index,
            "start": o.start,
            "best_theta": o.best_theta,
            "residual": o.residual,
            "evaluations": o.evaluations,
        })).collect::<Vec<_>>(),
        "history": r.history.iter().map(|h| json!([h.restart, h.evaluation, h.residual])).collect::<Vec<_>>(),
    });
    let requested = if common.check.is_empty() {
        spec.as_ref().map(|s| s.checks.tests.clone()).unwrap_or_default()
    } else {
        common.check.clone()
    };
    Ok(Outcome {
        report: Some(d.finish(&requested, !common.check.is_empty(), &["search_converged"], timer)?),
        report_out: common
            .report
            .clone()
            .or(spec.and_then(|s| s.output.report.map(PathBuf::from))),
        stdout: None,
    })
}

/// The entry as a spec file that reproduces it.
pub fn entry_spec_text(e: &CatalogEntry) -> String {
    let mut s = String::new();
    let params: Vec<String> = e.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(s, "# catalog entry {} ({})", e.name, params.join(", "));
    let x = &e.expected;
    let _ = writeln!(
        s,
        "# expected: self_cpg={} self_adjoint={} planar_geodesic={} weak_cpg_order={} partner={}",
        x.self_cpg,
        x.self_adjoint,
        x.planar_geodesic,
        x.weak_cpg_order.map_or("-".to_string(), |o| o.to_string()),
        x.cpg_partner.unwrap_or("-"),
    );
    if let Some(o) = e.oracle {
        let _ = writeln!(s, "# closed form: {} scaled by {}", o.form.name(), o.scale);
    }
    let [cx, cy, cz] = e.strip.curve().components();
    let _ = writeln!(s, "\n[curve]\nx = \"{cx}\"\ny = \"{cy}\"\nz = \"{cz}\"");
    match e.strip.phi() {
        Some(phi) => {
            let _ = writeln!(s, "phi = {phi:?}\nside = away");
        }
        None => {
            let [nx, ny, nz] = e.strip.normal();
            let _ = writeln!(s, "\n[normal]\nx = \"{nx}\"\ny = \"{ny}\"\nz = \"{nz}\"");
        }
    }
    let g = &e.default_grid;
    let _ = writeln!(
        s,
        "\n[domain]\nu = {:?}:{:?}\nv = {:?}:{:?}\nnu = {}\nnv = {}",
        g.u_range.0, g.u_range.1, g.v_range.0, g.v_range.1, g.nu, g.nv
    );
    s
}

pub fn catalog(name: Option<&str>, params: &[String], common: &CommonArgs) -> CliResult<Outcome> {
    let Some(name) = name else {
        let mut out = String::new();
        let mut entries = Vec::new();
        for n in ENTRY_NAMES {
            let e = builtin(n, &[])?;
            let params: Vec<String> = e.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let oracle = e.oracle.map_or("-", |o| o.form.name());
            let partner = e.expected.cpg_partner.unwrap_or("-");
            let _ = writeln!(
                out,
                "{n:<22} {:<10} oracle {oracle:<9} partner {partner:<14} self_cpg {}",
                params.join(","),
                e.expected.self_cpg
            );
            entries.push(json!({
                "name": n,
                "parameters": e.parameters,
                "oracle": e.oracle.map(|o| o.form.name()),
                "cpg_partner": e.expected.cpg_partner,
                "self_cpg": e.expected.self_cpg,
                "self_adjoint": e.expected.self_adjoint,
                "weak_cpg_order": e.expected.weak_cpg_order,
                "planar_geodesic": e.expected.planar_geodesic,
            }));
        }
        let report = common.report.as_ref().map(|_| ReportDocument {
            tool: crate::report::TOOL,
            version: crate::report::VERSION,
            command: "catalog".into(),
            inputs: Vec::new(),
            settings: Settings {
                grid: None,
                tol: common.tol.unwrap_or(input::DEFAULT_TOL),
                quad_tol: common.quad_tol.unwrap_or(input::DEFAULT_QUAD_TOL),
                registration_tol: common.registration_tol.unwrap_or(input::DEFAULT_REGISTRATION_TOL),
            },
            checks: Vec::new(),
            observations: Vec::new(),
            passed: true,
            data: json!({ "entries": entries }),
            timings: None,
        });
        return Ok(Outcome {
            report,
            report_out: common.report.clone(),
            stdout: Some(out),
        });
    };
    let parsed: Vec<(String, f64)> = params.iter().map(|s| input::parse_param(s)).collect::<CliResult<_>>()?;
    let borrowed: Vec<(&str, f64)> = parsed.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let entry = builtin(name, &borrowed)?;
    let text = entry_spec_text(&entry);
    match &common.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome {
                report: None,
                report_out: None,
                stdout: None,
            })
        }
        None => Ok(Outcome {
            report: None,
            report_out: None,
            stdout: Some(text),
        }),
    }
}
