//! Solve, audit and write artifacts for one configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rds_core::entropy::entropy_audit;
use rds_core::flux_recovery::flux_audit;
use rds_core::solver::{inflow_bounds, initial_guess, solve_from, SolveOptions, SolveReport, DEFAULT_PLATEAU};
use rds_core::study::{convergence_study, truncation_study};
use rds_core::{Continuity, Degree, Discretization, Mesh, Rect, SchemeKind, Space};

use crate::config::{parse_config, Audit, MeshSpec, RunConfig};
use crate::error::CliError;

pub const CONSERVATION_TOL: f64 = 1e-12;
pub const RECONSTRUCTION_TOL: f64 = 1e-12;
pub const CONSISTENCY_TOL: f64 = 1e-13;
pub const BOUND_TOL: f64 = 1e-13;
pub const SLOPE_TOL: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Requested audits only.
    Run,
    /// Every audit that applies to the problem.
    Audit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    pub audit: Audit,
    pub pass: bool,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub audits: Vec<AuditResult>,
    pub solve: SolveReport,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.audits.iter().all(|a| a.pass)
    }
}

/// Expected orders on smooth solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTarget {
    pub element_slope: f64,
    pub boundary_slope: f64,
    pub min_order: f64,
    pub max_order: f64,
}

pub fn is_first_order(kind: SchemeKind) -> bool {
    matches!(
        kind,
        SchemeKind::Rusanov | SchemeKind::NScheme | SchemeKind::MedianDual | SchemeKind::DgRdsFirstOrder
    )
}

pub fn order_target(kind: SchemeKind, degree: Degree) -> OrderTarget {
    let k = degree.order() as f64;
    // Boundary residuals are interpolation errors integrated over a face.
    let boundary_slope = k + 2.0;
    let element_slope = match kind {
        // Unscaled dissipation inside each element dominates the residual.
        SchemeKind::DgRdsFirstOrder => 1.0,
        _ if is_first_order(kind) => 2.0,
        _ => k + 2.0,
    };
    let (min_order, max_order) = if is_first_order(kind) {
        (0.7, 1.3)
    } else if degree == Degree::P1 {
        (1.7, f64::INFINITY)
    } else {
        (2.6, f64::INFINITY)
    };
    OrderTarget {
        element_slope,
        boundary_slope,
        min_order,
        max_order,
    }
}

/// Reads `path` and runs it; relative paths in the file resolve against its
/// directory.
pub fn run_file(path: &Path, mode: Mode) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config = parse_config(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    execute(&config, base, mode)
}

pub fn build_discretization(config: &RunConfig, base: &Path) -> Result<Discretization, CliError> {
    let mesh = match &config.mesh {
        MeshSpec::Structured { nx, ny, rect } => Mesh::structured(*nx, *ny, *rect)?,
        MeshSpec::File(path) => Mesh::read(&base.join(path))?,
    };
    let continuity = if config.scheme.is_discontinuous() {
        Continuity::Discontinuous
    } else {
        Continuity::Continuous
    };
    let space = Space::new(mesh, config.degree, continuity)?;
    Ok(Discretization::new(space, config.problem()?, config.scheme_config())?)
}

pub fn execute(config: &RunConfig, base: &Path, mode: Mode) -> Result<Outcome, CliError> {
    let problem = config.problem()?;
    let audits: Vec<Audit> = match mode {
        Mode::Run => config.audits.clone(),
        Mode::Audit => Audit::ALL
            .into_iter()
            .filter(|a| !a.is_study() || problem.is_smooth())
            .collect(),
    };
    let disc = build_discretization(config, base)?;
    let out_dir = base.join(&config.output);
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let mut files = Vec::new();
    let mut write = |name: &str, text: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
        Ok(())
    };

    let start = initial_guess(&disc);
    // A monotone update keeps every iterate inside the range of the data it
    // starts from.
    let bounds = start
        .iter()
        .fold(inflow_bounds(&disc), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let options = SolveOptions {
        tol: config.tol,
        max_iter: config.max_iter,
        cfl: config.nu,
        plateau: DEFAULT_PLATEAU,
        bounds: audits.contains(&Audit::MaxPrinciple).then_some(bounds),
    };
    let solution = solve_from(&disc, start, &options, |_, _| {})?;
    let u = &solution.u;

    write("solution.dat", solution_text(&disc, u))?;
    if config.history {
        write("residual_history.csv", history_csv(&solution.report))?;
    }

    let mut results = Vec::new();
    for &audit in &audits {
        let result = match audit {
            Audit::Conservation => {
                let defect = disc.residual_set(u)?.max_conservation_defect();
                AuditResult {
                    audit,
                    pass: defect <= CONSERVATION_TOL,
                    summary: format!("max_defect={} tol={}", num(defect), num(CONSERVATION_TOL)),
                }
            }
            Audit::FluxRecovery => {
                let rows = flux_audit(&disc, u)?;
                let mut csv = String::from("element,edge,tail,head,flux,reconstruction_defect,consistency_defect\n");
                for r in &rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{}",
                        r.element,
                        r.edge,
                        r.tail,
                        r.head,
                        num(r.flux),
                        num(r.reconstruction_defect),
                        num(r.consistency_defect)
                    );
                }
                write("flux_audit.csv", csv)?;
                let rec = rows.iter().map(|r| r.reconstruction_defect).fold(0.0, f64::max);
                let con = rows.iter().map(|r| r.consistency_defect).fold(0.0, f64::max);
                AuditResult {
                    audit,
                    pass: rec <= RECONSTRUCTION_TOL && con <= CONSISTENCY_TOL,
                    summary: format!("max_reconstruction={} max_consistency={}", num(rec), num(con)),
                }
            }
            Audit::Entropy => {
                let report = entropy_audit(&disc, u)?;
                let mut csv = String::from("kind,index,value,alpha,pass\n");
                for e in &report.elements {
                    let _ = writeln!(csv, "element,{},{},,{}", e.element, num(e.defect), e.pass);
                }
                for f in &report.interfaces {
                    let _ = writeln!(csv, "face,{},{},{},{}", f.edge, num(f.gap), num(f.alpha), f.pass);
                }
                write("entropy_audit.csv", csv)?;
                let min_production = report.elements.iter().map(|e| e.defect).fold(f64::INFINITY, f64::min);
                let max_gap = report
                    .interfaces
                    .iter()
                    .map(|f| f.gap)
                    .fold(f64::NEG_INFINITY, f64::max);
                let failures = report.elements.iter().filter(|e| !e.pass).count()
                    + report.interfaces.iter().filter(|f| !f.pass).count();
                AuditResult {
                    audit,
                    pass: report.all_pass(),
                    summary: format!(
                        "min_element_production={} max_face_gap={} failures={}",
                        num(min_production),
                        num(max_gap),
                        failures
                    ),
                }
            }
            Audit::MaxPrinciple => {
                let v = solution.report.bound_violation;
                AuditResult {
                    audit,
                    pass: v <= BOUND_TOL,
                    summary: format!(
                        "bounds=[{}, {}] max_violation={} tol={}",
                        num(bounds.0),
                        num(bounds.1),
                        num(v),
                        num(BOUND_TOL)
                    ),
                }
            }
            Audit::Truncation => {
                let study = truncation_study(problem, config.scheme_config(), config.degree, &config.levels)?;
                let target = order_target(config.scheme, config.degree);
                let mut csv = String::from("cells,h,element_max,boundary_max\n");
                for l in &study.levels {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        l.cells,
                        num(l.h),
                        num(l.element_max),
                        num(l.boundary_max)
                    );
                }
                write("truncation.csv", csv)?;
                AuditResult {
                    audit,
                    pass: (study.element_slope - target.element_slope).abs() <= SLOPE_TOL
                        && (study.boundary_slope - target.boundary_slope).abs() <= SLOPE_TOL,
                    summary: format!(
                        "element_slope={} expected={} boundary_slope={} expected={}",
                        num(study.element_slope),
                        target.element_slope,
                        num(study.boundary_slope),
                        target.boundary_slope
                    ),
                }
            }
            Audit::Convergence => {
                let study =
                    convergence_study(problem, config.scheme_config(), config.degree, &config.levels, &options)?;
                let target = order_target(config.scheme, config.degree);
                let mut csv = String::from("cells,h,l2_error,iterations,converged,order\n");
                for (i, l) in study.levels.iter().enumerate() {
                    let order = if i == 0 {
                        String::new()
                    } else {
                        num(study.orders[i - 1])
                    };
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        l.cells,
                        num(l.h),
                        num(l.l2_error),
                        l.report.iterations,
                        l.report.converged,
                        order
                    );
                }
                write("convergence.csv", csv)?;
                let last = study.last_order();
                AuditResult {
                    audit,
                    pass: last >= target.min_order && last <= target.max_order,
                    summary: format!(
                        "last_order={} range=[{}, {}]",
                        num(last),
                        target.min_order,
                        target.max_order
                    ),
                }
            }
        };
        results.push(result);
    }

    write("report.txt", report_text(config, &disc, &solution.report, &results))?;
    Ok(Outcome {
        audits: results,
        solve: solution.report,
        files,
    })
}

/// Writes the structured `nx x ny` mesh of the unit square to `out`.
pub fn generate_mesh(nx: usize, ny: usize, out: &Path) -> Result<(), CliError> {
    let mesh = Mesh::structured(nx, ny, Rect::UNIT)?;
    fs::write(out, mesh.to_text()).map_err(|e| CliError::io(out, e))
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn solution_text(disc: &Discretization, u: &[f64]) -> String {
    let mut out = String::from("# x y u\n");
    for (x, v) in disc.space().layout().coords().iter().zip(u) {
        let _ = writeln!(out, "{} {} {}", num(x.x), num(x.y), num(*v));
    }
    out
}

fn history_csv(report: &SolveReport) -> String {
    let mut out = String::from("iteration,max_residual,relative_residual\n");
    let initial = report.initial_norm();
    for (i, r) in report.history.iter().enumerate() {
        let rel = if initial > 0.0 { r / initial } else { 0.0 };
        let _ = writeln!(out, "{},{},{}", i, num(*r), num(rel));
    }
    out
}

fn report_text(config: &RunConfig, disc: &Discretization, solve: &SolveReport, audits: &[AuditResult]) -> String {
    let mut out = String::from("[config]\n");
    out.push_str(&config.render());
    let mesh = disc.space().mesh();
    let _ = writeln!(out, "\n[mesh]");
    let _ = writeln!(out, "elements = {}", mesh.num_elements());
    let _ = writeln!(out, "vertices = {}", mesh.vertices().len());
    let _ = writeln!(out, "dofs = {}", disc.num_dofs());
    let _ = writeln!(out, "h = {}", num(mesh.max_diameter()));
    let _ = writeln!(out, "\n[solve]");
    let _ = writeln!(out, "iterations = {}", solve.iterations);
    let _ = writeln!(out, "converged = {}", solve.converged);
    let _ = writeln!(out, "initial_residual = {}", num(solve.initial_norm()));
    let _ = writeln!(out, "final_residual = {}", num(solve.final_norm()));
    let _ = writeln!(out, "relative_residual = {}", num(solve.relative_norm()));
    if let Some(p) = solve.plateau {
        let _ = writeln!(out, "plateau = {}", num(p));
    }
    let _ = writeln!(out, "\n[audits]");
    for a in audits {
        let _ = writeln!(
            out,
            "{} {}: {}",
            if a.pass { "PASS" } else { "FAIL" },
            a.audit.name(),
            a.summary
        );
    }
    let status = if audits.iter().all(|a| a.pass) { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "\nstatus = {status}");
    out
}
