//! `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rds_core::problem::DEFAULT_VELOCITY;
use rds_core::residual::{DualFlux, LowOrder, TauRule};
use rds_core::solver::{DEFAULT_CFL, DEFAULT_MAX_ITER, DEFAULT_TOL};
use rds_core::{BoundaryFluxRule, Degree, Problem, Rect, SchemeConfig, SchemeKind, Vec2};

use crate::error::CliError;

pub const DEFAULT_LEVELS: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Audit {
    Conservation,
    FluxRecovery,
    Entropy,
    MaxPrinciple,
    Truncation,
    Convergence,
}

impl Audit {
    pub const ALL: [Audit; 6] = [
        Audit::Conservation,
        Audit::FluxRecovery,
        Audit::Entropy,
        Audit::MaxPrinciple,
        Audit::Truncation,
        Audit::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Audit::Conservation => "conservation",
            Audit::FluxRecovery => "flux-recovery",
            Audit::Entropy => "entropy",
            Audit::MaxPrinciple => "max-principle",
            Audit::Truncation => "truncation",
            Audit::Convergence => "convergence",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Audits that repeat the solve on a family of meshes.
    pub fn is_study(self) -> bool {
        matches!(self, Audit::Truncation | Audit::Convergence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Structured { nx: usize, ny: usize, rect: Rect },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub velocity: Vec2,
    pub scheme: SchemeKind,
    pub degree: Degree,
    pub mesh: MeshSpec,
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the monotonicity step limit.
    pub nu: f64,
    pub theta_e: f64,
    pub theta_k: f64,
    pub alpha: Option<f64>,
    pub tau: TauRule,
    pub low_order: LowOrder,
    pub boundary_flux: BoundaryFluxRule,
    pub dual_flux: DualFlux,
    /// Sorted, without duplicates.
    pub audits: Vec<Audit>,
    pub levels: Vec<usize>,
    pub output: PathBuf,
    pub history: bool,
}

impl RunConfig {
    /// Defaults around the required fields.
    pub fn new(problem: &str, scheme: SchemeKind, nx: usize, ny: usize) -> Self {
        Self {
            problem: problem.to_string(),
            velocity: DEFAULT_VELOCITY,
            scheme,
            degree: Degree::P1,
            mesh: MeshSpec::Structured {
                nx,
                ny,
                rect: Rect::UNIT,
            },
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            nu: DEFAULT_CFL,
            theta_e: SchemeConfig::DEFAULT_THETA_E,
            theta_k: SchemeConfig::DEFAULT_THETA_K,
            alpha: None,
            tau: TauRule::default(),
            low_order: LowOrder::default(),
            boundary_flux: BoundaryFluxRule::default(),
            dual_flux: DualFlux::default(),
            audits: Vec::new(),
            levels: DEFAULT_LEVELS.to_vec(),
            output: PathBuf::from("output"),
            history: false,
        }
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        Ok(Problem::by_name(&self.problem, self.velocity)?)
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            kind: self.scheme,
            tau: self.tau,
            theta_e: self.theta_e,
            theta_k: self.theta_k,
            alpha: self.alpha,
            low_order: self.low_order,
            boundary_rule: self.boundary_flux,
            dual_flux: self.dual_flux,
        }
    }

    /// Canonical text; `parse_config` reads it back to an equal value.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("problem", self.problem.clone());
        line("velocity", format!("{}, {}", self.velocity.x, self.velocity.y));
        line("scheme", self.scheme.name().to_string());
        line("degree", self.degree.order().to_string());
        match &self.mesh {
            MeshSpec::Structured { nx, ny, rect } => {
                line("nx", nx.to_string());
                line("ny", ny.to_string());
                line(
                    "rect",
                    format!("{}, {}, {}, {}", rect.xmin, rect.xmax, rect.ymin, rect.ymax),
                );
            }
            MeshSpec::File(path) => line("mesh_file", path.display().to_string()),
        }
        line("tol", self.tol.to_string());
        line("max_iter", self.max_iter.to_string());
        line("nu", self.nu.to_string());
        line("theta_e", self.theta_e.to_string());
        line("theta_k", self.theta_k.to_string());
        line("alpha", self.alpha.map_or("auto".to_string(), |a| a.to_string()));
        line(
            "tau",
            match self.tau {
                TauRule::Scaled => "scaled".to_string(),
                TauRule::Inverse => "inverse".to_string(),
                TauRule::Fixed(t) => t.to_string(),
            },
        );
        line("low_order", self.low_order.name().to_string());
        line("boundary_flux", self.boundary_flux.name().to_string());
        line(
            "dual_flux",
            match self.dual_flux {
                DualFlux::Central => "central",
                DualFlux::Rusanov => "rusanov",
            }
            .to_string(),
        );
        line(
            "audits",
            if self.audits.is_empty() {
                "none".to_string()
            } else {
                self.audits.iter().map(|a| a.name()).collect::<Vec<_>>().join(", ")
            },
        );
        line(
            "levels",
            self.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
        );
        line("output", self.output.display().to_string());
        line("history", self.history.to_string());
        out
    }

    fn validate(&self, lines: &Lines) -> Result<(), CliError> {
        let at = |key: &str, message: String| CliError::Config {
            line: lines.line_of(key),
            message,
        };
        Problem::by_name(&self.problem, self.velocity).map_err(|e| at("problem", e.to_string()))?;
        if self.scheme.p1_only() && self.degree != Degree::P1 {
            return Err(at(
                "degree",
                format!("scheme '{}' supports degree 1 only", self.scheme.name()),
            ));
        }
        if self.scheme.is_limited() && self.low_order == LowOrder::NScheme && self.degree != Degree::P1 {
            return Err(at(
                "degree",
                "the nscheme low-order scheme supports degree 1 only".into(),
            ));
        }
        if let MeshSpec::Structured { nx, ny, .. } = self.mesh {
            if nx == 0 || ny == 0 {
                return Err(at(
                    "nx",
                    format!("mesh needs at least one cell per direction, got {nx} x {ny}"),
                ));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(at("tol", format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(at("nu", format!("nu must lie in (0, 1], got {}", self.nu)));
        }
        for (key, v) in [("theta_e", self.theta_e), ("theta_k", self.theta_k)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(at(key, format!("{key} must be nonnegative, got {v}")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(at("alpha", format!("alpha must be nonnegative, got {a}")));
            }
        }
        if let TauRule::Fixed(t) = self.tau {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(at("tau", format!("tau must be nonnegative, got {t}")));
            }
        }
        if self.audits.iter().any(|a| a.is_study()) {
            if self.levels.len() < 3 {
                return Err(at(
                    "levels",
                    format!("studies need at least 3 levels, got {}", self.levels.len()),
                ));
            }
            if !self.problem()?.is_smooth() {
                return Err(at(
                    "audits",
                    format!("order studies need a smooth problem, '{}' is not", self.problem),
                ));
            }
        }
        if self.levels.contains(&0) || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(at("levels", "levels must be positive and increasing".into()));
        }
        Ok(())
    }
}

/// Line number of each key, for error messages after parsing.
struct Lines {
    keys: Vec<(&'static str, usize)>,
}

impl Lines {
    fn line_of(&self, key: &str) -> usize {
        self.keys.iter().find(|(k, _)| *k == key).map_or(0, |&(_, l)| l)
    }
}

const KEYS: [&str; 22] = [
    "problem",
    "velocity",
    "scheme",
    "degree",
    "nx",
    "ny",
    "rect",
    "mesh_file",
    "tol",
    "max_iter",
    "nu",
    "theta_e",
    "theta_k",
    "alpha",
    "tau",
    "low_order",
    "boundary_flux",
    "dual_flux",
    "audits",
    "levels",
    "output",
    "history",
];

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut values: Vec<(&'static str, usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
            line,
            message: format!("expected 'key = value', found '{content}'"),
        })?;
        let key = key.trim();
        let key = *KEYS.iter().find(|k| **k == key).ok_or_else(|| CliError::Config {
            line,
            message: format!("unknown key '{key}'"),
        })?;
        if let Some(&(_, first, _)) = values.iter().find(|(k, _, _)| *k == key) {
            return Err(CliError::Config {
                line,
                message: format!("duplicate key '{key}' (first set on line {first})"),
            });
        }
        values.push((key, line, value.trim()));
    }
    let lines = Lines {
        keys: values.iter().map(|&(k, l, _)| (k, l)).collect(),
    };
    let get = |key: &str| values.iter().find(|(k, _, _)| *k == key).map(|&(_, l, v)| (l, v));
    let required = |key: &str| {
        get(key).ok_or_else(|| CliError::Config {
            line: 0,
            message: format!("missing required key '{key}'"),
        })
    };

    let (_, problem) = required("problem")?;
    let (line, scheme) = required("scheme")?;
    let scheme = SchemeKind::from_name(scheme).map_err(|e| CliError::Config {
        line,
        message: e.to_string(),
    })?;
    let mesh = match (get("mesh_file"), get("nx"), get("ny")) {
        (Some((line, _)), Some(_), _) | (Some((line, _)), _, Some(_)) => {
            return Err(CliError::Config {
                line,
                message: "give either mesh_file or nx and ny, not both".into(),
            })
        }
        (Some((_, path)), None, None) => {
            if let Some((line, _)) = get("rect") {
                return Err(CliError::Config {
                    line,
                    message: "rect applies to structured meshes only".into(),
                });
            }
            MeshSpec::File(PathBuf::from(path))
        }
        (None, nx, ny) => {
            let (nx, ny) = (nx.ok_or_else(|| missing("nx"))?, ny.ok_or_else(|| missing("ny"))?);
            let rect = match get("rect") {
                Some((line, v)) => {
                    let c: Vec<f64> = list(line, v)?;
                    if c.len() != 4 {
                        return Err(CliError::Config {
                            line,
                            message: format!("rect needs 4 numbers, found {}", c.len()),
                        });
                    }
                    Rect::new(c[0], c[1], c[2], c[3]).map_err(|e| CliError::Config {
                        line,
                        message: e.to_string(),
                    })?
                }
                None => Rect::UNIT,
            };
            MeshSpec::Structured {
                nx: scalar(nx.0, nx.1)?,
                ny: scalar(ny.0, ny.1)?,
                rect,
            }
        }
    };
    let mut config = RunConfig::new(problem, scheme, 1, 1);
    config.mesh = mesh;

    if let Some((line, v)) = get("velocity") {
        let c: Vec<f64> = list(line, v)?;
        if c.len() != 2 {
            return Err(CliError::Config {
                line,
                message: format!("velocity needs 2 numbers, found {}", c.len()),
            });
        }
        config.velocity = Vec2::new(c[0], c[1]);
    }
    if let Some((line, v)) = get("degree") {
        config.degree = Degree::new(scalar(line, v)?).map_err(|e| CliError::Config {
            line,
            message: e.to_string(),
        })?;
    }
    if let Some((line, v)) = get("tol") {
        config.tol = scalar(line, v)?;
    }
    if let Some((line, v)) = get("max_iter") {
        config.max_iter = scalar(line, v)?;
    }
    if let Some((line, v)) = get("nu") {
        config.nu = scalar(line, v)?;
    }
    if let Some((line, v)) = get("theta_e") {
        config.theta_e = scalar(line, v)?;
    }
    if let Some((line, v)) = get("theta_k") {
        config.theta_k = scalar(line, v)?;
    }
    if let Some((line, v)) = get("alpha") {
        config.alpha = if v == "auto" { None } else { Some(scalar(line, v)?) };
    }
    if let Some((line, v)) = get("tau") {
        config.tau = match v {
            "scaled" => TauRule::Scaled,
            "inverse" => TauRule::Inverse,
            _ => TauRule::Fixed(scalar(line, v)?),
        };
    }
    if let Some((line, v)) = get("low_order") {
        config.low_order = LowOrder::from_name(v).map_err(|e| CliError::Config {
            line,
            message: e.to_string(),
        })?;
    }
    if let Some((line, v)) = get("boundary_flux") {
        config.boundary_flux = match v {
            "upwind" => BoundaryFluxRule::Upwind,
            "downwind" => BoundaryFluxRule::Downwind,
            _ => return Err(unknown(line, "boundary flux", v)),
        };
    }
    if let Some((line, v)) = get("dual_flux") {
        config.dual_flux = match v {
            "central" => DualFlux::Central,
            "rusanov" => DualFlux::Rusanov,
            _ => return Err(unknown(line, "dual flux", v)),
        };
    }
    let mut expand_all = false;
    if let Some((line, v)) = get("audits") {
        let mut audits = Vec::new();
        if v != "none" {
            for name in v.split(',').map(str::trim) {
                if name == "all" {
                    expand_all = true;
                    audits.extend(Audit::ALL);
                } else {
                    audits.push(Audit::from_name(name).ok_or_else(|| unknown(line, "audit", name))?);
                }
            }
        }
        audits.sort();
        audits.dedup();
        config.audits = audits;
    }
    if let Some((line, v)) = get("levels") {
        config.levels = list(line, v)?;
    }
    if let Some((_, v)) = get("output") {
        config.output = PathBuf::from(v);
    }
    if let Some((line, v)) = get("history") {
        config.history = scalar(line, v)?;
    }
    // "all" means every audit that applies to the problem.
    if expand_all && !Problem::by_name(&config.problem, config.velocity).is_ok_and(|p| p.is_smooth()) {
        config.audits.retain(|a| !a.is_study());
    }
    config.validate(&lines)?;
    Ok(config)
}

fn missing(key: &str) -> CliError {
    CliError::Config {
        line: 0,
        message: format!("missing required key '{key}' (or give mesh_file)"),
    }
}

fn unknown(line: usize, kind: &str, name: &str) -> CliError {
    CliError::Config {
        line,
        message: format!("unknown {kind} '{name}'"),
    }
}

fn scalar<T: FromStr>(line: usize, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config {
        line,
        message: format!("cannot parse '{v}'"),
    })
}

fn list<T: FromStr>(line: usize, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',').map(|t| scalar(line, t.trim())).collect()
}
