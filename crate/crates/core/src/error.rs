use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdsError {
    #[error("degenerate rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    DegenerateRect { xmin: f64, xmax: f64, ymin: f64, ymax: f64 },
    #[error("mesh needs at least one cell in each direction (got {nx} x {ny})")]
    EmptyGrid { nx: usize, ny: usize },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh file line {line}: {message}")]
    MeshFormat { line: usize, message: String },
    #[error("unsupported polynomial degree {0}")]
    UnsupportedDegree(usize),
    #[error("no quadrature rule of exactness {requested} (maximum {max})")]
    QuadratureDegree { requested: usize, max: usize },
    #[error("residuals do not balance: sum {sum:e} exceeds tolerance {tol:e}")]
    ConservationViolation { sum: f64, tol: f64 },
    #[error("{scheme} requires {requirement}")]
    SchemeRequirement {
        scheme: &'static str,
        requirement: &'static str,
    },
    #[error("inflow weights vanish while some outflow weight is positive")]
    DegenerateUpwind,
    #[error("interface flux needs two adjacent elements")]
    BoundaryEdge,
    #[error("study needs at least 3 mesh levels (got {0})")]
    TooFewLevels(usize),
    #[error("non-finite value at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, RdsError>;
