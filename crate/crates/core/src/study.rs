//! Accuracy studies on families of structured meshes.

use crate::basis::Degree;
use crate::error::{RdsError, Result};
use crate::mesh::Mesh;
use crate::problem::Problem;
use crate::residual::{Discretization, GroupKind, SchemeConfig};
use crate::solver::{solve_steady, SolveOptions, SolveReport};
use crate::space::{combine, Continuity, Space};

const MIN_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationLevel {
    pub cells: usize,
    pub h: f64,
    /// Largest element residual of the interpolated exact solution.
    pub element_max: f64,
    /// Largest boundary residual of the interpolated exact solution.
    pub boundary_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStudy {
    pub levels: Vec<TruncationLevel>,
    pub element_slope: f64,
    pub boundary_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLevel {
    pub cells: usize,
    pub h: f64,
    pub l2_error: f64,
    pub report: SolveReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub levels: Vec<ConvergenceLevel>,
    /// Observed order between consecutive levels.
    pub orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn last_order(&self) -> f64 {
        self.orders.last().copied().unwrap_or(f64::NAN)
    }
}

/// Discretization on the `cells x cells` grid of the problem domain.
pub fn structured_discretization(
    problem: Problem,
    config: SchemeConfig,
    degree: Degree,
    cells: usize,
) -> Result<Discretization> {
    let mesh = Mesh::structured(cells, cells, problem.domain())?;
    let continuity = if config.kind.is_discontinuous() {
        Continuity::Discontinuous
    } else {
        Continuity::Continuous
    };
    Discretization::new(Space::new(mesh, degree, continuity)?, problem, config)
}

/// Residual size of the interpolated exact solution against `h`.
pub fn truncation_study(
    problem: Problem,
    config: SchemeConfig,
    degree: Degree,
    levels: &[usize],
) -> Result<TruncationStudy> {
    check_levels(problem, levels)?;
    let rows = levels
        .iter()
        .map(|&cells| {
            let disc = structured_discretization(problem, config, degree, cells)?;
            let u = disc.space().interpolate(|x| problem.exact(x));
            let (mut element_max, mut boundary_max) = (0.0f64, 0.0f64);
            disc.for_each_group(&u, |g| {
                let m = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                match g.kind {
                    GroupKind::Element(_) => element_max = element_max.max(m),
                    GroupKind::Boundary(_) => boundary_max = boundary_max.max(m),
                    GroupKind::Edge(_) => {}
                }
            })?;
            Ok(TruncationLevel {
                cells,
                h: disc.space().mesh().max_diameter(),
                element_max,
                boundary_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let element: Vec<f64> = rows.iter().map(|r| r.element_max).collect();
    let boundary: Vec<f64> = rows.iter().map(|r| r.boundary_max).collect();
    Ok(TruncationStudy {
        element_slope: log_slope(&h, &element),
        boundary_slope: log_slope(&h, &boundary),
        levels: rows,
    })
}

/// Discrete L2 error of the steady solution on each level.
pub fn convergence_study(
    problem: Problem,
    config: SchemeConfig,
    degree: Degree,
    levels: &[usize],
    options: &SolveOptions,
) -> Result<ConvergenceStudy> {
    check_levels(problem, levels)?;
    let rows = levels
        .iter()
        .map(|&cells| {
            let disc = structured_discretization(problem, config, degree, cells)?;
            let solution = solve_steady(&disc, options)?;
            Ok(ConvergenceLevel {
                cells,
                h: disc.space().mesh().max_diameter(),
                l2_error: l2_error(disc.space(), &solution.u, |x| problem.exact(x)),
                report: solution.report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = rows
        .windows(2)
        .map(|w| (w[0].l2_error / w[1].l2_error).ln() / (w[0].h / w[1].h).ln())
        .collect();
    Ok(ConvergenceStudy { levels: rows, orders })
}

/// `(int (u_h - exact)^2)^(1/2)` by element quadrature.
pub fn l2_error(space: &Space, u: &[f64], exact: impl Fn(crate::vec2::Vec2) -> f64) -> f64 {
    let n = space.local_dofs();
    (0..space.num_elements())
        .map(|k| {
            let local = space.gather(k, u);
            space
                .element(k)
                .volume
                .iter()
                .map(|q| q.weight * (combine(&q.phi, &local, n) - exact(q.position)).powi(2))
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn check_levels(problem: Problem, levels: &[usize]) -> Result<()> {
    if levels.len() < MIN_LEVELS {
        return Err(RdsError::TooFewLevels(levels.len()));
    }
    if !problem.is_smooth() {
        return Err(RdsError::InvalidParameter(format!(
            "problem '{}' has no smooth exact solution",
            problem.name()
        )));
    }
    Ok(())
}
