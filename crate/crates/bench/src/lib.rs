//! Fixtures shared by the benchmarks.

use rds_core::problem::DEFAULT_VELOCITY;
use rds_core::study::structured_discretization;
use rds_core::{Degree, Discretization, Problem, SchemeConfig, SchemeKind};

pub fn advection() -> Problem {
    Problem::SmoothAdvection {
        velocity: DEFAULT_VELOCITY,
    }
}

/// Discretization of smooth advection on the `cells x cells` unit grid with
/// the interpolated exact solution as state.
pub fn fixture(kind: SchemeKind, degree: Degree, cells: usize) -> (Discretization, Vec<f64>) {
    let problem = advection();
    let disc = structured_discretization(problem, SchemeConfig::new(kind), degree, cells)
        .expect("structured grid for a supported scheme");
    let u = disc.space().interpolate(|x| problem.exact(x));
    (disc, u)
}
