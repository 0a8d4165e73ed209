//! Explicit pseudo-time iteration `u <- u - omega * R(u)` to a steady state,
//! with local steps from the nodal sums of monotonicity coefficients.

use std::time::{Duration, Instant};

use crate::error::{RdsError, Result};
use crate::mesh::Rect;
use crate::residual::Discretization;
use crate::vec2::Vec2;

pub const DEFAULT_CFL: f64 = 0.9;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Iterations without a 0.1% improvement of the best norm before giving up.
pub const DEFAULT_PLATEAU: usize = 5000;
/// Absolute residual norm treated as converged whatever the initial norm.
const ABSOLUTE_FLOOR: f64 = 1e-14;

/// `omega_i = cfl / c_i`, or `fallback` where the coefficient sum vanishes.
pub fn compute_omega(coefficient_sums: &[f64], cfl: f64, fallback: f64) -> Vec<f64> {
    coefficient_sums
        .iter()
        .map(|&c| if c > 0.0 { cfl / c } else { fallback })
        .collect()
}

/// `cfl * h / max |f'(u_i)|` with `h` the largest element diameter.
pub fn fallback_step(disc: &Discretization, u: &[f64], cfl: f64) -> f64 {
    let h = disc.space().mesh().max_diameter();
    let speed = u.iter().map(|&v| disc.law().jacobian(v).norm()).fold(0.0, f64::max);
    if speed > 0.0 {
        cfl * h / speed
    } else {
        cfl * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop when the max nodal residual falls below `tol` times its initial value.
    pub tol: f64,
    pub max_iter: usize,
    pub cfl: f64,
    pub plateau: usize,
    /// Interval every iterate is checked against.
    pub bounds: Option<(f64, f64)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            cfl: DEFAULT_CFL,
            plateau: DEFAULT_PLATEAU,
            bounds: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(RdsError::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(RdsError::InvalidParameter(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if let Some((lo, hi)) = self.bounds {
            if !(lo <= hi) {
                return Err(RdsError::InvalidParameter(format!("empty bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Max nodal residual before each update, then after the last one.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Best relative norm when the iteration stalled.
    pub plateau: Option<f64>,
    /// Largest excursion of any iterate outside `SolveOptions::bounds`.
    pub bound_violation: f64,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn initial_norm(&self) -> f64 {
        self.history.first().copied().unwrap_or(0.0)
    }

    pub fn final_norm(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }

    pub fn relative_norm(&self) -> f64 {
        relative(self.final_norm(), self.initial_norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: Vec<f64>,
    pub report: SolveReport,
}

/// Inflow data carried along the transport direction where there is one,
/// otherwise the mean boundary value.
pub fn initial_guess(disc: &Discretization) -> Vec<f64> {
    let problem = disc.problem();
    let coords = disc.space().layout().coords();
    match problem.transport_direction() {
        Some(a) => {
            let rect = problem.domain();
            coords
                .iter()
                .map(|&x| problem.boundary_value(characteristic_foot(rect, x, a)))
                .collect()
        }
        None => {
            let (sum, count) = (0..disc.space().mesh().boundary_edges().len())
                .flat_map(|b| disc.boundary_data(b).iter())
                .fold((0.0, 0usize), |(s, c), &v| (s + v, c + 1));
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            vec![mean; coords.len()]
        }
    }
}

/// Where the backward characteristic through `x` leaves `rect`.
pub fn characteristic_foot(rect: Rect, x: Vec2, velocity: Vec2) -> Vec2 {
    let exit = |pos: f64, speed: f64, lo: f64, hi: f64| {
        if speed > 0.0 {
            (pos - lo) / speed
        } else if speed < 0.0 {
            (pos - hi) / speed
        } else {
            f64::INFINITY
        }
    };
    let t = exit(x.x, velocity.x, rect.xmin, rect.xmax)
        .min(exit(x.y, velocity.y, rect.ymin, rect.ymax))
        .max(0.0);
    if t.is_finite() {
        x - velocity * t
    } else {
        x
    }
}

/// Smallest and largest boundary datum.
pub fn inflow_bounds(disc: &Discretization) -> (f64, f64) {
    (0..disc.space().mesh().boundary_edges().len())
        .flat_map(|b| disc.boundary_data(b).iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

pub fn solve_steady(disc: &Discretization, options: &SolveOptions) -> Result<Solution> {
    solve_from(disc, initial_guess(disc), options, |_, _| {})
}

/// Iterates from `u`, calling `observe(iteration, u)` after every update.
pub fn solve_from(
    disc: &Discretization,
    mut u: Vec<f64>,
    options: &SolveOptions,
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<Solution> {
    options.validate()?;
    if u.len() != disc.num_dofs() {
        return Err(RdsError::InvalidParameter(format!(
            "initial guess has {} values, space has {} degrees of freedom",
            u.len(),
            disc.num_dofs()
        )));
    }
    let start = Instant::now();
    let n = u.len();
    let mut residual = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut history = Vec::new();
    let mut bound_violation = excursion(&u, options.bounds);
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut plateau = None;
    let mut converged = false;
    let mut iterations = 0;

    loop {
        disc.residual_and_weights(&u, &mut residual, &mut weights)?;
        if residual.iter().any(|r| !r.is_finite()) {
            return Err(RdsError::Diverged { iteration: iterations });
        }
        let norm = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        history.push(norm);
        let initial = history[0];
        if norm <= options.tol * initial || norm <= ABSOLUTE_FLOOR {
            converged = true;
            break;
        }
        if iterations == options.max_iter {
            break;
        }
        if norm < 0.999 * best {
            best = norm;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= options.plateau {
                plateau = Some(relative(best, initial));
                break;
            }
        }
        let fallback = fallback_step(disc, &u, options.cfl);
        for ((ui, &r), &c) in u.iter_mut().zip(&residual).zip(&weights) {
            let omega = if c > 0.0 { options.cfl / c } else { fallback };
            *ui -= omega * r;
        }
        iterations += 1;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(RdsError::Diverged { iteration: iterations });
        }
        bound_violation = bound_violation.max(excursion(&u, options.bounds));
        observe(iterations, &u);
    }

    Ok(Solution {
        u,
        report: SolveReport {
            iterations,
            history,
            converged,
            plateau,
            bound_violation,
            wall_time: start.elapsed(),
        },
    })
}

fn relative(norm: f64, initial: f64) -> f64 {
    if initial > 0.0 {
        norm / initial
    } else {
        0.0
    }
}

fn excursion(u: &[f64], bounds: Option<(f64, f64)>) -> f64 {
    let Some((lo, hi)) = bounds else { return 0.0 };
    u.iter().fold(0.0, |m: f64, &v| m.max(v - hi).max(lo - v))
}
