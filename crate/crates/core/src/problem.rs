//! Built-in test problems on the unit square.

use crate::error::{RdsError, Result};
use crate::law::{ConservationLaw, SquareEntropy};
use crate::mesh::Rect;
use crate::vec2::Vec2;

pub const DEFAULT_VELOCITY: Vec2 = Vec2::new(1.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    /// Constant advection of `sin(2 pi s)`, `s` constant along characteristics.
    SmoothAdvection { velocity: Vec2 },
    /// Constant advection of a unit step in `s`.
    StepAdvection { velocity: Vec2 },
    /// Constant advection of a constant state.
    ConstantAdvection { velocity: Vec2, value: f64 },
    /// Steady Burgers with a compression fan that focuses into a shock.
    Burgers,
}

impl Problem {
    pub const NAMES: [&'static str; 4] = ["advection", "advection-step", "advection-constant", "burgers"];

    /// Looks up a problem; `velocity` applies to the advection problems.
    pub fn by_name(name: &str, velocity: Vec2) -> Result<Self> {
        let advection = matches!(name, "advection" | "advection-step" | "advection-constant");
        if advection && !(velocity.norm() > 0.0 && velocity.norm().is_finite()) {
            return Err(RdsError::InvalidParameter(format!(
                "advection velocity must be nonzero and finite, got ({}, {})",
                velocity.x, velocity.y
            )));
        }
        match name {
            "advection" => Ok(Problem::SmoothAdvection { velocity }),
            "advection-step" => Ok(Problem::StepAdvection { velocity }),
            "advection-constant" => Ok(Problem::ConstantAdvection { velocity, value: 1.0 }),
            "burgers" => Ok(Problem::Burgers),
            _ => Err(RdsError::UnknownName {
                kind: "problem",
                name: name.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::SmoothAdvection { .. } => "advection",
            Problem::StepAdvection { .. } => "advection-step",
            Problem::ConstantAdvection { .. } => "advection-constant",
            Problem::Burgers => "burgers",
        }
    }

    pub fn law(&self) -> ConservationLaw {
        match *self {
            Problem::SmoothAdvection { velocity }
            | Problem::StepAdvection { velocity }
            | Problem::ConstantAdvection { velocity, .. } => ConservationLaw::Advection { velocity },
            Problem::Burgers => ConservationLaw::Burgers,
        }
    }

    pub fn entropy(&self) -> SquareEntropy {
        SquareEntropy::new(self.law())
    }

    pub fn domain(&self) -> Rect {
        Rect::UNIT
    }

    /// Whether the exact solution is smooth enough for order studies.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            Problem::SmoothAdvection { .. } | Problem::ConstantAdvection { .. }
        )
    }

    /// Exact solution; also used as boundary data.
    pub fn exact(&self, x: Vec2) -> f64 {
        match *self {
            Problem::SmoothAdvection { velocity } => {
                (2.0 * std::f64::consts::PI * streamline_coordinate(velocity, x)).sin()
            }
            Problem::StepAdvection { velocity } => {
                let s = streamline_coordinate(velocity, x);
                if s > step_threshold(velocity) {
                    1.0
                } else {
                    0.0
                }
            }
            Problem::ConstantAdvection { value, .. } => value,
            Problem::Burgers => burgers_exact(x),
        }
    }

    pub fn boundary_value(&self, x: Vec2) -> f64 {
        self.exact(x)
    }

    /// Direction along which the solution is constant, if any.
    pub fn transport_direction(&self) -> Option<Vec2> {
        match *self {
            Problem::SmoothAdvection { velocity }
            | Problem::StepAdvection { velocity }
            | Problem::ConstantAdvection { velocity, .. } => Some(velocity),
            Problem::Burgers => None,
        }
    }
}

/// `s = (b x - a y) / (|a| + |b|)` for velocity `(a, b)`.
pub fn streamline_coordinate(velocity: Vec2, x: Vec2) -> f64 {
    (velocity.y * x.x - velocity.x * x.y) / (velocity.x.abs() + velocity.y.abs())
}

fn step_threshold(velocity: Vec2) -> f64 {
    let corners = [
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(1.0, 1.0),
    ];
    let s = corners.map(|c| streamline_coordinate(velocity, c));
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lo + hi)
}

const BURGERS_LEFT: f64 = 1.5;
const BURGERS_RIGHT: f64 = -0.5;

fn burgers_exact(p: Vec2) -> f64 {
    let (x, y) = (p.x, p.y);
    if y < 0.5 {
        if x <= BURGERS_LEFT * y {
            BURGERS_LEFT
        } else if x >= 1.0 + BURGERS_RIGHT * y {
            BURGERS_RIGHT
        } else {
            (1.5 - 2.0 * x) / (1.0 - 2.0 * y)
        }
    } else if x < 0.75 + 0.5 * (BURGERS_LEFT + BURGERS_RIGHT) * (y - 0.5) {
        BURGERS_LEFT
    } else {
        BURGERS_RIGHT
    }
}
