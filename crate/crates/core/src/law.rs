//! Scalar conservation laws `div f(u) = 0`, their square entropy pair and
//! two-point fluxes.

use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConservationLaw {
    /// `f(u) = velocity * u`.
    Advection { velocity: Vec2 },
    /// `f(u) = (u^2 / 2, u)`: Burgers in `x` with `y` as time.
    Burgers,
}

impl ConservationLaw {
    pub fn name(&self) -> &'static str {
        match self {
            ConservationLaw::Advection { .. } => "advection",
            ConservationLaw::Burgers => "burgers",
        }
    }

    pub fn flux(&self, u: f64) -> Vec2 {
        match *self {
            ConservationLaw::Advection { velocity } => velocity * u,
            ConservationLaw::Burgers => Vec2::new(0.5 * u * u, u),
        }
    }

    pub fn jacobian(&self, u: f64) -> Vec2 {
        match *self {
            ConservationLaw::Advection { velocity } => velocity,
            ConservationLaw::Burgers => Vec2::new(u, 1.0),
        }
    }

    /// `(f(a) - f(b)) / (a - b)`, the Jacobian when `a == b`.
    pub fn secant(&self, a: f64, b: f64) -> Vec2 {
        match *self {
            ConservationLaw::Advection { velocity } => velocity,
            ConservationLaw::Burgers => Vec2::new(0.5 * (a + b), 1.0),
        }
    }

    /// Averaged Jacobian such that `|K| avg . grad(u^h)` equals the exact
    /// boundary flux of a linear `u^h` over a triangle.
    pub fn linearized_jacobian(&self, nodal: &[f64]) -> Vec2 {
        match *self {
            ConservationLaw::Advection { velocity } => velocity,
            ConservationLaw::Burgers => Vec2::new(nodal.iter().sum::<f64>() / nodal.len() as f64, 1.0),
        }
    }

    /// Largest `|f'(w) . n|` for `w` between `a` and `b`.
    pub fn max_wave_speed(&self, a: f64, b: f64, n: Vec2) -> f64 {
        self.jacobian(a).dot(n).abs().max(self.jacobian(b).dot(n).abs())
    }
}

/// `U(u) = u^2 / 2` with its entropy flux `g` and potential `theta = v f - g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareEntropy {
    pub law: ConservationLaw,
}

impl SquareEntropy {
    pub fn new(law: ConservationLaw) -> Self {
        Self { law }
    }

    pub fn entropy(&self, u: f64) -> f64 {
        0.5 * u * u
    }

    pub fn variable(&self, u: f64) -> f64 {
        u
    }

    pub fn entropy_flux(&self, u: f64) -> Vec2 {
        match self.law {
            ConservationLaw::Advection { velocity } => velocity * (0.5 * u * u),
            ConservationLaw::Burgers => Vec2::new(u * u * u / 3.0, 0.5 * u * u),
        }
    }

    pub fn potential(&self, u: f64) -> Vec2 {
        self.law.flux(u) * self.variable(u) - self.entropy_flux(u)
    }
}

/// Choice of the boundary state selection in `F_n(u, u_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryFluxRule {
    /// Exterior state where the characteristic enters the domain,
    /// `f'(u) . n < 0` with `n` the outward normal.
    #[default]
    Upwind,
    /// Exterior state where `f'(u) . n > 0`.
    Downwind,
}

impl BoundaryFluxRule {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryFluxRule::Upwind => "upwind",
            BoundaryFluxRule::Downwind => "downwind",
        }
    }

    pub fn uses_exterior(&self, speed: f64) -> bool {
        match self {
            BoundaryFluxRule::Upwind => speed < 0.0,
            BoundaryFluxRule::Downwind => speed > 0.0,
        }
    }
}

/// `F_n(u, u_b)`; the switch is evaluated at the interior state `u`.
pub fn upwind_boundary_flux(law: &ConservationLaw, u: f64, u_b: f64, n: Vec2, rule: BoundaryFluxRule) -> f64 {
    if rule.uses_exterior(law.jacobian(u).dot(n)) {
        law.flux(u_b).dot(n)
    } else {
        law.flux(u).dot(n)
    }
}

/// Local Lax-Friedrichs flux through a (possibly scaled) normal `n`.
pub fn rusanov_interface_flux(law: &ConservationLaw, ul: f64, ur: f64, n: Vec2) -> f64 {
    let alpha = law.max_wave_speed(ul, ur, n);
    0.5 * (law.flux(ul) + law.flux(ur)).dot(n) - 0.5 * alpha * (ur - ul)
}
