//! Residual distribution schemes.
//!
//! Every scheme produces a list of residual groups: one per element, one per
//! boundary face and, for edge-stabilized schemes, one per interior edge.
//! The nodal equations are `sum over groups containing sigma of Phi_sigma = 0`.

mod assemble;
mod boundary;
mod element;
mod identity;
mod jump;
mod limiter;

pub use assemble::{Discretization, GroupKind, GroupView, ResidualGroup, ResidualSet};
pub use boundary::boundary_residual;
pub use element::{
    fv_median_dual_residual, galerkin_exact, galerkin_interpolated, n_scheme_split, rusanov_split, supg_stabilization,
    tau, total_exact_flux, total_interpolated_flux, MonotoneSplit,
};
pub use identity::{decomposition_identity_check, IdentityReport};
pub use jump::jump_edge_residual;
pub use limiter::{beta_limiter, limiter_threshold, Limited};

use crate::error::{RdsError, Result};
use crate::law::BoundaryFluxRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Galerkin,
    Supg,
    Jump,
    Dg,
    Rusanov,
    NScheme,
    LimitedSupg,
    LimitedJump,
    /// Finite volumes on median dual cells, written as residuals.
    MedianDual,
    DgRdsFirstOrder,
    DgRdsLimited,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 11] = [
        SchemeKind::Galerkin,
        SchemeKind::Supg,
        SchemeKind::Jump,
        SchemeKind::Dg,
        SchemeKind::Rusanov,
        SchemeKind::NScheme,
        SchemeKind::LimitedSupg,
        SchemeKind::LimitedJump,
        SchemeKind::MedianDual,
        SchemeKind::DgRdsFirstOrder,
        SchemeKind::DgRdsLimited,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Galerkin => "galerkin",
            SchemeKind::Supg => "supg",
            SchemeKind::Jump => "jump",
            SchemeKind::Dg => "dg",
            SchemeKind::Rusanov => "rusanov",
            SchemeKind::NScheme => "nscheme",
            SchemeKind::LimitedSupg => "limited-supg",
            SchemeKind::LimitedJump => "limited-jump",
            SchemeKind::MedianDual => "fv",
            SchemeKind::DgRdsFirstOrder => "dgrds-o1",
            SchemeKind::DgRdsLimited => "dgrds-o2",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| RdsError::UnknownName {
                kind: "scheme",
                name: name.to_string(),
            })
    }

    pub fn is_discontinuous(self) -> bool {
        matches!(
            self,
            SchemeKind::Dg | SchemeKind::DgRdsFirstOrder | SchemeKind::DgRdsLimited
        )
    }

    pub fn is_limited(self) -> bool {
        matches!(
            self,
            SchemeKind::LimitedSupg | SchemeKind::LimitedJump | SchemeKind::DgRdsLimited
        )
    }

    /// Whether every element and edge group is a monotone combination `sum c (u_i - u_j)`, `c >= 0`.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            SchemeKind::Rusanov | SchemeKind::NScheme | SchemeKind::DgRdsFirstOrder
        )
    }

    pub fn p1_only(self) -> bool {
        matches!(
            self,
            SchemeKind::NScheme | SchemeKind::MedianDual | SchemeKind::DgRdsFirstOrder | SchemeKind::DgRdsLimited
        )
    }
}

/// Monotone scheme whose residuals feed the limiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowOrder {
    #[default]
    Rusanov,
    NScheme,
}

impl LowOrder {
    pub fn name(self) -> &'static str {
        match self {
            LowOrder::Rusanov => "rusanov",
            LowOrder::NScheme => "nscheme",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rusanov" => Ok(LowOrder::Rusanov),
            "nscheme" => Ok(LowOrder::NScheme),
            _ => Err(RdsError::UnknownName {
                kind: "low-order scheme",
                name: name.to_string(),
            }),
        }
    }
}

/// Streamline parameter `tau_K` with `k_i = f'(u_mean) . int_K grad(phi_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TauRule {
    /// `|K| / (h_K sum |k_i|)`, so that `h_K tau_K` behaves like `h / |f'|`.
    #[default]
    Scaled,
    /// `1 / sum |k_i|`.
    Inverse,
    Fixed(f64),
}

/// How the flux is represented inside an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxForm {
    /// `f(u^h)` evaluated by quadrature.
    Exact,
    /// Lagrange interpolant `sum f(u_i) phi_i`.
    Interpolated,
}

/// Two-point flux used across median dual faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DualFlux {
    #[default]
    Rusanov,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub tau: TauRule,
    /// Edge jump coefficient.
    pub theta_e: f64,
    /// Streamline coefficient of the limited scheme.
    pub theta_k: f64,
    /// Dissipation override; never below the monotonicity bound.
    pub alpha: Option<f64>,
    pub low_order: LowOrder,
    pub boundary_rule: BoundaryFluxRule,
    pub dual_flux: DualFlux,
}

impl SchemeConfig {
    pub const DEFAULT_THETA_E: f64 = 0.01;
    pub const DEFAULT_THETA_K: f64 = 1.0;

    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            tau: TauRule::default(),
            theta_e: Self::DEFAULT_THETA_E,
            theta_k: Self::DEFAULT_THETA_K,
            alpha: None,
            low_order: LowOrder::default(),
            boundary_rule: BoundaryFluxRule::default(),
            dual_flux: DualFlux::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(RdsError::InvalidParameter(format!(
                "{what} must be finite and nonnegative, got {v}"
            )))
        };
        if !(self.theta_e >= 0.0 && self.theta_e.is_finite()) {
            return bad("theta_e", self.theta_e);
        }
        if !(self.theta_k >= 0.0 && self.theta_k.is_finite()) {
            return bad("theta_k", self.theta_k);
        }
        if let Some(a) = self.alpha {
            if !(a >= 0.0 && a.is_finite()) {
                return bad("alpha", a);
            }
        }
        if let TauRule::Fixed(t) = self.tau {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("tau", t);
            }
        }
        Ok(())
    }

    /// Flux representation behind the element totals and boundary residuals.
    pub fn flux_form(&self) -> FluxForm {
        match self.kind {
            SchemeKind::Rusanov | SchemeKind::MedianDual => FluxForm::Interpolated,
            SchemeKind::LimitedSupg | SchemeKind::LimitedJump => match self.low_order {
                LowOrder::Rusanov => FluxForm::Interpolated,
                LowOrder::NScheme => FluxForm::Exact,
            },
            _ => FluxForm::Exact,
        }
    }
}

#[cfg(test)]
mod tests;
