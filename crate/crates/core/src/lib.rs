//! Residual distribution schemes for steady scalar conservation laws on
//! triangular meshes, with locally conservative flux recovery and entropy
//! checks.

pub mod basis;
pub mod dg_rds;
pub mod entropy;
pub mod error;
pub mod flux_recovery;
pub mod law;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod residual;
pub mod solver;
pub mod space;
pub mod study;
pub mod vec2;

pub use basis::Degree;
pub use error::{RdsError, Result};
pub use law::{BoundaryFluxRule, ConservationLaw, SquareEntropy};
pub use mesh::{Mesh, Rect};
pub use problem::Problem;
pub use residual::{Discretization, SchemeConfig, SchemeKind};
pub use space::{Continuity, DofLayout, Space};
pub use vec2::Vec2;
