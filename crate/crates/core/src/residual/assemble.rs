use super::boundary::boundary_residual;
use super::element::{
    fv_median_dual_residual, galerkin_exact, n_scheme_split, rusanov_split, supg_stabilization, supg_weights, tau,
    total_exact_flux, total_interpolated_flux, MonotoneSplit,
};
use super::jump::jump_edge_residual;
use super::limiter::{beta_limiter, limiter_threshold};
use super::{FluxForm, LowOrder, SchemeConfig, SchemeKind};
use crate::basis::MAX_LOCAL;
use crate::dg_rds;
use crate::error::{RdsError, Result};
use crate::law::{rusanov_interface_flux, ConservationLaw};
use crate::problem::Problem;
use crate::space::{combine, Continuity, Space};

/// What a residual group is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Element(usize),
    /// Domain-boundary face, by edge id.
    Boundary(usize),
    /// Interior edge.
    Edge(usize),
}

/// Borrowed view of one group while assembling.
#[derive(Debug, Clone, Copy)]
pub struct GroupView<'a> {
    pub kind: GroupKind,
    pub dofs: &'a [usize],
    pub values: &'a [f64],
    /// Value the residuals must sum to.
    pub total: f64,
    /// Size of the flux terms behind `total`, for relative checks.
    pub magnitude: f64,
    /// Per-node share of the pseudo-time step denominators.
    pub weights: &'a [f64],
    /// Row-major `c_ij` of a monotone group, `dofs.len()` squared.
    pub coefficients: Option<&'a [f64]>,
    pub alpha: Option<f64>,
    /// The limiter saw a negligible total and distributed nothing.
    pub bypassed: bool,
}

impl GroupView<'_> {
    pub fn conservation_defect(&self) -> f64 {
        conservation_defect(self.values, self.total, self.magnitude)
    }
}

fn conservation_defect(values: &[f64], total: f64, magnitude: f64) -> f64 {
    let sum: f64 = values.iter().sum();
    let scale = magnitude + values.iter().map(|v| v.abs()).sum::<f64>();
    if scale == 0.0 {
        (sum - total).abs()
    } else {
        (sum - total).abs() / scale
    }
}

/// Owned copy of a group.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualGroup {
    pub kind: GroupKind,
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
    pub total: f64,
    pub magnitude: f64,
    pub weights: Vec<f64>,
    pub coefficients: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub bypassed: bool,
}

impl ResidualGroup {
    pub fn from_view(v: &GroupView<'_>) -> Self {
        Self {
            kind: v.kind,
            dofs: v.dofs.to_vec(),
            values: v.values.to_vec(),
            total: v.total,
            magnitude: v.magnitude,
            weights: v.weights.to_vec(),
            coefficients: v.coefficients.map(<[f64]>::to_vec),
            alpha: v.alpha,
            bypassed: v.bypassed,
        }
    }

    /// `|sum Phi - total|` relative to the size of the terms involved.
    pub fn conservation_defect(&self) -> f64 {
        conservation_defect(&self.values, self.total, self.magnitude)
    }

    /// `c_ij` of a monotone group.
    pub fn coefficient(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.dofs.len();
        self.coefficients.as_ref().map(|c| c[i * n + j])
    }
}

/// All residual groups of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    pub groups: Vec<ResidualGroup>,
}

impl ResidualSet {
    /// Nodal sums `sum over groups of Phi_sigma`.
    pub fn nodal(&self, num_dofs: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_dofs];
        for g in &self.groups {
            for (&d, &v) in g.dofs.iter().zip(&g.values) {
                out[d] += v;
            }
        }
        out
    }

    pub fn max_conservation_defect(&self) -> f64 {
        self.groups
            .iter()
            .map(ResidualGroup::conservation_defect)
            .fold(0.0, f64::max)
    }

    pub fn elements(&self) -> impl Iterator<Item = &ResidualGroup> {
        self.groups.iter().filter(|g| matches!(g.kind, GroupKind::Element(_)))
    }
}

/// A scheme on a space for a problem, with boundary data sampled at the
/// boundary quadrature points.
#[derive(Debug, Clone)]
pub struct Discretization {
    space: Space,
    problem: Problem,
    law: ConservationLaw,
    config: SchemeConfig,
    /// One entry per boundary edge, in `Mesh::boundary_edges` order.
    boundary_data: Vec<Vec<f64>>,
}

impl Discretization {
    pub fn new(space: Space, problem: Problem, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        let kind = config.kind;
        let wanted = if kind.is_discontinuous() {
            Continuity::Discontinuous
        } else {
            Continuity::Continuous
        };
        if space.layout().continuity() != wanted {
            return Err(RdsError::SchemeRequirement {
                scheme: kind.name(),
                requirement: if kind.is_discontinuous() {
                    "a discontinuous space"
                } else {
                    "a continuous space"
                },
            });
        }
        let needs_p1 = kind.p1_only() || (kind.is_limited() && config.low_order == LowOrder::NScheme);
        if needs_p1 && space.degree().order() != 1 {
            return Err(RdsError::SchemeRequirement {
                scheme: kind.name(),
                requirement: "linear elements",
            });
        }
        let boundary_data = space
            .boundary_faces()
            .map(|side| {
                space.element(side.element).faces[side.face]
                    .points
                    .iter()
                    .map(|q| problem.boundary_value(q.position))
                    .collect()
            })
            .collect();
        Ok(Self {
            law: problem.law(),
            space,
            problem,
            config,
            boundary_data,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn law(&self) -> &ConservationLaw {
        &self.law
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn num_dofs(&self) -> usize {
        self.space.num_dofs()
    }

    /// Boundary data at the quadrature points of the `b`-th boundary edge.
    pub fn boundary_data(&self, b: usize) -> &[f64] {
        &self.boundary_data[b]
    }

    /// Calls `sink` once per residual group: elements first, then boundary
    /// faces, then interior edges.
    pub fn for_each_group(&self, u: &[f64], mut sink: impl FnMut(&GroupView<'_>)) -> Result<()> {
        if u.len() != self.num_dofs() {
            return Err(RdsError::InvalidParameter(format!(
                "state has {} values, space has {} degrees of freedom",
                u.len(),
                self.num_dofs()
            )));
        }
        let n = self.space.local_dofs();
        for k in 0..self.space.num_elements() {
            self.element_group(k, u, n, &mut sink)?;
        }
        let form = self.config.flux_form();
        for (b, &edge) in self.space.mesh().boundary_edges().iter().enumerate() {
            let side = self.space.mesh().edges()[edge].left;
            let face = &self.space.element(side.element).faces[side.face];
            let local = self.space.gather(side.element, u);
            let r = boundary_residual(
                &self.law,
                face,
                &local,
                n,
                &self.boundary_data[b],
                form,
                self.config.boundary_rule,
            );
            sink(&GroupView {
                kind: GroupKind::Boundary(edge),
                dofs: self.space.element_dofs(side.element),
                values: &r.values[..n],
                total: r.total,
                magnitude: r.magnitude,
                weights: &r.weights[..n],
                coefficients: None,
                alpha: None,
                bypassed: false,
            });
        }
        match self.config.kind {
            SchemeKind::Jump | SchemeKind::LimitedJump => {
                for edge in self.space.mesh().interior_edges() {
                    if let Some(r) = jump_edge_residual(&self.space, edge, u, self.config.theta_e) {
                        let magnitude = r.values[..r.len].iter().map(|v| v.abs()).sum();
                        sink(&GroupView {
                            kind: GroupKind::Edge(edge),
                            dofs: &r.dofs[..r.len],
                            values: &r.values[..r.len],
                            total: 0.0,
                            magnitude,
                            weights: &r.weights[..r.len],
                            coefficients: None,
                            alpha: None,
                            bypassed: false,
                        });
                    }
                }
            }
            SchemeKind::DgRdsFirstOrder | SchemeKind::DgRdsLimited => {
                let limited = self.config.kind == SchemeKind::DgRdsLimited;
                for edge in self.space.mesh().interior_edges() {
                    if let Some(r) = dg_rds::edge_residual(&self.space, &self.law, edge, u, self.config.alpha, limited)
                    {
                        const N: usize = dg_rds::EDGE_GROUP;
                        let mut flat = [0.0; N * N];
                        let mut weights = [0.0; N];
                        for i in 0..N {
                            flat[i * N..(i + 1) * N].copy_from_slice(&r.coefficients[i]);
                            weights[i] = (0..N).filter(|&j| j != i).map(|j| r.coefficients[i][j]).sum();
                        }
                        sink(&GroupView {
                            kind: GroupKind::Edge(edge),
                            dofs: &r.dofs,
                            values: &r.values,
                            total: r.total,
                            magnitude: r.magnitude,
                            weights: &weights,
                            coefficients: (!limited).then_some(&flat[..]),
                            alpha: Some(r.alpha),
                            bypassed: r.bypassed,
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn element_group(&self, k: usize, u: &[f64], n: usize, sink: &mut impl FnMut(&GroupView<'_>)) -> Result<()> {
        let law = &self.law;
        let cfg = &self.config;
        let e = self.space.element(k);
        let local = self.space.gather(k, u);
        let dofs = self.space.element_dofs(k);
        let totals = || match cfg.flux_form() {
            FluxForm::Exact => total_exact_flux(law, e, &local, n),
            FluxForm::Interpolated => total_interpolated_flux(law, e, &local, n),
        };
        let surrogate = || rusanov_split(law, e, &local, n, None).row_sums(n);
        let mut flat = [0.0; MAX_LOCAL * MAX_LOCAL];
        let emit = |sink: &mut dyn FnMut(&GroupView<'_>),
                    values: &[f64; MAX_LOCAL],
                    (total, magnitude): (f64, f64),
                    weights: &[f64; MAX_LOCAL],
                    coefficients: Option<&[f64]>,
                    alpha: Option<f64>,
                    bypassed: bool| {
            sink(&GroupView {
                kind: GroupKind::Element(k),
                dofs,
                values: &values[..n],
                total,
                magnitude,
                weights: &weights[..n],
                coefficients,
                alpha,
                bypassed,
            })
        };
        match cfg.kind {
            SchemeKind::Galerkin | SchemeKind::Jump => {
                let values = galerkin_exact(law, e, &local, n);
                emit(sink, &values, totals(), &surrogate(), None, None, false);
            }
            SchemeKind::Supg => {
                let t = tau(cfg.tau, law, e, &local, n);
                let mut values = galerkin_exact(law, e, &local, n);
                let stab = supg_stabilization(law, e, &local, n, t);
                let mut weights = surrogate();
                let sw = supg_weights(law, e, &local, n, t);
                for i in 0..n {
                    values[i] += stab[i];
                    weights[i] += sw[i];
                }
                emit(sink, &values, totals(), &weights, None, None, false);
            }
            SchemeKind::Rusanov | SchemeKind::NScheme => {
                let split = if cfg.kind == SchemeKind::Rusanov {
                    rusanov_split(law, e, &local, n, cfg.alpha)
                } else {
                    n_scheme_split(law, e, &local)?
                };
                fill_flat(&mut flat, &split, n);
                let alpha = (cfg.kind == SchemeKind::Rusanov).then_some(split.alpha);
                emit(
                    sink,
                    &split.values,
                    totals(),
                    &split.row_sums(n),
                    Some(&flat[..n * n]),
                    alpha,
                    false,
                );
            }
            SchemeKind::LimitedSupg | SchemeKind::LimitedJump => {
                let low = match cfg.low_order {
                    LowOrder::Rusanov => rusanov_split(law, e, &local, n, cfg.alpha),
                    LowOrder::NScheme => n_scheme_split(law, e, &local)?,
                };
                let (total, magnitude) = totals();
                let limited = beta_limiter(&low.values[..n], total, limiter_threshold(law, &local[..n], e.diameter));
                let mut values = limited.values;
                let mut weights = low.row_sums(n);
                if cfg.kind == SchemeKind::LimitedSupg && cfg.theta_k > 0.0 {
                    let t = tau(cfg.tau, law, e, &local, n);
                    let stab = supg_stabilization(law, e, &local, n, t);
                    let sw = supg_weights(law, e, &local, n, t);
                    for i in 0..n {
                        values[i] += cfg.theta_k * stab[i];
                        weights[i] += cfg.theta_k * sw[i];
                    }
                }
                let alpha = (cfg.low_order == LowOrder::Rusanov).then_some(low.alpha);
                emit(
                    sink,
                    &values,
                    (total, magnitude),
                    &weights,
                    None,
                    alpha,
                    limited.bypassed,
                );
            }
            SchemeKind::MedianDual => {
                let values = fv_median_dual_residual(law, e, &local, cfg.dual_flux);
                emit(sink, &values, totals(), &surrogate(), None, None, false);
            }
            SchemeKind::Dg => {
                let (values, total, magnitude, face_weights) = self.dg_element(k, u, &local, n);
                let mut weights = surrogate();
                for i in 0..n {
                    weights[i] += face_weights[i];
                }
                emit(sink, &values, (total, magnitude), &weights, None, None, false);
            }
            SchemeKind::DgRdsFirstOrder | SchemeKind::DgRdsLimited => {
                let limited = cfg.kind == SchemeKind::DgRdsLimited;
                let r = dg_rds::element_residual(law, e, &local, cfg.alpha, limited);
                fill_flat(&mut flat, &r.split, n);
                let coefficients = (!limited).then_some(&flat[..n * n]);
                emit(
                    sink,
                    &r.split.values,
                    (r.total, r.magnitude),
                    &r.split.row_sums(n),
                    coefficients,
                    Some(r.split.alpha),
                    r.bypassed,
                );
            }
        }
        Ok(())
    }

    /// Discontinuous Galerkin element residual with Rusanov interface fluxes;
    /// domain-boundary faces use the element's own trace.
    fn dg_element(
        &self,
        k: usize,
        u: &[f64],
        local: &[f64; MAX_LOCAL],
        n: usize,
    ) -> ([f64; MAX_LOCAL], f64, f64, [f64; MAX_LOCAL]) {
        let law = &self.law;
        let e = self.space.element(k);
        let mut values = [0.0; MAX_LOCAL];
        let mut weights = [0.0; MAX_LOCAL];
        let mut total = 0.0;
        let mut magnitude = 0.0;
        for q in &e.volume {
            let f = law.flux(combine(&q.phi, local, n));
            for i in 0..n {
                values[i] -= q.weight * q.grad[i].dot(f);
            }
        }
        for face in &e.faces {
            let outside = face.neighbor.map(|s| self.space.gather(s.element, u));
            for q in &face.points {
                let inner = combine(&q.phi, local, n);
                let (fhat, speed) = match &outside {
                    Some(o) => {
                        let outer = combine(&q.neighbor_phi, o, n);
                        (
                            rusanov_interface_flux(law, inner, outer, face.normal),
                            law.max_wave_speed(inner, outer, face.normal),
                        )
                    }
                    None => (law.flux(inner).dot(face.normal), 0.0),
                };
                let v = q.weight * fhat;
                total += v;
                magnitude += v.abs();
                for i in 0..n {
                    values[i] += q.phi[i] * v;
                    weights[i] += q.weight * q.phi[i].abs() * speed;
                }
            }
        }
        (values, total, magnitude, weights)
    }

    /// Every residual group of `u`.
    pub fn residual_set(&self, u: &[f64]) -> Result<ResidualSet> {
        let mut groups = Vec::new();
        self.for_each_group(u, |g| groups.push(ResidualGroup::from_view(g)))?;
        Ok(ResidualSet { groups })
    }

    /// Nodal residuals written into `out`.
    pub fn residual_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = 0.0);
        self.for_each_group(u, |g| {
            for (&d, &v) in g.dofs.iter().zip(g.values) {
                out[d] += v;
            }
        })
    }

    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.num_dofs()];
        self.residual_into(u, &mut out)?;
        Ok(out)
    }

    /// Nodal residuals and nodal sums of the pseudo-time weights.
    pub fn residual_and_weights(&self, u: &[f64], residual: &mut [f64], weights: &mut [f64]) -> Result<()> {
        residual.iter_mut().for_each(|v| *v = 0.0);
        weights.iter_mut().for_each(|v| *v = 0.0);
        self.for_each_group(u, |g| {
            for ((&d, &v), &w) in g.dofs.iter().zip(g.values).zip(g.weights) {
                residual[d] += v;
                weights[d] += w;
            }
        })
    }
}

fn fill_flat(flat: &mut [f64; MAX_LOCAL * MAX_LOCAL], split: &MonotoneSplit, n: usize) {
    for i in 0..n {
        for j in 0..n {
            flat[i * n + j] = split.coefficients[i][j];
        }
    }
}
