//! Two-sided check of the discrete weak-form decomposition: for any test
//! function `v` in the solution space,
//!
//! `sum_groups sum_sigma v_sigma Phi_sigma
//!    = -int grad(v) . F + sum_interior int [v] fhat + int_dOmega v F . n
//!      + sum_boundary int v (F_n - F . n)
//!      + sum_groups 1/#g sum_{sigma, sigma'} (v_sigma - v_sigma') (Phi_sigma - Phi^Gal_sigma)`.

use super::assemble::{Discretization, GroupKind, ResidualGroup};
use super::element::{galerkin_exact, galerkin_interpolated};
use super::{FluxForm, SchemeKind};
use crate::basis::MAX_LOCAL;
use crate::error::{RdsError, Result};
use crate::law::rusanov_interface_flux;
use crate::space::{combine, combine_grad, ElementData};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub lhs: f64,
    /// `-int grad(v) . F`.
    pub volume: f64,
    /// `sum int [v] fhat` over interior edges; zero for continuous spaces.
    pub interface: f64,
    /// `int_dOmega v F . n` with the interior trace.
    pub boundary: f64,
    /// `sum int v (F_n - F . n)` over boundary faces.
    pub boundary_correction: f64,
    pub redistribution: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` relative to the sum of the absolute terms.
    pub defect: f64,
}

impl IdentityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.defect <= tol
    }
}

pub fn decomposition_identity_check(disc: &Discretization, u: &[f64], v: &[f64]) -> Result<IdentityReport> {
    if v.len() != disc.num_dofs() {
        return Err(RdsError::InvalidParameter(format!(
            "test function has {} values, space has {} degrees of freedom",
            v.len(),
            disc.num_dofs()
        )));
    }
    let set = disc.residual_set(u)?;
    let space = disc.space();
    let law = disc.law();
    let n = space.local_dofs();
    let form = disc.config().flux_form();
    let flux_at = |phi: &[f64; MAX_LOCAL], local: &[f64; MAX_LOCAL]| -> Vec2 {
        match form {
            FluxForm::Exact => law.flux(combine(phi, local, n)),
            FluxForm::Interpolated => (0..n).map(|j| law.flux(local[j]) * phi[j]).sum(),
        }
    };

    let lhs: f64 = set
        .groups
        .iter()
        .map(|g| g.dofs.iter().zip(&g.values).map(|(&d, &p)| v[d] * p).sum::<f64>())
        .sum();

    let mut volume = 0.0;
    for k in 0..space.num_elements() {
        let e = space.element(k);
        let (ul, vl) = (space.gather(k, u), space.gather(k, v));
        for q in &e.volume {
            volume -= q.weight * combine_grad(&q.grad, &vl, n).dot(flux_at(&q.phi, &ul));
        }
    }

    let mut boundary = 0.0;
    let mut boundary_correction = 0.0;
    for (b, side) in space.boundary_faces().enumerate() {
        let face = &space.element(side.element).faces[side.face];
        let (ul, vl) = (space.gather(side.element, u), space.gather(side.element, v));
        for (q, &ub) in face.points.iter().zip(disc.boundary_data(b)) {
            let vq = combine(&q.phi, &vl, n);
            let trace = flux_at(&q.phi, &ul).dot(face.normal);
            let speed = law.jacobian(combine(&q.phi, &ul, n)).dot(face.normal);
            let numerical = if disc.config().boundary_rule.uses_exterior(speed) {
                law.flux(ub).dot(face.normal)
            } else {
                trace
            };
            boundary += q.weight * vq * trace;
            boundary_correction += q.weight * vq * (numerical - trace);
        }
    }

    let kind = disc.config().kind;
    let mut interface = 0.0;
    if kind == SchemeKind::Dg {
        for edge in space.mesh().interior_edges() {
            let ed = &space.mesh().edges()[edge];
            let right = ed.right.expect("interior edge");
            let face = &space.element(ed.left.element).faces[ed.left.face];
            let (ul, vl) = (space.gather(ed.left.element, u), space.gather(ed.left.element, v));
            let (ur, vr) = (space.gather(right.element, u), space.gather(right.element, v));
            for q in &face.points {
                let jump = combine(&q.phi, &vl, n) - combine(&q.neighbor_phi, &vr, n);
                let fhat = rusanov_interface_flux(
                    law,
                    combine(&q.phi, &ul, n),
                    combine(&q.neighbor_phi, &ur, n),
                    face.normal,
                );
                interface += q.weight * jump * fhat;
            }
        }
    }

    let mut redistribution = 0.0;
    for g in &set.groups {
        let Some(reference) = galerkin_reference(disc, g, u, n, form) else {
            continue;
        };
        let m = g.dofs.len();
        let mut term = 0.0;
        for s in 0..m {
            for t in 0..m {
                term += (v[g.dofs[s]] - v[g.dofs[t]]) * (g.values[s] - reference[s]);
            }
        }
        redistribution += term / m as f64;
    }

    let rhs = volume + interface + boundary + boundary_correction + redistribution;
    let scale =
        lhs.abs() + volume.abs() + interface.abs() + boundary.abs() + boundary_correction.abs() + redistribution.abs();
    let defect = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(IdentityReport {
        lhs,
        volume,
        interface,
        boundary,
        boundary_correction,
        redistribution,
        rhs,
        defect,
    })
}

/// Galerkin residuals with the same total as group `g`, in the group's node
/// order. `None` when the group is its own Galerkin reference.
fn galerkin_reference(
    disc: &Discretization,
    g: &ResidualGroup,
    u: &[f64],
    n: usize,
    form: FluxForm,
) -> Option<Vec<f64>> {
    let space = disc.space();
    let law = disc.law();
    let kind = disc.config().kind;
    match g.kind {
        GroupKind::Boundary(_) => None,
        GroupKind::Element(_) if kind == SchemeKind::Dg => None,
        GroupKind::Element(k) => {
            let e: &ElementData = space.element(k);
            let local = space.gather(k, u);
            let r = match form {
                FluxForm::Exact => galerkin_exact(law, e, &local, n),
                FluxForm::Interpolated => galerkin_interpolated(law, e, &local, n),
            };
            Some(r[..n].to_vec())
        }
        GroupKind::Edge(edge) if kind.is_discontinuous() => {
            // Left nodes lose their own trace flux, right nodes gain theirs.
            let ed = &space.mesh().edges()[edge];
            let right = ed.right?;
            let face = &space.element(ed.left.element).faces[ed.left.face];
            let (ul, ur) = (space.gather(ed.left.element, u), space.gather(right.element, u));
            let ls = [ed.left.face, (ed.left.face + 1) % 3];
            let rs = [right.face, (right.face + 1) % 3];
            let mut out = vec![0.0; 4];
            for q in &face.points {
                let fl = q.weight * law.flux(combine(&q.phi, &ul, n)).dot(face.normal);
                let fr = q.weight * law.flux(combine(&q.neighbor_phi, &ur, n)).dot(face.normal);
                out[0] -= q.phi[ls[0]] * fl;
                out[1] -= q.phi[ls[1]] * fl;
                out[2] += q.neighbor_phi[rs[0]] * fr;
                out[3] += q.neighbor_phi[rs[1]] * fr;
            }
            Some(out)
        }
        GroupKind::Edge(_) => Some(vec![0.0; g.dofs.len()]),
    }
}
