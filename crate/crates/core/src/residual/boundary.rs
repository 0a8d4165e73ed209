use super::FluxForm;
use crate::basis::MAX_LOCAL;
use crate::law::{BoundaryFluxRule, ConservationLaw};
use crate::space::{combine, FaceData};

/// Residual of one domain-boundary face, indexed by the local nodes of the
/// adjacent element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    pub values: [f64; MAX_LOCAL],
    /// `int (F_n(u, u_b) - f . n)`.
    pub total: f64,
    pub magnitude: f64,
    /// `int phi_i |f'(u) . n|`, the face's share of the pseudo-time weights.
    pub weights: [f64; MAX_LOCAL],
}

/// `int_face phi_i (F_n(u^h, u_b) - f . n)`; `u_b` holds the boundary data
/// at the face quadrature points.
pub fn boundary_residual(
    law: &ConservationLaw,
    face: &FaceData,
    u: &[f64; MAX_LOCAL],
    n: usize,
    u_b: &[f64],
    form: FluxForm,
    rule: BoundaryFluxRule,
) -> BoundaryResidual {
    let mut out = BoundaryResidual {
        values: [0.0; MAX_LOCAL],
        total: 0.0,
        magnitude: 0.0,
        weights: [0.0; MAX_LOCAL],
    };
    for (q, &ub) in face.points.iter().zip(u_b) {
        let uq = combine(&q.phi, u, n);
        let trace = match form {
            FluxForm::Exact => law.flux(uq).dot(face.normal),
            FluxForm::Interpolated => (0..n).map(|j| q.phi[j] * law.flux(u[j]).dot(face.normal)).sum(),
        };
        let speed = law.jacobian(uq).dot(face.normal);
        // Outflow keeps the scheme's own trace so the residual vanishes there.
        let numerical = if rule.uses_exterior(speed) {
            law.flux(ub).dot(face.normal)
        } else {
            trace
        };
        let r = q.weight * (numerical - trace);
        out.total += r;
        out.magnitude += q.weight * (numerical.abs() + trace.abs());
        for i in 0..n {
            out.values[i] += q.phi[i] * r;
            out.weights[i] += q.weight * q.phi[i].abs() * speed.abs();
        }
    }
    out
}
