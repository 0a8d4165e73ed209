//! Entropy checks for the square entropy `U = u^2 / 2`.
//!
//! Jumps follow `[w] = w_out - w_in` with the normal pointing from the inner
//! to the outer state. An interface is entropy dissipative when
//! `<[v], fhat> - [theta] . n <= 0`.

use crate::basis::MAX_LOCAL;
use crate::error::Result;
use crate::flux_recovery::{
    control_volume_normals, dof_boundary_normals, element_boundary_fluxes, recover_fluxes, ElementGraph,
};
use crate::law::{rusanov_interface_flux, SquareEntropy};
use crate::residual::{Discretization, FluxForm, GroupKind, SchemeKind};
use crate::space::{combine, ElementData, FaceData};
use crate::vec2::Vec2;

/// Relative slack on the sign tests.
const SIGN_TOL: f64 = 1e-12;

/// `{v} fhat - {theta} . n` with arithmetic means of the two traces.
pub fn numerical_entropy_flux(pair: &SquareEntropy, u_in: f64, u_out: f64, fhat: f64, n: Vec2) -> f64 {
    let v = 0.5 * (pair.variable(u_in) + pair.variable(u_out));
    let theta = (pair.potential(u_in) + pair.potential(u_out)) * 0.5;
    v * fhat - theta.dot(n)
}

/// `(v_{j+1} - v_j) / 2 fhat - (theta_{j+1} - theta_j) / 2` for the law
/// restricted to its first flux component.
pub fn tadmor_gap_1d(pair: &SquareEntropy, u_left: f64, u_right: f64, fhat: f64) -> f64 {
    let dv = pair.variable(u_right) - pair.variable(u_left);
    let dtheta = pair.potential(u_right).x - pair.potential(u_left).x;
    0.5 * dv * fhat - 0.5 * dtheta
}

/// Both sides of `v_j (fhat - f_j) + v_{j+1} (f_{j+1} - fhat) - (g_{j+1} - g_j) = -2 gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity1d {
    pub lhs: f64,
    pub gap: f64,
    pub defect: f64,
}

pub fn residual_entropy_identity_1d(pair: &SquareEntropy, u_left: f64, u_right: f64, fhat: f64) -> Identity1d {
    let law = pair.law;
    let (fl, fr) = (law.flux(u_left).x, law.flux(u_right).x);
    let (gl, gr) = (pair.entropy_flux(u_left).x, pair.entropy_flux(u_right).x);
    let lhs = pair.variable(u_left) * (fhat - fl) + pair.variable(u_right) * (fr - fhat) - (gr - gl);
    let gap = tadmor_gap_1d(pair, u_left, u_right, fhat);
    Identity1d {
        lhs,
        gap,
        defect: (lhs + 2.0 * gap).abs(),
    }
}

/// Pointwise interface gap `<[v], fhat> - [theta] . n`.
pub fn interface_gap(pair: &SquareEntropy, u_in: f64, u_out: f64, fhat: f64, n: Vec2) -> f64 {
    let jump_v = pair.variable(u_out) - pair.variable(u_in);
    let jump_theta = pair.potential(u_out) - pair.potential(u_in);
    jump_v * fhat - jump_theta.dot(n)
}

/// Face-integrated gap; `inner`, `outer` and `fhat` are given at the face
/// quadrature points and `fhat` is the flux through the scaled normal.
pub fn interface_entropy_check(
    pair: &SquareEntropy,
    face: &FaceData,
    inner: &[f64],
    outer: &[f64],
    fhat: &[f64],
) -> f64 {
    face.points
        .iter()
        .zip(inner.iter().zip(outer).zip(fhat))
        .map(|(q, ((&a, &b), &f))| q.weight * interface_gap(pair, a, b, f, face.normal))
        .sum()
}

/// Result of adding `alpha (v_in - v_out)` to an interface flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFix {
    pub flux: f64,
    pub alpha: f64,
    pub gap_before: f64,
    pub gap_after: f64,
}

/// Smallest `alpha >= 0` making the pointwise gap nonpositive.
pub fn entropy_fix_flux(pair: &SquareEntropy, u_in: f64, u_out: f64, fhat: f64, n: Vec2) -> EntropyFix {
    let gap = interface_gap(pair, u_in, u_out, fhat, n);
    let jump_v = pair.variable(u_out) - pair.variable(u_in);
    if gap <= 0.0 || jump_v == 0.0 {
        return EntropyFix {
            flux: fhat,
            alpha: 0.0,
            gap_before: gap,
            gap_after: gap,
        };
    }
    let alpha = gap / (jump_v * jump_v);
    let flux = fhat - alpha * jump_v;
    EntropyFix {
        flux,
        alpha,
        gap_before: gap,
        gap_after: interface_gap(pair, u_in, u_out, flux, n),
    }
}

/// `sum_i v_i Psi_i + int_dK theta^h . n` with `Psi = Phi - fhat^b` and
/// `theta^h` the Lagrange interpolant of the nodal potentials. Entropy
/// stable elements give a nonnegative value.
pub fn element_entropy_check(
    pair: &SquareEntropy,
    e: &ElementData,
    n: usize,
    u: &[f64; MAX_LOCAL],
    residuals: &[f64],
    boundary_fluxes: &[f64],
) -> f64 {
    let production: f64 = (0..n)
        .map(|i| pair.variable(u[i]) * (residuals[i] - boundary_fluxes[i]))
        .sum();
    production + potential_flux(pair, e, n, u)
}

fn potential_flux(pair: &SquareEntropy, e: &ElementData, n: usize, u: &[f64; MAX_LOCAL]) -> f64 {
    let theta: [Vec2; MAX_LOCAL] = std::array::from_fn(|i| pair.potential(u[i]));
    e.faces
        .iter()
        .flat_map(|face| face.points.iter().map(move |q| (face, q)))
        .map(|(face, q)| {
            let t: Vec2 = (0..n).map(|i| theta[i] * q.phi[i]).sum();
            q.weight * t.dot(face.normal)
        })
        .sum()
}

/// Element entropy production computed directly and as a sum of edge terms
/// `(v_tail - v_head) fhat - (theta_tail - theta_head) . n_edge` plus the
/// quadrature remainder `int theta^h . n - sum theta_i . N_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseEntropy {
    pub direct: f64,
    pub pairwise: f64,
    pub remainder: f64,
    pub defect: f64,
}

pub fn element_entropy_pairwise(
    pair: &SquareEntropy,
    graph: &ElementGraph,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    residuals: &[f64],
    boundary_fluxes: &[f64],
) -> Result<PairwiseEntropy> {
    let n = graph.num_dofs();
    let direct = element_entropy_check(pair, e, n, u, residuals, boundary_fluxes);
    let psi: Vec<f64> = (0..n).map(|i| residuals[i] - boundary_fluxes[i]).collect();
    let fluxes = recover_fluxes(graph, &psi)?;
    let normals = control_volume_normals(graph, e)?;
    let v = |i: usize| pair.variable(u[i]);
    let theta = |i: usize| pair.potential(u[i]);
    let edges: f64 = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &(t, h))| (v(t) - v(h)) * fluxes[k] - (theta(t) - theta(h)).dot(normals[k]))
        .sum();
    let nodal: f64 = dof_boundary_normals(e, n)
        .iter()
        .enumerate()
        .map(|(i, nb)| theta(i).dot(*nb))
        .sum();
    let remainder = potential_flux(pair, e, n, u) - nodal;
    let pairwise = edges + remainder;
    let scale = direct.abs() + edges.abs() + remainder.abs() + psi.iter().map(|p| p.abs()).sum::<f64>();
    Ok(PairwiseEntropy {
        direct,
        pairwise,
        remainder,
        defect: if scale > 0.0 {
            (direct - pairwise).abs() / scale
        } else {
            0.0
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementEntropy {
    pub element: usize,
    pub defect: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceEntropy {
    pub edge: usize,
    pub gap: f64,
    /// Coefficient the entropy fix would add on this face.
    pub alpha: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyAudit {
    pub elements: Vec<ElementEntropy>,
    pub interfaces: Vec<InterfaceEntropy>,
}

impl EntropyAudit {
    pub fn all_pass(&self) -> bool {
        self.elements.iter().all(|e| e.pass) && self.interfaces.iter().all(|f| f.pass)
    }
}

/// Element production and face gaps of `disc` at `u`. Domain-boundary faces
/// use the boundary data as the outer trace and the boundary flux of the
/// scheme as `fhat`.
pub fn entropy_audit(disc: &Discretization, u: &[f64]) -> Result<EntropyAudit> {
    let space = disc.space();
    let law = disc.law();
    let pair = disc.problem().entropy();
    let n = space.local_dofs();
    let set = disc.residual_set(u)?;
    let mut elements = Vec::new();
    for g in &set.groups {
        let GroupKind::Element(k) = g.kind else { continue };
        let local = space.gather(k, u);
        let fb = element_boundary_fluxes(disc, k, u);
        let e = space.element(k);
        let defect = element_entropy_check(&pair, e, n, &local, &g.values, &fb[..n]);
        let scale: f64 = g.values.iter().chain(&fb[..n]).map(|v| v.abs()).sum::<f64>()
            * (1.0 + local[..n].iter().fold(0.0f64, |m, v| m.max(v.abs())));
        elements.push(ElementEntropy {
            element: k,
            defect,
            pass: defect >= -SIGN_TOL * scale.max(1.0),
        });
    }

    let kind = disc.config().kind;
    let form = disc.config().flux_form();
    let rule = disc.config().boundary_rule;
    let mut boundary_index = vec![usize::MAX; space.mesh().edges().len()];
    for (b, &edge) in space.mesh().boundary_edges().iter().enumerate() {
        boundary_index[edge] = b;
    }
    let mut interfaces = Vec::new();
    for (edge, ed) in space.mesh().edges().iter().enumerate() {
        let face = &space.element(ed.left.element).faces[ed.left.face];
        let local = space.gather(ed.left.element, u);
        let inner: Vec<f64> = face.points.iter().map(|q| combine(&q.phi, &local, n)).collect();
        let (outer, fhat): (Vec<f64>, Vec<f64>) = match ed.right {
            Some(right) => {
                let other = space.gather(right.element, u);
                face.points
                    .iter()
                    .zip(&inner)
                    .map(|(q, &a)| {
                        let b = combine(&q.neighbor_phi, &other, n);
                        let f = if kind == SchemeKind::Dg {
                            rusanov_interface_flux(law, a, b, face.normal)
                        } else if kind.is_discontinuous() {
                            // Distributed schemes carry no interface flux; use the mean trace flux.
                            0.5 * (law.flux(a) + law.flux(b)).dot(face.normal)
                        } else {
                            trace_flux(law, form, face, q, &local, n)
                        };
                        (b, f)
                    })
                    .unzip()
            }
            None => {
                let data = disc.boundary_data(boundary_index[edge]);
                face.points
                    .iter()
                    .zip(&inner)
                    .zip(data)
                    .map(|((q, &a), &ub)| {
                        let own = trace_flux(law, form, face, q, &local, n);
                        let f = if rule.uses_exterior(law.jacobian(a).dot(face.normal)) {
                            law.flux(ub).dot(face.normal)
                        } else {
                            own
                        };
                        (ub, f)
                    })
                    .unzip()
            }
        };
        let gap = interface_entropy_check(&pair, face, &inner, &outer, &fhat);
        let jump2: f64 = face
            .points
            .iter()
            .zip(inner.iter().zip(&outer))
            .map(|(q, (&a, &b))| q.weight * (pair.variable(b) - pair.variable(a)).powi(2))
            .sum();
        let alpha = if gap > 0.0 && jump2 > 0.0 { gap / jump2 } else { 0.0 };
        let scale: f64 = face
            .points
            .iter()
            .zip(&fhat)
            .map(|(q, f)| q.weight * f.abs())
            .sum::<f64>()
            * (1.0 + inner.iter().chain(&outer).fold(0.0f64, |m, v| m.max(v.abs())));
        interfaces.push(InterfaceEntropy {
            edge,
            gap,
            alpha,
            pass: gap <= SIGN_TOL * scale.max(1.0),
        });
    }
    Ok(EntropyAudit { elements, interfaces })
}

fn trace_flux(
    law: &crate::law::ConservationLaw,
    form: FluxForm,
    face: &FaceData,
    q: &crate::space::FacePoint,
    local: &[f64; MAX_LOCAL],
    n: usize,
) -> f64 {
    match form {
        FluxForm::Exact => law.flux(combine(&q.phi, local, n)).dot(face.normal),
        FluxForm::Interpolated => (0..n).map(|j| q.phi[j] * law.flux(local[j]).dot(face.normal)).sum(),
    }
}
