//! Residual distribution on discontinuous linear elements. Each element
//! distributes its boundary flux and each interior edge distributes the flux
//! jump across it, both with a Rusanov-type dissipation.

use crate::basis::MAX_LOCAL;
use crate::error::{RdsError, Result};
use crate::law::ConservationLaw;
use crate::residual::{beta_limiter, MonotoneSplit};
use crate::space::{combine, ElementData, Space};

const ALPHA_SAFETY: f64 = 1.01;

/// Nodes of an edge group: both endpoints on the left, then on the right.
pub const EDGE_GROUP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementResidual {
    pub split: MonotoneSplit,
    /// `int_dK f(u_K) . n`.
    pub total: f64,
    pub magnitude: f64,
    pub bypassed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeResidual {
    pub dofs: [usize; EDGE_GROUP],
    pub values: [f64; EDGE_GROUP],
    pub coefficients: [[f64; EDGE_GROUP]; EDGE_GROUP],
    pub alpha: f64,
    /// `int_e (f(u_right) - f(u_left)) . n_left`.
    pub total: f64,
    pub magnitude: f64,
    pub bypassed: bool,
}

/// `total / N + alpha (u_i - mean)` over `N` nodes.
pub fn rusanov_split<const N: usize>(total: f64, u: [f64; N], alpha: f64) -> [f64; N] {
    let mean = u.iter().sum::<f64>() / N as f64;
    u.map(|v| total / N as f64 + alpha * (v - mean))
}

/// `int_e (f(u_right) - f(u_left)) . n_left` for an interior edge.
pub fn edge_total_residual(space: &Space, law: &ConservationLaw, edge: usize, u: &[f64]) -> Result<f64> {
    let ed = &space.mesh().edges()[edge];
    let right = ed.right.ok_or(RdsError::BoundaryEdge)?;
    let face = &space.element(ed.left.element).faces[ed.left.face];
    let ul = space.gather(ed.left.element, u);
    let ur = space.gather(right.element, u);
    let n = space.local_dofs();
    Ok(face
        .points
        .iter()
        .map(|q| {
            let jump = law.flux(combine(&q.neighbor_phi, &ur, n)) - law.flux(combine(&q.phi, &ul, n));
            q.weight * jump.dot(face.normal)
        })
        .sum())
}

/// Element residuals `Phi / 3 + alpha (u_i - mean)`, limited when asked.
/// `alpha` is the smallest value keeping every coefficient nonnegative and
/// at least the largest Jacobian norm on the element, times a safety factor.
pub fn element_residual(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    alpha_override: Option<f64>,
    limited: bool,
) -> ElementResidual {
    let n = 3;
    let mut couple = [[0.0; 3]; 3];
    let mut total = 0.0;
    let mut magnitude = 0.0;
    let mut jac: f64 = 0.0;
    for face in &e.faces {
        for q in &face.points {
            let uq = combine(&q.phi, u, n);
            let v = q.weight * law.flux(uq).dot(face.normal);
            total += v;
            magnitude += v.abs();
            jac = jac.max(law.jacobian(uq).norm());
            for (s, row) in couple.iter_mut().enumerate() {
                let speed = q.weight * law.secant(uq, u[s]).dot(face.normal);
                for (t, m) in row.iter_mut().enumerate() {
                    *m += q.phi[t] * speed;
                }
            }
        }
    }
    for q in &e.volume {
        jac = jac.max(law.jacobian(combine(&q.phi, u, n)).norm());
    }
    let bound = off_diagonal_max(&couple).max(jac);
    let alpha = alpha_override.map_or(ALPHA_SAFETY * bound, |a| a.max(ALPHA_SAFETY * bound));
    let mut split = MonotoneSplit {
        values: [0.0; MAX_LOCAL],
        coefficients: [[0.0; MAX_LOCAL]; MAX_LOCAL],
        alpha,
    };
    split.values[..3].copy_from_slice(&rusanov_split(total, [u[0], u[1], u[2]], alpha));
    for s in 0..3 {
        for t in 0..3 {
            if s != t {
                split.coefficients[s][t] = (alpha - couple[s][t]) / 3.0;
            }
        }
    }
    let mut bypassed = false;
    if limited {
        let l = beta_limiter(&split.values[..3], total, threshold(law, &u[..3], e.diameter));
        split.values = l.values;
        bypassed = l.bypassed;
    }
    ElementResidual {
        split,
        total,
        magnitude,
        bypassed,
    }
}

/// Edge residuals `Phi / 4 + alpha (u_i - mean)`; `None` on the boundary.
pub fn edge_residual(
    space: &Space,
    law: &ConservationLaw,
    edge: usize,
    u: &[f64],
    alpha_override: Option<f64>,
    limited: bool,
) -> Option<EdgeResidual> {
    let ed = &space.mesh().edges()[edge];
    let right = ed.right?;
    let left = ed.left;
    let face = &space.element(left.element).faces[left.face];
    let ul = space.gather(left.element, u);
    let ur = space.gather(right.element, u);
    let lslots = [left.face, (left.face + 1) % 3];
    let rslots = [right.face, (right.face + 1) % 3];
    let ldofs = space.element_dofs(left.element);
    let rdofs = space.element_dofs(right.element);
    let dofs = [ldofs[lslots[0]], ldofs[lslots[1]], rdofs[rslots[0]], rdofs[rslots[1]]];
    let local = [ul[lslots[0]], ul[lslots[1]], ur[rslots[0]], ur[rslots[1]]];

    let mut couple = [[0.0; EDGE_GROUP]; EDGE_GROUP];
    let mut total = 0.0;
    let mut magnitude = 0.0;
    let mut jac: f64 = 0.0;
    for q in &face.points {
        let a = combine(&q.phi, &ul, 3);
        let b = combine(&q.neighbor_phi, &ur, 3);
        let (fa, fb) = (law.flux(a).dot(face.normal), law.flux(b).dot(face.normal));
        total += q.weight * (fb - fa);
        magnitude += q.weight * (fa.abs() + fb.abs());
        jac = jac.max(law.jacobian(a).norm()).max(law.jacobian(b).norm());
        let phi = [
            q.phi[lslots[0]],
            q.phi[lslots[1]],
            q.neighbor_phi[rslots[0]],
            q.neighbor_phi[rslots[1]],
        ];
        for (s, row) in couple.iter_mut().enumerate() {
            let to_right = q.weight * law.secant(b, local[s]).dot(face.normal);
            let to_left = -q.weight * law.secant(a, local[s]).dot(face.normal);
            for (t, m) in row.iter_mut().enumerate() {
                *m += phi[t] * if t < 2 { to_left } else { to_right };
            }
        }
    }
    let bound = off_diagonal_max(&couple).max(jac);
    let alpha = alpha_override.map_or(ALPHA_SAFETY * bound, |a| a.max(ALPHA_SAFETY * bound));
    let mut values = rusanov_split(total, local, alpha);
    let mut coefficients = [[0.0; EDGE_GROUP]; EDGE_GROUP];
    for s in 0..EDGE_GROUP {
        for t in 0..EDGE_GROUP {
            if s != t {
                coefficients[s][t] = (alpha - couple[s][t]) / 4.0;
            }
        }
    }
    let mut bypassed = false;
    if limited {
        let h = face.length;
        let l = beta_limiter(&values, total, threshold(law, &local, h));
        values.copy_from_slice(&l.values[..EDGE_GROUP]);
        bypassed = l.bypassed;
    }
    Some(EdgeResidual {
        dofs,
        values,
        coefficients,
        alpha,
        total,
        magnitude,
        bypassed,
    })
}

fn threshold(law: &ConservationLaw, u: &[f64], h: f64) -> f64 {
    crate::residual::limiter_threshold(law, u, h)
}

fn off_diagonal_max<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut best = 0.0f64;
    for (s, row) in m.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            if s != t {
                best = best.max(v);
            }
        }
    }
    best
}
