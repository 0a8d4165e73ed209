//! Per-element residual kernels. Local arrays are padded to `MAX_LOCAL`;
//! only the first `n` entries are meaningful.

use super::{DualFlux, TauRule};
use crate::basis::MAX_LOCAL;
use crate::error::{RdsError, Result};
use crate::law::{rusanov_interface_flux, ConservationLaw};
use crate::space::{combine, combine_grad, ElementData};
use crate::vec2::Vec2;

const ALPHA_SAFETY: f64 = 1.01;

/// Residuals written as `Phi_i = sum_j c_ij (u_i - u_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneSplit {
    pub values: [f64; MAX_LOCAL],
    pub coefficients: [[f64; MAX_LOCAL]; MAX_LOCAL],
    /// Dissipation used; zero for schemes without one.
    pub alpha: f64,
}

impl MonotoneSplit {
    /// `sum_j c_ij` per local node.
    pub fn row_sums(&self, n: usize) -> [f64; MAX_LOCAL] {
        let mut s = [0.0; MAX_LOCAL];
        for (i, si) in s.iter_mut().enumerate().take(n) {
            *si = self.coefficients[i][..n]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c)
                .sum();
        }
        s
    }
}

/// `-int grad(phi_i) . f(u^h) + int_dK phi_i f(u^h) . n` with the element's own trace.
pub fn galerkin_exact(law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL], n: usize) -> [f64; MAX_LOCAL] {
    let mut out = [0.0; MAX_LOCAL];
    for q in &e.volume {
        let f = law.flux(combine(&q.phi, u, n));
        for i in 0..n {
            out[i] -= q.weight * q.grad[i].dot(f);
        }
    }
    for face in &e.faces {
        for q in &face.points {
            let fn_ = q.weight * law.flux(combine(&q.phi, u, n)).dot(face.normal);
            for i in 0..n {
                out[i] += q.phi[i] * fn_;
            }
        }
    }
    out
}

/// Galerkin residual of the interpolated flux, `sum_j f(u_j) . int phi_i grad(phi_j)`.
pub fn galerkin_interpolated(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    n: usize,
) -> [f64; MAX_LOCAL] {
    let f: [Vec2; MAX_LOCAL] = std::array::from_fn(|j| law.flux(u[j]));
    std::array::from_fn(|i| {
        if i < n {
            (0..n).map(|j| f[j].dot(e.coupling[i][j])).sum()
        } else {
            0.0
        }
    })
}

/// `(int_dK f(u^h) . n, int_dK |f(u^h) . n|)` by face quadrature.
pub fn total_exact_flux(law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL], n: usize) -> (f64, f64) {
    face_totals(e, |phi| law.flux(combine(phi, u, n)))
}

/// `(int_dK f^h . n, int_dK |f^h . n|)` by face quadrature.
pub fn total_interpolated_flux(law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL], n: usize) -> (f64, f64) {
    let f: [Vec2; MAX_LOCAL] = std::array::from_fn(|j| law.flux(u[j]));
    face_totals(e, |phi| (0..n).map(|j| f[j] * phi[j]).sum())
}

fn face_totals(e: &ElementData, flux: impl Fn(&[f64; MAX_LOCAL]) -> Vec2) -> (f64, f64) {
    let mut total = 0.0;
    let mut magnitude = 0.0;
    for face in &e.faces {
        for q in &face.points {
            let v = q.weight * flux(&q.phi).dot(face.normal);
            total += v;
            magnitude += v.abs();
        }
    }
    (total, magnitude)
}

/// Rusanov residuals on the interpolated flux. `alpha_override` is raised
/// to the monotonicity bound when smaller.
pub fn rusanov_split(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    n: usize,
    alpha_override: Option<f64>,
) -> MonotoneSplit {
    let mut central = [[0.0; MAX_LOCAL]; MAX_LOCAL];
    let mut bound: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                central[i][j] = -law.secant(u[i], u[j]).dot(e.coupling[i][j]);
                bound = bound.max(central[i][j].abs());
            }
        }
    }
    let floor = ALPHA_SAFETY * n as f64 * bound;
    let alpha = alpha_override.map_or(floor, |a| a.max(floor));
    let mut coefficients = [[0.0; MAX_LOCAL]; MAX_LOCAL];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                coefficients[i][j] = central[i][j] + alpha / n as f64;
            }
        }
    }
    let mean = u[..n].iter().sum::<f64>() / n as f64;
    let mut values = galerkin_interpolated(law, e, u, n);
    for i in 0..n {
        values[i] += alpha * (u[i] - mean);
    }
    MonotoneSplit {
        values,
        coefficients,
        alpha,
    }
}

/// N scheme on a linear triangle with `k_i = avg . n_i / 2`.
pub fn n_scheme_split(law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL]) -> Result<MonotoneSplit> {
    let avg = law.linearized_jacobian(&u[..3]);
    let k: [f64; 3] = std::array::from_fn(|i| 0.5 * avg.dot(e.inward_normals[i]));
    let inflow: f64 = k.iter().map(|&x| x.min(0.0)).sum();
    let mut split = MonotoneSplit {
        values: [0.0; MAX_LOCAL],
        coefficients: [[0.0; MAX_LOCAL]; MAX_LOCAL],
        alpha: 0.0,
    };
    if inflow == 0.0 {
        return if k.iter().all(|&x| x <= 0.0) {
            Ok(split)
        } else {
            Err(RdsError::DegenerateUpwind)
        };
    }
    let upwind_state = (0..3).map(|j| k[j].min(0.0) * u[j]).sum::<f64>() / inflow;
    for i in 0..3 {
        let kp = k[i].max(0.0);
        split.values[i] = kp * (u[i] - upwind_state);
        for j in 0..3 {
            if i != j {
                split.coefficients[i][j] = kp * k[j].min(0.0) / inflow;
            }
        }
    }
    Ok(split)
}

/// Streamline parameter of element `e`.
pub fn tau(rule: TauRule, law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL], n: usize) -> f64 {
    let avg = law.linearized_jacobian(&u[..n]);
    let sum: f64 = (0..n).map(|i| avg.dot(e.moments[i]).abs()).sum();
    match rule {
        TauRule::Fixed(t) => t,
        _ if sum == 0.0 => 0.0,
        TauRule::Scaled => e.area / (e.diameter * sum),
        TauRule::Inverse => 1.0 / sum,
    }
}

/// `h_K int (f'(u^h) . grad(phi_i)) tau (f'(u^h) . grad(u^h))`.
pub fn supg_stabilization(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    n: usize,
    tau: f64,
) -> [f64; MAX_LOCAL] {
    let mut out = [0.0; MAX_LOCAL];
    if tau == 0.0 {
        return out;
    }
    for q in &e.volume {
        let a = law.jacobian(combine(&q.phi, u, n));
        let r = a.dot(combine_grad(&q.grad, u, n)) * q.weight * tau * e.diameter;
        for i in 0..n {
            out[i] += a.dot(q.grad[i]) * r;
        }
    }
    out
}

/// Net flux out of the part of each median dual cell inside a linear triangle.
pub fn fv_median_dual_residual(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    flux: DualFlux,
) -> [f64; MAX_LOCAL] {
    let mut out = [0.0; MAX_LOCAL];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let normal = dual_normal(e, i, j);
            let fhat = match flux {
                DualFlux::Rusanov => rusanov_interface_flux(law, u[i], u[j], normal),
                DualFlux::Central => 0.5 * (law.flux(u[i]) + law.flux(u[j])).dot(normal),
            };
            out[i] += fhat - law.flux(u[i]).dot(normal);
        }
    }
    out
}

/// Normal of the median dual face between vertices `i` and `j`, pointing
/// from `i` to `j` and scaled by the face length.
pub fn dual_normal(e: &ElementData, i: usize, j: usize) -> Vec2 {
    (e.inward_normals[j] - e.inward_normals[i]) / 6.0
}

/// Absolute row sums of the streamline operator linearized at `u`.
pub(crate) fn supg_weights(
    law: &ConservationLaw,
    e: &ElementData,
    u: &[f64; MAX_LOCAL],
    n: usize,
    tau: f64,
) -> [f64; MAX_LOCAL] {
    let mut out = [0.0; MAX_LOCAL];
    for q in &e.volume {
        let a = law.jacobian(combine(&q.phi, u, n));
        let s = q.weight * tau * e.diameter;
        let along: [f64; MAX_LOCAL] = std::array::from_fn(|i| a.dot(q.grad[i]));
        let total: f64 = along[..n].iter().map(|x| x.abs()).sum();
        for i in 0..n {
            out[i] += s * along[i].abs() * total;
        }
    }
    out
}
