use crate::basis::MAX_LOCAL;
use crate::space::Space;
use crate::vec2::Vec2;

pub const MAX_EDGE_GROUP: usize = 2 * MAX_LOCAL;

/// Residual of the gradient-jump term attached to one interior edge, over
/// the nodes of both adjacent elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpResidual {
    pub dofs: [usize; MAX_EDGE_GROUP],
    pub values: [f64; MAX_EDGE_GROUP],
    /// Absolute row sums of the linear jump operator, for pseudo-time steps.
    pub weights: [f64; MAX_EDGE_GROUP],
    pub len: usize,
}

/// `theta_e h_e^2 int_e [grad u^h] . [grad phi_i]`, `[w] = w_left - w_right`.
/// Returns `None` for boundary edges.
pub fn jump_edge_residual(space: &Space, edge: usize, u: &[f64], theta_e: f64) -> Option<JumpResidual> {
    let e = &space.mesh().edges()[edge];
    let right = e.right?;
    let n = space.local_dofs();
    let face = &space.element(e.left.element).faces[e.left.face];
    let left_dofs = space.element_dofs(e.left.element);
    let right_dofs = space.element_dofs(right.element);

    let mut out = JumpResidual {
        dofs: [0; MAX_EDGE_GROUP],
        values: [0.0; MAX_EDGE_GROUP],
        weights: [0.0; MAX_EDGE_GROUP],
        len: 0,
    };
    // slot of each right-element node inside the group
    let mut right_slot = [0usize; MAX_LOCAL];
    out.dofs[..n].copy_from_slice(left_dofs);
    out.len = n;
    for (j, &d) in right_dofs.iter().enumerate() {
        right_slot[j] = match left_dofs.iter().position(|&l| l == d) {
            Some(i) => i,
            None => {
                out.dofs[out.len] = d;
                out.len += 1;
                out.len - 1
            }
        };
    }
    let scale = theta_e * face.length * face.length * face.length;
    for q in &face.points {
        let gl: Vec2 = (0..n).map(|i| q.grad[i] * u[left_dofs[i]]).sum();
        let gr: Vec2 = (0..n).map(|j| q.neighbor_grad[j] * u[right_dofs[j]]).sum();
        let jump = (gl - gr) * (scale * q.weight);
        for i in 0..n {
            out.values[i] += jump.dot(q.grad[i]);
        }
        for j in 0..n {
            out.values[right_slot[j]] -= jump.dot(q.neighbor_grad[j]);
        }
        let mut jumps = [Vec2::ZERO; MAX_EDGE_GROUP];
        for i in 0..n {
            jumps[i] += q.grad[i];
            jumps[right_slot[i]] -= q.neighbor_grad[i];
        }
        for a in 0..out.len {
            for b in 0..out.len {
                out.weights[a] += (scale * q.weight * jumps[a].dot(jumps[b])).abs();
            }
        }
    }
    Some(out)
}
