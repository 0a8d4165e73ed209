//! Edge fluxes and control-volume normals recovered from element residuals.
//!
//! The degrees of freedom of an element are the vertices of a small graph.
//! Given nodal values `Psi` summing to zero, the minimum-norm edge fluxes
//! with `A fhat = Psi` are `fhat = A^T L^+ Psi`, `L = A A^T`, where `A` is
//! the node-by-edge incidence matrix (+1 at the tail, -1 at the head).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::basis::{Degree, MAX_LOCAL};
use crate::error::{RdsError, Result};
use crate::law::{rusanov_interface_flux, ConservationLaw};
use crate::residual::{Discretization, FluxForm, GroupKind, SchemeKind};
use crate::space::{combine, ElementData, FaceData, FacePoint};
use crate::vec2::Vec2;

const P1_EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];
const P2_EDGES: [(usize, usize); 9] = [(0, 3), (0, 5), (3, 5), (4, 3), (3, 1), (1, 4), (4, 2), (5, 2), (5, 4)];

/// Relative tolerance on `sum Psi` before recovery.
const ZERO_SUM_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct ElementGraph {
    degree: Degree,
    edges: Vec<(usize, usize)>,
    incidence: DMatrix<f64>,
    /// Factor of `L + 1 1^T / n`.
    factor: Cholesky<f64, Dyn>,
}

impl ElementGraph {
    /// Cyclic triangle for P1; the sub-triangulation through the edge
    /// midpoints for P2.
    pub fn new(degree: Degree) -> Self {
        let edges: Vec<(usize, usize)> = match degree {
            Degree::P1 => P1_EDGES.to_vec(),
            Degree::P2 => P2_EDGES.to_vec(),
        };
        let n = degree.local_dofs();
        let mut incidence = DMatrix::zeros(n, edges.len());
        for (e, &(tail, head)) in edges.iter().enumerate() {
            incidence[(tail, e)] = 1.0;
            incidence[(head, e)] = -1.0;
        }
        let shifted = &incidence * incidence.transpose() + DMatrix::from_element(n, n, 1.0 / n as f64);
        let factor = Cholesky::new(shifted).expect("graph Laplacian of a connected graph");
        Self {
            degree,
            edges,
            incidence,
            factor,
        }
    }

    pub fn for_order(k: usize) -> Result<Self> {
        Degree::new(k).map(Self::new)
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.incidence.nrows()
    }

    /// Directed edges `(tail, head)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn incidence(&self) -> &DMatrix<f64> {
        &self.incidence
    }

    /// `L = A A^T`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        &self.incidence * self.incidence.transpose()
    }

    /// `A fhat`: the nodal sums of outgoing minus incoming edge values.
    pub fn divergence(&self, fluxes: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_dofs()];
        for (&(tail, head), &f) in self.edges.iter().zip(fluxes) {
            out[tail] += f;
            out[head] -= f;
        }
        out
    }

    /// Whether every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let n = self.num_dofs();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Fundamental cycles of a spanning tree as signed edge vectors.
    pub fn cycle_basis(&self) -> Vec<Vec<f64>> {
        let n = self.num_dofs();
        // parent[v] = (parent node, edge id, sign of the edge walked from parent to v)
        let mut parent: Vec<Option<(usize, usize, f64)>> = vec![None; n];
        let mut in_tree = vec![false; self.edges.len()];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                let next = if a == v {
                    Some((b, 1.0))
                } else if b == v {
                    Some((a, -1.0))
                } else {
                    None
                };
                if let Some((w, sign)) = next {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((v, e, sign));
                        in_tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let path_to_root = |mut v: usize, cycle: &mut [f64], sign: f64| {
            while let Some((p, e, s)) = parent[v] {
                cycle[e] += sign * s;
                v = p;
            }
        };
        self.edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| !in_tree[e])
            .map(|(e, &(a, b))| {
                // Walk a -> b along the edge, then b -> root -> a through the tree.
                let mut cycle = vec![0.0; self.edges.len()];
                cycle[e] = 1.0;
                path_to_root(b, &mut cycle, -1.0);
                path_to_root(a, &mut cycle, 1.0);
                cycle
            })
            .collect()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let x = self.factor.solve(&DVector::from_column_slice(rhs));
        (self.incidence.transpose() * x).iter().copied().collect()
    }
}

fn check_zero_sum(values: impl Iterator<Item = f64> + Clone) -> Result<()> {
    let scale: f64 = values.clone().map(f64::abs).sum();
    check_zero_sum_scaled(values, scale)
}

/// `scale` is the size of the quantities `values` was computed from.
fn check_zero_sum_scaled(values: impl Iterator<Item = f64>, scale: f64) -> Result<()> {
    let sum: f64 = values.sum();
    let tol = ZERO_SUM_TOL * scale.max(f64::MIN_POSITIVE);
    if sum.abs() > tol && scale > 0.0 {
        return Err(RdsError::ConservationViolation { sum, tol });
    }
    Ok(())
}

/// Minimum-norm edge fluxes with `A fhat = Psi`.
pub fn recover_fluxes(graph: &ElementGraph, psi: &[f64]) -> Result<Vec<f64>> {
    if psi.len() != graph.num_dofs() {
        return Err(RdsError::InvalidParameter(format!(
            "expected {} nodal values, got {}",
            graph.num_dofs(),
            psi.len()
        )));
    }
    check_zero_sum(psi.iter().copied())?;
    Ok(graph.solve(psi))
}

/// Closed form of the P1 recovery.
pub fn p1_explicit_fluxes(psi: [f64; 3]) -> Result<[f64; 3]> {
    check_zero_sum(psi.iter().copied())?;
    Ok([
        (psi[0] - psi[1]) / 3.0,
        (psi[1] - psi[2]) / 3.0,
        (psi[2] - psi[0]) / 3.0,
    ])
}

/// Tabulated closed-form P2 coefficients, `(weight, plus, minus)` with
/// one-based node numbers, one row per graph edge.
const P2_TABLE: [&[(f64, usize, usize)]; 9] = [
    &[
        (1.0 / 12.0, 1, 4),
        (1.0 / 36.0, 6, 5),
        (7.0 / 36.0, 1, 2),
        (5.0 / 36.0, 3, 1),
    ],
    &[
        (1.0 / 12.0, 4, 1),
        (5.0 / 36.0, 5, 1),
        (7.0 / 36.0, 6, 1),
        (1.0 / 36.0, 3, 2),
    ],
    &[(2.0 / 9.0, 2, 6), (1.0 / 9.0, 3, 5)],
    &[(2.0 / 9.0, 5, 2), (1.0 / 9.0, 5, 1)],
    &[
        (7.0 / 36.0, 2, 3),
        (5.0 / 36.0, 1, 3),
        (1.0 / 12.0, 6, 3),
        (1.0 / 36.0, 5, 4),
    ],
    &[
        (1.0 / 36.0, 2, 1),
        (5.0 / 36.0, 3, 5),
        (7.0 / 36.0, 3, 5),
        (1.0 / 12.0, 3, 6),
    ],
    &[
        (1.0 / 36.0, 1, 6),
        (5.0 / 36.0, 3, 5),
        (7.0 / 36.0, 4, 5),
        (1.0 / 12.0, 2, 5),
    ],
    &[
        (1.0 / 36.0, 4, 3),
        (5.0 / 36.0, 5, 1),
        (7.0 / 36.0, 5, 6),
        (1.0 / 12.0, 5, 2),
    ],
    &[(1.0 / 9.0, 1, 3), (2.0 / 9.0, 6, 4)],
];

/// Evaluates the tabulated P2 coefficients as given. They are not a solution of
/// `A fhat = Psi` in general; see [`compare_p2_table`].
pub fn p2_explicit_fluxes(psi: [f64; 6]) -> Result<[f64; 9]> {
    check_zero_sum(psi.iter().copied())?;
    Ok(std::array::from_fn(|e| {
        P2_TABLE[e]
            .iter()
            .map(|&(w, plus, minus)| w * (psi[plus - 1] - psi[minus - 1]))
            .sum()
    }))
}

/// Tabulated P2 coefficients against the general solve for one `Psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2TableComparison {
    pub table: [f64; 9],
    pub general: [f64; 9],
    /// `max |A fhat_table - Psi|`.
    pub reconstruction_defect: f64,
    /// `max |fhat_table - fhat_general|`.
    pub max_difference: f64,
}

pub fn compare_p2_table(psi: [f64; 6]) -> Result<P2TableComparison> {
    let graph = ElementGraph::new(Degree::P2);
    let table = p2_explicit_fluxes(psi)?;
    let general: [f64; 9] = recover_fluxes(&graph, &psi)?.try_into().expect("nine edges");
    let div = graph.divergence(&table);
    Ok(P2TableComparison {
        table,
        general,
        reconstruction_defect: div.iter().zip(&psi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        max_difference: table
            .iter()
            .zip(&general)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
    })
}

/// Edge normals `A^T L^+ N`, componentwise.
pub fn recover_normals(graph: &ElementGraph, normals: &[Vec2]) -> Result<Vec<Vec2>> {
    if normals.len() != graph.num_dofs() {
        return Err(RdsError::InvalidParameter(format!(
            "expected {} nodal normals, got {}",
            graph.num_dofs(),
            normals.len()
        )));
    }
    let scale: f64 = normals.iter().map(|n| n.norm()).sum();
    check_zero_sum_scaled(normals.iter().map(|n| n.x), scale)?;
    check_zero_sum_scaled(normals.iter().map(|n| n.y), scale)?;
    let xs: Vec<f64> = normals.iter().map(|n| n.x).collect();
    let ys: Vec<f64> = normals.iter().map(|n| n.y).collect();
    let (fx, fy) = (graph.solve(&xs), graph.solve(&ys));
    Ok(fx.into_iter().zip(fy).map(|(x, y)| Vec2::new(x, y)).collect())
}

/// `int_dK phi_i n` for every local node.
pub fn dof_boundary_normals(e: &ElementData, n: usize) -> Vec<Vec2> {
    let mut out = vec![Vec2::ZERO; n];
    for face in &e.faces {
        for q in &face.points {
            for (i, o) in out.iter_mut().enumerate() {
                *o += face.normal * (q.weight * q.phi[i]);
            }
        }
    }
    out
}

/// Normals of the control-volume faces: the edge normals for which a
/// constant state recovers `fhat = f(u) . n_ij`. They solve
/// `A n = -int_dK phi n`, and point from the tail node to the head node.
pub fn control_volume_normals(graph: &ElementGraph, e: &ElementData) -> Result<Vec<Vec2>> {
    let boundary: Vec<Vec2> = dof_boundary_normals(e, graph.num_dofs())
        .into_iter()
        .map(|v| -v)
        .collect();
    recover_normals(graph, &boundary)
}

/// `int_dK phi_i fhat_n` where `flux` returns the numerical flux through the
/// scaled face normal at a face point.
pub fn boundary_dof_fluxes(
    e: &ElementData,
    n: usize,
    mut flux: impl FnMut(&FaceData, &FacePoint) -> f64,
) -> [f64; MAX_LOCAL] {
    let mut out = [0.0; MAX_LOCAL];
    for face in &e.faces {
        for q in &face.points {
            let v = q.weight * flux(face, q);
            for (i, o) in out.iter_mut().enumerate().take(n) {
                *o += q.phi[i] * v;
            }
        }
    }
    out
}

/// Edge fluxes of the Rusanov residual on a P1 element:
/// `fbar . n_ij + alpha / 3 (u_i - u_j)` with `fbar` the mean of `f^h`.
pub fn rusanov_flux_form(law: &ConservationLaw, e: &ElementData, u: &[f64; 3], alpha: f64) -> Result<[f64; 3]> {
    let normals = control_volume_normals(&ElementGraph::new(Degree::P1), e)?;
    let mean: Vec2 = u.iter().map(|&v| law.flux(v)).sum::<Vec2>() / 3.0;
    Ok(std::array::from_fn(|k| {
        let (i, j) = P1_EDGES[k];
        mean.dot(normals[k]) + alpha / 3.0 * (u[i] - u[j])
    }))
}

/// Edge fluxes of the discontinuous Galerkin residual on a P1 element when
/// the boundary fluxes carry the interface terms: `fbar . n_ij` with `fbar`
/// the mean of `f(u^h)` over the element.
pub fn dg_flux_form(law: &ConservationLaw, e: &ElementData, u: &[f64; MAX_LOCAL]) -> Result<[f64; 3]> {
    let normals = control_volume_normals(&ElementGraph::new(Degree::P1), e)?;
    let mut integral = Vec2::ZERO;
    for q in &e.volume {
        integral += law.flux(combine(&q.phi, u, 3)) * q.weight;
    }
    let mean = integral / e.area;
    Ok(std::array::from_fn(|k| mean.dot(normals[k])))
}

/// `int_dK phi_i fhat_n` for element `k` of `disc`, with the interface flux
/// the scheme itself uses on the element boundary.
pub fn element_boundary_fluxes(disc: &Discretization, k: usize, u: &[f64]) -> [f64; MAX_LOCAL] {
    let space = disc.space();
    let law = disc.law();
    let n = space.local_dofs();
    let kind = disc.config().kind;
    let form = disc.config().flux_form();
    let local = space.gather(k, u);
    boundary_dof_fluxes(space.element(k), n, |face, q| {
        let inner = combine(&q.phi, &local, n);
        match (kind, face.neighbor) {
            (SchemeKind::Dg, Some(side)) => {
                let outer = combine(&q.neighbor_phi, &space.gather(side.element, u), n);
                rusanov_interface_flux(law, inner, outer, face.normal)
            }
            _ => match form {
                FluxForm::Exact => law.flux(inner).dot(face.normal),
                FluxForm::Interpolated => (0..n).map(|j| q.phi[j] * law.flux(local[j]).dot(face.normal)).sum(),
            },
        }
    })
}

/// One recovered edge flux with its checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxAuditRow {
    pub element: usize,
    /// Local directed edge index in the element graph.
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub flux: f64,
    /// `max |A fhat - Psi|` on the element, relative to the largest residual,
    /// boundary flux or assembled flux term entering `Psi`.
    pub reconstruction_defect: f64,
    /// `|fhat(c) - f(c) . n_ij|` for the constant state at the element mean,
    /// relative to `max(1, max |f(c)| |n_ij|)`.
    pub consistency_defect: f64,
}

/// Recovers edge fluxes from every element residual of `disc` at `u`.
pub fn flux_audit(disc: &Discretization, u: &[f64]) -> Result<Vec<FluxAuditRow>> {
    let space = disc.space();
    let law = disc.law();
    let n = space.local_dofs();
    let graph = ElementGraph::new(space.degree());
    let set = disc.residual_set(u)?;
    let mut rows = Vec::new();
    for group in &set.groups {
        let GroupKind::Element(k) = group.kind else {
            continue;
        };
        let e = space.element(k);
        let local = space.gather(k, u);
        let fb = element_boundary_fluxes(disc, k, u);
        let psi: Vec<f64> = (0..n).map(|i| group.values[i] - fb[i]).collect();
        // Psi is a difference of larger terms; judge its sum against them.
        let inputs: f64 = group.values.iter().chain(&fb[..n]).map(|v| v.abs()).sum::<f64>() + group.magnitude;
        check_zero_sum_scaled(psi.iter().copied(), inputs)?;
        let fluxes = graph.solve(&psi);
        let div = graph.divergence(&fluxes);
        let scale = psi
            .iter()
            .chain(&group.values)
            .chain(&fb[..n])
            .fold(group.magnitude, |m, v| m.max(v.abs()));
        let defect = div.iter().zip(&psi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let reconstruction_defect = if scale > 0.0 { defect / scale } else { defect };

        let mean = local[..n].iter().sum::<f64>() / n as f64;
        let fc = law.flux(mean);
        let normals = control_volume_normals(&graph, e)?;
        let boundary = dof_boundary_normals(e, n);
        let psi_c: Vec<f64> = boundary.iter().map(|nb| -fc.dot(*nb)).collect();
        let geometric: f64 = boundary.iter().map(|nb| fc.norm() * nb.norm()).sum();
        check_zero_sum_scaled(psi_c.iter().copied(), geometric)?;
        let fluxes_c = graph.solve(&psi_c);
        let flux_scale = normals.iter().fold(0.0f64, |m, v| m.max(fc.norm() * v.norm())).max(1.0);
        for (edge, &(tail, head)) in graph.edges().iter().enumerate() {
            rows.push(FluxAuditRow {
                element: k,
                edge,
                tail,
                head,
                flux: fluxes[edge],
                reconstruction_defect,
                consistency_defect: (fluxes_c[edge] - fc.dot(normals[edge])).abs() / flux_scale,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Mesh, Rect};
    use crate::space::{Continuity, Space};
    use proptest::prelude::*;

    fn unit_element() -> ElementData {
        let mesh = Mesh::with_uniform_marker(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
            1,
        )
        .unwrap();
        Space::new(mesh, Degree::P1, Continuity::Continuous)
            .unwrap()
            .element(0)
            .clone()
    }

    #[test]
    fn p1_incidence_matrix_entries() {
        let g = ElementGraph::new(Degree::P1);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, -1.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(g.incidence(), &expected);
        assert_eq!(g.laplacian().rank(1e-12), 2);
        assert!(ElementGraph::for_order(3).is_err());
    }

    #[test]
    fn p2_graph_shape() {
        let g = ElementGraph::new(Degree::P2);
        assert_eq!(g.edges().len(), 9);
        assert!(g.is_connected());
        assert_eq!(g.laplacian().rank(1e-12), 5);
        assert_eq!(g.cycle_basis().len(), 4);
        for c in g.cycle_basis() {
            assert!(g.divergence(&c).iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn column_sums_vanish() {
        for d in [Degree::P1, Degree::P2] {
            let g = ElementGraph::new(d);
            for c in g.incidence().column_iter() {
                assert_eq!(c.sum(), 0.0);
            }
        }
    }

    #[test]
    fn shifted_laplacian_is_positive_definite() {
        for d in [Degree::P1, Degree::P2] {
            let g = ElementGraph::new(d);
            let n = g.num_dofs();
            let m = g.laplacian() + DMatrix::from_element(n, n, 1.0 / n as f64);
            let eig = m.symmetric_eigenvalues();
            assert!(eig.iter().all(|&l| l >= 1.0 / n as f64 - 1e-12));
        }
    }

    #[test]
    fn recovery_examples() {
        let g = ElementGraph::new(Degree::P1);
        let f = recover_fluxes(&g, &[1.0, -1.0, 0.0]).unwrap();
        for (a, b) in f.iter().zip([2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let f = recover_fluxes(&g, &[1.0, 1.0, -2.0]).unwrap();
        for (a, b) in f.iter().zip([0.0, 1.0, -1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(recover_fluxes(&g, &[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(matches!(
            recover_fluxes(&g, &[1.0, 0.0, 0.0]),
            Err(RdsError::ConservationViolation { .. })
        ));
        assert_eq!(
            p1_explicit_fluxes([1.0, -1.0, 0.0]).unwrap(),
            [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]
        );
    }

    #[test]
    fn tabulated_p2_entry() {
        let f = p2_explicit_fluxes([0.0, 1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((f[2] - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(p2_explicit_fluxes([0.0; 6]).unwrap(), [0.0; 9]);
    }

    #[test]
    fn boundary_normals_of_unit_triangle() {
        let e = unit_element();
        let nb = dof_boundary_normals(&e, 3);
        for i in 0..3 {
            assert!((nb[i] - e.inward_normals[i] * 0.5).norm() < 1e-15);
        }
        let g = ElementGraph::new(Degree::P1);
        let normals = control_volume_normals(&g, &e).unwrap();
        // Dual face from the midpoint of edge 01 to the centroid, pointing from 0 to 1.
        assert!((normals[0] - Vec2::new(2.0, 1.0) / 6.0).norm() < 1e-15);
    }

    #[test]
    fn p2_boundary_normals() {
        let mesh = Mesh::structured(1, 1, Rect::UNIT).unwrap();
        let space = Space::new(mesh, Degree::P2, Continuity::Continuous).unwrap();
        let e = space.element(0);
        let nb = dof_boundary_normals(e, 6);
        let total: Vec2 = nb.iter().copied().sum();
        assert!(total.norm() < 1e-15);
        for i in 0..3 {
            assert!((nb[i] - e.inward_normals[i] / 6.0).norm() < 1e-15);
            // Midpoint of face i lies opposite vertex i + 2.
            assert!((nb[3 + i] + e.inward_normals[(i + 2) % 3] * (2.0 / 3.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn flux_forms_match_general_recovery() {
        let mesh = Mesh::structured(2, 2, Rect::UNIT).unwrap();
        let space = Space::new(mesh, Degree::P1, Continuity::Continuous).unwrap();
        let g = ElementGraph::new(Degree::P1);
        let law = ConservationLaw::Burgers;
        let e = space.element(3);
        let u = [0.3, -0.8, 1.1, 0.0, 0.0, 0.0];
        let split = crate::residual::rusanov_split(&law, e, &u, 3, None);
        let fb = boundary_dof_fluxes(e, 3, |face, q| {
            (0..3).map(|j| q.phi[j] * law.flux(u[j]).dot(face.normal)).sum()
        });
        let psi: Vec<f64> = (0..3).map(|i| split.values[i] - fb[i]).collect();
        let general = recover_fluxes(&g, &psi).unwrap();
        let form = rusanov_flux_form(&law, e, &[u[0], u[1], u[2]], split.alpha).unwrap();
        for k in 0..3 {
            assert!((general[k] - form[k]).abs() < 1e-13);
        }
        let constant = rusanov_flux_form(&law, e, &[0.4; 3], 2.0).unwrap();
        let normals = control_volume_normals(&g, e).unwrap();
        for k in 0..3 {
            assert!((constant[k] - law.flux(0.4).dot(normals[k])).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn recovery_is_minimum_norm(raw in prop::collection::vec(-1.0f64..1.0, 6)) {
            for d in [Degree::P1, Degree::P2] {
                let g = ElementGraph::new(d);
                let n = g.num_dofs();
                let mean = raw[..n].iter().sum::<f64>() / n as f64;
                let psi: Vec<f64> = raw[..n].iter().map(|v| v - mean).collect();
                let f = recover_fluxes(&g, &psi).unwrap();
                let div = g.divergence(&f);
                for (a, b) in div.iter().zip(&psi) {
                    prop_assert!((a - b).abs() < 1e-13);
                }
                for c in g.cycle_basis() {
                    let dot: f64 = c.iter().zip(&f).map(|(a, b)| a * b).sum();
                    prop_assert!(dot.abs() < 1e-13);
                }
                if d == Degree::P1 {
                    let closed = p1_explicit_fluxes([psi[0], psi[1], psi[2]]).unwrap();
                    for k in 0..3 {
                        prop_assert!((closed[k] - f[k]).abs() < 1e-15);
                    }
                }
            }
        }
    }
}
