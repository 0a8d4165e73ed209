//! Degree-of-freedom layouts and per-element integration data.

use crate::basis::{Degree, ShapeEval, MAX_LOCAL};
use crate::error::Result;
use crate::mesh::{EdgeSide, Mesh};
use crate::quadrature::{edge_rule, triangle_rule, DEFAULT_EDGE_DEGREE, DEFAULT_TRIANGLE_DEGREE};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuity {
    Continuous,
    Discontinuous,
}

/// Local-to-global map of a Lagrange space on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    degree: Degree,
    continuity: Continuity,
    element_dofs: Vec<usize>,
    coords: Vec<Vec2>,
}

impl DofLayout {
    pub fn new(mesh: &Mesh, degree: Degree, continuity: Continuity) -> Self {
        let nloc = degree.local_dofs();
        let mut element_dofs = Vec::with_capacity(mesh.num_elements() * nloc);
        let mut coords = Vec::new();
        match continuity {
            Continuity::Continuous => {
                coords.extend_from_slice(mesh.vertices());
                let nv = coords.len();
                if degree == Degree::P2 {
                    coords.extend(
                        mesh.edges()
                            .iter()
                            .map(|e| (mesh.vertices()[e.vertices[0]] + mesh.vertices()[e.vertices[1]]) * 0.5),
                    );
                }
                for (k, t) in mesh.triangles().iter().enumerate() {
                    element_dofs.extend_from_slice(t);
                    if degree == Degree::P2 {
                        element_dofs.extend(mesh.element_edges(k).iter().map(|&e| nv + e));
                    }
                }
            }
            Continuity::Discontinuous => {
                for k in 0..mesh.num_elements() {
                    let p = mesh.corners(k);
                    for i in 0..nloc {
                        let l = degree.node(i);
                        coords.push(p[0] * l[0] + p[1] * l[1] + p[2] * l[2]);
                        element_dofs.push(k * nloc + i);
                    }
                }
            }
        }
        Self {
            degree,
            continuity,
            element_dofs,
            coords,
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn local_dofs(&self) -> usize {
        self.degree.local_dofs()
    }

    pub fn num_dofs(&self) -> usize {
        self.coords.len()
    }

    pub fn element_dofs(&self, k: usize) -> &[usize] {
        let n = self.local_dofs();
        &self.element_dofs[k * n..(k + 1) * n]
    }

    pub fn coords(&self) -> &[Vec2] {
        &self.coords
    }

    pub fn interpolate(&self, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
        self.coords.iter().map(|&x| f(x)).collect()
    }
}

/// Element quadrature point with shape data.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumePoint {
    /// Physical weight: integrals are `sum(weight * g(point))`.
    pub weight: f64,
    pub position: Vec2,
    pub phi: [f64; MAX_LOCAL],
    pub grad: [Vec2; MAX_LOCAL],
}

/// Face quadrature point. `weight` is the reference weight on `[0, 1]`;
/// face integrals of `g . n` are `sum(weight * g(point) . normal)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePoint {
    pub weight: f64,
    pub position: Vec2,
    pub phi: [f64; MAX_LOCAL],
    pub grad: [Vec2; MAX_LOCAL],
    /// Neighbor shape values at the same physical point (zero on the boundary).
    pub neighbor_phi: [f64; MAX_LOCAL],
    pub neighbor_grad: [Vec2; MAX_LOCAL],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceData {
    pub edge: usize,
    /// Outward normal scaled by the face length.
    pub normal: Vec2,
    pub length: f64,
    pub neighbor: Option<EdgeSide>,
    pub marker: Option<u32>,
    pub points: Vec<FacePoint>,
}

impl FaceData {
    pub fn unit_normal(&self) -> Vec2 {
        self.normal / self.length
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementData {
    pub area: f64,
    pub diameter: f64,
    /// Scaled inward vertex normals `2|K| grad(lambda_i)`.
    pub inward_normals: [Vec2; 3],
    pub grad_lambda: [Vec2; 3],
    pub volume: Vec<VolumePoint>,
    pub faces: [FaceData; 3],
    /// `coupling[i][j] = int_K phi_i grad(phi_j)`.
    pub coupling: [[Vec2; MAX_LOCAL]; MAX_LOCAL],
    /// `moments[i] = int_dK phi_i n = int_K grad(phi_i)`.
    pub moments: [Vec2; MAX_LOCAL],
}

/// Mesh, layout and precomputed integration data.
#[derive(Debug, Clone)]
pub struct Space {
    mesh: Mesh,
    layout: DofLayout,
    elements: Vec<ElementData>,
}

impl Space {
    pub fn new(mesh: Mesh, degree: Degree, continuity: Continuity) -> Result<Self> {
        Self::with_rules(mesh, degree, continuity, DEFAULT_TRIANGLE_DEGREE, DEFAULT_EDGE_DEGREE)
    }

    pub fn with_rules(
        mesh: Mesh,
        degree: Degree,
        continuity: Continuity,
        triangle_degree: usize,
        edge_degree: usize,
    ) -> Result<Self> {
        let tri = triangle_rule(triangle_degree)?;
        let seg = edge_rule(edge_degree)?;
        let layout = DofLayout::new(&mesh, degree, continuity);
        let nloc = degree.local_dofs();
        let elements = (0..mesh.num_elements())
            .map(|k| {
                let area = mesh.element_area(k);
                let p = mesh.corners(k);
                let inward_normals = mesh.scaled_inward_normals(k);
                let grad_lambda = inward_normals.map(|n| n / (2.0 * area));
                let volume: Vec<VolumePoint> = tri
                    .points
                    .iter()
                    .zip(&tri.weights)
                    .map(|(l, w)| {
                        let s = ShapeEval::new(degree, *l);
                        VolumePoint {
                            weight: 2.0 * area * w,
                            position: p[0] * l[0] + p[1] * l[1] + p[2] * l[2],
                            phi: s.values,
                            grad: s.gradients(&grad_lambda),
                        }
                    })
                    .collect();
                let faces = std::array::from_fn(|f| {
                    let edge = mesh.element_edges(k)[f];
                    let e = &mesh.edges()[edge];
                    let neighbor = if e.left.element == k { e.right } else { Some(e.left) };
                    let normal = mesh.face_normal(k, f);
                    let points = seg
                        .points
                        .iter()
                        .zip(&seg.weights)
                        .map(|(&t, &w)| {
                            let mut l = [0.0; 3];
                            l[f] = 1.0 - t;
                            l[(f + 1) % 3] = t;
                            let (neighbor_phi, neighbor_grad) =
                                neighbor.map_or(([0.0; MAX_LOCAL], [Vec2::ZERO; MAX_LOCAL]), |side| {
                                    let mut ln = [0.0; 3];
                                    ln[side.face] = t;
                                    ln[(side.face + 1) % 3] = 1.0 - t;
                                    let s = ShapeEval::new(degree, ln);
                                    let gl = mesh
                                        .scaled_inward_normals(side.element)
                                        .map(|n| n / (2.0 * mesh.element_area(side.element)));
                                    (s.values, s.gradients(&gl))
                                });
                            let own = ShapeEval::new(degree, l);
                            FacePoint {
                                weight: w,
                                position: p[f] * (1.0 - t) + p[(f + 1) % 3] * t,
                                phi: own.values,
                                grad: own.gradients(&grad_lambda),
                                neighbor_phi,
                                neighbor_grad,
                            }
                        })
                        .collect();
                    FaceData {
                        edge,
                        normal,
                        length: normal.norm(),
                        neighbor,
                        marker: e.marker,
                        points,
                    }
                });
                let mut coupling = [[Vec2::ZERO; MAX_LOCAL]; MAX_LOCAL];
                let mut moments = [Vec2::ZERO; MAX_LOCAL];
                for q in &volume {
                    for i in 0..nloc {
                        moments[i] += q.grad[i] * q.weight;
                        for j in 0..nloc {
                            coupling[i][j] += q.grad[j] * (q.weight * q.phi[i]);
                        }
                    }
                }
                ElementData {
                    area,
                    diameter: mesh.diameter(k),
                    inward_normals,
                    grad_lambda,
                    volume,
                    faces,
                    coupling,
                    moments,
                }
            })
            .collect();
        Ok(Self { mesh, layout, elements })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn degree(&self) -> Degree {
        self.layout.degree()
    }

    pub fn local_dofs(&self) -> usize {
        self.layout.local_dofs()
    }

    pub fn num_dofs(&self) -> usize {
        self.layout.num_dofs()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, k: usize) -> &ElementData {
        &self.elements[k]
    }

    pub fn elements(&self) -> &[ElementData] {
        &self.elements
    }

    pub fn element_dofs(&self, k: usize) -> &[usize] {
        self.layout.element_dofs(k)
    }

    /// Nodal values of element `k`, padded with zeros.
    pub fn gather(&self, k: usize, u: &[f64]) -> [f64; MAX_LOCAL] {
        let mut out = [0.0; MAX_LOCAL];
        for (o, &d) in out.iter_mut().zip(self.element_dofs(k)) {
            *o = u[d];
        }
        out
    }

    /// Boundary faces as `(element, local face)` pairs, in edge order.
    pub fn boundary_faces(&self) -> impl Iterator<Item = EdgeSide> + '_ {
        self.mesh.boundary_edges().iter().map(|&e| self.mesh.edges()[e].left)
    }

    pub fn interpolate(&self, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
        self.layout.interpolate(f)
    }
}

/// `sum_i phi[i] * local[i]`.
pub fn combine(phi: &[f64; MAX_LOCAL], local: &[f64; MAX_LOCAL], n: usize) -> f64 {
    phi[..n].iter().zip(&local[..n]).map(|(a, b)| a * b).sum()
}

/// `sum_i grad[i] * local[i]`.
pub fn combine_grad(grad: &[Vec2; MAX_LOCAL], local: &[f64; MAX_LOCAL], n: usize) -> Vec2 {
    grad[..n].iter().zip(&local[..n]).map(|(g, &u)| *g * u).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use proptest::prelude::*;

    fn spaces() -> Vec<Space> {
        let mesh = Mesh::structured(3, 2, Rect::new(0.0, 1.5, -0.5, 0.5).unwrap()).unwrap();
        [Degree::P1, Degree::P2]
            .into_iter()
            .flat_map(|d| {
                let mesh = mesh.clone();
                [Continuity::Continuous, Continuity::Discontinuous]
                    .into_iter()
                    .map(move |c| Space::new(mesh.clone(), d, c).unwrap())
            })
            .collect()
    }

    #[test]
    fn dof_counts() {
        let mesh = Mesh::structured(2, 2, Rect::UNIT).unwrap();
        let p1 = DofLayout::new(&mesh, Degree::P1, Continuity::Continuous);
        assert_eq!(p1.num_dofs(), 9);
        let p2 = DofLayout::new(&mesh, Degree::P2, Continuity::Continuous);
        assert_eq!(p2.num_dofs(), 25);
        let d1 = DofLayout::new(&mesh, Degree::P1, Continuity::Discontinuous);
        assert_eq!(d1.num_dofs(), 24);
        assert_eq!(p2.local_dofs(), 6);
    }

    #[test]
    fn shared_dofs_have_shared_coordinates() {
        for s in spaces() {
            let l = s.layout();
            let mut owners = vec![0usize; l.num_dofs()];
            for k in 0..s.num_elements() {
                let p = s.mesh().corners(k);
                for (i, &d) in l.element_dofs(k).iter().enumerate() {
                    owners[d] += 1;
                    let b = l.degree().node(i);
                    let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
                    assert!((x - l.coords()[d]).norm() < 1e-15);
                }
            }
            match l.continuity() {
                Continuity::Discontinuous => assert!(owners.iter().all(|&c| c == 1)),
                Continuity::Continuous => assert!(owners.iter().any(|&c| c > 1)),
            }
        }
    }

    #[test]
    fn neighbor_traces_match() {
        for s in spaces() {
            let u = s.interpolate(|x| 1.0 + x.x - 2.0 * x.y + 0.5 * x.x * x.y);
            for k in 0..s.num_elements() {
                let local = s.gather(k, &u);
                for face in &s.element(k).faces {
                    let Some(side) = face.neighbor else { continue };
                    let other = s.gather(side.element, &u);
                    for q in &face.points {
                        let a = combine(&q.phi, &local, s.local_dofs());
                        let b = combine(&q.neighbor_phi, &other, s.local_dofs());
                        let exact = 1.0 + q.position.x - 2.0 * q.position.y + 0.5 * q.position.x * q.position.y;
                        assert!((a - b).abs() < 1e-14);
                        if s.degree() == Degree::P2 {
                            assert!((a - exact).abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn moments_match_face_integrals() {
        for s in spaces() {
            for e in s.elements() {
                for i in 0..s.local_dofs() {
                    let face: Vec2 = e
                        .faces
                        .iter()
                        .flat_map(|f| f.points.iter().map(move |q| f.normal * (q.weight * q.phi[i])))
                        .sum();
                    assert!((face - e.moments[i]).norm() < 1e-14);
                }
                let total: Vec2 = e.moments[..s.local_dofs()].iter().copied().sum();
                assert!(total.norm() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn divergence_closure(cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
            let c = Vec2::new(cx, cy);
            for s in spaces() {
                for e in s.elements() {
                    let flux: f64 = e.faces.iter()
                        .flat_map(|f| f.points.iter().map(move |q| q.weight * c.dot(f.normal)))
                        .sum();
                    prop_assert!(flux.abs() <= 1e-13);
                    for q in &e.volume {
                        let phi: f64 = q.phi[..s.local_dofs()].iter().sum();
                        let grad: Vec2 = q.grad[..s.local_dofs()].iter().copied().sum();
                        prop_assert!((phi - 1.0).abs() < 1e-14);
                        prop_assert!(grad.norm() < 1e-12);
                    }
                }
            }
        }
    }
}
