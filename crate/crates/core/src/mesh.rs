//! Conformal triangular meshes.
//!
//! Local face `j` of a triangle `t` joins `t[j]` and `t[(j + 1) % 3]`; it is
//! opposite local vertex `(j + 2) % 3`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{RdsError, Result};
use crate::vec2::Vec2;

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        xmin: 0.0,
        xmax: 1.0,
        ymin: 0.0,
        ymax: 1.0,
    };

    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmax <= xmin || ymax <= ymin {
            return Err(RdsError::DegenerateRect { xmin, xmax, ymin, ymax });
        }
        Ok(Self { xmin, xmax, ymin, ymax })
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.xmax - self.xmin) + (self.ymax - self.ymin))
    }
}

/// Boundary markers assigned by [`Mesh::structured`].
pub mod marker {
    pub const BOTTOM: u32 = 1;
    pub const RIGHT: u32 = 2;
    pub const TOP: u32 = 3;
    pub const LEFT: u32 = 4;
}

/// One side of an edge: an element and the local face index in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeSide {
    pub element: usize,
    pub face: usize,
}

/// Mesh edge. `vertices` follow the orientation of the left element's face,
/// so the left element's outward normal is `(b - a).rotate_cw()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: EdgeSide,
    pub right: Option<EdgeSide>,
    pub marker: Option<u32>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    element_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh from raw arrays. Every edge with a single adjacent
    /// triangle must be listed in `boundary` as `(a, b, marker)` in either
    /// orientation.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        boundary: &[(usize, usize, u32)],
    ) -> Result<Self> {
        let mut mesh = Self::connect(vertices, triangles)?;
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        for &e in &mesh.boundary_edges {
            let [a, b] = mesh.edges[e].vertices;
            lookup.insert((a.min(b), a.max(b)), e);
        }
        for &(a, b, m) in boundary {
            let e = *lookup
                .get(&(a.min(b), a.max(b)))
                .ok_or_else(|| RdsError::InvalidMesh(format!("boundary face ({a}, {b}) is not a boundary edge")))?;
            if mesh.edges[e].marker.replace(m).is_some() {
                return Err(RdsError::InvalidMesh(format!("boundary face ({a}, {b}) listed twice")));
            }
        }
        if let Some(&e) = mesh.boundary_edges.iter().find(|&&e| mesh.edges[e].marker.is_none()) {
            let [a, b] = mesh.edges[e].vertices;
            return Err(RdsError::InvalidMesh(format!("boundary edge ({a}, {b}) has no marker")));
        }
        Ok(mesh)
    }

    /// Builds a mesh and tags every boundary edge with `marker`.
    pub fn with_uniform_marker(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>, marker: u32) -> Result<Self> {
        let mut mesh = Self::connect(vertices, triangles)?;
        for &e in &mesh.boundary_edges {
            mesh.edges[e].marker = Some(marker);
        }
        Ok(mesh)
    }

    fn connect(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(RdsError::InvalidMesh("no triangles".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(RdsError::InvalidMesh(format!("non-finite vertex {v:?}")));
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 2);
        let mut element_edges = Vec::with_capacity(triangles.len());
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, t) in triangles.iter().enumerate() {
            if let Some(&v) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(RdsError::InvalidMesh(format!(
                    "triangle {k} references missing vertex {v}"
                )));
            }
            let [a, b, c] = t.map(|i| vertices[i]);
            if (b - a).cross(c - a) <= 0.0 {
                return Err(RdsError::InvalidMesh(format!(
                    "triangle {k} has non-positive signed area"
                )));
            }
            let mut ids = [0; 3];
            for (face, id) in ids.iter_mut().enumerate() {
                let (p, q) = (t[face], t[(face + 1) % 3]);
                let side = EdgeSide { element: k, face };
                match index.get(&(p.min(q), p.max(q))) {
                    None => {
                        index.insert((p.min(q), p.max(q)), edges.len());
                        *id = edges.len();
                        edges.push(Edge {
                            vertices: [p, q],
                            left: side,
                            right: None,
                            marker: None,
                        });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() {
                            return Err(RdsError::InvalidMesh(format!(
                                "edge ({p}, {q}) shared by more than two triangles"
                            )));
                        }
                        if edge.vertices != [q, p] {
                            return Err(RdsError::InvalidMesh(format!(
                                "edge ({p}, {q}) traversed twice in the same direction"
                            )));
                        }
                        edge.right = Some(side);
                        *id = e;
                    }
                }
            }
            element_edges.push(ids);
        }
        let boundary_edges = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_boundary())
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            vertices,
            triangles,
            edges,
            element_edges,
            boundary_edges,
        })
    }

    /// Structured mesh of `nx * ny` cells, each split along the diagonal
    /// from its lower-left to its upper-right corner.
    pub fn structured(nx: usize, ny: usize, rect: Rect) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(RdsError::EmptyGrid { nx, ny });
        }
        let rect = Rect::new(rect.xmin, rect.xmax, rect.ymin, rect.ymax)?;
        let dx = (rect.xmax - rect.xmin) / nx as f64;
        let dy = (rect.ymax - rect.ymin) / ny as f64;
        let coord = |i: usize, n: usize, lo: f64, hi: f64, d: f64| {
            if i == n {
                hi
            } else {
                lo + i as f64 * d
            }
        };
        let vertices = (0..=ny)
            .flat_map(|j| {
                (0..=nx).map(move |i| {
                    Vec2::new(
                        coord(i, nx, rect.xmin, rect.xmax, dx),
                        coord(j, ny, rect.ymin, rect.ymax, dy),
                    )
                })
            })
            .collect();
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let mut boundary = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary.push((id(i, 0), id(i + 1, 0), marker::BOTTOM));
            boundary.push((id(i + 1, ny), id(i, ny), marker::TOP));
        }
        for j in 0..ny {
            boundary.push((id(nx, j), id(nx, j + 1), marker::RIGHT));
            boundary.push((id(0, j + 1), id(0, j), marker::LEFT));
        }
        Self::from_parts(vertices, triangles, &boundary)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    /// Edge index of each local face of element `k`.
    pub fn element_edges(&self, k: usize) -> [usize; 3] {
        self.element_edges[k]
    }

    /// Indices into [`Mesh::edges`] of the boundary faces.
    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_boundary())
            .map(|(i, _)| i)
    }

    pub fn corners(&self, k: usize) -> [Vec2; 3] {
        self.triangles[k].map(|i| self.vertices[i])
    }

    pub fn element_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.corners(k);
        0.5 * (b - a).cross(c - a)
    }

    pub fn area(&self) -> f64 {
        (0..self.num_elements()).map(|k| self.element_area(k)).sum()
    }

    /// Area enclosed by the boundary faces, by the shoelace formula.
    pub fn boundary_enclosed_area(&self) -> f64 {
        0.5 * self
            .boundary_edges
            .iter()
            .map(|&e| {
                let [a, b] = self.edges[e].vertices;
                self.vertices[a].cross(self.vertices[b])
            })
            .sum::<f64>()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges.iter().map(|&e| self.edge_length(e)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[b] - self.vertices[a]).norm()
    }

    /// `n_i = 2|K| grad(lambda_i)`: inward normal of the edge opposite
    /// vertex `i`, scaled by that edge's length.
    pub fn scaled_inward_normals(&self, k: usize) -> [Vec2; 3] {
        let p = self.corners(k);
        std::array::from_fn(|i| (p[(i + 2) % 3] - p[(i + 1) % 3]).rotate_ccw())
    }

    /// Outward normal of local face `face`, scaled by the face length.
    pub fn face_normal(&self, k: usize, face: usize) -> Vec2 {
        let p = self.corners(k);
        (p[(face + 1) % 3] - p[face]).rotate_cw()
    }

    /// Longest edge of element `k`.
    pub fn diameter(&self, k: usize) -> f64 {
        let p = self.corners(k);
        (0..3).map(|i| (p[(i + 1) % 3] - p[i]).norm()).fold(0.0, f64::max)
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        (0..self.num_elements()).map(|k| self.diameter(k)).fold(0.0, f64::max)
    }

    /// Smallest interior angle of element `k`, in radians.
    pub fn min_angle(&self, k: usize) -> f64 {
        let p = self.corners(k);
        (0..3)
            .map(|i| {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                u.cross(v).atan2(u.dot(v))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("rdmesh 1\n");
        let _ = writeln!(out, "{}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(out, "{:.16e} {:.16e}", v.x, v.y);
        }
        let _ = writeln!(out, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(out, "{}", self.boundary_edges.len());
        for &e in &self.boundary_edges {
            let edge = &self.edges[e];
            let _ = writeln!(
                out,
                "{} {} {}",
                edge.vertices[0],
                edge.vertices[1],
                edge.marker.unwrap_or(0)
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: &str| RdsError::MeshFormat {
            line,
            message: message.to_string(),
        };
        let last_line = text.lines().count();
        let mut next = |what: &str| lines.next().ok_or_else(|| err(last_line, &format!("missing {what}")));

        let (line, header) = next("header")?;
        if header != "rdmesh 1" {
            return Err(err(line, "expected header 'rdmesh 1'"));
        }
        fn fields<T: std::str::FromStr>(line: usize, text: &str, n: usize) -> Result<Vec<T>> {
            let parsed: Vec<T> = text
                .split_whitespace()
                .map(|t| t.parse::<T>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| RdsError::MeshFormat {
                    line,
                    message: format!("cannot parse '{text}'"),
                })?;
            if parsed.len() != n {
                return Err(RdsError::MeshFormat {
                    line,
                    message: format!("expected {n} fields, found {}", parsed.len()),
                });
            }
            Ok(parsed)
        }
        let (line, t) = next("vertex count")?;
        let nv = fields::<usize>(line, t, 1)?[0];
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, t) = next("vertex")?;
            let xy = fields::<f64>(line, t, 2)?;
            vertices.push(Vec2::new(xy[0], xy[1]));
        }
        let (line, t) = next("triangle count")?;
        let nt = fields::<usize>(line, t, 1)?[0];
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, t) = next("triangle")?;
            let ijk = fields::<usize>(line, t, 3)?;
            triangles.push([ijk[0], ijk[1], ijk[2]]);
        }
        let (line, t) = next("boundary face count")?;
        let nb = fields::<usize>(line, t, 1)?[0];
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (line, t) = next("boundary face")?;
            let f = fields::<u64>(line, t, 3)?;
            let m = u32::try_from(f[2]).map_err(|_| err(line, "marker out of range"))?;
            boundary.push((f[0] as usize, f[1] as usize, m));
        }
        if let Some((line, _)) = lines.next() {
            return Err(err(line, "trailing content"));
        }
        Self::from_parts(vertices, triangles, &boundary)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| RdsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RdsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_text(&text)
    }
}
