//! Lagrange shape functions on triangles.
//!
//! Local ordering: vertices 0, 1, 2 counterclockwise, then the midpoints of
//! faces 0 (between vertices 0 and 1), 1 (1-2) and 2 (2-0).

use crate::error::{RdsError, Result};
use crate::vec2::Vec2;

/// Largest number of local degrees of freedom per triangle.
pub const MAX_LOCAL: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn new(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Degree::P1),
            2 => Ok(Degree::P2),
            _ => Err(RdsError::UnsupportedDegree(k)),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }

    /// `(k + 1)(k + 2) / 2`.
    pub fn local_dofs(self) -> usize {
        let k = self.order();
        (k + 1) * (k + 2) / 2
    }

    /// Degrees of freedom on one face, endpoints first.
    pub fn face_dofs(self, face: usize) -> Vec<usize> {
        let mut d = vec![face, (face + 1) % 3];
        if self == Degree::P2 {
            d.push(3 + face);
        }
        d
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node(self, i: usize) -> [f64; 3] {
        let mut l = [0.0; 3];
        if i < 3 {
            l[i] = 1.0;
        } else {
            let j = i - 3;
            l[j] = 0.5;
            l[(j + 1) % 3] = 0.5;
        }
        l
    }
}

/// Shape function values and their derivatives with respect to the
/// barycentric coordinates at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub len: usize,
    pub values: [f64; MAX_LOCAL],
    pub dlambda: [[f64; 3]; MAX_LOCAL],
}

impl ShapeEval {
    pub fn new(degree: Degree, l: [f64; 3]) -> Self {
        let mut values = [0.0; MAX_LOCAL];
        let mut dlambda = [[0.0; 3]; MAX_LOCAL];
        match degree {
            Degree::P1 => {
                for i in 0..3 {
                    values[i] = l[i];
                    dlambda[i][i] = 1.0;
                }
            }
            Degree::P2 => {
                for i in 0..3 {
                    values[i] = l[i] * (2.0 * l[i] - 1.0);
                    dlambda[i][i] = 4.0 * l[i] - 1.0;
                    let (a, b) = (i, (i + 1) % 3);
                    values[3 + i] = 4.0 * l[a] * l[b];
                    dlambda[3 + i][a] = 4.0 * l[b];
                    dlambda[3 + i][b] = 4.0 * l[a];
                }
            }
        }
        Self {
            len: degree.local_dofs(),
            values,
            dlambda,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    /// Physical gradients given the gradients of the barycentric coordinates.
    pub fn gradients(&self, grad_lambda: &[Vec2; 3]) -> [Vec2; MAX_LOCAL] {
        let mut g = [Vec2::ZERO; MAX_LOCAL];
        for (gi, d) in g.iter_mut().zip(&self.dlambda).take(self.len) {
            *gi = grad_lambda[0] * d[0] + grad_lambda[1] * d[1] + grad_lambda[2] * d[2];
        }
        g
    }
}

/// Gradients of the barycentric coordinates of the reference triangle.
pub const REFERENCE_GRAD_LAMBDA: [Vec2; 3] = [Vec2::new(-1.0, -1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];

/// Values and reference-triangle gradients of the degree-`k` basis.
pub fn basis_eval(k: usize, bary: [f64; 3]) -> Result<(Vec<f64>, Vec<Vec2>)> {
    let degree = Degree::new(k)?;
    let s = ShapeEval::new(degree, bary);
    let g = s.gradients(&REFERENCE_GRAD_LAMBDA);
    Ok((s.values().to_vec(), g[..s.len].to_vec()))
}
