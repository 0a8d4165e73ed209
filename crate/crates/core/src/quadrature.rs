//! Quadrature on the reference triangle (weights sum to 1/2) and on the
//! reference segment `[0, 1]` (weights sum to 1).

use crate::error::{RdsError, Result};

pub const MAX_TRIANGLE_DEGREE: usize = 5;
pub const MAX_EDGE_DEGREE: usize = 5;

/// Exactness used for element integrals unless stated otherwise.
pub const DEFAULT_TRIANGLE_DEGREE: usize = 4;
/// Exactness used for face integrals unless stated otherwise.
pub const DEFAULT_EDGE_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    /// Barycentric coordinates of the points.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRule {
    /// Parameter in `[0, 1]` measured from the first endpoint.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

fn orbit3(a: f64) -> [[f64; 3]; 3] {
    let b = 1.0 - 2.0 * a;
    [[b, a, a], [a, b, a], [a, a, b]]
}

pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut push_orbit = |a: f64, w: f64| {
        points.extend(orbit3(a));
        weights.extend([w; 3]);
    };
    let exact = match degree {
        0 | 1 => {
            push_orbit(1.0 / 3.0, 0.5 / 3.0);
            points.truncate(1);
            weights.truncate(1);
            weights[0] = 0.5;
            1
        }
        2 => {
            push_orbit(1.0 / 6.0, 1.0 / 6.0);
            2
        }
        3 | 4 => {
            push_orbit(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70 / 2.0);
            push_orbit(0.091_576_213_509_770_743_460, 0.109_951_743_655_321_867_64 / 2.0);
            4
        }
        5 => {
            let s15 = 15f64.sqrt();
            push_orbit((6.0 - s15) / 21.0, (155.0 - s15) / 2400.0);
            push_orbit((6.0 + s15) / 21.0, (155.0 + s15) / 2400.0);
            points.push([1.0 / 3.0; 3]);
            weights.push(9.0 / 80.0);
            5
        }
        _ => {
            return Err(RdsError::QuadratureDegree {
                requested: degree,
                max: MAX_TRIANGLE_DEGREE,
            })
        }
    };
    Ok(TriangleRule {
        points,
        weights,
        degree: exact,
    })
}

pub fn edge_rule(degree: usize) -> Result<EdgeRule> {
    let (nodes, weights, exact): (Vec<f64>, Vec<f64>, usize) = match degree {
        0 | 1 => (vec![0.0], vec![2.0], 1),
        2 | 3 => {
            let g = 1.0 / 3f64.sqrt();
            (vec![-g, g], vec![1.0, 1.0], 3)
        }
        4 | 5 => {
            let g = 0.6f64.sqrt();
            (vec![-g, 0.0, g], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0], 5)
        }
        _ => {
            return Err(RdsError::QuadratureDegree {
                requested: degree,
                max: MAX_EDGE_DEGREE,
            })
        }
    };
    Ok(EdgeRule {
        points: nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: weights.iter().map(|w| 0.5 * w).collect(),
        degree: exact,
    })
}

impl TriangleRule {
    /// Integral over the reference triangle `(0,0), (1,0), (0,1)`.
    pub fn integrate_reference(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * f(l[1], l[2]))
            .sum()
    }
}

impl EdgeRule {
    pub fn integrate_reference(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&t, w)| w * f(t)).sum()
    }
}
