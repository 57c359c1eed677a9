//! Product rule for Haar averages over SO(3) in z-y-z Euler angles.

use std::f64::consts::PI;

use super::gauss::gauss_legendre;

/// Exact for Wigner functions of degree ≤ `degree`.
#[derive(Debug, Clone)]
pub struct EulerRule {
    pub degree: usize,
    /// Uniform angles used for both outer z-rotations.
    pub azimuths: Vec<f64>,
    pub polar: Vec<f64>,
    /// Normalized so the polar weights sum to 1.
    pub polar_weights: Vec<f64>,
}

impl EulerRule {
    pub fn new(degree: usize) -> EulerRule {
        let n = degree + 1;
        let azimuths = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let g = gauss_legendre(degree / 2 + 1);
        let polar = g.nodes.iter().map(|x| x.acos()).collect();
        let polar_weights = g.weights.iter().map(|w| 0.5 * w).collect();
        EulerRule { degree, azimuths, polar, polar_weights }
    }

    pub fn azimuth_weight(&self) -> f64 {
        1.0 / self.azimuths.len() as f64
    }
}

pub fn rot_z(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn rot_y(b: f64) -> [[f64; 3]; 3] {
    let (s, c) = b.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    ]
}
