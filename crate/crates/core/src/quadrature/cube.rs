//! Cell-centred cube grid with a symmetric dual frequency lattice.
//!
//! Nodes v_j = −L + (j + ½)h and frequencies ξ_k = (k − (n−1)/2)·π/L, so the
//! transform F_k = (h/√(2π)) Σ_j e^{−iξ_k v_j} g_j is unitary up to the cell
//! volumes and respects parity.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

#[derive(Debug, Clone)]
pub struct UniformCubeGrid {
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

impl UniformCubeGrid {
    pub fn new(half_width: f64, n: usize) -> UniformCubeGrid {
        assert!(n >= 2 && n % 2 == 0, "n must be even");
        UniformCubeGrid { half_width, n, h: 2.0 * half_width / n as f64 }
    }

    /// Grid resolving degree-K Hermite functions: frequency reach equals L,
    /// and L grows with the basis degree.
    pub fn for_degree(k: usize) -> UniformCubeGrid {
        let l = (9.0 + (2.0 * k as f64 + 1.0).sqrt()).ceil();
        let n = (2.0 * l * l / PI).ceil() as usize;
        Self::new(l, n + n % 2)
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| -self.half_width + (j as f64 + 0.5) * self.h).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        let c = 0.5 * (self.n as f64 - 1.0);
        (0..self.n).map(|k| (k as f64 - c) * self.dxi()).collect()
    }

    /// Positive half of the nodes (ascending).
    pub fn half_nodes(&self) -> Vec<f64> {
        self.nodes()[self.n / 2..].to_vec()
    }

    pub fn half_freqs(&self) -> Vec<f64> {
        self.freqs()[self.n / 2..].to_vec()
    }

    /// Even-part transform on the half grid: (2h/√(2π)) cos(ξ_k v_j).
    pub fn cos_matrix(&self) -> DMatrix<f64> {
        let (x, xi) = (self.half_nodes(), self.half_freqs());
        let c = 2.0 * self.h / (2.0 * PI).sqrt();
        DMatrix::from_fn(xi.len(), x.len(), |k, j| c * (xi[k] * x[j]).cos())
    }

    /// Odd-part transform on the half grid (the factor −i is left out).
    pub fn sin_matrix(&self) -> DMatrix<f64> {
        let (x, xi) = (self.half_nodes(), self.half_freqs());
        let c = 2.0 * self.h / (2.0 * PI).sqrt();
        DMatrix::from_fn(xi.len(), x.len(), |k, j| c * (xi[k] * x[j]).sin())
    }

    /// Full complex 1-D transform matrix.
    pub fn dft_matrix(&self) -> DMatrix<Complex<f64>> {
        let (x, xi) = (self.nodes(), self.freqs());
        let c = self.h / (2.0 * PI).sqrt();
        DMatrix::from_fn(self.n, self.n, |k, j| Complex::from_polar(c, -xi[k] * x[j]))
    }

    /// Separable 3-D transform of data stored with index (i·n + j)·n + k.
    pub fn dft3(&self, data: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let m = self.dft_matrix();
        let mut cur = data.to_vec();
        for axis in 0..3 {
            let mut next = vec![Complex::new(0.0, 0.0); n * n * n];
            let stride = [n * n, n, 1][axis];
            for idx in 0..n * n * n {
                let pos = (idx / stride) % n;
                let base = idx - pos * stride;
                let mut acc = Complex::new(0.0, 0.0);
                for j in 0..n {
                    acc += m[(pos, j)] * cur[base + j * stride];
                }
                next[idx] = acc;
            }
            cur = next;
        }
        cur
    }
}
