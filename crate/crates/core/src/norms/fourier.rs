//! |W(D)⟨v⟩^l f|² on the cube lattice.
//!
//! ⟨v⟩^l ψ_α has the axis parities of α, so each parity class is transformed
//! on the positive octant with cos/sin matrices; classes are orthogonal and
//! all eight frequency octants carry the same |ĝ|².

use nalgebra::DMatrix;

use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::basis::hermite1d::values;
use crate::error::{Error, Result};
use crate::params::bracket;
use crate::quadrature::UniformCubeGrid;

/// Relative amplitude allowed on the outermost node layer.
pub const SPATIAL_TAIL: f64 = 1e-10;
/// Relative amplitude allowed on the outermost frequency layer.
pub const SPECTRAL_TAIL: f64 = 1e-6;

pub(crate) fn parity_class(a: [usize; 3]) -> usize {
    (a[0] % 2) + 2 * (a[1] % 2) + 4 * (a[2] % 2)
}

pub struct OctantTransform {
    pub grid: UniformCubeGrid,
    nh: usize,
    x: Vec<f64>,
    xi: Vec<f64>,
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
}

impl OctantTransform {
    pub fn new(grid: &UniformCubeGrid) -> OctantTransform {
        OctantTransform {
            grid: grid.clone(),
            nh: grid.n / 2,
            x: grid.half_nodes(),
            xi: grid.half_freqs(),
            cos: grid.cos_matrix(),
            sin: grid.sin_matrix(),
        }
    }

    pub fn len(&self) -> usize {
        self.nh * self.nh * self.nh
    }

    pub fn is_empty(&self) -> bool {
        self.nh == 0
    }

    /// ψ_m(x_j) tables, (m, j) → [m][j].
    fn axis_tables(&self, k: usize) -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; self.nh]; k + 1];
        let mut buf = vec![0.0; k + 1];
        let c = (2.0 * std::f64::consts::PI).powf(-0.25);
        for (j, &x) in self.x.iter().enumerate() {
            values(k, x, &mut buf);
            let g = c * (-0.25 * x * x).exp();
            for m in 0..=k {
                t[m][j] = buf[m] * g;
            }
        }
        t
    }

    fn weight_table(&self, l: f64) -> Vec<f64> {
        let n = self.nh;
        let mut w = vec![0.0; self.len()];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let r = (self.x[i].powi(2) + self.x[j].powi(2) + self.x[k].powi(2)).sqrt();
                    w[i + n * (j + n * k)] = bracket(r).powf(l);
                }
            }
        }
        w
    }

    /// Octant samples of ⟨v⟩^l Σ c_α ψ_α over the given (α, c) pairs.
    fn sample(&self, terms: &[([usize; 3], f64)], tables: &[Vec<f64>], lw: &[f64]) -> Vec<f64> {
        let n = self.nh;
        let mut g = vec![0.0; self.len()];
        for &(a, c) in terms {
            let (tx, ty, tz) = (&tables[a[0]], &tables[a[1]], &tables[a[2]]);
            for k in 0..n {
                for j in 0..n {
                    let cz = c * ty[j] * tz[k];
                    let base = n * (j + n * k);
                    for i in 0..n {
                        g[base + i] += cz * tx[i];
                    }
                }
            }
        }
        for (x, w) in g.iter_mut().zip(lw) {
            *x *= w;
        }
        g
    }

    /// Separable cos/sin transform of octant data with class `c`.
    pub fn transform(&self, data: Vec<f64>, class: usize) -> Vec<f64> {
        let n = self.nh;
        let pick = |axis: usize| if (class >> axis) & 1 == 1 { &self.sin } else { &self.cos };
        let m = DMatrix::from_vec(n, n * n, data);
        let m = pick(0) * m;
        let mut data = m.data.as_vec().clone();
        let t1 = pick(1).transpose();
        for k in 0..n {
            let block = DMatrix::from_column_slice(n, n, &data[n * n * k..n * n * (k + 1)]);
            let out = block * &t1;
            data[n * n * k..n * n * (k + 1)].copy_from_slice(out.as_slice());
        }
        let m = DMatrix::from_vec(n * n, n, data);
        let m = m * pick(2).transpose();
        m.data.as_vec().clone()
    }

    /// |ξ| at each octant frequency.
    pub fn freq_radii(&self) -> Vec<f64> {
        let n = self.nh;
        let mut out = vec![0.0; self.len()];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    out[i + n * (j + n * k)] = (self.xi[i].powi(2) + self.xi[j].powi(2) + self.xi[k].powi(2)).sqrt();
                }
            }
        }
        out
    }

    /// Largest magnitude on the outer layer relative to the largest overall.
    fn outer_ratio(&self, g: &[f64]) -> f64 {
        let n = self.nh;
        let mut all = 0.0f64;
        let mut outer = 0.0f64;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let a = g[i + n * (j + n * k)].abs();
                    all = all.max(a);
                    if i == n - 1 || j == n - 1 || k == n - 1 {
                        outer = outer.max(a);
                    }
                }
            }
        }
        if all == 0.0 {
            0.0
        } else {
            outer / all
        }
    }

    fn checked_transform(&self, g: Vec<f64>, class: usize) -> Result<Vec<f64>> {
        let t = self.outer_ratio(&g);
        if t > SPATIAL_TAIL {
            return Err(Error::GridTooSmall(format!("spatial boundary ratio {t:.2e} at L = {}", self.grid.half_width)));
        }
        let out = self.transform(g, class);
        let t = self.outer_ratio(&out);
        if t > SPECTRAL_TAIL {
            return Err(Error::GridTooSmall(format!("frequency boundary ratio {t:.2e} with n = {}", self.grid.n)));
        }
        Ok(out)
    }

    fn octant_measure(&self) -> f64 {
        8.0 * self.grid.dxi().powi(3)
    }
}

/// Grams of |w(D)⟨v⟩^l f|² for several radial multipliers w(|ξ|).
pub fn fourier_grams(spec: &BasisSpec, l: f64, grid: &UniformCubeGrid, multipliers: &[&(dyn Fn(f64) -> f64 + Sync)]) -> Result<Vec<DMatrix<f64>>> {
    let ot = OctantTransform::new(grid);
    let tables = ot.axis_tables(spec.k);
    let lw = ot.weight_table(l);
    let radii = ot.freq_radii();
    let sq: Vec<Vec<f64>> = multipliers.iter().map(|w| radii.iter().map(|&r| w(r).powi(2) * ot.octant_measure()).collect()).collect();
    let dim = spec.dim();
    let mut out = vec![DMatrix::zeros(dim, dim); multipliers.len()];
    for class in 0..8 {
        let idx: Vec<usize> = (0..dim).filter(|&i| parity_class(spec.alpha(i)) == class).collect();
        if idx.is_empty() {
            continue;
        }
        let mut rows = DMatrix::zeros(ot.len(), idx.len());
        for (c, &i) in idx.iter().enumerate() {
            let g = ot.sample(&[(spec.alpha(i), 1.0)], &tables, &lw);
            let t = ot.checked_transform(g, class)?;
            rows.column_mut(c).copy_from_slice(&t);
        }
        for (m, w) in out.iter_mut().zip(&sq) {
            let mut scaled = rows.clone();
            for (c, mut col) in scaled.column_iter_mut().enumerate() {
                let _ = c;
                for (x, wq) in col.iter_mut().zip(w) {
                    *x *= wq;
                }
            }
            let block = rows.transpose() * scaled;
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    m[(i, j)] = 0.5 * (block[(a, b)] + block[(b, a)]);
                }
            }
        }
    }
    Ok(out)
}

/// |w(D)⟨v⟩^l f|_{L²} for one function.
pub fn fourier_multiplier_norm(f: &HermiteCoeffs, l: f64, grid: &UniformCubeGrid, w: &dyn Fn(f64) -> f64) -> Result<f64> {
    let ot = OctantTransform::new(grid);
    let tables = ot.axis_tables(f.spec.k);
    let lw = ot.weight_table(l);
    let radii = ot.freq_radii();
    let mut total = 0.0;
    for class in 0..8 {
        let terms: Vec<([usize; 3], f64)> =
            f.spec.alphas().iter().zip(&f.coeffs).filter(|(a, c)| parity_class(**a) == class && **c != 0.0).map(|(a, c)| (*a, *c)).collect();
        if terms.is_empty() {
            continue;
        }
        let g = ot.sample(&terms, &tables, &lw);
        let t = ot.checked_transform(g, class)?;
        total += t.iter().zip(&radii).map(|(x, &r)| (x * w(r)).powi(2)).sum::<f64>();
    }
    Ok((total * ot.octant_measure()).sqrt())
}
