//! Action of rotations on the Hermite basis and exact Haar averaging.
//!
//! For a rotation R, p_α∘R = Σ_γ M(R)_{γα} p_γ with M(R)_{γα} = E[p_γ(w) p_α(Rw)]
//! under the standard normal law. Rotations preserve total degree, and plane
//! rotations additionally preserve the untouched index, so z- and y-rotations
//! act through small blocks.

use nalgebra::DMatrix;

use super::hermite1d;
use super::BasisSpec;
use crate::quadrature::gauss::gauss_hermite_prob;
use crate::quadrature::so3::EulerRule;

/// Axis pair rotated by a plane rotation [[c, −s], [s, c]] acting on (w_i, w_j).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// Rotation about e3: (i, j) = (0, 1).
    Z,
    /// Rotation about e2: (i, j) = (2, 0).
    Y,
}

impl Plane {
    fn axes(self) -> (usize, usize, usize) {
        match self {
            Plane::Z => (0, 1, 2),
            Plane::Y => (2, 0, 1),
        }
    }
}

/// Blocks B_n (n = α_i + α_j) of one plane rotation, indexed [t'][t] with
/// t = α_i.
#[derive(Debug, Clone)]
pub struct PlaneRotation {
    pub plane: Plane,
    pub blocks: Vec<DMatrix<f64>>,
}

impl PlaneRotation {
    pub fn new(k: usize, plane: Plane, angle: f64) -> PlaneRotation {
        let rule = gauss_hermite_prob(k + 1);
        let (s, c) = angle.sin_cos();
        let n = rule.len();
        let mut blocks: Vec<DMatrix<f64>> = (0..=k).map(|d| DMatrix::zeros(d + 1, d + 1)).collect();
        let mut hx = vec![0.0; k + 1];
        let mut hy = vec![0.0; k + 1];
        let mut hxr = vec![0.0; k + 1];
        let mut hyr = vec![0.0; k + 1];
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (rule.nodes[a], rule.nodes[b]);
                let w = rule.weights[a] * rule.weights[b];
                hermite1d::values(k, x, &mut hx);
                hermite1d::values(k, y, &mut hy);
                hermite1d::values(k, c * x - s * y, &mut hxr);
                hermite1d::values(k, s * x + c * y, &mut hyr);
                for (d, blk) in blocks.iter_mut().enumerate() {
                    for tp in 0..=d {
                        let left = w * hx[tp] * hy[d - tp];
                        for t in 0..=d {
                            blk[(tp, t)] += left * hxr[t] * hyr[d - t];
                        }
                    }
                }
            }
        }
        PlaneRotation { plane, blocks }
    }
}

/// Index groups {α : α_i + α_j = n, α_k fixed}, ordered by t = α_i.
#[derive(Debug, Clone)]
pub struct PlaneGroups {
    pub groups: Vec<(usize, Vec<usize>)>,
    pub dim: usize,
}

impl PlaneGroups {
    pub fn new(spec: &BasisSpec, plane: Plane) -> PlaneGroups {
        let (i, j, k) = plane.axes();
        let mut groups = Vec::new();
        for ak in 0..=spec.k {
            for n in 0..=spec.k - ak {
                let idx = (0..=n)
                    .map(|t| {
                        let mut a = [0; 3];
                        a[i] = t;
                        a[j] = n - t;
                        a[k] = ak;
                        spec.index(a).unwrap()
                    })
                    .collect();
                groups.push((n, idx));
            }
        }
        PlaneGroups { groups, dim: spec.dim() }
    }

    /// y_α = Σ_γ M_{γα} x_γ for one fiber, accumulated with weight `w`.
    #[inline]
    fn apply_acc(&self, rot: &PlaneRotation, x: &[f64], y: &mut [f64], w: f64) {
        for (n, idx) in &self.groups {
            let b = &rot.blocks[*n];
            for (t, &it) in idx.iter().enumerate() {
                let mut acc = 0.0;
                for (tp, &itp) in idx.iter().enumerate() {
                    acc += b[(tp, t)] * x[itp];
                }
                y[it] += w * acc;
            }
        }
    }
}

/// Dense row-major 3-tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    pub dims: [usize; 3],
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3]) -> Tensor3 {
        Tensor3 { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.at(i, j, k)]
    }

    pub fn axpy(&mut self, a: f64, other: &Tensor3) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.data {
            *x *= a;
        }
    }

    /// Σ T_{ijk} a_i b_j c_k.
    pub fn contract(&self, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.dims[0] {
            if a[i] == 0.0 {
                continue;
            }
            let mut s_i = 0.0;
            for j in 0..self.dims[1] {
                let base = self.at(i, j, 0);
                let row = &self.data[base..base + self.dims[2]];
                let s: f64 = row.iter().zip(c).map(|(t, x)| t * x).sum();
                s_i += b[j] * s;
            }
            total += a[i] * s_i;
        }
        total
    }

    /// v_k = Σ T_{ijk} a_i b_j.
    pub fn contract_last(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[2]];
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                let w = a[i] * b[j];
                if w == 0.0 {
                    continue;
                }
                let base = self.at(i, j, 0);
                for (o, t) in out.iter_mut().zip(&self.data[base..base + self.dims[2]]) {
                    *o += w * t;
                }
            }
        }
        out
    }
}

/// Haar averages of matrices and 3-tensors transformed by M(R).
#[derive(Debug, Clone)]
pub struct RotationAverager {
    pub k: usize,
    pub rule: EulerRule,
    z_rots: Vec<PlaneRotation>,
    y_rots: Vec<PlaneRotation>,
}

impl RotationAverager {
    /// `k` is the largest basis degree involved; `degree` the largest Wigner
    /// degree of the averaged object (sum of the per-index degrees).
    pub fn new(k: usize, degree: usize) -> RotationAverager {
        let rule = EulerRule::new(degree);
        let z_rots = rule.azimuths.iter().map(|&a| PlaneRotation::new(k, Plane::Z, a)).collect();
        let y_rots = rule.polar.iter().map(|&b| PlaneRotation::new(k, Plane::Y, b)).collect();
        RotationAverager { k, rule, z_rots, y_rots }
    }

    /// avg_R M(R)ᵀ F M(R) for square F over a degree-K basis.
    pub fn average_matrix(&self, f: &DMatrix<f64>, spec: &BasisSpec) -> DMatrix<f64> {
        let gz = PlaneGroups::new(spec, Plane::Z);
        let gy = PlaneGroups::new(spec, Plane::Y);
        let wa = self.rule.azimuth_weight();
        let n = spec.dim();
        let stage = |src: &DMatrix<f64>, rots: &[PlaneRotation], weights: &[f64], g: &PlaneGroups| -> DMatrix<f64> {
            let mut out = DMatrix::zeros(n, n);
            let mut tmp = DMatrix::zeros(n, n);
            for (rot, &w) in rots.iter().zip(weights) {
                tmp.fill(0.0);
                // Columns: tmp[:, β] = Σ_δ src[:, δ] M_{δβ}
                for r in 0..n {
                    let x: Vec<f64> = (0..n).map(|c| src[(r, c)]).collect();
                    let mut y = vec![0.0; n];
                    g.apply_acc(rot, &x, &mut y, 1.0);
                    for c in 0..n {
                        tmp[(r, c)] = y[c];
                    }
                }
                // Rows.
                for c in 0..n {
                    let x: Vec<f64> = (0..n).map(|r| tmp[(r, c)]).collect();
                    let mut y = vec![0.0; n];
                    g.apply_acc(rot, &x, &mut y, w);
                    for r in 0..n {
                        out[(r, c)] += y[r];
                    }
                }
            }
            out
        };
        let wz = vec![wa; self.z_rots.len()];
        let s1 = stage(f, &self.z_rots, &wz, &gz);
        let s2 = stage(&s1, &self.y_rots, &self.rule.polar_weights, &gy);
        stage(&s2, &self.z_rots, &wz, &gz)
    }

    /// Haar average of a 3-tensor whose modes live in bases of degree
    /// `degs` (each ≤ k, prefixes of the degree-k basis).
    pub fn average_tensor(&self, t: &Tensor3, degs: [usize; 3]) -> Tensor3 {
        let specs: Vec<BasisSpec> = degs.iter().map(|&d| BasisSpec::new(d)).collect();
        for m in 0..3 {
            assert_eq!(specs[m].dim(), t.dims[m]);
        }
        let gz: Vec<PlaneGroups> = specs.iter().map(|s| PlaneGroups::new(s, Plane::Z)).collect();
        let gy: Vec<PlaneGroups> = specs.iter().map(|s| PlaneGroups::new(s, Plane::Y)).collect();
        let wa = self.rule.azimuth_weight();
        let wz = vec![wa; self.z_rots.len()];
        let s1 = average_stage(t, &self.z_rots, &wz, &gz);
        let s2 = average_stage(&s1, &self.y_rots, &self.rule.polar_weights, &gy);
        average_stage(&s2, &self.z_rots, &wz, &gz)
    }
}

fn mode_product(t: &Tensor3, mode: usize, rot: &PlaneRotation, g: &PlaneGroups, out: &mut Tensor3, w: f64) {
    let d = t.dims;
    let strides = [d[1] * d[2], d[2], 1];
    let (o1, o2) = match mode {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut x = vec![0.0; d[mode]];
    let mut y = vec![0.0; d[mode]];
    for a in 0..d[o1] {
        for b in 0..d[o2] {
            let base = a * strides[o1] + b * strides[o2];
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = t.data[base + i * strides[mode]];
            }
            y.iter_mut().for_each(|v| *v = 0.0);
            g.apply_acc(rot, &x, &mut y, w);
            for (i, yi) in y.iter().enumerate() {
                out.data[base + i * strides[mode]] += yi;
            }
        }
    }
}

fn average_stage(t: &Tensor3, rots: &[PlaneRotation], weights: &[f64], g: &[PlaneGroups]) -> Tensor3 {
    let mut out = Tensor3::zeros(t.dims);
    let mut a = Tensor3::zeros(t.dims);
    let mut b = Tensor3::zeros(t.dims);
    for (rot, &w) in rots.iter().zip(weights) {
        a.data.iter_mut().for_each(|v| *v = 0.0);
        mode_product(t, 0, rot, &g[0], &mut a, 1.0);
        b.data.iter_mut().for_each(|v| *v = 0.0);
        mode_product(&a, 1, rot, &g[1], &mut b, 1.0);
        mode_product(&b, 2, rot, &g[2], &mut out, w);
    }
    out
}

/// Dense M(R) by a tensor Gauss rule; reference implementation.
pub fn rotation_matrix_dense(spec: &BasisSpec, r: &[[f64; 3]; 3]) -> DMatrix<f64> {
    let rule = crate::quadrature::GaussHermiteRule::with_nodes(spec.k + 1);
    let n = spec.dim();
    let mut m = DMatrix::zeros(n, n);
    for (v, w) in rule.nodes.iter().zip(&rule.weights) {
        let p = spec.poly_values(*v);
        let pr = spec.poly_values(crate::quadrature::so3::apply(r, *v));
        for g in 0..n {
            if p[g] == 0.0 {
                continue;
            }
            for a in 0..n {
                m[(g, a)] += w * p[g] * pr[a];
            }
        }
    }
    m
}
