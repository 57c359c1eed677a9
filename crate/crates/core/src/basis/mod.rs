//! Hermite–Galerkin basis ψ_α = p_α μ^{1/2}.

pub mod hermite1d;
pub mod rotation;

use crate::error::{Error, Result};
use crate::params::sqrt_maxwellian;
use crate::quadrature::GaussHermiteRule;

/// Multi-indices with |α| ≤ K, ordered by total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub k: usize,
    alphas: Vec<[usize; 3]>,
    lookup: Vec<usize>,
}

impl BasisSpec {
    pub fn new(k: usize) -> BasisSpec {
        let mut alphas = Vec::new();
        for n in 0..=k {
            for a in (0..=n).rev() {
                for b in (0..=n - a).rev() {
                    alphas.push([a, b, n - a - b]);
                }
            }
        }
        let side = k + 1;
        let mut lookup = vec![usize::MAX; side * side * side];
        for (i, a) in alphas.iter().enumerate() {
            lookup[(a[0] * side + a[1]) * side + a[2]] = i;
        }
        BasisSpec { k, alphas, lookup }
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    /// dim = C(K+3, 3).
    pub fn dim_for(k: usize) -> usize {
        (k + 1) * (k + 2) * (k + 3) / 6
    }

    pub fn alpha(&self, i: usize) -> [usize; 3] {
        self.alphas[i]
    }

    pub fn alphas(&self) -> &[[usize; 3]] {
        &self.alphas
    }

    pub fn index(&self, a: [usize; 3]) -> Option<usize> {
        if a[0] + a[1] + a[2] > self.k {
            return None;
        }
        let side = self.k + 1;
        Some(self.lookup[(a[0] * side + a[1]) * side + a[2]])
    }

    pub fn degree(&self, i: usize) -> usize {
        let a = self.alphas[i];
        a[0] + a[1] + a[2]
    }

    /// Dimension of the prefix holding degrees ≤ d.
    pub fn prefix(&self, d: usize) -> usize {
        Self::dim_for(d.min(self.k))
    }

    /// Per-axis value tables h_m(v_i), m ≤ K.
    pub fn axis_tables(&self, v: [f64; 3]) -> [Vec<f64>; 3] {
        [hermite1d::values_vec(self.k, v[0]), hermite1d::values_vec(self.k, v[1]), hermite1d::values_vec(self.k, v[2])]
    }

    /// All p_α(v).
    pub fn poly_values(&self, v: [f64; 3]) -> Vec<f64> {
        let t = self.axis_tables(v);
        self.alphas.iter().map(|a| t[0][a[0]] * t[1][a[1]] * t[2][a[2]]).collect()
    }
}

/// Coefficients of Σ c_α ψ_α.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoeffs<T = f64> {
    pub spec: BasisSpec,
    pub coeffs: Vec<T>,
}

impl HermiteCoeffs<f64> {
    pub fn zeros(spec: &BasisSpec) -> Self {
        HermiteCoeffs { spec: spec.clone(), coeffs: vec![0.0; spec.dim()] }
    }

    pub fn unit(spec: &BasisSpec, alpha: [usize; 3]) -> Self {
        let mut c = Self::zeros(spec);
        c.coeffs[spec.index(alpha).expect("index within basis")] = 1.0;
        c
    }

    pub fn from_vec(spec: &BasisSpec, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), spec.dim());
        HermiteCoeffs { spec: spec.clone(), coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Same function in a basis of degree `k` (truncating if smaller).
    pub fn reembed(&self, k: usize) -> Self {
        let spec = BasisSpec::new(k);
        let mut out = Self::zeros(&spec);
        for (i, a) in self.spec.alphas().iter().enumerate() {
            if let Some(j) = spec.index(*a) {
                out.coeffs[j] = self.coeffs[i];
            }
        }
        out
    }

    /// Polynomial part p(v) = Σ c_α p_α(v).
    pub fn eval_poly(&self, v: [f64; 3]) -> f64 {
        let t = self.spec.axis_tables(v);
        self.spec.alphas().iter().zip(&self.coeffs).map(|(a, c)| c * t[0][a[0]] * t[1][a[1]] * t[2][a[2]]).sum()
    }

    /// Polynomial value, gradient and Hessian.
    pub fn poly_derivs(&self, v: [f64; 3]) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let k = self.spec.k;
        let t = self.spec.axis_tables(v);
        let mut d1 = [vec![0.0; k + 1], vec![0.0; k + 1], vec![0.0; k + 1]];
        let mut d2 = [vec![0.0; k + 1], vec![0.0; k + 1], vec![0.0; k + 1]];
        for i in 0..3 {
            hermite1d::derivs(&t[i], &mut d1[i]);
            // h_m'' = √(m(m−1)) h_{m−2}
            for m in 0..=k {
                d2[i][m] = if m >= 2 { ((m * (m - 1)) as f64).sqrt() * t[i][m - 2] } else { 0.0 };
            }
        }
        let mut p = 0.0;
        let mut g = [0.0; 3];
        let mut h = [[0.0; 3]; 3];
        for (a, &c) in self.spec.alphas().iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let (x, y, z) = (a[0], a[1], a[2]);
            p += c * t[0][x] * t[1][y] * t[2][z];
            g[0] += c * d1[0][x] * t[1][y] * t[2][z];
            g[1] += c * t[0][x] * d1[1][y] * t[2][z];
            g[2] += c * t[0][x] * t[1][y] * d1[2][z];
            h[0][0] += c * d2[0][x] * t[1][y] * t[2][z];
            h[1][1] += c * t[0][x] * d2[1][y] * t[2][z];
            h[2][2] += c * t[0][x] * t[1][y] * d2[2][z];
            h[0][1] += c * d1[0][x] * d1[1][y] * t[2][z];
            h[0][2] += c * d1[0][x] * t[1][y] * d1[2][z];
            h[1][2] += c * t[0][x] * d1[1][y] * d1[2][z];
        }
        h[1][0] = h[0][1];
        h[2][0] = h[0][2];
        h[2][1] = h[1][2];
        (p, g, h)
    }

    /// f(v) = p(v) μ^{1/2}(v).
    pub fn eval(&self, v: [f64; 3]) -> f64 {
        self.eval_poly(v) * sqrt_maxwellian(v)
    }

    pub fn eval_grad(&self, v: [f64; 3]) -> [f64; 3] {
        let (p, g, _) = self.poly_derivs(v);
        let m = sqrt_maxwellian(v);
        [(g[0] - 0.5 * v[0] * p) * m, (g[1] - 0.5 * v[1] * p) * m, (g[2] - 0.5 * v[2] * p) * m]
    }

    pub fn eval_hess(&self, v: [f64; 3]) -> [[f64; 3]; 3] {
        let (p, g, h) = self.poly_derivs(v);
        let m = sqrt_maxwellian(v);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 0.5 } else { 0.0 };
                out[i][j] = (h[i][j] - 0.5 * (v[i] * g[j] + v[j] * g[i]) + p * (0.25 * v[i] * v[j] - delta)) * m;
            }
        }
        out
    }
}

/// Orthonormal coefficient vectors spanning the collision invariants
/// {1, v₁, v₂, v₃, |v|²}·μ^{1/2}.
pub fn collision_invariant_coeffs(spec: &BasisSpec) -> Result<Vec<HermiteCoeffs>> {
    if spec.k < 2 {
        return Err(Error::DegreeTooLow { k: spec.k, need: 2 });
    }
    let mut out = vec![
        HermiteCoeffs::unit(spec, [0, 0, 0]),
        HermiteCoeffs::unit(spec, [1, 0, 0]),
        HermiteCoeffs::unit(spec, [0, 1, 0]),
        HermiteCoeffs::unit(spec, [0, 0, 1]),
    ];
    let mut e5 = HermiteCoeffs::zeros(spec);
    let c = 1.0 / 3f64.sqrt();
    for a in [[2, 0, 0], [0, 2, 0], [0, 0, 2]] {
        e5.coeffs[spec.index(a).unwrap()] = c;
    }
    out.push(e5);
    Ok(out)
}

/// ℙf via the a, b, c moment formulas, returned in the basis of f.
pub fn project_p(f: &HermiteCoeffs) -> HermiteCoeffs {
    let spec = &f.spec;
    // ∫ q(v) μ^{1/2} f dv = ∫ q p_f μ dv; the integrand has degree ≤ K + 2.
    let rule = GaussHermiteRule::for_degree(spec.k + 2);
    let pv: Vec<f64> = rule.nodes.iter().map(|v| f.eval_poly(*v)).collect();
    let moment = |q: &dyn Fn([f64; 3]) -> f64| -> f64 {
        rule.nodes.iter().zip(&rule.weights).zip(&pv).map(|((v, w), p)| w * q(*v) * p).sum()
    };
    let n2 = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let a = moment(&|v| 2.5 - 0.5 * n2(v));
    let b = [moment(&|v| v[0]), moment(&|v| v[1]), moment(&|v| v[2])];
    let c = moment(&|v| n2(v) / 6.0 - 0.5);
    // (a + b·v + c|v|²) with |v|² = 3 + √2 Σ h_2(v_i).
    let mut out = HermiteCoeffs::zeros(spec);
    if spec.k == 0 {
        out.coeffs[0] = a + 3.0 * c;
        return out;
    }
    out.coeffs[0] = a + 3.0 * c;
    out.coeffs[spec.index([1, 0, 0]).unwrap()] = b[0];
    out.coeffs[spec.index([0, 1, 0]).unwrap()] = b[1];
    out.coeffs[spec.index([0, 0, 1]).unwrap()] = b[2];
    if spec.k >= 2 {
        let r2 = std::f64::consts::SQRT_2 * c;
        for e in [[2, 0, 0], [0, 2, 0], [0, 0, 2]] {
            out.coeffs[spec.index(e).unwrap()] = r2;
        }
    }
    out
}

/// Coefficients of ∂_i f in the basis of degree K + 1:
/// ∂ψ_m = (√m/2) ψ_{m−1} − (√(m+1)/2) ψ_{m+1}.
pub fn derivative(f: &HermiteCoeffs, axis: usize) -> HermiteCoeffs {
    let out_spec = BasisSpec::new(f.spec.k + 1);
    let mut out = HermiteCoeffs::zeros(&out_spec);
    for (a, &c) in f.spec.alphas().iter().zip(&f.coeffs) {
        let m = a[axis];
        if m >= 1 {
            let mut lo = *a;
            lo[axis] -= 1;
            out.coeffs[out_spec.index(lo).unwrap()] += 0.5 * (m as f64).sqrt() * c;
        }
        let mut hi = *a;
        hi[axis] += 1;
        out.coeffs[out_spec.index(hi).unwrap()] -= 0.5 * ((m + 1) as f64).sqrt() * c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(spec: &BasisSpec, seed: u64) -> HermiteCoeffs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HermiteCoeffs::from_vec(spec, (0..spec.dim()).map(|_| rng.gen::<f64>() - 0.5).collect())
    }

    #[test]
    fn dimension_and_indexing() {
        for k in 0..13 {
            let s = BasisSpec::new(k);
            assert_eq!(s.dim(), BasisSpec::dim_for(k));
            for i in 0..s.dim() {
                assert_eq!(s.index(s.alpha(i)), Some(i));
            }
        }
        assert_eq!(BasisSpec::new(8).dim(), 165);
        assert_eq!(BasisSpec::new(12).dim(), 455);
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let s = BasisSpec::new(4);
        let rule = GaussHermiteRule::for_degree(8);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let g = rule.integrate(|v| s.poly_values(v)[i] * s.poly_values(v)[j]);
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        // L² norm of a random combination equals the coefficient norm.
        let s = BasisSpec::new(6);
        let f = random(&s, 1);
        let rule = GaussHermiteRule::for_degree(12);
        let n2 = rule.integrate(|v| f.eval_poly(v).powi(2));
        assert!((n2.sqrt() - f.norm()).abs() < 1e-10);
    }

    #[test]
    fn constant_mode_is_sqrt_maxwellian() {
        let s = BasisSpec::new(3);
        let f = HermiteCoeffs::unit(&s, [0, 0, 0]);
        let v = [0.3, -1.2, 2.0];
        assert!((f.eval(v) - sqrt_maxwellian(v)).abs() < 1e-16);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let s = BasisSpec::new(5);
        let f = random(&s, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-5;
        for _ in 0..20 {
            let v = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let g = f.eval_grad(v);
            let hs = f.eval_hess(v);
            let scale = g.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-3);
            for i in 0..3 {
                let mut p = v;
                let mut m = v;
                p[i] += h;
                m[i] -= h;
                let fd = (f.eval(p) - f.eval(m)) / (2.0 * h);
                assert!((fd - g[i]).abs() <= 1e-6 * scale, "grad {i}: {fd} vs {}", g[i]);
                let gp = f.eval_grad(p);
                let gm = f.eval_grad(m);
                for j in 0..3 {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                    assert!((fd2 - hs[i][j]).abs() <= 1e-5 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn invariants_are_orthonormal_and_low_degree() {
        let s = BasisSpec::new(4);
        let e = collision_invariant_coeffs(&s).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let d: f64 = e[i].coeffs.iter().zip(&e[j].coeffs).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
            for (k, a) in s.alphas().iter().enumerate() {
                if a[0] + a[1] + a[2] == 3 {
                    assert_eq!(e[i].coeffs[k], 0.0);
                }
            }
        }
        assert!(collision_invariant_coeffs(&BasisSpec::new(1)).is_err());
        // e5 represents (|v|² − 3)/√6 · μ^{1/2}.
        let v = [0.4, 1.1, -0.7];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        assert!((e[4].eval_poly(v) - (n2 - 3.0) / 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn projection_examples() {
        let s = BasisSpec::new(5);
        let f = HermiteCoeffs::unit(&s, [1, 0, 0]);
        let pf = project_p(&f);
        for (a, b) in pf.coeffs.iter().zip(&f.coeffs) {
            assert!((a - b).abs() < 1e-13);
        }
        let g = HermiteCoeffs::unit(&s, [1, 2, 0]);
        assert!(project_p(&g).norm() < 1e-13);
        let r = random(&s, 4);
        let p1 = project_p(&r);
        let p2 = project_p(&p1);
        for (a, b) in p1.coeffs.iter().zip(&p2.coeffs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_symmetric_rank_five() {
        let s = BasisSpec::new(4);
        let n = s.dim();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut e = HermiteCoeffs::zeros(&s);
            e.coeffs[j] = 1.0;
            let p = project_p(&e);
            for i in 0..n {
                m[(i, j)] = p.coeffs[i];
            }
        }
        assert!((&m - m.transpose()).norm() < 1e-12);
        assert!((&m * &m - &m).norm() < 1e-12);
        assert!((m.trace() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_ladder_matches_pointwise() {
        let s = BasisSpec::new(4);
        let f = random(&s, 5);
        let v = [0.3, -0.8, 1.4];
        let g = f.eval_grad(v);
        for axis in 0..3 {
            let d = derivative(&f, axis);
            assert!((d.eval(v) - g[axis]).abs() < 1e-13);
        }
    }

    #[test]
    fn tail_bound_at_radius_twelve() {
        // Worst unit-norm value at v is sqrt(Σ ψ_α(v)²) (Cauchy–Schwarz).
        let dirs = crate::quadrature::shell::sphere_product_rule(30).0;
        for k in [4usize, 6, 8, 9] {
            let s = BasisSpec::new(k);
            let worst = dirs
                .iter()
                .map(|d| {
                    let v = [12.0 * d[0], 12.0 * d[1], 12.0 * d[2]];
                    s.poly_values(v).iter().map(|p| p * p).sum::<f64>().sqrt() * sqrt_maxwellian(v)
                })
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "K={k}: {worst:e}");
        }
    }
}
