//! Gram matrices of radially weighted forms, built shell by shell.
//!
//! On a sphere of radius r the basis restricts to polynomials of degree ≤ K,
//! so the angular projections P_r[(ℓ,m), α] = ∫ Y_ℓm(σ) p_α(rσ) dσ are exact
//! with a product rule of degree 2K, and ∫ p_α p_β dσ = (P_rᵀ P_r)_{αβ}.

use nalgebra::DMatrix;

use crate::basis::BasisSpec;
use crate::params::bracket;
use crate::quadrature::gauss::{composite_legendre, Rule1D};
use crate::quadrature::SphericalShellSampler;

/// Radial reach of the shell grids.
pub const RADIAL_REACH: f64 = 12.0;

/// Composite Gauss–Legendre rule on [0, 12] used for every shell Gram.
pub fn shell_radial_rule() -> Rule1D {
    let breaks: Vec<f64> = (0..=24).map(|i| 0.5 * i as f64).collect();
    composite_legendre(&breaks, 10)
}

/// Angular projections P_r (rows (ℓ, m) with ℓ ≤ K, columns α).
pub struct ShellProjector {
    spec: BasisSpec,
    sampler: SphericalShellSampler,
    /// w_d · Y_ℓm(σ_d), (direction × lm).
    wy: DMatrix<f64>,
}

impl ShellProjector {
    pub fn new(spec: &BasisSpec) -> ShellProjector {
        let k = spec.k;
        let sampler = SphericalShellSampler::new(1.0, 1, k);
        let nlm = sampler.n_lm();
        let nd = sampler.angular_len();
        let wy = DMatrix::from_fn(nd, nlm, |d, i| sampler.angular_weights[d] * sampler.ylm[d * nlm + i]);
        ShellProjector { spec: spec.clone(), sampler, wy }
    }

    pub fn n_lm(&self) -> usize {
        self.sampler.n_lm()
    }

    pub fn project(&self, r: f64) -> DMatrix<f64> {
        let nd = self.sampler.angular_len();
        let dim = self.spec.dim();
        let mut vals = DMatrix::zeros(nd, dim);
        for (d, dir) in self.sampler.directions.iter().enumerate() {
            let p = self.spec.poly_values([r * dir[0], r * dir[1], r * dir[2]]);
            for (j, x) in p.into_iter().enumerate() {
                vals[(d, j)] = x;
            }
        }
        self.wy.transpose() * vals
    }
}

/// Grams of Σ_r ω_r r² μ(r) w(r) ∫ p_α p_β dσ for several radial weights in
/// one pass, optionally with the per-band split (band ℓ gets its own matrix,
/// weighted by `band_weight`).
pub struct ShellGrams {
    pub radial: Vec<DMatrix<f64>>,
    pub bands: Vec<DMatrix<f64>>,
}

pub fn shell_grams(spec: &BasisSpec, weights: &[&(dyn Fn(f64) -> f64 + Sync)], band_weight: Option<&(dyn Fn(f64) -> f64 + Sync)>) -> ShellGrams {
    let dim = spec.dim();
    let proj = ShellProjector::new(spec);
    let rule = shell_radial_rule();
    let mut radial = vec![DMatrix::<f64>::zeros(dim, dim); weights.len()];
    let mut bands = if band_weight.is_some() { vec![DMatrix::<f64>::zeros(dim, dim); spec.k + 1] } else { Vec::new() };
    let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let base = w * r * r * norm * (-0.5 * r * r).exp();
        if base < 1e-300 {
            continue;
        }
        let p = proj.project(r);
        let s = p.transpose() * &p;
        for (m, wf) in radial.iter_mut().zip(weights) {
            let c = base * wf(r);
            m.zip_apply(&s, |a, b| *a += c * b);
        }
        if let Some(bw) = band_weight {
            let c = base * bw(r);
            for (l, m) in bands.iter_mut().enumerate() {
                let rows = p.rows(l * l, 2 * l + 1);
                m.gemm(c, &rows.transpose(), &rows, 1.0);
            }
        }
    }
    for m in radial.iter_mut().chain(bands.iter_mut()) {
        *m = 0.5 * (&*m + m.transpose());
    }
    ShellGrams { radial, bands }
}

/// Gram of |⟨v⟩^l f|²_{L²}.
pub fn weighted_l2_gram(spec: &BasisSpec, l: f64) -> DMatrix<f64> {
    let w = move |r: f64| bracket(r).powf(2.0 * l);
    shell_grams(spec, &[&w], None).radial.remove(0)
}

/// Fourier-side Gram at l = 0 from the eigenrelation ψ̂_α(ξ) = 2^{3/2}(−i)^{|α|}ψ_α(2ξ):
/// ⟨W(D)ψ_α, W(D)ψ_β⟩ = i^{|α|−|β|} ∫ W(r/2)² ψ_α ψ_β, zero across parity classes.
pub fn fourier_gram_eigenrelation(spec: &BasisSpec, weight: &(dyn Fn(f64) -> f64 + Sync)) -> DMatrix<f64> {
    let w2 = |r: f64| weight(0.5 * r).powi(2);
    let mut g = shell_grams(spec, &[&w2], None).radial.remove(0);
    let al = spec.alphas();
    for i in 0..spec.dim() {
        for j in 0..spec.dim() {
            let same = (0..3).all(|a| (al[i][a] + al[j][a]) % 2 == 0);
            if !same {
                g[(i, j)] = 0.0;
                continue;
            }
            let di = spec.degree(i) as i64;
            let dj = spec.degree(j) as i64;
            if ((di - dj) / 2).rem_euclid(2) == 1 {
                g[(i, j)] = -g[(i, j)];
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_weight_gives_identity() {
        let spec = BasisSpec::new(6);
        let one = |_: f64| 1.0;
        let g = shell_grams(&spec, &[&one], Some(&one));
        let id = DMatrix::<f64>::identity(spec.dim(), spec.dim());
        assert!((&g.radial[0] - &id).amax() < 1e-12);
        let sum = g.bands.iter().fold(DMatrix::zeros(spec.dim(), spec.dim()), |a, b| a + b);
        assert!((sum - id).amax() < 1e-12);
    }

    #[test]
    fn bracket_squared_weight_matches_moments() {
        // ∫ (1 + |v|²) ψ_α ψ_β = δ + ⟨v ψ_α, v ψ_β⟩, exact via the recurrence.
        let spec = BasisSpec::new(4);
        let g = weighted_l2_gram(&spec, 1.0);
        let big = BasisSpec::new(5);
        let al = spec.alphas();
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                let mut exact = if i == j { 1.0 } else { 0.0 };
                for ax in 0..3 {
                    let up = |a: [usize; 3]| {
                        let mut v = vec![0.0; big.dim()];
                        let mut hi = a;
                        hi[ax] += 1;
                        v[big.index(hi).unwrap()] += ((a[ax] + 1) as f64).sqrt();
                        if a[ax] > 0 {
                            let mut lo = a;
                            lo[ax] -= 1;
                            v[big.index(lo).unwrap()] += (a[ax] as f64).sqrt();
                        }
                        v
                    };
                    let (x, y) = (up(al[i]), up(al[j]));
                    exact += x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
                }
                assert!((g[(i, j)] - exact).abs() < 1e-12, "{i} {j}");
            }
        }
    }

    #[test]
    fn radial_rule_resolves_the_cutoff_weight() {
        // Constant mode: ∫ W^ε(r)² ⟨r⟩^{-1} μ(r) 4πr² dr, adaptively with
        // breaks at the cutoff transition.
        use crate::params::w_eps;
        use crate::quadrature::adaptive::{integrate_breaks, AdaptiveOptions};
        let spec = BasisSpec::new(0);
        let (eps, s) = (0.3, 0.75);
        let w = |r: f64| w_eps(eps, s, r).powi(2) * bracket(r).powf(-1.0);
        let g = shell_grams(&spec, &[&w], None).radial[0][(0, 0)];
        let c = 4.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI).powf(-1.5);
        let f = |r: f64| c * w(r) * r * r * (-0.5 * r * r).exp();
        let opts = AdaptiveOptions { abs_tol: 1e-14, rel_tol: 1e-13, ..Default::default() };
        let exact = integrate_breaks(f, &[0.0, 0.5 / eps, 1.0 / eps, 12.0], opts).unwrap().value;
        assert!((g - exact).abs() < 1e-10 * exact, "{g} {exact}");
    }

    #[test]
    fn band_split_of_pure_dipole() {
        let spec = BasisSpec::new(3);
        let one = |_: f64| 1.0;
        let g = shell_grams(&spec, &[], Some(&one));
        let i = spec.index([0, 0, 1]).unwrap();
        assert!((g.bands[1][(i, i)] - 1.0).abs() < 1e-12);
        assert!(g.bands[0][(i, i)].abs() < 1e-12);
        // |v|² mode mixes ℓ = 0 only; x² − y² is pure ℓ = 2.
        let a = spec.index([2, 0, 0]).unwrap();
        let b = spec.index([0, 2, 0]).unwrap();
        let d2 = g.bands[2][(a, a)] - 2.0 * g.bands[2][(a, b)] + g.bands[2][(b, b)];
        assert!((d2 - 2.0).abs() < 1e-12);
    }
}
