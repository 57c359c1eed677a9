//! Radial shells with real spherical-harmonic transforms.

use std::f64::consts::PI;

use super::gauss::{composite_legendre, gauss_legendre};

/// Real orthonormal spherical harmonics Y_lm(θ, φ) for l ≤ l_max, indexed by
/// l² + l + m (m from −l to l; m < 0 carries sin |m|φ).
pub fn real_sph_harm(l_max: usize, cos_t: f64, phi: f64, out: &mut [f64]) {
    let n = l_max + 1;
    assert!(out.len() >= n * n);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    // Normalized associated Legendre values, p[l][m].
    let mut p = vec![0.0; n * n];
    let at = |l: usize, m: usize| l * n + m;
    p[at(0, 0)] = 0.5 / PI.sqrt();
    for m in 1..n {
        let mf = m as f64;
        p[at(m, m)] = p[at(m - 1, m - 1)] * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
    }
    for m in 0..n {
        if m + 1 < n {
            p[at(m + 1, m)] = cos_t * (2.0 * m as f64 + 3.0).sqrt() * p[at(m, m)];
        }
        for l in m + 2..n {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[at(l, m)] = a * (cos_t * p[at(l - 1, m)] - b * p[at(l - 2, m)]);
        }
    }
    let r2 = std::f64::consts::SQRT_2;
    for l in 0..n {
        let c = l * l + l;
        out[c] = p[at(l, 0)];
        for m in 1..=l {
            let (s, co) = (m as f64 * phi).sin_cos();
            out[c + m] = r2 * p[at(l, m)] * co;
            out[c - m] = r2 * p[at(l, m)] * s;
        }
    }
}

#[derive(Debug, Clone)]
pub struct SphericalShellSampler {
    pub radii: Vec<f64>,
    /// Radial weights including r².
    pub radial_weights: Vec<f64>,
    /// Unit directions of the angular rule.
    pub directions: Vec<[f64; 3]>,
    pub angular_weights: Vec<f64>,
    pub l_max: usize,
    /// Y_lm at each direction, row-major (direction, lm).
    pub ylm: Vec<f64>,
}

impl SphericalShellSampler {
    /// Shells on [0, r_max] (composite Gauss–Legendre over `breaks`) and an
    /// angular product rule exact to degree 2·l_max.
    pub fn new(r_max: f64, n_radii: usize, l_max: usize) -> SphericalShellSampler {
        Self::with_breaks(&[0.0, r_max], n_radii, l_max)
    }

    pub fn with_breaks(breaks: &[f64], n_per_panel: usize, l_max: usize) -> SphericalShellSampler {
        let rad = composite_legendre(breaks, n_per_panel);
        let radial_weights = rad.nodes.iter().zip(&rad.weights).map(|(r, w)| w * r * r).collect();
        let gl = gauss_legendre(l_max + 1);
        let n_phi = 2 * l_max + 2;
        let nlm = (l_max + 1) * (l_max + 1);
        let mut directions = Vec::new();
        let mut angular_weights = Vec::new();
        let mut ylm = Vec::new();
        let mut buf = vec![0.0; nlm];
        for (ct, wt) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - ct * ct).sqrt();
            for k in 0..n_phi {
                let ph = 2.0 * PI * k as f64 / n_phi as f64;
                directions.push([st * ph.cos(), st * ph.sin(), *ct]);
                angular_weights.push(wt * 2.0 * PI / n_phi as f64);
                real_sph_harm(l_max, *ct, ph, &mut buf);
                ylm.extend_from_slice(&buf);
            }
        }
        SphericalShellSampler { radii: rad.nodes, radial_weights, directions, angular_weights, l_max, ylm }
    }

    pub fn n_lm(&self) -> usize {
        (self.l_max + 1) * (self.l_max + 1)
    }

    /// Coefficients f_lm(r) = ∫ Y_lm(σ) f(rσ) dσ for one shell radius.
    pub fn analyze_shell<F: Fn([f64; 3]) -> f64>(&self, r: f64, f: &F) -> Vec<f64> {
        let nlm = self.n_lm();
        let mut c = vec![0.0; nlm];
        for (d, (dir, w)) in self.directions.iter().zip(&self.angular_weights).enumerate() {
            let v = w * f([r * dir[0], r * dir[1], r * dir[2]]);
            let row = &self.ylm[d * nlm..(d + 1) * nlm];
            for i in 0..nlm {
                c[i] += v * row[i];
            }
        }
        c
    }

    /// Evaluate Σ c_lm Y_lm at direction index `d`.
    pub fn synthesize_at(&self, coeffs: &[f64], d: usize) -> f64 {
        let nlm = self.n_lm();
        self.ylm[d * nlm..(d + 1) * nlm].iter().zip(coeffs).map(|(y, c)| y * c).sum()
    }

    /// `shell_transform`: coefficients on every radius.
    pub fn shell_transform<F: Fn([f64; 3]) -> f64 + Sync>(&self, f: &F) -> Vec<Vec<f64>> {
        self.radii.iter().map(|&r| self.analyze_shell(r, f)).collect()
    }

    /// ∫_{S²} f(rσ)² dσ on one shell by the angular rule.
    pub fn shell_mass<F: Fn([f64; 3]) -> f64>(&self, r: f64, f: &F) -> f64 {
        self.directions
            .iter()
            .zip(&self.angular_weights)
            .map(|(dir, w)| w * f([r * dir[0], r * dir[1], r * dir[2]]).powi(2))
            .sum()
    }

    pub fn angular_len(&self) -> usize {
        self.directions.len()
    }
}

/// Legendre-in-cosθ × uniform-φ rule on S², exact to degree `deg`.
pub fn sphere_product_rule(deg: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let gl = gauss_legendre(deg / 2 + 1);
    let n_phi = deg + 1;
    let mut d = Vec::new();
    let mut w = Vec::new();
    for (ct, wt) in gl.nodes.iter().zip(&gl.weights) {
        let st = (1.0 - ct * ct).sqrt();
        for k in 0..n_phi {
            let ph = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
            d.push([st * ph.cos(), st * ph.sin(), *ct]);
            w.push(wt * 2.0 * PI / n_phi as f64);
        }
    }
    (d, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn harmonics_are_orthonormal() {
        let s = SphericalShellSampler::new(1.0, 2, 8);
        let nlm = s.n_lm();
        for i in 0..nlm {
            for j in 0..nlm {
                let g: f64 = (0..s.angular_len()).map(|d| s.angular_weights[d] * s.ylm[d * nlm + i] * s.ylm[d * nlm + j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-12, "({i},{j}) {g}");
            }
        }
    }

    #[test]
    fn constant_and_dipole() {
        let s = SphericalShellSampler::new(2.0, 3, 6);
        let c = s.analyze_shell(1.5, &|_| 1.0);
        assert!((c[0] - (4.0 * PI).sqrt()).abs() < 1e-13);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-13));
        let c = s.analyze_shell(1.5, &|v| v[2] / (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        for (i, x) in c.iter().enumerate() {
            if !(1..4).contains(&i) {
                assert!(x.abs() < 1e-13);
            }
        }
        assert!(c[2].abs() > 0.1);
    }

    #[test]
    fn band_limited_round_trip() {
        let l_max = 7;
        let s = SphericalShellSampler::new(1.0, 2, l_max);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<f64> = (0..s.n_lm()).map(|_| rng.gen::<f64>() - 0.5).collect();
        let nlm = s.n_lm();
        // Synthesize on the rule directions, then analyze.
        let vals: Vec<f64> = (0..s.angular_len()).map(|d| s.synthesize_at(&coeffs, d)).collect();
        let mut back = vec![0.0; nlm];
        for d in 0..s.angular_len() {
            for i in 0..nlm {
                back[i] += s.angular_weights[d] * vals[d] * s.ylm[d * nlm + i];
            }
        }
        for i in 0..nlm {
            assert!((back[i] - coeffs[i]).abs() < 1e-10);
        }
    }
}
