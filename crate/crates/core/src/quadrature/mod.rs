//! Quadrature rules.

pub mod adaptive;
pub mod cube;
pub mod gauss;
pub mod shell;
pub mod so3;
pub mod sphere;

pub use cube::UniformCubeGrid;
pub use gauss::Rule1D;
pub use shell::SphericalShellSampler;
pub use so3::EulerRule;
pub use sphere::SphereRule;

/// Tensor Gauss rule for ∫ p(v) μ(v) dv over ℝ³.
#[derive(Debug, Clone)]
pub struct GaussHermiteRule {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub per_axis: usize,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

impl GaussHermiteRule {
    /// Smallest tensor rule exact for total degree `degree`.
    pub fn for_degree(degree: usize) -> GaussHermiteRule {
        Self::with_nodes(degree / 2 + 1)
    }

    pub fn with_nodes(n: usize) -> GaussHermiteRule {
        let r = gauss::gauss_hermite_prob(n);
        let mut nodes = Vec::with_capacity(n * n * n);
        let mut weights = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    nodes.push([r.nodes[i], r.nodes[j], r.nodes[k]]);
                    weights.push(r.weights[i] * r.weights[j] * r.weights[k]);
                }
            }
        }
        GaussHermiteRule { nodes, weights, per_axis: n, degree: 2 * n - 1 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn([f64; 3]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(v, w)| w * f(*v)).sum()
    }
}

/// `build_gauss_hermite`: tensor rule exact to the requested total degree.
pub fn build_gauss_hermite(degree: usize) -> GaussHermiteRule {
    GaussHermiteRule::for_degree(degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let r = build_gauss_hermite(4);
        assert!(r.degree >= 4);
        assert!((r.integrate(|v| v[0] * v[0]) - 1.0).abs() < 1e-14);
        let n2 = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        assert!((r.integrate(|v| n2(v) * n2(v)) - 15.0).abs() < 1e-12);
        assert!(r.integrate(|v| v[0]).abs() < 1e-15);
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_on_all_monomials_to_stated_degree() {
        let df = |k: i32| -> f64 { if k % 2 == 1 { 0.0 } else { (1..k).step_by(2).map(|x| x as f64).product() } };
        for deg in 1..10 {
            let r = build_gauss_hermite(deg);
            for a in 0..=deg as i32 {
                for b in 0..=(deg as i32 - a) {
                    for c in 0..=(deg as i32 - a - b) {
                        let got = r.integrate(|v| v[0].powi(a) * v[1].powi(b) * v[2].powi(c));
                        let ex = df(a) * df(b) * df(c);
                        assert!((got - ex).abs() < 1e-11 * ex.max(1.0), "deg {deg} ({a},{b},{c})");
                    }
                }
            }
        }
    }
}
