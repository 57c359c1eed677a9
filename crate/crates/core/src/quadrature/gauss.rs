//! One-dimensional Gaussian rules via Golub–Welsch.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::{gamma, ln_gamma};

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine map of a rule on [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule1D {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        Rule1D {
            nodes: self.nodes.iter().map(|x| c + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }
}

/// Golub–Welsch: `alpha` are the diagonal recurrence coefficients, `beta[k]`
/// (k = 1..n-1) the squared off-diagonals, `mu0` the total mass.
pub fn golub_welsch(alpha: &[f64], beta: &[f64], mu0: f64) -> Rule1D {
    let n = alpha.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = alpha[i];
        if i + 1 < n {
            let b = beta[i + 1].sqrt();
            j[(i, i + 1)] = b;
            j[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Rule1D { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre on [-1, 1], Newton-polished.
pub fn gauss_legendre(n: usize) -> Rule1D {
    assert!(n >= 1);
    let alpha = vec![0.0; n];
    let beta: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { let k = k as f64; k * k / (4.0 * k * k - 1.0) }).collect();
    let mut r = golub_welsch(&alpha, &beta, 2.0);
    for i in 0..n {
        let mut x = r.nodes[i];
        for _ in 0..3 {
            let (p, d) = legendre_with_derivative(n, x);
            x -= p / d;
        }
        let (_, d) = legendre_with_derivative(n, x);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * d * d);
    }
    r
}

/// Gauss rule for the standard normal density (probabilists' Hermite).
/// Weights sum to 1.
pub fn gauss_hermite_prob(n: usize) -> Rule1D {
    assert!(n >= 1);
    let alpha = vec![0.0; n];
    let beta: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let mut r = golub_welsch(&alpha, &beta, 1.0);
    // Newton on the orthonormal h_n, weights 1/(n h_{n-1}(x)^2).
    for i in 0..n {
        let mut x = r.nodes[i];
        for _ in 0..3 {
            let (hn, hm) = orthonormal_hermite_pair(n, x);
            if hm != 0.0 {
                x -= hn / ((n as f64).sqrt() * hm);
            }
        }
        let (_, hm) = orthonormal_hermite_pair(n, x);
        r.nodes[i] = x;
        r.weights[i] = 1.0 / (n as f64 * hm * hm);
    }
    // Symmetrize.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (r.nodes[j] - r.nodes[i]);
        let w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = w;
        r.weights[j] = w;
    }
    if n % 2 == 1 {
        r.nodes[n / 2] = 0.0;
    }
    r
}

/// (h_n(x), h_{n-1}(x)) for the orthonormal probabilists' Hermite family.
fn orthonormal_hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Generalized Gauss–Laguerre for weight t^a e^{-t} on [0, ∞).
pub fn gauss_laguerre(n: usize, a: f64) -> Rule1D {
    assert!(n >= 1 && a > -1.0);
    let alpha: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let beta: Vec<f64> = (0..n).map(|k| { let k = k as f64; k * (k + a) }).collect();
    golub_welsch(&alpha, &beta, gamma(a + 1.0))
}

/// Gauss–Jacobi for weight (1-x)^a (1+x)^b on [-1, 1].
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule1D {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        alpha[k] = if k == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if k >= 1 {
            beta[k] = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
        }
    }
    let ln_mu0 = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0);
    golub_welsch(&alpha, &beta, ln_mu0.exp())
}

/// Rule for ∫_0^R r^p f(r) dr.
pub fn radial_power_rule(n: usize, p: f64, r_max: f64) -> Rule1D {
    let j = gauss_jacobi(n, 0.0, p);
    let scale = (0.5 * r_max).powf(p + 1.0);
    Rule1D {
        nodes: j.nodes.iter().map(|x| 0.5 * r_max * (1.0 + x)).collect(),
        weights: j.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Composite Gauss–Legendre over consecutive breakpoints.
pub fn composite_legendre(breaks: &[f64], n_per_panel: usize) -> Rule1D {
    let base = gauss_legendre(n_per_panel);
    let mut out = Rule1D { nodes: Vec::new(), weights: Vec::new() };
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let m = base.mapped(w[0], w[1]);
            out.nodes.extend(m.nodes);
            out.weights.extend(m.weights);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: i64) -> f64 {
        (1..=n).rev().step_by(2).map(|k| k as f64).product()
    }

    #[test]
    fn legendre_exact_on_monomials() {
        let r = gauss_legendre(8);
        for k in 0..16 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = r.integrate(|x| x.powi(k));
            assert!((got - exact).abs() < 1e-14, "k={k} got {got}");
        }
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite_prob(10);
        for k in 0..20i64 {
            let exact = if k % 2 == 1 { 0.0 } else { double_factorial(k - 1) };
            let got = r.integrate(|x| x.powi(k as i32));
            let scale = r.integrate(|x| x.abs().powi(k as i32));
            assert!((got - exact).abs() <= 1e-13 * scale, "k={k}");
        }
    }

    #[test]
    fn laguerre_moments() {
        let a = 0.37;
        let r = gauss_laguerre(9, a);
        for k in 0..18 {
            let exact = gamma(a + 1.0 + k as f64);
            let got = r.integrate(|x| x.powi(k));
            assert!((got / exact - 1.0).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn jacobi_radial_moments() {
        // ∫_0^R r^{p+k} dr = R^{p+k+1}/(p+k+1)
        let p = 0.5;
        let r = radial_power_rule(7, p, 3.0);
        for k in 0..14 {
            let exact = 3f64.powf(p + k as f64 + 1.0) / (p + k as f64 + 1.0);
            let got = r.integrate(|x| x.powi(k));
            assert!((got / exact - 1.0).abs() < 1e-12, "k={k}");
        }
    }
}
