//! Angular moments of b^ε and closed-form spectra of Maxwell-molecule operators.

use std::f64::consts::PI;

use crate::error::Result;
use crate::params::ModelParams;
use crate::quadrature::adaptive::{integrate, AdaptiveOptions};

/// ∫ 4u b^ε(u) f(u) du for f(u) = u²·r(u), given `r`.
///
/// With u = ε t^{1/(2−2s)} the kernel weight becomes 2 dt on [0, 1].
pub fn kernel_moment<R: Fn(f64) -> f64>(eps: f64, s: f64, r: R) -> Result<f64> {
    let p = 1.0 / (2.0 - 2.0 * s);
    let opts = AdaptiveOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 2000 };
    let v = integrate(|t| 2.0 * r(eps * t.powf(p)), 0.0, 1.0, opts)?;
    Ok(v.value)
}

/// ∫ 4u b^ε u^{2j} du, exact (j ≥ 1).
pub fn power_moment(eps: f64, s: f64, j: usize) -> f64 {
    assert!(j >= 1);
    let p = 1.0 / (2.0 - 2.0 * s);
    2.0 * eps.powi(2 * j as i32 - 2) / (p * (2 * j - 2) as f64 + 1.0)
}

/// m_k = ∫ 4u b^ε · 2 sin²(kθ/2) du with θ = 2 arcsin u, for k = 0..=k_max.
pub fn cosine_moments(eps: f64, s: f64, k_max: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; k_max + 1];
    for (k, m) in out.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        *m = kernel_moment(eps, s, |u| {
            if u < 1e-150 {
                return 2.0 * kf * kf;
            }
            let x = (kf * u.asin()).sin() / u;
            2.0 * x * x
        })?;
    }
    Ok(out)
}

/// Quadrature weights c_j on θ_j = 2πj/N such that for any trigonometric
/// polynomial F of degree ≤ k_max,
/// Σ_j c_j F(θ_j) = ∫ 4u b^ε (F(θ(u)) + F(−θ(u)))/2 − F(0) du.
pub fn angle_weights(eps: f64, s: f64, k_max: usize, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert!(n > 2 * k_max);
    let m = cosine_moments(eps, s, k_max)?;
    let theta: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let c = theta
        .iter()
        .map(|&t| -(1..=k_max).map(|k| 2.0 / n as f64 * (k as f64 * t).cos() * m[k]).sum::<f64>())
        .collect();
    Ok((theta, c))
}

fn legendre_coeffs(l: usize) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if l == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for k in 1..l {
        let kf = k as f64;
        let mut p2 = vec![0.0; k + 2];
        for (i, c) in p1.iter().enumerate() {
            p2[i + 1] += (2.0 * kf + 1.0) * c / (kf + 1.0);
        }
        for (i, c) in p0.iter().enumerate() {
            p2[i] -= kf * c / (kf + 1.0);
        }
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients in w = u² of the Maxwell eigenvalue bracket
/// 1 + δ_{n0}δ_{l0} − c^{2n+l}P_l(c) − u^{2n+l}P_l(u), c = √(1 − w).
pub fn maxwell_bracket(n: usize, l: usize) -> Vec<f64> {
    let deg = n + l;
    let mut poly = vec![0.0; deg + 1];
    poly[0] = if n == 0 && l == 0 { 2.0 } else { 1.0 };
    for (m, c) in legendre_coeffs(l).iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        // c^{2n+l+m} = (1 − w)^{(2n+l+m)/2}
        let e = (2 * n + l + m) / 2;
        for j in 0..=e {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            poly[j] -= c * sign * binomial(e, j);
        }
        poly[e] -= c;
    }
    poly
}

/// One eigenvalue of the linearized operator with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEigenvalue {
    pub n: usize,
    pub l: usize,
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigenvalues of the γ = 0 grazing Boltzmann operator for 2n + l ≤ k, from
/// the Wang Chang–Uhlenbeck formula, integrated exactly in u.
pub fn maxwell_eigenvalues(params: &ModelParams, k: usize) -> Vec<ModeEigenvalue> {
    let mut out = Vec::new();
    for n in 0..=k / 2 {
        for l in 0..=k - 2 * n {
            let poly = maxwell_bracket(n, l);
            let mut v = 0.0;
            for (j, c) in poly.iter().enumerate().skip(1) {
                v += c * power_moment(params.eps, params.s, j);
            }
            out.push(ModeEigenvalue { n, l, value: 2.0 * PI * params.c_b * v, multiplicity: 2 * l + 1 });
        }
    }
    out
}

/// Eigenvalues of the γ = 0 Landau operator: the grazing limit of the above,
/// 4Λ times the linear coefficient of the bracket.
pub fn landau_maxwell_eigenvalues(params: &ModelParams, k: usize) -> Vec<ModeEigenvalue> {
    let mut out = Vec::new();
    for n in 0..=k / 2 {
        for l in 0..=k - 2 * n {
            let poly = maxwell_bracket(n, l);
            let c1 = poly.get(1).copied().unwrap_or(0.0);
            out.push(ModeEigenvalue { n, l, value: 4.0 * params.lambda_landau * c1, multiplicity: 2 * l + 1 });
        }
    }
    out
}

/// Eigenvalue list expanded by multiplicity and sorted.
pub fn expand_sorted(modes: &[ModeEigenvalue]) -> Vec<f64> {
    let mut v: Vec<f64> = modes.iter().flat_map(|m| std::iter::repeat(m.value).take(m.multiplicity)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::lambda_e;

    #[test]
    fn brackets_of_low_modes() {
        // Conserved quantities have zero bracket.
        for (n, l) in [(0, 0), (0, 1), (1, 0)] {
            assert!(maxwell_bracket(n, l).iter().all(|c| c.abs() < 1e-14), "{n} {l}");
        }
        let b11 = maxwell_bracket(1, 1);
        assert!((b11[1] - 2.0).abs() < 1e-14 && (b11[2] + 2.0).abs() < 1e-14);
        let b02 = maxwell_bracket(0, 2);
        assert!((b02[1] - 3.0).abs() < 1e-14 && (b02[2] + 3.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_matches_direct_evaluation() {
        let u: f64 = 0.37;
        let c = (1.0 - u * u).sqrt();
        let p3 = |x: f64| 0.5 * (5.0 * x.powi(3) - 3.0 * x);
        let direct = 1.0 - c.powi(5) * p3(c) - u.powi(5) * p3(u);
        let poly = maxwell_bracket(1, 3);
        let w = u * u;
        let via: f64 = poly.iter().enumerate().map(|(j, a)| a * w.powi(j as i32)).sum();
        assert!((direct - via).abs() < 1e-14);
    }

    #[test]
    fn power_moment_against_quadrature() {
        for &(eps, s) in &[(0.1, 0.6), (0.3, 0.9)] {
            for j in 1..4 {
                let q = kernel_moment(eps, s, |u| u.powi(2 * j as i32 - 2)).unwrap();
                assert!((q - power_moment(eps, s, j)).abs() < 1e-12 * q, "{eps} {s} {j}");
            }
        }
    }

    #[test]
    fn order_two_moment_matches_lambda_e() {
        // ∫ 4u b u² du equals the θ-integral defining λ_e.
        for &(eps, s) in &[(0.1, 0.6), (0.05, 0.75), (0.3, 0.95)] {
            let m = power_moment(eps, s, 1);
            assert!((m - lambda_e(eps, s).unwrap() / 2.0).abs() < 1e-10, "{m}");
        }
    }

    #[test]
    fn angle_weights_integrate_trig_polynomials() {
        let (eps, s) = (0.2, 0.7);
        let (theta, c) = angle_weights(eps, s, 5, 12).unwrap();
        let f = |t: f64| 0.3 * (3.0 * t).cos() + (5.0 * t).cos() - 0.2 * (2.0 * t).sin() + 0.7;
        let quad: f64 = theta.iter().zip(&c).map(|(t, w)| w * f(*t)).sum();
        // Even part minus the value at 0, written with stable half-angle sines.
        let exact = kernel_moment(eps, s, |u| {
            if u < 1e-150 {
                return -2.0 * (0.3 * 9.0 + 25.0);
            }
            let th = 2.0 * u.asin();
            (-0.6 * (1.5 * th).sin().powi(2) - 2.0 * (2.5 * th).sin().powi(2)) / (u * u)
        })
        .unwrap();
        assert!((quad - exact).abs() < 1e-11 * exact.abs(), "{quad} {exact}");
    }
}
