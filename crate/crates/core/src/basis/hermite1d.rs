//! Normalized probabilists' Hermite polynomials h_m = He_m/√(m!).

use crate::quadrature::gauss::{gauss_hermite_prob, Rule1D};

/// h_0..h_k at x.
pub fn values(k: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if k >= 1 {
        out[1] = x;
    }
    for m in 1..k {
        let mf = m as f64;
        out[m + 1] = (x * out[m] - mf.sqrt() * out[m - 1]) / (mf + 1.0).sqrt();
    }
}

pub fn values_vec(k: usize, x: f64) -> Vec<f64> {
    let mut v = vec![0.0; k + 1];
    values(k, x, &mut v);
    v
}

/// h_m' = √m h_{m−1}.
pub fn derivs(vals: &[f64], out: &mut [f64]) {
    out[0] = 0.0;
    for m in 1..vals.len() {
        out[m] = (m as f64).sqrt() * vals[m - 1];
    }
}

/// h_m(x + d) − h_m(x) for m ≤ k, without cancellation for small d.
pub fn shift_diff(k: usize, x: f64, d: f64, out: &mut [f64]) {
    if d.abs() > 0.25 {
        let a = values_vec(k, x);
        let b = values_vec(k, x + d);
        for m in 0..=k {
            out[m] = b[m] - a[m];
        }
        return;
    }
    // Taylor: h_m^{(j)} = √(m!/(m−j)!) h_{m−j}.
    let h = values_vec(k, x);
    for m in 0..=k {
        let mut acc = 0.0;
        let mut fall = 1.0; // √(m!/(m−j)!)
        let mut dj = 1.0; // d^j / j!
        for j in 1..=m {
            fall *= ((m - j + 1) as f64).sqrt();
            dj *= d / j as f64;
            acc += fall * dj * h[m - j];
        }
        out[m] = acc;
    }
}

/// Expectations over X ~ N(0, 1/2) use this rule: nodes y/√2 of the
/// standard-normal rule.
pub fn half_variance_rule(n: usize) -> Rule1D {
    let r = gauss_hermite_prob(n);
    Rule1D { nodes: r.nodes.iter().map(|y| y * std::f64::consts::FRAC_1_SQRT_2).collect(), weights: r.weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_under_gaussian() {
        let r = gauss_hermite_prob(12);
        for a in 0..10 {
            for b in 0..10 {
                let g = r.integrate(|x| values_vec(9, x)[a] * values_vec(9, x)[b]);
                assert!((g - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_difference_agrees_with_direct() {
        let mut out = vec![0.0; 9];
        for &(x, d) in &[(0.7, 1e-3), (-1.3, 0.2), (2.0, 1.5), (0.1, -0.01)] {
            shift_diff(8, x, d, &mut out);
            let a = values_vec(8, x);
            let b = values_vec(8, x + d);
            for m in 0..=8 {
                assert!((out[m] - (b[m] - a[m])).abs() < 1e-12 * (1.0 + b[m].abs()), "m={m}");
            }
        }
        shift_diff(6, 0.4, 1e-12, &mut out);
        assert!((out[1] - 1e-12).abs() < 1e-27);
    }
}
