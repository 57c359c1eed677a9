//! Cancellation functional: ∫ B^ε g_*(h′ − h) against ∫ |v − v_*|^γ g_* h.
//!
//! With G = μ p_g, H = μ p_h both sides depend on the pair only through the
//! correlation C(a) = ∫ G(w) H(w + a) dw, whose spherical mean is
//! e^{−ρ²/4} P(ρ²) for a polynomial P. The angular difference is then formed
//! analytically in u.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::angular::kernel_moment;
use crate::basis::HermiteCoeffs;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::gauss::radial_power_rule;
use crate::quadrature::shell::sphere_product_rule;
use crate::quadrature::GaussHermiteRule;

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Spherical mean of the polynomial part of C, as coefficients in ρ².
fn correlation_profile(g: &HermiteCoeffs, h: &HermiteCoeffs) -> Vec<f64> {
    let deg = g.spec.k + h.spec.k;
    let gh = GaussHermiteRule::with_nodes(deg / 2 + 1);
    let (dirs, dw) = sphere_product_rule(deg + 1);
    // Y ~ N(0, I/2): scale standard nodes by 1/√2.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let poly_at = |a: [f64; 3]| -> f64 {
        gh.nodes
            .iter()
            .zip(&gh.weights)
            .map(|(y, w)| {
                let y = [y[0] * s, y[1] * s, y[2] * s];
                w * g.eval_poly([y[0] - 0.5 * a[0], y[1] - 0.5 * a[1], y[2] - 0.5 * a[2]])
                    * h.eval_poly([y[0] + 0.5 * a[0], y[1] + 0.5 * a[1], y[2] + 0.5 * a[2]])
            })
            .sum()
    };
    let m = deg / 2 + 1;
    let xs: Vec<f64> = (0..m).map(|i| 0.5 + i as f64).collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let rho = x.sqrt();
            dirs.iter().zip(&dw).map(|(d, w)| w * poly_at([rho * d[0], rho * d[1], rho * d[2]])).sum::<f64>()
                / (4.0 * PI)
        })
        .collect();
    let v = DMatrix::from_fn(m, m, |i, j| xs[i].powi(j as i32));
    let c = v.lu().solve(&DVector::from_vec(vals)).expect("Vandermonde solve");
    // Constant from μ(w)μ(w + a) = (2π)^{-3} e^{−|w+a/2|²} e^{−|a|²/4}.
    let pre = (2.0 * PI).powi(-3) * PI.powf(1.5);
    c.iter().map(|x| pre * x).collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// [P(x − δ) − P(x)]/δ without cancellation.
fn backward_quotient(c: &[f64], x: f64, delta: f64) -> f64 {
    let y = x - delta;
    let mut total = 0.0;
    for (j, a) in c.iter().enumerate().skip(1) {
        // (y^j − x^j)/(y − x) = Σ_i y^i x^{j−1−i}
        let s: f64 = (0..j).map(|i| y.powi(i as i32) * x.powi((j - 1 - i) as i32)).sum();
        total -= a * s;
    }
    total
}

/// Ratio LHS/RHS for one pair; it equals the constant of the cancellation
/// identity independently of the pair.
pub fn cancellation_check(g: &HermiteCoeffs, h: &HermiteCoeffs, params: &ModelParams) -> Result<CancellationResult> {
    params.check()?;
    let prof = correlation_profile(g, h);
    let radial = radial_power_rule(64, 2.0 + params.gamma, 16.0);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut scale = 0.0;
    for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
        let x = r * r;
        let e = (-0.25 * x).exp();
        let cbar = e * horner(&prof, x);
        rhs += w * cbar;
        scale += w * cbar.abs();
        // [C̄(r√(1−u²)) − C̄(r)]/u² with δ = r²u².
        let inner = kernel_moment(params.eps, params.s, |u| {
            let q = 0.25 * x * u * u;
            let em = if q == 0.0 { 0.25 * x } else { 0.25 * x * q.exp_m1() / q };
            let delta = x * u * u;
            e * (em * horner(&prof, x - delta) + x * backward_quotient(&prof, x, delta))
        })?;
        lhs += w * inner;
    }
    let lhs = lhs * 8.0 * PI * PI * params.c_b;
    let rhs = rhs * 4.0 * PI;
    if rhs.abs() < 1e-10 * (4.0 * PI * scale).max(f64::MIN_POSITIVE) {
        return Err(Error::RhsNearZero { rhs });
    }
    Ok(CancellationResult { lhs, rhs, ratio: lhs / rhs })
}

/// 2π ∫ b^ε sin θ [cos^{−3−γ}(θ/2) − 1] dθ.
pub fn cancellation_constant(params: &ModelParams) -> Result<f64> {
    let a = -0.5 * (3.0 + params.gamma);
    let m = kernel_moment(params.eps, params.s, |u| {
        let w = u * u;
        if w == 0.0 {
            return -a;
        }
        (a * (-w).ln_1p()).exp_m1() / w
    })?;
    Ok(2.0 * PI * params.c_b * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;

    fn pairs() -> Vec<(HermiteCoeffs, HermiteCoeffs)> {
        let spec = BasisSpec::new(2);
        let mk = |v: &[(usize, f64)]| {
            let mut c = HermiteCoeffs::zeros(&spec);
            for &(i, x) in v {
                c.coeffs[i] = x;
            }
            c
        };
        vec![
            (mk(&[(0, 1.0)]), mk(&[(0, 1.0)])),
            (mk(&[(0, 1.0), (1, 0.3)]), mk(&[(0, 0.8), (4, 0.2), (9, -0.1)])),
            (mk(&[(0, 0.5), (5, 0.4)]), mk(&[(0, 1.0), (2, -0.3), (7, 0.2)])),
        ]
    }

    #[test]
    fn ratio_is_pair_independent_and_matches_constant() {
        for &(gamma, eps) in &[(-2.0, 0.1), (-1.0, 0.3), (0.0, 0.03)] {
            let p = ModelParams::validate(gamma, 0.75, eps).unwrap();
            let c = cancellation_constant(&p).unwrap();
            for (g, h) in pairs() {
                let r = cancellation_check(&g, &h, &p).unwrap();
                assert!((r.ratio - c).abs() < 1e-6 * c.abs(), "{gamma} {eps}: {} vs {c}", r.ratio);
            }
        }
    }

    #[test]
    fn constant_near_grazing_value() {
        // C(ε) → 2π(3 + γ) as ε → 0.
        let p = ModelParams::validate(-2.0, 0.75, 0.01).unwrap();
        let c = cancellation_constant(&p).unwrap();
        assert!((c - 2.0 * PI).abs() < 1e-3 * c);
    }
}
