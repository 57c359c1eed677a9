//! The functional 𝓝(g, h) = ∫ b^ε |v − v_*|^γ g_*² (h′ − h)² dσ dv dv_*.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::params::{b_eps_raw, norm3, sqrt_maxwellian, ModelParams};
use crate::quadrature::gauss::{gauss_legendre, radial_power_rule};
use crate::quadrature::sphere::{frame, sigma_minus_axis, SphereRule};
use crate::quadrature::GaussHermiteRule;

use super::shells::{shell_grams, RADIAL_REACH};

/// Rules for the inner (z, σ) integral at fixed v_*.
///
/// z is written in polar coordinates about the axis pointing from v_* to the
/// origin, where h is assumed to concentrate (Gaussian-weighted h, or h
/// constant); for |v_*| large the polar range is split at 6/|v_*|.
#[derive(Debug, Clone)]
pub struct NRules {
    pub radial_nodes: usize,
    pub polar_nodes: usize,
    pub azimuths: usize,
    pub reach: f64,
    pub sphere: SphereRule,
}

impl NRules {
    pub fn new(params: &ModelParams, tol: f64) -> NRules {
        NRules { radial_nodes: 48, polar_nodes: 16, azimuths: 8, reach: 11.0, sphere: SphereRule::for_tolerance(params, tol, 6, 16) }
    }

    /// Smaller rules for tests of the general path.
    pub fn coarse(params: &ModelParams) -> NRules {
        NRules { radial_nodes: 24, polar_nodes: 10, azimuths: 6, reach: 10.0, sphere: SphereRule::for_tolerance(params, 1e-2, 5, 10) }
    }
}

fn polar_rule(rho: f64, n: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(n);
    let cut = if rho > 2.0 { (6.0 / rho).min(0.5 * PI) } else { PI };
    let mut out = Vec::new();
    for (a, b) in [(0.0, cut), (cut, PI)] {
        if b <= a {
            continue;
        }
        let m = gl.mapped(a, b);
        for (t, w) in m.nodes.iter().zip(&m.weights) {
            out.push((*t, w * t.sin()));
        }
    }
    out
}

/// ∫ dz |z|^γ ∫ dσ b^ε (h(v′) − h(v))² with v = v_* + z, v′ = v + |z|(σ − ẑ)/2.
///
/// With `axisymmetric` the integrand is assumed invariant under rotations
/// about the line through v_* and the origin, and one azimuth is used.
pub fn n_inner<F: Fn([f64; 3]) -> f64>(v_star: [f64; 3], h: &F, params: &ModelParams, rules: &NRules, axisymmetric: bool) -> Result<f64> {
    let rho = norm3(v_star);
    let axis = if rho > 1e-12 { [-v_star[0] / rho, -v_star[1] / rho, -v_star[2] / rho] } else { [0.0, 0.0, 1.0] };
    let (a1, a2) = frame(axis);
    let radial = radial_power_rule(rules.radial_nodes, 2.0 + params.gamma, rho + rules.reach);
    let polar = polar_rule(rho, rules.polar_nodes);
    let n_az = if axisymmetric { 1 } else { rules.azimuths };
    let w_az = 2.0 * PI / n_az as f64;
    let sphere = &rules.sphere;
    let kern: Vec<f64> = sphere.u.iter().zip(&sphere.wu).map(|(&u, &w)| w * b_eps_raw(params.s, params.eps, u)).collect();
    let mut panel = vec![0.0; sphere.panels];
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        for &(t, wt) in &polar {
            let (st, ct) = t.sin_cos();
            for ia in 0..n_az {
                let ph = 2.0 * PI * (ia as f64 + 0.5) / n_az as f64;
                let (sp, cp) = ph.sin_cos();
                let zh: [f64; 3] = std::array::from_fn(|i| ct * axis[i] + st * (cp * a1[i] + sp * a2[i]));
                let v: [f64; 3] = std::array::from_fn(|i| v_star[i] + r * zh[i]);
                let hv = h(v);
                let (e1, e2) = frame(zh);
                let w = wr * wt * w_az;
                for (iu, &u) in sphere.u.iter().enumerate() {
                    let mut inner = 0.0;
                    for &phi in &sphere.phi {
                        let dm = sigma_minus_axis(zh, e1, e2, u, phi);
                        let vp = [v[0] + 0.5 * r * dm[0], v[1] + 0.5 * r * dm[1], v[2] + 0.5 * r * dm[2]];
                        inner += (h(vp) - hv).powi(2);
                    }
                    panel[sphere.panel_of[iu]] += w * kern[iu] * sphere.w_phi * inner;
                }
            }
        }
    }
    let n = panel.len();
    let total: f64 = panel.iter().sum();
    if n >= 4 {
        for j in n - 3..n {
            if panel[j] > panel[j - 1] * (1.0 + 1e-6) + 1e-300 {
                return Err(Error::QuadratureDivergence(format!("N panel sums not decaying at panel {j}: {:.3e} after {:.3e}", panel[j], panel[j - 1])));
            }
        }
    }
    let q = 0.5f64.powf(2.0 - 2.0 * params.s);
    let tail = if n >= 1 { panel[n - 1] * q / (1.0 - q) } else { 0.0 };
    Ok(params.c_b * (total + tail))
}

/// 𝓝(g, h) with g Hermite-represented (so g² carries μ) and h evaluable.
pub fn n_functional<F: Fn([f64; 3]) -> f64>(g: &HermiteCoeffs, h: &F, params: &ModelParams, rules: &NRules, outer_nodes: usize) -> Result<f64> {
    params.check()?;
    let rule = GaussHermiteRule::with_nodes(outer_nodes);
    let mut total = 0.0;
    for (vs, w) in rule.nodes.iter().zip(&rule.weights) {
        let pg = g.eval_poly(*vs);
        if pg == 0.0 {
            continue;
        }
        total += w * pg * pg * n_inner(*vs, h, params, rules, false)?;
    }
    Ok(total)
}

/// K(ρ) = inner integral for h = μ^{1/2} at |v_*| = ρ, tabulated at
/// Chebyshev–Lobatto points on [0, 12] and interpolated barycentrically.
#[derive(Debug, Clone)]
pub struct NKernel {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl NKernel {
    pub const DEFAULT_NODES: usize = 33;

    pub fn build(params: &ModelParams, rules: &NRules, n: usize) -> Result<NKernel> {
        params.check()?;
        let nodes: Vec<f64> = (0..n).map(|j| 0.5 * RADIAL_REACH * (1.0 - (PI * j as f64 / (n - 1) as f64).cos())).collect();
        let values = nodes.iter().map(|&rho| n_inner([0.0, 0.0, rho], &sqrt_maxwellian, params, rules, true)).collect::<Result<Vec<f64>>>()?;
        Ok(NKernel { nodes, values })
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let n = self.nodes.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let d = rho - self.nodes[j];
            if d == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                w *= 0.5;
            }
            num += w / d * self.values[j];
            den += w / d;
        }
        num / den
    }

    /// Gram of f ↦ 𝓝(f, μ^{1/2}) = ∫ f_*² K(|v_*|) dv_*.
    pub fn gram(&self, spec: &BasisSpec) -> DMatrix<f64> {
        let w = |r: f64| self.eval(r);
        shell_grams(spec, &[&w], None).radial.remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_h_gives_zero() {
        let spec = BasisSpec::new(1);
        let g = HermiteCoeffs::from_vec(&spec, vec![1.0, 0.3, -0.2, 0.5]);
        let p = ModelParams::validate(-1.0, 0.7, 0.2).unwrap();
        let v = n_functional(&g, &|_| 2.5, &p, &NRules::coarse(&p), 3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kernel_interpolation_and_general_path_agree() {
        let p = ModelParams::validate(-1.0, 0.75, 0.3).unwrap();
        let rules = NRules::new(&p, 1e-3);
        let kern = NKernel::build(&p, &rules, NKernel::DEFAULT_NODES).unwrap();
        for rho in [0.37, 2.9, 5.3] {
            let direct = n_inner([0.0, rho, 0.0], &sqrt_maxwellian, &p, &rules, true).unwrap();
            assert!((kern.eval(rho) - direct).abs() < 1e-6 * direct, "{rho}: {} {direct}", kern.eval(rho));
        }
        // Full-azimuth path at a tilted v_* against the axisymmetric one.
        let vs = [0.8, -0.6, 1.1];
        let full = n_inner(vs, &sqrt_maxwellian, &p, &rules, false).unwrap();
        let sym = n_inner(vs, &sqrt_maxwellian, &p, &rules, true).unwrap();
        assert!((full - sym).abs() < 1e-8 * sym, "{full} {sym}");

        // Outer Gauss–Hermite over v_* with the general inner path, against
        // the shell Gram of the tabulated kernel (both on coarse rules).
        let coarse = NRules::coarse(&p);
        let kern = NKernel::build(&p, &coarse, NKernel::DEFAULT_NODES).unwrap();
        let spec = BasisSpec::new(1);
        let f = HermiteCoeffs::from_vec(&spec, vec![0.6, 0.2, -0.5, 0.4]);
        let gram = kern.gram(&spec);
        let x = nalgebra::DVector::from_vec(f.coeffs.clone());
        let quad = (x.transpose() * &gram * &x)[(0, 0)];
        let direct = n_functional(&f, &sqrt_maxwellian, &p, &coarse, 8).unwrap();
        assert!((quad - direct).abs() < 1e-3 * quad, "{quad} {direct}");
    }
}
