//! Pointwise Γ^ε(g, h)(v) by direct quadrature: a validation path independent
//! of the Galerkin assembly.

use crate::basis::hermite1d::values;
use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::params::{b_eps_raw, maxwellian, sqrt_maxwellian, ModelParams};
use crate::quadrature::sphere::{frame, sigma_minus_axis, SphereRule};

use super::landau::CenteredRule;

/// Rules for the (v_*, σ) integral.
#[derive(Debug, Clone)]
pub struct PointwiseRules {
    pub centered: CenteredRule,
    pub sphere: SphereRule,
}

impl PointwiseRules {
    /// Sphere rule truncated at relative tolerance `tol`; φ nodes exact for
    /// trigonometric degree 2k.
    pub fn new(params: &ModelParams, k: usize, tol: f64) -> PointwiseRules {
        PointwiseRules {
            centered: CenteredRule { radial_nodes: 24, angular_degree: 13, reach: 11.0 },
            sphere: SphereRule::for_tolerance(params, tol, 6, 2 * k + 2),
        }
    }
}

/// Axis tables h(x), h(x + d) and their difference, computed stably.
struct AxisShift {
    base: Vec<f64>,
    shifted: Vec<f64>,
    delta: Vec<f64>,
}

impl AxisShift {
    fn new(k: usize) -> AxisShift {
        AxisShift { base: vec![0.0; k + 1], shifted: vec![0.0; k + 1], delta: vec![0.0; k + 1] }
    }

    fn set_base(&mut self, x: f64) {
        let k = self.base.len() - 1;
        values(k, x, &mut self.base);
    }

    fn set_shift(&mut self, x: f64, d: f64) {
        let k = self.base.len() - 1;
        if d.abs() > 0.25 {
            values(k, x + d, &mut self.shifted);
            for m in 0..=k {
                self.delta[m] = self.shifted[m] - self.base[m];
            }
            return;
        }
        // Taylor in d: h_m^{(j)} = √(m!/(m−j)!) h_{m−j}.
        for m in 0..=k {
            let mut acc = 0.0;
            let mut fall = 1.0;
            let mut dj = 1.0;
            for j in 1..=m {
                fall *= ((m - j + 1) as f64).sqrt();
                dj *= d / j as f64;
                acc += fall * dj * self.base[m - j];
            }
            self.delta[m] = acc;
            self.shifted[m] = self.base[m] + acc;
        }
    }
}

/// p(x + d) − p(x) by telescoping over the three axes.
fn poly_shift_diff(spec: &BasisSpec, c: &[f64], ax: &[AxisShift; 3]) -> f64 {
    let mut s = 0.0;
    for (a, &ca) in spec.alphas().iter().zip(c) {
        if ca == 0.0 {
            continue;
        }
        let t = ax[0].delta[a[0]] * ax[1].shifted[a[1]] * ax[2].shifted[a[2]]
            + ax[0].base[a[0]] * ax[1].delta[a[1]] * ax[2].shifted[a[2]]
            + ax[0].base[a[0]] * ax[1].base[a[1]] * ax[2].delta[a[2]];
        s += ca * t;
    }
    s
}

fn poly_value(spec: &BasisSpec, c: &[f64], ax: &[AxisShift; 3]) -> f64 {
    spec.alphas().iter().zip(c).map(|(a, &ca)| ca * ax[0].base[a[0]] * ax[1].base[a[1]] * ax[2].base[a[2]]).sum()
}

/// Γ^ε(g, h)(v) = μ^{1/2}(v) ∫ B^ε μ_* (p_g(v′_*) p_h(v′) − p_g(v_*) p_h(v)) dσ dv_*.
///
/// The differences p(v′) − p(v) are formed before weighting by b^ε. The
/// dropped inner cap is estimated from the geometric decay of the panel sums
/// and added back; non-monotone decay is reported as divergence.
pub fn gamma_eps_pointwise(g: &HermiteCoeffs, h: &HermiteCoeffs, v: [f64; 3], params: &ModelParams, rules: &PointwiseRules) -> Result<f64> {
    params.check()?;
    let sg = &g.spec;
    let sh = &h.spec;
    let sphere = &rules.sphere;
    let mut ah = [AxisShift::new(sh.k), AxisShift::new(sh.k), AxisShift::new(sh.k)];
    let mut ag = [AxisShift::new(sg.k), AxisShift::new(sg.k), AxisShift::new(sg.k)];
    for i in 0..3 {
        ah[i].set_base(v[i]);
    }
    let ph = poly_value(sh, &h.coeffs, &ah);
    let kern: Vec<f64> = sphere.u.iter().zip(&sphere.wu).map(|(&u, &w)| w * b_eps_raw(params.s, params.eps, u)).collect();
    let mut panel = vec![0.0; sphere.panels];
    for (z, wz) in rules.centered.nodes(v, params.gamma) {
        let r = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
        let zh = [z[0] / r, z[1] / r, z[2] / r];
        let (e1, e2) = frame(zh);
        let vs = [v[0] - z[0], v[1] - z[1], v[2] - z[2]];
        let ms = maxwellian(vs);
        if ms < 1e-300 {
            continue;
        }
        for i in 0..3 {
            ag[i].set_base(vs[i]);
        }
        let pg = poly_value(sg, &g.coeffs, &ag);
        for (iu, &u) in sphere.u.iter().enumerate() {
            let mut inner = 0.0;
            for &phi in &sphere.phi {
                let dm = sigma_minus_axis(zh, e1, e2, u, phi);
                // v′ = v + d, v′_* = v_* − d with d = r(σ − ẑ)/2.
                let d = [0.5 * r * dm[0], 0.5 * r * dm[1], 0.5 * r * dm[2]];
                for i in 0..3 {
                    ah[i].set_shift(v[i], d[i]);
                    ag[i].set_shift(vs[i], -d[i]);
                }
                let dh = poly_shift_diff(sh, &h.coeffs, &ah);
                let dg = poly_shift_diff(sg, &g.coeffs, &ag);
                inner += dg * ph + pg * dh + dg * dh;
            }
            panel[sphere.panel_of[iu]] += wz * ms * kern[iu] * sphere.w_phi * inner;
        }
    }
    let total: f64 = panel.iter().sum();
    let scale: f64 = panel.iter().map(|x| x.abs()).sum();
    let n = panel.len();
    if n >= 4 {
        for j in n - 3..n {
            if panel[j].abs() > panel[j - 1].abs() * (1.0 + 1e-6) + 1e-14 * scale {
                return Err(Error::QuadratureDivergence(format!(
                    "panel sums not decaying at panel {j}: {:.3e} after {:.3e}",
                    panel[j],
                    panel[j - 1]
                )));
            }
        }
    }
    // Geometric tail of the dropped inner cap.
    let q = 0.5f64.powf(2.0 - 2.0 * params.s);
    let tail = if n >= 1 { panel[n - 1] * q / (1.0 - q) } else { 0.0 };
    Ok(params.c_b * sqrt_maxwellian(v) * (total + tail))
}

/// 𝓛^ε g (v) = −Γ^ε(μ^{1/2}, g)(v) − Γ^ε(g, μ^{1/2})(v).
pub fn l_eps_pointwise(g: &HermiteCoeffs, v: [f64; 3], params: &ModelParams, rules: &PointwiseRules) -> Result<f64> {
    let one = HermiteCoeffs::unit(&g.spec, [0, 0, 0]);
    Ok(-gamma_eps_pointwise(&one, g, v, params, rules)? - gamma_eps_pointwise(g, &one, v, params, rules)?)
}
