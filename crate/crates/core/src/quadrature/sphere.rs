//! Singularity-graded rule on the spherical cap {sin(θ/2) ≤ ε}.

use std::f64::consts::PI;

use super::gauss::gauss_legendre;
use crate::params::ModelParams;

/// Panels needed so that dropping [0, ε2^{-J}] loses at most `tol` of the
/// mass of an O(u²) integrand against b^ε: (2^{-J})^{2-2s} ≤ tol.
pub fn panels_for_tolerance(s: f64, tol: f64) -> usize {
    ((1.0 / tol).log2() / (2.0 - 2.0 * s)).ceil().max(1.0) as usize
}

#[derive(Debug, Clone)]
pub struct SphereRule {
    pub eps: f64,
    pub s: f64,
    pub panels: usize,
    pub order: usize,
    pub n_phi: usize,
    /// u = sin(θ/2) nodes, decreasing panel by panel from ε toward 0.
    pub u: Vec<f64>,
    /// 4u·du weights.
    pub wu: Vec<f64>,
    /// Panel index of each u node.
    pub panel_of: Vec<usize>,
    pub phi: Vec<f64>,
    pub w_phi: f64,
    /// Relative mass of the dropped inner panel for O(u²) integrands.
    pub truncation_bound: f64,
}

impl SphereRule {
    pub fn build(params: &ModelParams, panels: usize, order: usize, n_phi: usize) -> SphereRule {
        Self::build_with_breaks(params, panels, order, n_phi, &[])
    }

    /// Panel count from a truncation tolerance instead of a fixed depth.
    pub fn for_tolerance(params: &ModelParams, tol: f64, order: usize, n_phi: usize) -> SphereRule {
        Self::build(params, panels_for_tolerance(params.s, tol), order, n_phi)
    }

    /// Extra breakpoints in u split the dyadic panels that contain them
    /// (used for integrands with kinks).
    pub fn build_with_breaks(params: &ModelParams, panels: usize, order: usize, n_phi: usize, breaks: &[f64]) -> SphereRule {
        assert!(panels >= 1 && order >= 2 && n_phi >= 4);
        let eps = params.eps;
        let base = gauss_legendre(order);
        let mut u = Vec::new();
        let mut wu = Vec::new();
        let mut panel_of = Vec::new();
        for j in 0..panels {
            let hi = eps * 0.5f64.powi(j as i32);
            let lo = 0.5 * hi;
            let mut cuts = vec![lo];
            let mut inner: Vec<f64> = breaks.iter().cloned().filter(|&b| b > lo && b < hi).collect();
            inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.extend(inner);
            cuts.push(hi);
            for w in cuts.windows(2) {
                let m = base.mapped(w[0], w[1]);
                for (x, wt) in m.nodes.iter().zip(&m.weights) {
                    u.push(*x);
                    wu.push(4.0 * x * wt);
                    panel_of.push(j);
                }
            }
        }
        let phi = (0..n_phi).map(|k| 2.0 * PI * (k as f64 + 0.5) / n_phi as f64).collect();
        let truncation_bound = 0.5f64.powi(panels as i32).powf(2.0 - 2.0 * params.s);
        SphereRule {
            eps,
            s: params.s,
            panels,
            order,
            n_phi,
            u,
            wu,
            panel_of,
            phi,
            w_phi: 2.0 * PI / n_phi as f64,
            truncation_bound,
        }
    }

    pub fn len(&self) -> usize {
        self.u.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// ∫ f(u, φ) dσ over the cap.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut total = 0.0;
        for (&u, &w) in self.u.iter().zip(&self.wu) {
            let mut inner = 0.0;
            for &p in &self.phi {
                inner += f(u, p);
            }
            total += w * self.w_phi * inner;
        }
        total
    }

    /// ∫ f(u) dσ for φ-independent integrands.
    pub fn integrate_radial<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        2.0 * PI * self.u.iter().zip(&self.wu).map(|(&u, &w)| w * f(u)).sum::<f64>()
    }

    /// Per-panel contributions of a φ-independent integrand.
    pub fn panel_sums<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut out = vec![0.0; self.panels];
        for i in 0..self.u.len() {
            out[self.panel_of[i]] += 2.0 * PI * self.wu[i] * f(self.u[i]);
        }
        out
    }

    /// All nodes as (u, φ, weight).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.u.iter().zip(&self.wu).flat_map(move |(&u, &w)| self.phi.iter().map(move |&p| (u, p, w * self.w_phi)))
    }
}

/// Orthonormal frame (e1, e2) completing the unit vector `a`.
pub fn frame(a: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let t = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = t[0] * a[0] + t[1] * a[1] + t[2] * a[2];
    let mut e1 = [t[0] - d * a[0], t[1] - d * a[1], t[2] - d * a[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for x in &mut e1 {
        *x /= n;
    }
    let e2 = [a[1] * e1[2] - a[2] * e1[1], a[2] * e1[0] - a[0] * e1[2], a[0] * e1[1] - a[1] * e1[0]];
    (e1, e2)
}

/// σ − a for the node (u, φ) around the unit axis `a`, formed without cancellation.
#[inline]
pub fn sigma_minus_axis(a: [f64; 3], e1: [f64; 3], e2: [f64; 3], u: f64, phi: f64) -> [f64; 3] {
    let t = 2.0 * u * (1.0 - u * u).sqrt();
    let (sp, cp) = phi.sin_cos();
    let c = -2.0 * u * u;
    [
        c * a[0] + t * (cp * e1[0] + sp * e2[0]),
        c * a[1] + t * (cp * e1[1] + sp * e2[1]),
        c * a[2] + t * (cp * e1[2] + sp * e2[2]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{b_eps_raw, symbol_e_closed};

    fn p(s: f64, eps: f64) -> ModelParams {
        ModelParams::validate(-1.0, s, eps).unwrap()
    }

    #[test]
    fn cap_area_and_positive_weights() {
        for &eps in &[0.3, 0.1, 0.03] {
            let r = SphereRule::build(&p(0.75, eps), 40, 8, 16);
            let area = r.integrate(|_, _| 1.0);
            let exact = 4.0 * PI * eps * eps;
            // The dropped inner disc has area 4π(ε2^{-J})².
            assert!((area / exact - 1.0).abs() < 1e-10);
            assert!(r.wu.iter().all(|&w| w > 0.0));
            assert!(r.u.iter().all(|&u| u > 0.0 && u <= eps));
        }
    }

    #[test]
    fn order_two_identity() {
        for &eps in &[0.3, 0.1, 0.03] {
            for &s in &[0.6, 0.75, 0.9] {
                let pr = p(s, eps);
                let r = SphereRule::for_tolerance(&pr, 1e-10, 8, 16);
                let v = r.integrate_radial(|u| b_eps_raw(s, eps, u) * u * u);
                assert!((v / (4.0 * PI) - 1.0).abs() < 1e-8, "eps={eps} s={s} v={v}");
            }
        }
    }

    #[test]
    fn fixed_depth_truncation_is_reported() {
        let pr = p(0.75, 0.1);
        let r = SphereRule::build(&pr, 30, 8, 16);
        let v = r.integrate_radial(|u| b_eps_raw(0.75, 0.1, u) * u * u);
        let rel = 1.0 - v / (4.0 * PI);
        assert!(rel > 0.0 && rel <= r.truncation_bound * 1.0001, "rel={rel} bound={}", r.truncation_bound);
        let r2 = SphereRule::build(&pr, 30, 16, 16);
        let v2 = r2.integrate_radial(|u| b_eps_raw(0.75, 0.1, u) * u * u);
        assert!((v2 - v).abs() < 10.0 * r.truncation_bound * v);
    }

    #[test]
    fn symbol_via_rule() {
        let (s, eps) = (0.75, 0.1);
        let pr = p(s, eps);
        for &xi in &[1.0, 5.0, 1.0 / eps, 2.0 / eps, 5.0 / eps] {
            let r = SphereRule::build_with_breaks(&pr, panels_for_tolerance(s, 1e-9), 8, 4, &[1.0 / xi]);
            let v = r.integrate_radial(|u| b_eps_raw(s, eps, u) * (xi * xi * u * u).min(1.0)) / (4.0 * PI);
            let e = symbol_e_closed(eps, s, xi);
            assert!((v / e - 1.0).abs() < 1e-6, "xi={xi} v={v} e={e}");
        }
    }

    #[test]
    fn separable_phi_function() {
        let pr = p(0.75, 0.1);
        let r = SphereRule::build(&pr, 40, 6, 16);
        let area = r.integrate(|_, _| 1.0);
        let v = r.integrate(|_, ph| 2.0 + ph.cos() + (3.0 * ph).sin());
        assert!((v / (2.0 * area) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_convergence_in_panel_order() {
        // ∫_δ^ε u^{1-2s} cos(u) du, reference by an order-40 rule.
        let pr = p(0.75, 0.3);
        let f = |u: f64| u.powf(1.0 - 1.5) * u.cos() / (4.0 * u);
        let exact = SphereRule::build(&pr, 20, 40, 4).integrate_radial(f);
        let mut prev = f64::INFINITY;
        for order in 2..=8 {
            let v = SphereRule::build(&pr, 20, order, 4).integrate_radial(f);
            let err = (v - exact).abs() / exact.abs();
            if err < 1e-14 {
                break;
            }
            assert!(err < 0.5 * prev, "order {order}: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn sigma_difference_is_consistent() {
        let a = [0.36, -0.48, 0.8];
        let (e1, e2) = frame(a);
        for &(u, ph) in &[(1e-9, 0.3), (0.05, 2.0), (0.3, 5.0)] {
            let d = sigma_minus_axis(a, e1, e2, u, ph);
            let sig = [a[0] + d[0], a[1] + d[1], a[2] + d[2]];
            let n = (sig[0] * sig[0] + sig[1] * sig[1] + sig[2] * sig[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-14);
            let dn = 0.5 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            assert!((dn / u - 1.0).abs() < 1e-13);
        }
    }
}
