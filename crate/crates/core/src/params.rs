//! Model parameters and closed-form kernel quantities.

use std::f64::consts::PI;

use crate::error::{Constraint, Error, Result};
use crate::quadrature::adaptive::{integrate, AdaptiveOptions};

/// Japanese bracket ⟨x⟩ = (1 + x²)^{1/2}.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub s: f64,
    pub eps: f64,
    /// Landau strength Λ.
    pub lambda_landau: f64,
    /// Angular kernel prefactor C_B.
    pub c_b: f64,
}

/// Default Landau strength: the grazing limit of the angular kernel with C_B = 1.
pub const DEFAULT_LAMBDA_LANDAU: f64 = PI;

impl ModelParams {
    pub fn validate(gamma: f64, s: f64, eps: f64) -> Result<ModelParams> {
        let p = ModelParams { gamma, s, eps, lambda_landau: DEFAULT_LAMBDA_LANDAU, c_b: 1.0 };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let v = |c| Err(Error::ConstraintViolation(c));
        if !(self.gamma > -3.0 && self.gamma <= 0.0) {
            return v(Constraint::Gamma);
        }
        if !(self.s > 0.5 && self.s < 1.0) {
            return v(Constraint::S);
        }
        if !(self.gamma + 2.0 * self.s > -1.0) {
            return v(Constraint::GammaPlusTwoS);
        }
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return v(Constraint::Eps);
        }
        if !(self.lambda_landau > 0.0) {
            return v(Constraint::LambdaLandau);
        }
        if !(self.c_b > 0.0) {
            return v(Constraint::CB);
        }
        Ok(())
    }

    /// Extra requirement of the Landau path.
    pub fn check_landau(&self) -> Result<()> {
        self.check()?;
        if self.gamma < -2.0 {
            return Err(Error::ConstraintViolation(Constraint::LandauGamma));
        }
        Ok(())
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_lambda_landau(mut self, l: f64) -> Self {
        self.lambda_landau = l;
        self
    }

    pub fn with_c_b(mut self, c: f64) -> Self {
        self.c_b = c;
        self
    }

    /// Angular kernel b^ε as a function of u = sin(θ/2).
    pub fn b_eps(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("b_eps needs u > 0, got {u}")));
        }
        Ok(b_eps_raw(self.s, self.eps, u))
    }

    /// C_B |z|^γ b^ε(cos θ) with cos θ = ẑ·σ; zero on the back hemisphere.
    pub fn kernel_b_eps(&self, z: [f64; 3], sigma: [f64; 3]) -> Result<f64> {
        let r = norm3(z);
        if !(r > 0.0) {
            return Err(Error::Domain("kernel_B_eps at z = 0".into()));
        }
        let zh = [z[0] / r, z[1] / r, z[2] / r];
        let cos = zh[0] * sigma[0] + zh[1] * sigma[1] + zh[2] * sigma[2];
        if cos < 0.0 {
            return Ok(0.0);
        }
        // u = |σ − ẑ|/2 avoids cancellation in (1 − cos θ)/2.
        let d = [sigma[0] - zh[0], sigma[1] - zh[1], sigma[2] - zh[2]];
        let u = 0.5 * norm3(d);
        if u == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.c_b * r.powf(self.gamma) * b_eps_raw(self.s, self.eps, u))
    }

    /// Landau matrix a(z) = Λ|z|^γ(|z|² I − z⊗z).
    pub fn landau_a(&self, z: [f64; 3]) -> Result<[[f64; 3]; 3]> {
        let r = norm3(z);
        if !(r > 0.0) {
            return Err(Error::Domain("landau_a at z = 0".into()));
        }
        let c = self.lambda_landau * r.powf(self.gamma);
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = c * (if i == j { r * r } else { 0.0 } - z[i] * z[j]);
            }
        }
        Ok(a)
    }

    /// Σ_i ∂_i a_ij(z) = −2Λ|z|^γ z_j.
    pub fn landau_div_a(&self, z: [f64; 3]) -> Result<[f64; 3]> {
        let r = norm3(z);
        if !(r > 0.0) {
            return Err(Error::Domain("landau_div_a at z = 0".into()));
        }
        let c = -2.0 * self.lambda_landau * r.powf(self.gamma);
        Ok([c * z[0], c * z[1], c * z[2]])
    }

    pub fn w_eps(&self, y: f64) -> f64 {
        w_eps(self.eps, self.s, y)
    }

    /// Toy-model collision frequency a_ε(|v|).
    pub fn a_eps_toy(&self, v: f64) -> f64 {
        let z = zeta(self.eps * v);
        let b = bracket(v);
        z * b.powf(self.gamma + 2.0)
            + (1.0 - z) * b.powf(self.gamma + 2.0 * self.s) / self.eps.powf(2.0 * (1.0 - self.s))
    }

    pub fn symbol_e_closed(&self, xi: f64) -> f64 {
        symbol_e_closed(self.eps, self.s, xi)
    }

    pub fn lambda_e(&self) -> Result<f64> {
        lambda_e(self.eps, self.s)
    }
}

#[inline]
pub fn b_eps_raw(s: f64, eps: f64, u: f64) -> f64 {
    if u > eps {
        0.0
    } else {
        (1.0 - s) * eps.powf(2.0 * s - 2.0) * u.powf(-2.0 - 2.0 * s)
    }
}

/// Smooth cutoff: 1 on r ≤ 1/2, 0 on r ≥ 1, strictly decreasing between.
pub fn zeta(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    let phi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = phi(1.0 - r);
    let b = phi(r - 0.5);
    a / (a + b)
}

/// Characteristic weight W^ε(|y|). `eps = 0` gives the Landau weight ⟨y⟩.
pub fn w_eps(eps: f64, s: f64, y: f64) -> f64 {
    let y = y.abs();
    if eps == 0.0 {
        return bracket(y);
    }
    let z = zeta(eps * y);
    if z == 1.0 {
        return bracket(y);
    }
    let big = bracket(1.0 / eps).powf(1.0 - s) * bracket(y).powf(s);
    z * bracket(y) + (1.0 - z) * big
}

/// Closed form of the angular symbol E^ε(ξ).
pub fn symbol_e_closed(eps: f64, s: f64, xi: f64) -> f64 {
    let xi = xi.abs();
    if xi <= 1.0 / eps {
        xi * xi
    } else {
        let e2s = eps.powf(-2.0 * s);
        eps.powf(2.0 * s - 2.0) * ((xi.powf(2.0 * s) - e2s) / s + e2s)
    }
}

/// ∫_0^{π/2} b^ε(cos θ) sin θ (1 − cos θ) dθ by adaptive quadrature.
pub fn lambda_e(eps: f64, s: f64) -> Result<f64> {
    lambda_e_scaled(eps, s, 1.0)
}

/// Same integral with the kernel multiplied by `scale`.
pub fn lambda_e_scaled(eps: f64, s: f64, scale: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Domain(format!("lambda_e needs 0 < eps <= sin(pi/4), got {eps}")));
    }
    let theta_max = 2.0 * eps.asin();
    // θ = θ_max t^p removes the θ^{1−2s} endpoint singularity.
    let p = 1.0 / (2.0 - 2.0 * s);
    let f = |t: f64| {
        let th = theta_max * t.powf(p);
        let dth = theta_max * p * t.powf(p - 1.0);
        let u = (0.5 * th).sin();
        let one_minus_cos = 2.0 * u * u;
        scale * b_eps_raw(s, eps, u.min(eps)) * th.sin() * one_minus_cos * dth
    };
    let opts = AdaptiveOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 };
    Ok(integrate(f, 0.0, 1.0, opts)?.value)
}

/// Normalized Maxwellian μ(v).
pub fn maxwellian(v: [f64; 3]) -> f64 {
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    (2.0 * PI).powf(-1.5) * (-0.5 * r2).exp()
}

pub fn sqrt_maxwellian(v: [f64; 3]) -> f64 {
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    (2.0 * PI).powf(-0.75) * (-0.25 * r2).exp()
}

pub fn grad_sqrt_maxwellian(v: [f64; 3]) -> [f64; 3] {
    let m = sqrt_maxwellian(v);
    [-0.5 * v[0] * m, -0.5 * v[1] * m, -0.5 * v[2] * m]
}

/// Decay schedule A_ε(t) and its constants.
#[derive(Debug, Clone, Copy)]
pub struct DecaySchedule {
    pub gamma: f64,
    pub s: f64,
    pub eps: f64,
    pub lambda: f64,
}

impl DecaySchedule {
    pub fn new(p: &ModelParams, lambda: f64) -> Self {
        DecaySchedule { gamma: p.gamma, s: p.s, eps: p.eps, lambda }
    }

    fn gap(&self) -> f64 {
        (self.gamma + 2.0 * self.s).abs()
    }

    pub fn kappa(&self) -> f64 {
        1.0 / (1.0 + self.gap())
    }

    pub fn t_eps(&self) -> f64 {
        (1.0 / self.eps).powf(2.0 * (1.0 - self.s) / self.gap())
    }

    /// Late-time branch (t/ε^{2(1−s)})^κ.
    pub fn late_branch(&self, t: f64) -> f64 {
        (t / self.eps.powf(2.0 * (1.0 - self.s))).powf(self.kappa())
    }

    pub fn a_eps(&self, t: f64) -> f64 {
        let z = zeta(t / self.t_eps());
        if z == 1.0 {
            return t;
        }
        z * t + (1.0 - z) * self.late_branch(t)
    }
}

/// W_{l,q}(v) = ⟨v⟩^l e^{q⟨v⟩}.
#[derive(Debug, Clone, Copy)]
pub struct WeightLQ {
    pub l: f64,
    pub q: f64,
}

impl WeightLQ {
    pub fn eval(&self, v: f64) -> f64 {
        let b = bracket(v);
        b.powf(self.l) * (self.q * b).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation_examples() {
        assert!(ModelParams::validate(-1.0, 0.75, 0.1).is_ok());
        assert!(matches!(
            ModelParams::validate(-3.0, 0.75, 0.1),
            Err(Error::ConstraintViolation(Constraint::Gamma))
        ));
        assert!(matches!(
            ModelParams::validate(-2.0, 0.4, 0.1),
            Err(Error::ConstraintViolation(Constraint::S))
        ));
        assert!(matches!(
            ModelParams::validate(-2.5, 0.6, 0.1),
            Err(Error::ConstraintViolation(Constraint::GammaPlusTwoS))
        ));
        assert!(matches!(
            ModelParams::validate(-1.0, 0.75, 0.6),
            Err(Error::ConstraintViolation(Constraint::Eps))
        ));
        let p = ModelParams::validate(-2.5, 0.9, 0.1).unwrap();
        assert!(p.check_landau().is_err());
    }

    #[test]
    fn b_eps_values() {
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap();
        assert_eq!(p.b_eps(0.2).unwrap(), 0.0);
        assert!((p.b_eps(0.1).unwrap() - 0.25 * 1e4).abs() < 1e-9);
        // 0.25 · 0.1^{-1/2} · 0.05^{-7/2}
        let expect = 0.25 / 0.1f64.sqrt() * 0.05f64.powf(-3.5);
        assert!((p.b_eps(0.05).unwrap() / expect - 1.0).abs() < 1e-14);
        assert!((expect - 2.8284e4).abs() < 1.0);
        assert!(p.b_eps(0.0).is_err());
    }

    #[test]
    fn kernel_values() {
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap();
        // |z| = 2, sin(θ/2) = ε
        let th = 2.0 * 0.1f64.asin();
        let sigma = [th.sin(), 0.0, th.cos()];
        let k = p.kernel_b_eps([0.0, 0.0, 2.0], sigma).unwrap();
        assert!((k / (0.5 * 0.25 * 1e4) - 1.0).abs() < 1e-9);
        assert_eq!(p.kernel_b_eps([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]).unwrap(), 0.0);
        assert!(p.kernel_b_eps([0.0; 3], sigma).is_err());
    }

    #[test]
    fn landau_matrix_structure() {
        let p = ModelParams::validate(-1.5, 0.75, 0.1).unwrap().with_lambda_landau(1.7);
        let z = [0.3, -1.1, 0.8];
        let a = p.landau_a(z).unwrap();
        for i in 0..3 {
            let az: f64 = (0..3).map(|j| a[i][j] * z[j]).sum();
            assert!(az.abs() < 1e-14);
            for j in 0..3 {
                assert_eq!(a[i][j], a[j][i]);
            }
        }
        let m = nalgebra::Matrix3::from_fn(|i, j| a[i][j]);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let r = norm3(z);
        let top = 1.7 * r.powf(-1.5 + 2.0);
        assert!(ev[0].abs() < 1e-13);
        assert!((ev[1] / top - 1.0).abs() < 1e-13 && (ev[2] / top - 1.0).abs() < 1e-13);
    }

    #[test]
    fn landau_divergence_matches_finite_differences() {
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap().with_lambda_landau(1.3);
        let z = [1.0, 2.0, -0.5];
        let h = 1e-5;
        let div = p.landau_div_a(z).unwrap();
        for j in 0..3 {
            let mut fd = 0.0;
            for i in 0..3 {
                let mut zp = z;
                let mut zm = z;
                zp[i] += h;
                zm[i] -= h;
                fd += (p.landau_a(zp).unwrap()[i][j] - p.landau_a(zm).unwrap()[i][j]) / (2.0 * h);
            }
            assert!((fd - div[j]).abs() <= 1e-6 * div[j].abs().max(1e-3), "j={j} fd={fd} an={}", div[j]);
        }
    }

    #[test]
    fn zeta_pieces() {
        assert_eq!(zeta(0.2), 1.0);
        assert_eq!(zeta(0.5), 1.0);
        assert_eq!(zeta(1.0), 0.0);
        assert_eq!(zeta(3.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let z = zeta(i as f64 * 1.5e-3);
            assert!(z <= prev && (0.0..=1.0).contains(&z));
            prev = z;
        }
        assert!(zeta(0.6) > zeta(0.7) && zeta(0.7) > zeta(0.9));
    }

    #[test]
    fn characteristic_weight_branches() {
        assert!((w_eps(0.1, 0.75, 3.0) - 10f64.sqrt()).abs() < 1e-15);
        let v = w_eps(0.1, 0.75, 20.0);
        assert!((v - 101f64.powf(0.125) * 401f64.powf(0.375)).abs() < 1e-12);
        assert!((v - 16.86).abs() < 0.01);
        for i in 0..=50 {
            let y = 5.0 + 0.1 * i as f64;
            let w = w_eps(0.1, 0.75, y);
            assert!(w >= bracket(y) - 1e-14);
            assert!(w <= bracket(10.0).powf(0.25) * bracket(y).powf(0.75) + 1e-12);
        }
        assert_eq!(w_eps(0.0, 0.75, 3.0), 10f64.sqrt());
    }

    #[test]
    fn symbol_branches() {
        assert_eq!(symbol_e_closed(0.1, 0.75, 5.0), 25.0);
        let at = symbol_e_closed(0.1, 0.75, 10.0);
        let above = symbol_e_closed(0.1, 0.75, 10.0 + 1e-9);
        assert!((at - 100.0).abs() < 1e-12 && (above - 100.0).abs() < 1e-6);
        assert!((symbol_e_closed(0.1, 0.75, 20.0) - 343.79).abs() < 0.01);
    }

    #[test]
    fn lambda_e_is_four() {
        for &eps in &[0.3, 0.1, 0.03, 0.01] {
            for &s in &[0.6, 0.75, 0.9] {
                let v = lambda_e(eps, s).unwrap();
                assert!((v / 4.0 - 1.0).abs() < 1e-8, "eps={eps} s={s} v={v}");
            }
        }
        let d = lambda_e_scaled(0.1, 0.75, 2.0).unwrap();
        assert!((d - 8.0).abs() < 1e-7);
    }

    #[test]
    fn schedule_constants() {
        let p = ModelParams::validate(-2.0, 0.75, 0.1).unwrap();
        let d = DecaySchedule::new(&p, 0.05);
        assert!((d.kappa() - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.t_eps() - 10.0).abs() < 1e-12);
        let t = d.t_eps();
        assert_eq!(d.a_eps(t / 4.0), t / 4.0);
        assert!((d.a_eps(2.0 * t) - d.late_branch(2.0 * t)).abs() < 1e-15);
        assert!((d.late_branch(t) - t).abs() < 1e-12);
    }

    #[test]
    fn schedule_continuity() {
        let p = ModelParams::validate(-2.0, 0.75, 0.1).unwrap();
        let d = DecaySchedule::new(&p, 0.05);
        let t_eps = d.t_eps();
        let step = 1e-4 * t_eps;
        let mut prev = d.a_eps(0.0);
        let n = (4.0 / 1e-4) as usize;
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            let a = d.a_eps(i as f64 * step);
            // A_ε is Lipschitz with constant below 2; anything more is a jump.
            worst = worst.max((a - prev).abs() - 2.0 * step);
            prev = a;
        }
        assert!(worst < 1e-12, "worst = {worst}");
    }

    proptest! {
        #[test]
        fn weight_radially_monotone(a in 0.0f64..200.0, b in 0.0f64..200.0, eps in 0.01f64..0.5, s in 0.51f64..0.99) {
            let (x, y) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(w_eps(eps, s, x) <= w_eps(eps, s, y) * (1.0 + 1e-14));
        }

        #[test]
        fn weight_lq_submultiplicative(
            v in prop::array::uniform3(-20.0f64..20.0),
            u in prop::array::uniform3(-20.0f64..20.0),
            l in 0.0f64..4.0, q in 0.0f64..2.0,
        ) {
            let w = WeightLQ { l, q };
            let s = [v[0] + u[0], v[1] + u[1], v[2] + u[2]];
            prop_assert!(w.eval(norm3(s)) <= w.eval(norm3(v)) * w.eval(norm3(u)) * (1.0 + 1e-12));
        }
    }
}
