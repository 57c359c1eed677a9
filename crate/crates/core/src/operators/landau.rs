//! Linearized Landau operator: Dirichlet-form assembly, trilinear form and
//! the pointwise divergence-form operator.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;

use super::boltzmann::{accumulate_product, gaussian_prefactor, pair_table, triple_table};
use super::{asymmetry, symmetrize, AssemblyMeta, OperatorLabel, OperatorMatrix};
use crate::basis::hermite1d::{derivs, half_variance_rule, values};
use crate::basis::rotation::{RotationAverager, Tensor3};
use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::params::{maxwellian, ModelParams};
use crate::quadrature::gauss::{gauss_laguerre, radial_power_rule};
use crate::quadrature::shell::sphere_product_rule;

/// ⟨𝓛^L ψ_β, ψ_α⟩ from (Λ/2)∬ μμ_* |z|^{γ+2} Π(z)(∇p_β − ∇p_β*)·(∇p_α − ∇p_α*).
pub fn assemble_l_landau(spec: &BasisSpec, params: &ModelParams) -> Result<OperatorMatrix> {
    params.check_landau()?;
    if spec.k < 2 {
        return Err(Error::DegreeTooLow { k: spec.k, need: 2 });
    }
    let start = Instant::now();
    let k = spec.k;
    let n = spec.dim();
    let rule = half_variance_rule(k + 1);
    let c0 = pair_table(&rule, k, 0.0, 0.0);
    let mut c1 = DMatrix::<f64>::zeros(k + 1, k + 1);
    {
        let mut h = vec![0.0; k + 1];
        let mut d = vec![0.0; k + 1];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            values(k, *x, &mut h);
            derivs(&h, &mut d);
            for m in 0..=k {
                for j in 0..=k {
                    c1[(m, j)] += w * d[m] * d[j];
                }
            }
        }
    }
    // Cz = E[(h(X + r/2) − h(X − r/2)) ⊗ (·)], integrated radially.
    let lag = gauss_laguerre(k / 2 + 2, 0.5 * (3.0 + params.gamma));
    let radial_scale = 2f64.powf(4.0 + params.gamma);
    let mut cz = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (t, w) in lag.nodes.iter().zip(&lag.weights) {
        let h = t.sqrt(); // r/2
        let tab = pair_table(&rule, k, h, h) - pair_table(&rule, k, h, -h) - pair_table(&rule, k, -h, h)
            + pair_table(&rule, k, -h, -h);
        cz += tab * (w * radial_scale);
    }
    let al = spec.alphas();
    let g = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (al[i], al[j]);
        (c1[(a[0], b[0])] * c0[(a[1], b[1])] + c0[(a[0], b[0])] * c1[(a[1], b[1])]) * cz[(a[2], b[2])]
    });
    let avg = RotationAverager::new(k, 2 * k).average_matrix(&g, spec);
    let mut entries = avg * (0.5 * params.lambda_landau * gaussian_prefactor() * 4.0 * PI);
    let asym = asymmetry(&entries);
    symmetrize(&mut entries);
    Ok(OperatorMatrix {
        spec: spec.clone(),
        entries,
        label: OperatorLabel::LandauLinear,
        meta: AssemblyMeta {
            rules: format!(
                "radial: Gauss-Laguerre({}, a={:.3}); V: Gauss-Hermite({}); SO(3): Euler degree {}",
                lag.len(),
                0.5 * (3.0 + params.gamma),
                rule.len(),
                2 * k
            ),
            asymmetry: asym,
            runtime_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// T[a, b, c] = ⟨Γ^L(ψ_a, ψ_b), ψ_c⟩ in weak form
/// −∫∫ μμ_* ∇p_c · a(z)[p_a* ∇p_b − (∇p_a)_* p_b].
pub fn trilinear_landau(params: &ModelParams, degs: [usize; 3]) -> Result<Tensor3> {
    params.check_landau()?;
    let specs = [BasisSpec::new(degs[0]), BasisSpec::new(degs[1]), BasisSpec::new(degs[2])];
    let dims = [specs[0].dim(), specs[1].dim(), specs[2].dim()];
    let total_deg = degs[0] + degs[1] + degs[2];
    let rule = half_variance_rule(total_deg / 2 + 1);
    let y = triple_table(&rule, degs, [0.0; 3], [false; 3]);
    let x011 = triple_table(&rule, degs, [0.0; 3], [false, true, true]);
    let x101 = triple_table(&rule, degs, [0.0; 3], [true, false, true]);
    let dx: Vec<f64> = x011.iter().zip(&x101).map(|(a, b)| a - b).collect();
    let lag = gauss_laguerre(total_deg / 4 + 2, 0.5 * (3.0 + params.gamma));
    let radial_scale = 2f64.powf(4.0 + params.gamma);
    let mut zr = vec![0.0; y.len()];
    for (t, w) in lag.nodes.iter().zip(&lag.weights) {
        let h = t.sqrt();
        let tab = triple_table(&rule, degs, [-h, h, h], [false; 3]);
        for (z, v) in zr.iter_mut().zip(&tab) {
            *z += w * radial_scale * v;
        }
    }
    let mut total = Tensor3::zeros(dims);
    accumulate_product(&mut total, 1.0, &specs, [&dx, &y, &zr]);
    accumulate_product(&mut total, 1.0, &specs, [&y, &dx, &zr]);
    let kmax = *degs.iter().max().unwrap();
    let mut avg = RotationAverager::new(kmax, total_deg).average_tensor(&total, degs);
    avg.scale(-params.lambda_landau * gaussian_prefactor() * 4.0 * PI);
    Ok(avg)
}

/// Radial and angular rules for v_*-integrals centered at the evaluation point.
#[derive(Debug, Clone)]
pub struct CenteredRule {
    pub radial_nodes: usize,
    pub angular_degree: usize,
    /// Radius beyond |v| covered by the radial rule.
    pub reach: f64,
}

impl Default for CenteredRule {
    fn default() -> Self {
        CenteredRule { radial_nodes: 48, angular_degree: 21, reach: 11.0 }
    }
}

impl CenteredRule {
    /// Nodes z (v_* = v − z) and weights for ∫ |z|^p f(z) dz, with the power
    /// carried by the radial rule.
    pub fn nodes(&self, v: [f64; 3], p: f64) -> Vec<([f64; 3], f64)> {
        let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let radial = radial_power_rule(self.radial_nodes, 2.0 + p, vn + self.reach);
        let (dirs, dw) = sphere_product_rule(self.angular_degree);
        let mut out = Vec::with_capacity(radial.len() * dirs.len());
        for (r, wr) in radial.nodes.iter().zip(&radial.weights) {
            for (d, wd) in dirs.iter().zip(&dw) {
                out.push(([r * d[0], r * d[1], r * d[2]], wr * wd));
            }
        }
        out
    }
}

struct PolyJet {
    p: f64,
    g: [f64; 3],
    h: [[f64; 3]; 3],
}

/// Value, gradient and Hessian of F = μ p at v, divided by μ(v).
fn gaussian_jet(f: &HermiteCoeffs, v: [f64; 3]) -> PolyJet {
    let (p, gp, hp) = f.poly_derivs(v);
    let g = [gp[0] - v[0] * p, gp[1] - v[1] * p, gp[2] - v[2] * p];
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            h[i][j] = hp[i][j] - v[i] * gp[j] - gp[i] * v[j] - delta * p + v[i] * v[j] * p;
        }
    }
    PolyJet { p, g, h }
}

/// Q^L(μ p_g, μ p_h)(v) in divergence form expanded under the integral.
///
/// The v_*-integral is centered at v, so no quadrature node can coincide
/// with the evaluation point.
pub fn q_landau_pointwise(g: &HermiteCoeffs, h: &HermiteCoeffs, v: [f64; 3], params: &ModelParams, rule: &CenteredRule) -> Result<f64> {
    params.check_landau()?;
    let hj = gaussian_jet(h, v);
    let lam = params.lambda_landau;
    let mut total = 0.0;
    // Weight |z|^{γ+1}: a carries |z|^{γ+2}, div a carries |z|^{γ+1}.
    for (z, w) in rule.nodes(v, params.gamma + 1.0) {
        let r = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
        if r < 1e-12 {
            return Err(Error::SingularNode);
        }
        let zh = [z[0] / r, z[1] / r, z[2] / r];
        let vs = [v[0] - z[0], v[1] - z[1], v[2] - z[2]];
        let ms = maxwellian(vs);
        let gj = gaussian_jet(g, vs);
        // a(z)/|z|^{γ+1} = Λ r (I − ẑẑᵀ); div a / |z|^{γ+1} = −2Λ ẑ.
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let a = lam * r * (delta - zh[i] * zh[j]);
                acc += a * (gj.p * hj.h[i][j] - gj.g[j] * hj.g[i]);
            }
            let da = -2.0 * lam * zh[i];
            acc += da * (gj.p * hj.g[i] - gj.g[i] * hj.p);
        }
        total += w * ms * acc;
    }
    Ok(maxwellian(v) * total)
}

/// The flux J(v) = ∫ a(v − v_*)[G_* ∇H − (∇G)_* H] dv_* with G = μ p_g, H = μ p_h.
pub fn landau_flux(g: &HermiteCoeffs, h: &HermiteCoeffs, v: [f64; 3], params: &ModelParams, rule: &CenteredRule) -> Result<[f64; 3]> {
    params.check_landau()?;
    let hj = gaussian_jet(h, v);
    let lam = params.lambda_landau;
    let mut out = [0.0; 3];
    for (z, w) in rule.nodes(v, params.gamma + 2.0) {
        let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
        let vs = [v[0] - z[0], v[1] - z[1], v[2] - z[2]];
        let ms = maxwellian(vs);
        let gj = gaussian_jet(g, vs);
        let b = [gj.p * hj.g[0] - gj.g[0] * hj.p, gj.p * hj.g[1] - gj.g[1] * hj.p, gj.p * hj.g[2] - gj.g[2] * hj.p];
        let zb = (z[0] * b[0] + z[1] * b[1] + z[2] * b[2]) / r2;
        for i in 0..3 {
            out[i] += w * ms * lam * (b[i] - z[i] * zb);
        }
    }
    let m = maxwellian(v);
    Ok([m * out[0], m * out[1], m * out[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::collision_invariant_coeffs;
    use crate::operators::angular::{expand_sorted, landau_maxwell_eigenvalues};
    use crate::quadrature::GaussHermiteRule;
    use nalgebra::{DVector, SymmetricEigen};

    #[test]
    fn maxwell_landau_spectrum() {
        let k = 6;
        let spec = BasisSpec::new(k);
        let p = ModelParams::validate(0.0, 0.75, 0.1).unwrap();
        let a = assemble_l_landau(&spec, &p).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(a.entries.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let oracle = expand_sorted(&landau_maxwell_eigenvalues(&p, k));
        for (x, y) in ev.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn null_space_and_psd() {
        let spec = BasisSpec::new(4);
        let p = ModelParams::validate(-2.0, 0.75, 0.1).unwrap();
        let a = assemble_l_landau(&spec, &p).unwrap();
        let scale = a.frobenius();
        for e in collision_invariant_coeffs(&spec).unwrap() {
            assert!((&a.entries * DVector::from_vec(e.coeffs.clone())).norm() < 1e-12 * scale);
        }
        assert!(SymmetricEigen::new(a.entries.clone()).eigenvalues.iter().all(|&l| l > -1e-10 * scale));
    }

    #[test]
    fn trilinear_reproduces_dirichlet_form() {
        let k = 3;
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap().with_lambda_landau(1.3);
        let a = assemble_l_landau(&BasisSpec::new(k), &p).unwrap();
        let t1 = trilinear_landau(&p, [0, k, k]).unwrap();
        let t2 = trilinear_landau(&p, [k, 0, k]).unwrap();
        let n = BasisSpec::dim_for(k);
        let b = DMatrix::from_fn(n, n, |i, j| -t1.get(0, j, i) - t2.get(j, 0, i));
        assert!((&a.entries - &b).norm() < 1e-10 * a.frobenius());
    }

    #[test]
    fn equilibrium_is_stationary() {
        let spec = BasisSpec::new(2);
        let one = HermiteCoeffs::unit(&spec, [0, 0, 0]);
        let p = ModelParams::validate(-1.5, 0.75, 0.1).unwrap();
        let rule = CenteredRule { radial_nodes: 16, angular_degree: 9, reach: 10.0 };
        for v in [[0.3, -0.2, 0.5], [1.5, 0.1, -0.7]] {
            let q = q_landau_pointwise(&one, &one, v, &p, &rule).unwrap();
            assert!(q.abs() < 1e-14, "{q}");
        }
    }

    #[test]
    fn divergence_matches_finite_differences_of_flux() {
        let spec = BasisSpec::new(2);
        let mut g = HermiteCoeffs::unit(&spec, [0, 0, 0]);
        g.coeffs[spec.index([1, 0, 0]).unwrap()] = 0.3;
        let mut h = HermiteCoeffs::unit(&spec, [0, 0, 0]);
        h.coeffs[spec.index([0, 1, 1]).unwrap()] = 0.5;
        h.coeffs[spec.index([2, 0, 0]).unwrap()] = -0.4;
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap();
        let rule = CenteredRule { radial_nodes: 40, angular_degree: 25, reach: 11.0 };
        let v = [0.4, -0.3, 0.6];
        let q = q_landau_pointwise(&g, &h, v, &p, &rule).unwrap();
        let step = 1e-4;
        let mut div = 0.0;
        for i in 0..3 {
            let mut vp = v;
            let mut vm = v;
            vp[i] += step;
            vm[i] -= step;
            // The centered rule moves with v, so flux differences are smooth in v.
            div += (landau_flux(&g, &h, vp, &p, &rule).unwrap()[i] - landau_flux(&g, &h, vm, &p, &rule).unwrap()[i]) / (2.0 * step);
        }
        assert!((q - div).abs() < 1e-4 * q.abs(), "{q} {div}");
    }

    #[test]
    fn weak_pairing_matches_assembly() {
        let k = 2;
        let spec = BasisSpec::new(k);
        let p = ModelParams::validate(-1.0, 0.75, 0.1).unwrap();
        let a = assemble_l_landau(&spec, &p).unwrap();
        let one = HermiteCoeffs::unit(&spec, [0, 0, 0]);
        let rule = CenteredRule { radial_nodes: 24, angular_degree: 17, reach: 11.0 };
        let gh = GaussHermiteRule::with_nodes(k + 4);
        for (ia, ib) in [(4, 4), (9, 9), (5, 8), (1, 1), (6, 9)] {
            let psi_b = HermiteCoeffs::unit(&spec, spec.alpha(ib));
            // ∫ −[Q(μ, μp_β) + Q(μp_β, μ)] p_α dv, with the Gaussian weight in the rule.
            let val = gh.integrate(|v| {
                let q = q_landau_pointwise(&one, &psi_b, v, &p, &rule).unwrap()
                    + q_landau_pointwise(&psi_b, &one, v, &p, &rule).unwrap();
                -q / maxwellian(v) * spec.poly_values(v)[ia]
            });
            let want = a.entries[(ia, ib)];
            assert!((val - want).abs() < 1e-3 * a.frobenius(), "{ia} {ib}: {val} {want}");
        }
    }
}
