//! Exact Galerkin assembly of the linearized grazing Boltzmann operator and
//! its trilinear form.
//!
//! With V = (v + v_*)/2, z = v − v_* = r R e3 and σ = R σ_0(θ), the Gaussian
//! factor μμ_* separates, the V-expectation factorizes over axes, the θ-integral
//! against b^ε reduces to cosine moments, the radial integral is Gauss–Laguerre
//! in r²/4, and the orientation R is averaged exactly over SO(3).

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::angular::angle_weights;
use super::{asymmetry, symmetrize, AssemblyMeta, OperatorLabel, OperatorMatrix};
use crate::basis::hermite1d::{half_variance_rule, values};
use crate::basis::rotation::{RotationAverager, Tensor3};
use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::gauss::{gauss_laguerre, Rule1D};

/// E[h_m(X + d1) h_n(X + d2)], X ~ N(0, 1/2).
pub(crate) fn pair_table(rule: &Rule1D, k: usize, d1: f64, d2: f64) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(k + 1, k + 1);
    let mut a = vec![0.0; k + 1];
    let mut b = vec![0.0; k + 1];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        values(k, x + d1, &mut a);
        values(k, x + d2, &mut b);
        for m in 0..=k {
            let wm = w * a[m];
            for n in 0..=k {
                t[(m, n)] += wm * b[n];
            }
        }
    }
    t
}

/// Flattened E[f_a(X + d0) f_b(X + d1) f_c(X + d2)] where f is h or h'
/// according to `deriv`.
pub(crate) fn triple_table(rule: &Rule1D, degs: [usize; 3], shifts: [f64; 3], deriv: [bool; 3]) -> Vec<f64> {
    let n = [degs[0] + 1, degs[1] + 1, degs[2] + 1];
    let mut out = vec![0.0; n[0] * n[1] * n[2]];
    let kmax = degs.iter().copied().max().unwrap();
    let mut tabs = [vec![0.0; kmax + 1], vec![0.0; kmax + 1], vec![0.0; kmax + 1]];
    let mut tmp = vec![0.0; kmax + 1];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        for i in 0..3 {
            values(kmax, x + shifts[i], &mut tmp);
            if deriv[i] {
                crate::basis::hermite1d::derivs(&tmp, &mut tabs[i]);
            } else {
                tabs[i].copy_from_slice(&tmp);
            }
        }
        for a in 0..n[0] {
            let wa = w * tabs[0][a];
            for b in 0..n[1] {
                let wab = wa * tabs[1][b];
                let row = &mut out[(a * n[1] + b) * n[2]..(a * n[1] + b + 1) * n[2]];
                for (c, o) in row.iter_mut().enumerate() {
                    *o += wab * tabs[2][c];
                }
            }
        }
    }
    out
}

/// out[α, β, γ] += w · Π_axis tab_axis[α_i, β_i, γ_i].
pub(crate) fn accumulate_product(out: &mut Tensor3, w: f64, specs: &[BasisSpec; 3], tabs: [&[f64]; 3]) {
    let n = [specs[0].k + 1, specs[1].k + 1, specs[2].k + 1];
    let at = |a: usize, b: usize, c: usize| (a * n[1] + b) * n[2] + c;
    let gam = specs[2].alphas();
    let d2 = out.dims[2];
    for (ia, a) in specs[0].alphas().iter().enumerate() {
        for (ib, b) in specs[1].alphas().iter().enumerate() {
            let base = (ia * out.dims[1] + ib) * d2;
            let row = &mut out.data[base..base + d2];
            for (o, g) in row.iter_mut().zip(gam) {
                *o += w
                    * tabs[0][at(a[0], b[0], g[0])]
                    * tabs[1][at(a[1], b[1], g[1])]
                    * tabs[2][at(a[2], b[2], g[2])];
            }
        }
    }
}

/// (2π)^{-3} π^{3/2}: Gaussian factor μμ_* after integrating out e^{-|V|²}.
pub(crate) fn gaussian_prefactor() -> f64 {
    (2.0 * PI).powi(-3) * PI.powf(1.5)
}

/// ⟨𝓛^ε ψ_β, ψ_α⟩ for all basis pairs of degree ≤ K.
pub fn assemble_l_eps(spec: &BasisSpec, params: &ModelParams) -> Result<OperatorMatrix> {
    params.check()?;
    if spec.k < 2 {
        return Err(Error::DegreeTooLow { k: spec.k, need: 2 });
    }
    let start = Instant::now();
    let k = spec.k;
    let n = spec.dim();
    let n_theta = 4 * k + 2;
    let (theta, cw) = angle_weights(params.eps, params.s, 2 * k, n_theta)?;
    let lag = gauss_laguerre(k / 2 + 2, 0.5 * (1.0 + params.gamma));
    let rule = half_variance_rule(k + 1);
    let c0 = pair_table(&rule, k, 0.0, 0.0);
    let alphas = spec.alphas().to_vec();

    let parts: Vec<DMatrix<f64>> = lag
        .nodes
        .par_iter()
        .map(|&t| {
            let r = 2.0 * t.sqrt();
            let mut g = DMatrix::zeros(n, n);
            let signs = [1.0, 1.0, -1.0, -1.0];
            for (&th, &c) in theta.iter().zip(&cw) {
                let (sn, cs) = th.sin_cos();
                let dx = [0.5 * r * sn, -0.5 * r * sn, 0.0, 0.0];
                let dz = [0.5 * r * cs, -0.5 * r * cs, 0.5 * r, -0.5 * r];
                for a in 0..4 {
                    for b in 0..4 {
                        // Pairs of unrotated states do not depend on θ; the
                        // weights annihilate constants.
                        if a >= 2 && b >= 2 {
                            continue;
                        }
                        let w = c * signs[a] * signs[b];
                        let tx = pair_table(&rule, k, dx[a], dx[b]);
                        let tz = pair_table(&rule, k, dz[a], dz[b]);
                        for (i, al) in alphas.iter().enumerate() {
                            for (j, be) in alphas.iter().enumerate() {
                                g[(i, j)] += w * tx[(al[0], be[0])] * c0[(al[1], be[1])] * tz[(al[2], be[2])];
                            }
                        }
                    }
                }
            }
            g
        })
        .collect();

    let radial_scale = 2f64.powf(2.0 + params.gamma);
    let mut total = DMatrix::zeros(n, n);
    for (g, w) in parts.iter().zip(&lag.weights) {
        total += g * (w * radial_scale);
    }
    let avg = RotationAverager::new(k, 2 * k).average_matrix(&total, spec);
    let mut entries = avg * (0.25 * gaussian_prefactor() * params.c_b * 8.0 * PI * PI);
    let asym = asymmetry(&entries);
    symmetrize(&mut entries);
    let rules = format!(
        "theta: {n_theta} equispaced, cosine moments to {}; radial: Gauss-Laguerre({}, a={:.3}); V: Gauss-Hermite({}); SO(3): Euler degree {}",
        2 * k,
        lag.len(),
        0.5 * (1.0 + params.gamma),
        rule.len(),
        2 * k
    );
    log::debug!("assembled L_eps K={k} eps={} asym={asym:.2e}", params.eps);
    Ok(OperatorMatrix {
        spec: spec.clone(),
        entries,
        label: OperatorLabel::BoltzmannLinear,
        meta: AssemblyMeta { rules, asymmetry: asym, runtime_s: start.elapsed().as_secs_f64() },
    })
}

/// T[a, b, c] = ⟨Γ^ε(ψ_a, ψ_b), ψ_c⟩ with a, b, c ranging over bases of
/// degrees `degs`.
pub fn trilinear_eps(params: &ModelParams, degs: [usize; 3]) -> Result<Tensor3> {
    params.check()?;
    let specs = [BasisSpec::new(degs[0]), BasisSpec::new(degs[1]), BasisSpec::new(degs[2])];
    let dims = [specs[0].dim(), specs[1].dim(), specs[2].dim()];
    let total_deg = degs[0] + degs[1] + degs[2];
    let kc = degs[2].max(1);
    let n_theta = 2 * kc + 2;
    let (theta, cw) = angle_weights(params.eps, params.s, kc, n_theta)?;
    let lag = gauss_laguerre(total_deg / 4 + 2, 0.5 * (1.0 + params.gamma));
    let rule = half_variance_rule(total_deg / 2 + 1);
    let y = triple_table(&rule, degs, [0.0; 3], [false; 3]);

    let parts: Vec<Tensor3> = lag
        .nodes
        .par_iter()
        .map(|&t| {
            let r = 2.0 * t.sqrt();
            let mut acc = Tensor3::zeros(dims);
            // Loss term is θ-independent and annihilated by the weights.
            for (&th, &c) in theta.iter().zip(&cw) {
                let (sn, cs) = th.sin_cos();
                let x1 = triple_table(&rule, degs, [0.0, 0.0, 0.5 * r * sn], [false; 3]);
                let z1 = triple_table(&rule, degs, [-0.5 * r, 0.5 * r, 0.5 * r * cs], [false; 3]);
                accumulate_product(&mut acc, c, &specs, [&x1, &y, &z1]);
            }
            acc
        })
        .collect();

    let radial_scale = 2f64.powf(2.0 + params.gamma);
    let mut total = Tensor3::zeros(dims);
    for (p, w) in parts.iter().zip(&lag.weights) {
        total.axpy(w * radial_scale, p);
    }
    let kmax = *degs.iter().max().unwrap();
    let mut avg = RotationAverager::new(kmax, total_deg).average_tensor(&total, degs);
    avg.scale(gaussian_prefactor() * params.c_b * 8.0 * PI * PI);
    Ok(avg)
}

/// Matrix of g ↦ −Γ(ψ_0, g) − Γ(g, ψ_0) derived from the trilinear tensor.
pub fn linear_from_trilinear(params: &ModelParams, k: usize) -> Result<DMatrix<f64>> {
    let t1 = trilinear_eps(params, [0, k, k])?;
    let t2 = trilinear_eps(params, [k, 0, k])?;
    let n = BasisSpec::dim_for(k);
    Ok(DMatrix::from_fn(n, n, |a, b| -t1.get(0, b, a) - t2.get(b, 0, a)))
}
