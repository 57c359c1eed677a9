//! Per-function norm parts by direct quadrature.

use crate::basis::{derivative, BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::params::{bracket, norm3, ModelParams};
use crate::quadrature::{GaussHermiteRule, SphericalShellSampler};

/// Gauss–Hermite nodes per axis for non-polynomial weights.
pub const BOOSTED_NODES: usize = 28;
/// Discarded band mass allowed by `aniso_part`.
pub const BAND_TOLERANCE: f64 = 1e-8;

/// (∫ w(|v|)² f² dv)^{1/2} with boosted Gauss–Hermite.
pub fn radial_weighted_norm(f: &HermiteCoeffs, w: &dyn Fn(f64) -> f64) -> f64 {
    let n = BOOSTED_NODES.max(f.spec.k + 2);
    log::debug!("radial weighted norm with {n} Gauss-Hermite nodes per axis");
    let rule = GaussHermiteRule::with_nodes(n);
    rule.integrate(|v| (w(norm3(v)) * f.eval_poly(v)).powi(2)).sqrt()
}

/// |⟨v⟩^l f|_{L²}, by the shell rule (exact in angle, composite in r).
pub fn weighted_l2(f: &HermiteCoeffs, l: f64) -> f64 {
    if l == 0.0 {
        return f.norm();
    }
    let g = super::shells::weighted_l2_gram(&f.spec, l);
    let x = nalgebra::DVector::from_column_slice(&f.coeffs);
    x.dot(&(g * &x)).max(0.0).sqrt()
}

/// |W^ε ⟨v⟩^l f|_{L²}.
pub fn phase_part(f: &HermiteCoeffs, l: f64, params: &ModelParams) -> f64 {
    radial_weighted_norm(f, &|r| params.w_eps(r) * bracket(r).powf(l))
}

/// Default sampler: shells on [0, 8] with 48 radii, band ℓ ≤ 24.
pub fn default_shell_sampler() -> SphericalShellSampler {
    SphericalShellSampler::new(8.0, 48, 24)
}

/// |W^ε((−Δ_{S²})^{1/2}) ⟨v⟩^l f|_{L²} from the shell transform.
pub fn aniso_part(f: &HermiteCoeffs, l: f64, params: &ModelParams, sampler: &SphericalShellSampler) -> Result<f64> {
    let g = |v: [f64; 3]| bracket(norm3(v)).powf(l) * f.eval(v);
    let lw: Vec<f64> = (0..=sampler.l_max).map(|ell| params.w_eps(((ell * (ell + 1)) as f64).sqrt()).powi(2)).collect();
    let mut total = 0.0;
    let mut kept = 0.0;
    let mut mass = 0.0;
    for (&r, &wr) in sampler.radii.iter().zip(&sampler.radial_weights) {
        let c = sampler.analyze_shell(r, &g);
        for ell in 0..=sampler.l_max {
            let band: f64 = c[ell * ell..(ell + 1) * (ell + 1)].iter().map(|x| x * x).sum();
            total += wr * lw[ell] * band;
            kept += wr * band;
        }
        mass += wr * sampler.shell_mass(r, &g);
    }
    if mass > 0.0 {
        let lost = ((mass - kept) / mass).max(0.0);
        if lost > BAND_TOLERANCE {
            return Err(Error::BandTruncation(lost));
        }
    }
    Ok(total.sqrt())
}

/// |f|_{H^N_l} = Σ_{|β| ≤ N} |⟨v⟩^l ∂_β f|_{L²}.
pub fn sobolev_norm(f: &HermiteCoeffs, n: usize, l: f64) -> f64 {
    // Each multi-index β is reached once by differentiating in axis order.
    let mut total = 0.0;
    let mut layer: Vec<(HermiteCoeffs, usize)> = vec![(f.clone(), 0)];
    for order in 0..=n {
        let mut next = Vec::new();
        for (g, first_axis) in &layer {
            total += weighted_l2(g, l);
            if order < n {
                for ax in *first_axis..3 {
                    next.push((derivative(g, ax), ax));
                }
            }
        }
        layer = next;
    }
    total
}

/// v_j f in the basis of degree K + 1.
pub fn multiply_coordinate(f: &HermiteCoeffs, axis: usize) -> HermiteCoeffs {
    let out_spec = BasisSpec::new(f.spec.k + 1);
    let mut out = HermiteCoeffs::zeros(&out_spec);
    for (a, &c) in f.spec.alphas().iter().zip(&f.coeffs) {
        let m = a[axis];
        let mut hi = *a;
        hi[axis] += 1;
        out.coeffs[out_spec.index(hi).unwrap()] += ((m + 1) as f64).sqrt() * c;
        if m >= 1 {
            let mut lo = *a;
            lo[axis] -= 1;
            out.coeffs[out_spec.index(lo).unwrap()] += (m as f64).sqrt() * c;
        }
    }
    out
}

/// (v × ∇) f, componentwise, in the basis of degree K + 2 (trailing terms zero).
pub fn angular_momentum(f: &HermiteCoeffs) -> [HermiteCoeffs; 3] {
    let grads = [derivative(f, 0), derivative(f, 1), derivative(f, 2)];
    let comp = |i: usize, j: usize, k: usize| {
        // v_j ∂_k f − v_k ∂_j f
        let a = multiply_coordinate(&grads[k], j);
        let b = multiply_coordinate(&grads[j], k);
        let c = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        let _ = i;
        HermiteCoeffs::from_vec(&a.spec, c)
    };
    [comp(0, 1, 2), comp(1, 2, 0), comp(2, 0, 1)]
}
