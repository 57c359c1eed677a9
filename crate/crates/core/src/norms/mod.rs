//! Weighted L², Sobolev and triple norms, and the functional 𝓝.
//!
//! Every norm has a per-function evaluation and a Gram-matrix form over the
//! Hermite basis; the tests tie the two together.

pub mod fourier;
pub mod functional;
pub mod parts;
pub mod shells;

use nalgebra::{DMatrix, DVector};

use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::Result;
use crate::params::{bracket, ModelParams};
use crate::quadrature::{SphericalShellSampler, UniformCubeGrid};

pub use fourier::{fourier_grams, fourier_multiplier_norm};
pub use functional::{n_functional, n_inner, NKernel, NRules};
pub use parts::{aniso_part, angular_momentum, default_shell_sampler, multiply_coordinate, phase_part, sobolev_norm, weighted_l2};
pub use shells::{shell_grams, weighted_l2_gram};

/// The three parts of |f|_{ε,l}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleNormBreakdown {
    pub aniso_part: f64,
    pub fourier_part: f64,
    pub phase_part: f64,
    pub total: f64,
    pub l: f64,
    pub eps: f64,
}

impl TripleNormBreakdown {
    pub fn new(aniso_part: f64, fourier_part: f64, phase_part: f64, l: f64, eps: f64) -> Self {
        let total = (aniso_part * aniso_part + fourier_part * fourier_part + phase_part * phase_part).sqrt();
        TripleNormBreakdown { aniso_part, fourier_part, phase_part, total, l, eps }
    }
}

/// |W^ε(D) ⟨v⟩^l f|_{L²} on the cube lattice.
pub fn fourier_part(f: &HermiteCoeffs, l: f64, params: &ModelParams, grid: &UniformCubeGrid) -> Result<f64> {
    fourier_multiplier_norm(f, l, grid, &|r| params.w_eps(r))
}

/// Per-function triple norm with the default grids.
pub fn triple_norm(f: &HermiteCoeffs, l: f64, params: &ModelParams) -> Result<TripleNormBreakdown> {
    triple_norm_with(f, l, params, &UniformCubeGrid::for_degree(f.spec.k), &default_shell_sampler())
}

pub fn triple_norm_with(f: &HermiteCoeffs, l: f64, params: &ModelParams, grid: &UniformCubeGrid, sampler: &SphericalShellSampler) -> Result<TripleNormBreakdown> {
    let a = aniso_part(f, l, params, sampler)?;
    let fo = fourier_part(f, l, params, grid)?;
    let ph = phase_part(f, l, params);
    Ok(TripleNormBreakdown::new(a, fo, ph, l, params.eps))
}

/// Gram matrices of every quadratic form the spectral code needs, for one
/// basis, one weight order l, and a list of ε values (shared s).
#[derive(Debug, Clone)]
pub struct NormGrams {
    pub spec: BasisSpec,
    pub l: f64,
    pub eps: Vec<f64>,
    /// |⟨v⟩^l f|².
    pub weighted: DMatrix<f64>,
    pub phase: Vec<DMatrix<f64>>,
    pub fourier: Vec<DMatrix<f64>>,
    pub aniso: Vec<DMatrix<f64>>,
}

impl NormGrams {
    pub fn build(spec: &BasisSpec, l: f64, s: f64, eps: &[f64]) -> Result<NormGrams> {
        Self::build_on(spec, l, s, eps, &UniformCubeGrid::for_degree(spec.k))
    }

    pub fn build_on(spec: &BasisSpec, l: f64, s: f64, eps: &[f64], grid: &UniformCubeGrid) -> Result<NormGrams> {
        let w = |r: f64| bracket(r).powf(2.0 * l);
        let phase_w: Vec<Box<dyn Fn(f64) -> f64 + Sync>> =
            eps.iter().map(|&e| Box::new(move |r: f64| crate::params::w_eps(e, s, r).powi(2) * bracket(r).powf(2.0 * l)) as Box<dyn Fn(f64) -> f64 + Sync>).collect();
        let mut weights: Vec<&(dyn Fn(f64) -> f64 + Sync)> = vec![&w];
        weights.extend(phase_w.iter().map(|b| b.as_ref()));
        let sg = shell_grams(spec, &weights, Some(&w));
        let mut radial = sg.radial.into_iter();
        let weighted = radial.next().unwrap();
        let phase: Vec<_> = radial.collect();
        let aniso = eps
            .iter()
            .map(|&e| {
                let mut m = DMatrix::<f64>::zeros(spec.dim(), spec.dim());
                for (ell, band) in sg.bands.iter().enumerate() {
                    let y = ((ell * (ell + 1)) as f64).sqrt();
                    let c = crate::params::w_eps(e, s, y).powi(2);
                    m.zip_apply(band, |a, b| *a += c * b);
                }
                m
            })
            .collect();
        let mults: Vec<Box<dyn Fn(f64) -> f64 + Sync>> = eps.iter().map(|&e| Box::new(move |r: f64| crate::params::w_eps(e, s, r)) as Box<dyn Fn(f64) -> f64 + Sync>).collect();
        let refs: Vec<&(dyn Fn(f64) -> f64 + Sync)> = mults.iter().map(|b| b.as_ref()).collect();
        let fourier = fourier_grams(spec, l, grid, &refs)?;
        Ok(NormGrams { spec: spec.clone(), l, eps: eps.to_vec(), weighted, phase, fourier, aniso })
    }

    /// Gram of |·|²_{ε,l} for the i-th ε.
    pub fn triple(&self, i: usize) -> DMatrix<f64> {
        &self.aniso[i] + &self.fourier[i] + &self.phase[i]
    }

    pub fn quadratic(m: &DMatrix<f64>, f: &HermiteCoeffs) -> f64 {
        let x = DVector::from_column_slice(&f.coeffs);
        x.dot(&(m * &x))
    }
}
