//! Kernel identities and operator-structure checks behind `validate`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::Result;
use crate::operators::OperatorMatrix;
use crate::params::{b_eps_raw, symbol_e_closed, ModelParams};
use crate::quadrature::sphere::{panels_for_tolerance, SphereRule};
use crate::spectra::{kernel_vectors, restricted_min_eig_with, Deflation};

/// Truncation tolerance of the cap rules used here.
pub const CAP_TOL: f64 = 1e-12;

/// ∫ b^ε sin²(θ/2) dσ on the singularity-graded cap rule (exact value 4π).
pub fn order_two_integral(params: &ModelParams) -> f64 {
    let r = SphereRule::for_tolerance(params, CAP_TOL, 8, 16);
    r.integrate_radial(|u| b_eps_raw(params.s, params.eps, u) * u * u)
}

/// (1/4π) ∫ b^ε min{|ξ|² sin²(θ/2), 1} dσ, with a panel break at the kink.
pub fn symbol_quadrature(params: &ModelParams, xi: f64) -> f64 {
    let r = SphereRule::build_with_breaks(params, panels_for_tolerance(params.s, CAP_TOL), 8, 4, &[1.0 / xi.abs()]);
    r.integrate_radial(|u| b_eps_raw(params.s, params.eps, u) * (xi * xi * u * u).min(1.0)) / (4.0 * PI)
}

/// The |ξ| values checked against the closed form.
pub fn symbol_points(eps: f64) -> [f64; 5] {
    [1.0, 5.0, 1.0 / eps, 2.0 / eps, 5.0 / eps]
}

/// Largest relative deviation of the quadrature symbol from the closed form.
pub fn symbol_max_error(params: &ModelParams) -> f64 {
    symbol_points(params.eps)
        .iter()
        .map(|&xi| (symbol_quadrature(params, xi) / symbol_e_closed(params.eps, params.s, xi) - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorStructure {
    /// ‖A − Aᵀ‖_F/‖A‖_F before symmetrization.
    pub asymmetry: f64,
    /// max_j ‖A e_j‖/(‖A‖₂‖e_j‖) over the collision invariants.
    pub null_residual: f64,
    /// Smallest eigenvalue on ker⊥ divided by ‖A‖₂.
    pub micro_min_relative: f64,
    /// Smallest eigenvalue on ker⊥ (L² normalization).
    pub micro_min: f64,
    pub spectral_norm: f64,
}

pub fn operator_structure(op: &OperatorMatrix) -> Result<OperatorStructure> {
    let a = &op.entries;
    let eig = SymmetricEigen::new(a.clone());
    let spectral_norm = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let kernel = kernel_vectors(&op.spec)?;
    let null_residual = kernel.iter().map(|e| (a * e).norm() / (spectral_norm * e.norm())).fold(0.0, f64::max);
    let micro = restricted_min_eig_with(a, &DMatrix::identity(a.nrows(), a.ncols()), &kernel, Deflation::Euclidean)?;
    Ok(OperatorStructure {
        asymmetry: op.meta.asymmetry,
        null_residual,
        micro_min_relative: micro.lambda_min / spectral_norm,
        micro_min: micro.lambda_min,
        spectral_norm,
    })
}
