//! Galerkin matrices and pointwise realizations of the collision operators.

pub mod angular;
pub mod boltzmann;
pub mod cancellation;
pub mod export;
pub mod landau;
pub mod pointwise;
pub mod transport;

use nalgebra::DMatrix;

use crate::basis::BasisSpec;

pub use angular::{landau_maxwell_eigenvalues, maxwell_eigenvalues, ModeEigenvalue};
pub use boltzmann::{assemble_l_eps, trilinear_eps};
pub use cancellation::{cancellation_check, CancellationResult};
pub use landau::{assemble_l_landau, q_landau_pointwise, trilinear_landau};
pub use pointwise::gamma_eps_pointwise;
pub use transport::transport_matrices;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    BoltzmannLinear,
    LandauLinear,
    Transport(usize),
    Generator,
}

impl std::fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorLabel::BoltzmannLinear => write!(f, "L_eps"),
            OperatorLabel::LandauLinear => write!(f, "L_landau"),
            OperatorLabel::Transport(j) => write!(f, "V_{}", j + 1),
            OperatorLabel::Generator => write!(f, "generator"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AssemblyMeta {
    /// Human-readable list of the rules used.
    pub rules: String,
    /// ‖A − Aᵀ‖_F / ‖A‖_F before symmetrization.
    pub asymmetry: f64,
    pub runtime_s: f64,
}

/// Real Galerkin matrix A_{αβ} = ⟨A ψ_β, ψ_α⟩.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub spec: BasisSpec,
    pub entries: DMatrix<f64>,
    pub label: OperatorLabel,
    pub meta: AssemblyMeta,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.norm()
    }

    /// Restriction to the degree-≤k leading block.
    pub fn truncate(&self, k: usize) -> OperatorMatrix {
        let spec = BasisSpec::new(k);
        let n = spec.dim();
        OperatorMatrix {
            entries: self.entries.view((0, 0), (n, n)).into_owned(),
            spec,
            label: self.label,
            meta: self.meta.clone(),
        }
    }
}

pub(crate) fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        return 0.0;
    }
    (a - a.transpose()).norm() / n
}

pub(crate) fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
}
