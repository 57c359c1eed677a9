//! Generalized eigenvalues of the linearized operators on the micro space.

use log::{info, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::basis::{collision_invariant_coeffs, BasisSpec};
use crate::error::{Error, Result};
use crate::norms::{NKernel, NRules, NormGrams};
use crate::operators::{assemble_l_eps, assemble_l_landau};
use crate::params::ModelParams;
use crate::report::{fmt_num, CsvTable};

/// Quadratic forms available as Gram matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    /// |⟨v⟩^l f|².
    WeightedL2 { l: f64 },
    /// |W^ε ⟨v⟩^l f|².
    Phase { l: f64 },
    /// |f|²_{ε,l}.
    Triple { l: f64 },
    /// 𝓝(f, μ^{1/2}).
    NFunctional,
}

/// Symmetric Gram matrix after SPD repair.
#[derive(Debug, Clone)]
pub struct Gram {
    pub matrix: DMatrix<f64>,
    /// Eigenvalue mass added by the floor, relative to the trace.
    pub repair_mass: f64,
}

/// Floor eigenvalues at 10⁻¹²·trace/dim; fails if the added mass exceeds
/// 10⁻⁸ of the trace.
pub fn spd_repair(m: &DMatrix<f64>) -> Result<Gram> {
    let sym = 0.5 * (m + m.transpose());
    let n = sym.nrows();
    let trace = sym.trace();
    if !(trace > 0.0) {
        return Err(Error::IndefiniteGram(f64::INFINITY));
    }
    let floor = 1e-12 * trace / n as f64;
    let eig = SymmetricEigen::new(sym.clone());
    let added: f64 = eig.eigenvalues.iter().map(|&l| (floor - l).max(0.0)).sum();
    if added == 0.0 {
        return Ok(Gram { matrix: sym, repair_mass: 0.0 });
    }
    let rel = added / trace;
    if rel > 1e-8 {
        return Err(Error::IndefiniteGram(rel));
    }
    warn!("Gram repair: relative mass {rel:.3e}");
    let vals = eig.eigenvalues.map(|l| l.max(floor));
    let fixed = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
    Ok(Gram { matrix: 0.5 * (&fixed + fixed.transpose()), repair_mass: rel })
}

/// Gram matrix of `kind` over `spec` with the ε and s of `params`.
pub fn gram_matrix(kind: NormKind, spec: &BasisSpec, params: &ModelParams) -> Result<Gram> {
    if spec.k < 2 {
        return Err(Error::DegreeTooLow { k: spec.k, need: 2 });
    }
    let m = match kind {
        NormKind::L2 => DMatrix::identity(spec.dim(), spec.dim()),
        NormKind::WeightedL2 { l } => crate::norms::weighted_l2_gram(spec, l),
        NormKind::Phase { l } => NormGrams::build(spec, l, params.s, &[params.eps])?.phase.remove(0),
        NormKind::Triple { l } => NormGrams::build(spec, l, params.s, &[params.eps])?.triple(0),
        NormKind::NFunctional => NKernel::build(params, &NRules::new(params, 1e-3), NKernel::DEFAULT_NODES)?.gram(spec),
    };
    spd_repair(&m)
}

/// Orthogonality used to remove the collision invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deflation {
    /// x ⊥ e_j in L² (coefficient) inner product: the micro space ker⊥.
    Euclidean,
    /// ⟨x, e_j⟩_M = 0.
    MOrthogonal,
}

/// Result of a restricted generalized eigensolve.
#[derive(Debug, Clone)]
pub struct RestrictedEig {
    pub lambda_min: f64,
    /// Minimizer normalized to xᵀMx = 1.
    pub eigvec: DVector<f64>,
    /// max_j |⟨x, e_j⟩| in the deflation inner product.
    pub overlap: f64,
}

/// min xᵀAx / xᵀMx over x orthogonal to `kernel` (M-orthogonally).
pub fn restricted_min_eig(a: &DMatrix<f64>, m: &DMatrix<f64>, kernel: &[DVector<f64>]) -> Result<RestrictedEig> {
    restricted_min_eig_with(a, m, kernel, Deflation::MOrthogonal)
}

pub fn restricted_min_eig_with(a: &DMatrix<f64>, m: &DMatrix<f64>, kernel: &[DVector<f64>], mode: Deflation) -> Result<RestrictedEig> {
    let n = a.nrows();
    if m.nrows() != n || a.ncols() != n {
        return Err(Error::Dimension(format!("A is {}x{}, M is {}x{}", n, a.ncols(), m.nrows(), m.ncols())));
    }
    // Constraint directions c_j: x ⊥ c_j in the Euclidean sense.
    let cons: Vec<DVector<f64>> = match mode {
        Deflation::Euclidean => kernel.to_vec(),
        Deflation::MOrthogonal => kernel.iter().map(|e| m * e).collect(),
    };
    let q = complement_basis(&cons, n)?;
    let at = q.transpose() * a * &q;
    let mt = q.transpose() * m * &q;
    let mt = 0.5 * (&mt + mt.transpose());
    let chol = mt.clone().cholesky().ok_or_else(|| Error::EigFailure("Cholesky of the restricted Gram failed".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::EigFailure("singular Cholesky factor".into()))?;
    let c = &linv * at * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 10_000).ok_or_else(|| Error::EigFailure("symmetric eigensolver did not converge".into()))?;
    let (imin, &lmin) = eig.eigenvalues.iter().enumerate().min_by(|x, y| x.1.partial_cmp(y.1).unwrap()).ok_or_else(|| Error::EigFailure("empty problem".into()))?;
    let y = eig.eigenvectors.column(imin).into_owned();
    let x = &q * (linv.transpose() * y);
    let xm = x.dot(&(m * &x)).sqrt();
    let x = x / xm;
    let overlap = cons.iter().map(|c| (c.dot(&x) / c.norm()).abs()).fold(0.0, f64::max);
    if overlap > 1e-10 {
        return Err(Error::EigFailure(format!("deflation overlap {overlap:.2e} above 1e-10")));
    }
    Ok(RestrictedEig { lambda_min: lmin, eigvec: x, overlap })
}

/// Orthonormal basis (columns) of the Euclidean complement of span(cons).
fn complement_basis(cons: &[DVector<f64>], n: usize) -> Result<DMatrix<f64>> {
    if cons.is_empty() {
        return Ok(DMatrix::identity(n, n));
    }
    let k = cons.len();
    let mut full = DMatrix::zeros(n, k + n);
    for (j, c) in cons.iter().enumerate() {
        full.set_column(j, c);
    }
    for i in 0..n {
        full[(i, k + i)] = 1.0;
    }
    // Gram–Schmidt with reorthogonalization keeps the first n independent columns.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    for j in 0..k + n {
        let mut v = full.column(j).into_owned();
        let start = v.norm();
        for _ in 0..2 {
            for b in &basis {
                let d = b.dot(&v);
                v.axpy(-d, b, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-8 * start.max(1e-300) {
            basis.push(v / nv);
        } else if j < k {
            return Err(Error::EigFailure("dependent kernel vectors".into()));
        }
        if basis.len() == n {
            break;
        }
    }
    let cols: Vec<DVector<f64>> = basis.into_iter().skip(k).collect();
    Ok(DMatrix::from_columns(&cols))
}

/// The five collision invariants as coefficient vectors.
pub fn kernel_vectors(spec: &BasisSpec) -> Result<Vec<DVector<f64>>> {
    Ok(collision_invariant_coeffs(spec)?.into_iter().map(|c| DVector::from_vec(c.coeffs)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    /// 0 marks the Landau row.
    pub eps: f64,
    pub lambda_min_l2gamma: f64,
    pub lambda_min_triple: f64,
    pub k: usize,
    pub asym_residual: f64,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub gamma: f64,
    pub s: f64,
    pub k: usize,
    pub rows: Vec<GapRow>,
    pub quadrature: String,
}

impl GapReport {
    pub fn boltzmann_rows(&self) -> impl Iterator<Item = &GapRow> {
        self.rows.iter().filter(|r| r.eps > 0.0)
    }

    pub fn landau_row(&self) -> Option<&GapRow> {
        self.rows.iter().find(|r| r.eps == 0.0)
    }
}

impl CsvTable for GapReport {
    fn header(&self) -> Vec<String> {
        ["eps", "lambda_min_l2gamma", "lambda_min_triple", "K", "asym_residual"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![fmt_num(r.eps), fmt_num(r.lambda_min_l2gamma), fmt_num(r.lambda_min_triple), r.k.to_string(), fmt_num(r.asym_residual)])
            .collect()
    }
}

/// λ_min on ker⊥ under the L²_{γ/2} and triple-norm Grams for each ε, plus
/// the Landau row (ε = 0, weight ⟨·⟩).
pub fn gap_scan(gamma: f64, s: f64, eps: &[f64], k: usize, lambda_landau: f64) -> Result<GapReport> {
    let spec = BasisSpec::new(k);
    if k < 2 {
        return Err(Error::DegreeTooLow { k, need: 2 });
    }
    for &e in eps {
        ModelParams::validate(gamma, s, e)?;
    }
    let l = 0.5 * gamma;
    let mut all_eps = eps.to_vec();
    all_eps.push(0.0);
    let grams = NormGrams::build(&spec, l, s, &all_eps)?;
    let weighted = spd_repair(&grams.weighted)?.matrix;
    let kern = kernel_vectors(&spec)?;
    let mut rows = Vec::new();
    let mut rules = String::new();
    for (i, &e) in all_eps.iter().enumerate() {
        let a = if e > 0.0 {
            assemble_l_eps(&spec, &ModelParams::validate(gamma, s, e)?)?
        } else {
            let p = ModelParams::validate(gamma, s, eps.first().copied().unwrap_or(0.1))?.with_lambda_landau(lambda_landau);
            assemble_l_landau(&spec, &p)?
        };
        if rules.is_empty() {
            rules = a.meta.rules.clone();
        }
        let triple = spd_repair(&grams.triple(i))?.matrix;
        let l2 = restricted_min_eig_with(&a.entries, &weighted, &kern, Deflation::Euclidean)?;
        let tr = restricted_min_eig_with(&a.entries, &triple, &kern, Deflation::Euclidean)?;
        info!("gap eps={e}: l2gamma {:.6e}, triple {:.6e}", l2.lambda_min, tr.lambda_min);
        rows.push(GapRow { eps: e, lambda_min_l2gamma: l2.lambda_min, lambda_min_triple: tr.lambda_min, k, asym_residual: a.meta.asymmetry });
    }
    Ok(GapReport { gamma, s, k, rows, quadrature: rules })
}
