//! Recorded constants of the coercivity, 𝓝 upper/lower and trilinear
//! estimates, sampled on seeded random coefficient vectors.

use log::info;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::rotation::Tensor3;
use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::norms::{NKernel, NRules, NormGrams};
use crate::operators::{assemble_l_eps, trilinear_eps};
use crate::params::ModelParams;
use crate::report::{fmt_num, CsvTable};

use super::{random_unit, rng};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TRIPLES: usize = 200;
/// Tolerance of the 𝓝 kernel table.
pub const N_KERNEL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRow {
    pub eps: f64,
    pub k: usize,
    /// min (⟨Af,f⟩ + |f|²_{L²_{γ/2}}) / |f|²_{ε,γ/2}.
    pub coercivity: f64,
    /// max 𝓝(f, μ^{1/2}) / |W^ε f|²_{L²_{γ/2}}.
    pub n_upper: f64,
    /// min (𝓝(f, μ^{1/2}) + |f|²_{L²_{γ/2}}) / |W^ε f|²_{L²_{γ/2}}.
    pub n_lower: f64,
    /// max |⟨Γ^ε(g,h), f⟩| / (|g|_{L²} |h|_{ε,γ/2} |f|_{ε,γ/2}).
    pub trilinear: f64,
    /// Alternating power-iteration estimate of the supremum of the same ratio.
    pub trilinear_sup: f64,
}

#[derive(Debug, Clone)]
pub struct ConstantsReport {
    pub gamma: f64,
    pub s: f64,
    pub seed: u64,
    pub samples: usize,
    pub triples: usize,
    pub rows: Vec<ConstantsRow>,
}

impl ConstantsReport {
    /// max/min of each constant over all rows, in column order.
    pub fn spreads(&self) -> [f64; 5] {
        let col = |f: fn(&ConstantsRow) -> f64| {
            let v: Vec<f64> = self.rows.iter().map(f).collect();
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            hi / lo
        };
        [col(|r| r.coercivity), col(|r| r.n_upper), col(|r| r.n_lower), col(|r| r.trilinear), col(|r| r.trilinear_sup)]
    }
}

impl CsvTable for ConstantsReport {
    fn header(&self) -> Vec<String> {
        ["eps", "K", "coercivity", "n_upper", "n_lower", "trilinear", "trilinear_sup"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![fmt_num(r.eps), r.k.to_string(), fmt_num(r.coercivity), fmt_num(r.n_upper), fmt_num(r.n_lower), fmt_num(r.trilinear), fmt_num(r.trilinear_sup)])
            .collect()
    }
}

fn quad(m: &DMatrix<f64>, f: &HermiteCoeffs) -> f64 {
    NormGrams::quadratic(m, f)
}

pub const SUP_ITERATIONS: usize = 300;

/// Partial contraction of T over the two slots other than `free`.
fn contract_two(t: &Tensor3, free: usize, x: &[f64], y: &[f64]) -> DVector<f64> {
    let [n0, n1, n2] = t.dims;
    let mut out = DVector::zeros(t.dims[free]);
    for i in 0..n0 {
        for j in 0..n1 {
            let row = &t.data[t.at(i, j, 0)..t.at(i, j, 0) + n2];
            match free {
                0 => out[i] += x[j] * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
                1 => out[j] += x[i] * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
                _ => {
                    let w = x[i] * y[j];
                    if w != 0.0 {
                        out.iter_mut().zip(row).for_each(|(o, a)| *o += w * a);
                    }
                }
            }
        }
    }
    out
}

/// max T(g,h,f) over |g|_{L²} = 1, hᵀMh = fᵀMf = 1 by block-coordinate ascent
/// from `start`; each block update is the exact maximizer given the others.
fn trilinear_power(t: &Tensor3, m: &DMatrix<f64>, start: &[HermiteCoeffs; 3], iters: usize) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or_else(|| Error::EigFailure("triple-norm Gram is not positive definite".into()))?;
    let unit_m = |b: DVector<f64>| {
        let x = chol.solve(&b);
        let n = b.dot(&x).sqrt();
        x / n
    };
    let mut g = DVector::from_column_slice(&start[0].coeffs);
    let mut h = DVector::from_column_slice(&start[1].coeffs);
    let mut f = DVector::from_column_slice(&start[2].coeffs);
    g /= g.norm();
    h /= h.dot(&(m * &h)).sqrt();
    f /= f.dot(&(m * &f)).sqrt();
    let mut value = 0.0;
    for _ in 0..iters {
        let bg = contract_two(t, 0, h.as_slice(), f.as_slice());
        g = &bg / bg.norm();
        h = unit_m(contract_two(t, 1, g.as_slice(), f.as_slice()));
        let bf = contract_two(t, 2, g.as_slice(), h.as_slice());
        let next = bf.dot(&chol.solve(&bf)).sqrt();
        f = unit_m(bf);
        let done = (next - value).abs() <= 1e-12 * next;
        value = next;
        if done {
            break;
        }
    }
    Ok(value)
}

/// Samples for degree k come from stream k of `seed`, so every ε sees the
/// same functions.
pub fn empirical_constants(gamma: f64, s: f64, eps: &[f64], ks: &[usize], seed: u64, samples: usize, triples: usize) -> Result<ConstantsReport> {
    let l = 0.5 * gamma;
    let params: Vec<ModelParams> = eps.iter().map(|&e| ModelParams::validate(gamma, s, e)).collect::<Result<_>>()?;
    let kernels: Vec<NKernel> = params.iter().map(|p| NKernel::build(p, &NRules::new(p, N_KERNEL_TOL), NKernel::DEFAULT_NODES)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &k in ks {
        let spec = BasisSpec::new(k);
        let mut r = rng(seed, k as u64);
        let fs: Vec<HermiteCoeffs> = (0..samples).map(|_| random_unit(&spec, &mut r)).collect();
        let trip: Vec<[HermiteCoeffs; 3]> = (0..triples).map(|_| [random_unit(&spec, &mut r), random_unit(&spec, &mut r), random_unit(&spec, &mut r)]).collect();
        let grams = NormGrams::build(&spec, l, s, eps)?;
        let per_eps: Vec<ConstantsRow> = params
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let a = assemble_l_eps(&spec, p)?.entries;
                let triple = grams.triple(i);
                let phase = &grams.phase[i];
                let nmat = kernels[i].gram(&spec);
                let mut coercivity = f64::INFINITY;
                let mut n_upper: f64 = 0.0;
                let mut n_lower = f64::INFINITY;
                for f in &fs {
                    let w = quad(&grams.weighted, f);
                    let ph = quad(phase, f);
                    let n = quad(&nmat, f);
                    coercivity = coercivity.min((quad(&a, f) + w) / quad(&triple, f));
                    n_upper = n_upper.max(n / ph);
                    n_lower = n_lower.min((n + w) / ph);
                }
                let t = trilinear_eps(p, [k, k, k])?;
                let ratios: Vec<f64> = trip
                    .iter()
                    .map(|[g, h, f]| t.contract(&g.coeffs, &h.coeffs, &f.coeffs).abs() / (g.norm() * quad(&triple, h).sqrt() * quad(&triple, f).sqrt()))
                    .collect();
                let (best, &trilinear) = ratios.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap();
                let best = &trip[best];
                let trilinear_sup = trilinear_power(&t, &triple, best, SUP_ITERATIONS)?.max(trilinear);
                info!("constants K={k} eps={}: c={coercivity:.4} C_N={n_upper:.4} c_N={n_lower:.4} C_3={trilinear:.4} sup={trilinear_sup:.4}", p.eps);
                Ok(ConstantsRow { eps: p.eps, k, coercivity, n_upper, n_lower, trilinear, trilinear_sup })
            })
            .collect::<Result<_>>()?;
        rows.extend(per_eps);
    }
    Ok(ConstantsReport { gamma, s, seed, samples, triples, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_basis_constants_are_positive_and_deterministic() {
        let a = empirical_constants(-1.0, 0.75, &[0.3], &[2], 5, 10, 10).unwrap();
        let b = empirical_constants(-1.0, 0.75, &[0.3], &[2], 5, 10, 10).unwrap();
        assert_eq!(a.rows, b.rows);
        let r = &a.rows[0];
        assert!(r.coercivity > 0.0 && r.n_upper > 0.0 && r.n_lower > 0.0 && r.trilinear > 0.0, "{r:?}");
        assert!(r.n_lower <= r.n_upper + 1.0);
        assert!(a.spreads().iter().all(|&x| x == 1.0));
        assert!(r.trilinear_sup >= r.trilinear);
    }

    #[test]
    fn power_ascent_matches_exhaustive_rank_one() {
        // T = a⊗b⊗c with M = I: sup = |a||b||c|.
        let n = 4;
        let mut t = Tensor3::zeros([n, n, n]);
        let (a, b, c) = ([1.0, -2.0, 0.5, 0.0], [0.3, 0.0, 1.0, 2.0], [1.0, 1.0, -1.0, 0.5]);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = t.at(i, j, k);
                    t.data[idx] = a[i] * b[j] * c[k];
                }
            }
        }
        let spec = BasisSpec::new(1);
        let start = [HermiteCoeffs::from_vec(&spec, vec![1.0, 0.0, 0.0, 0.0]), HermiteCoeffs::from_vec(&spec, vec![0.0, 0.0, 1.0, 0.0]), HermiteCoeffs::from_vec(&spec, vec![1.0, 0.0, 0.0, 0.0])];
        let got = trilinear_power(&t, &DMatrix::identity(n, n), &start, 50).unwrap();
        let nrm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = nrm(&a) * nrm(&b) * nrm(&c);
        assert!((got - want).abs() < 1e-12 * want);
    }
}
