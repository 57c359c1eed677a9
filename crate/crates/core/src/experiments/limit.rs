//! Λ calibration and the ε-rate of Boltzmann → Landau at operator, matrix and
//! semigroup level.

use log::info;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::{project_p, BasisSpec, HermiteCoeffs};
use crate::dynamics::{geometric_times, propagate};
use crate::error::{Error, Result};
use crate::norms::shell_grams;
use crate::operators::{assemble_l_eps, assemble_l_landau, trilinear_eps, trilinear_landau};
use crate::params::ModelParams;
use crate::report::{fmt_num, CsvTable};

use super::fit_with_r2;

/// Degree of the basis the bilinear outputs are projected on.
pub const OUTPUT_DEGREE: usize = 8;
pub const DEFAULT_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
/// Largest ε accepted for calibration.
pub const CALIBRATION_EPS_MAX: f64 = 1e-2;
/// Largest relative per-pair spread of calibrated Λ.
pub const CALIBRATION_SPREAD: f64 = 0.05;

/// ⟨x, y⟩ = ∫ μ ψ·ψ, i.e. the L² pairing of μ^{1/2}·(Σ x_α ψ_α).
fn mu_gram(spec: &BasisSpec) -> DMatrix<f64> {
    let w = |r: f64| (2.0 * std::f64::consts::PI).powf(-1.5) * (-0.5 * r * r).exp();
    shell_grams(spec, &[&w], None).radial.remove(0)
}

fn form(m: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    DVector::from_column_slice(x).dot(&(m * DVector::from_column_slice(y)))
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub eps: f64,
    pub lambda: f64,
    /// Λ fitted to each pair alone.
    pub per_pair: Vec<f64>,
    /// (max − min)/Λ over `per_pair`.
    pub spread: f64,
}

impl CsvTable for Calibration {
    fn header(&self) -> Vec<String> {
        ["eps", "pair", "lambda"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self.per_pair.iter().enumerate().map(|(i, l)| vec![fmt_num(self.eps), i.to_string(), fmt_num(*l)]).collect();
        rows.push(vec![fmt_num(self.eps), "all".into(), fmt_num(self.lambda)]);
        rows
    }
}

/// Least-squares Λ with Q^ε(G, H) ≈ Λ·Q^L_1(G, H) over the pairs, G = μ^{1/2}g.
pub fn calibrate_lambda(params: &ModelParams, pairs: &[(HermiteCoeffs, HermiteCoeffs)], output_degree: usize) -> Result<Calibration> {
    params.check_landau()?;
    if params.eps > CALIBRATION_EPS_MAX {
        return Err(Error::Domain(format!("calibration needs eps <= {CALIBRATION_EPS_MAX}, got {}", params.eps)));
    }
    if pairs.len() < 3 {
        return Err(Error::Domain(format!("calibration needs at least 3 test pairs, got {}", pairs.len())));
    }
    let kg = pairs.iter().map(|p| p.0.spec.k).max().unwrap();
    let kh = pairs.iter().map(|p| p.1.spec.k).max().unwrap();
    let degs = [kg, kh, output_degree];
    let te = trilinear_eps(params, degs)?;
    let tl = trilinear_landau(&params.with_lambda_landau(1.0), degs)?;
    let gram = mu_gram(&BasisSpec::new(output_degree));
    let mut num = 0.0;
    let mut den = 0.0;
    let mut per_pair = Vec::with_capacity(pairs.len());
    for (g, h) in pairs {
        let g = g.reembed(kg);
        let h = h.reembed(kh);
        let qe = te.contract_last(&g.coeffs, &h.coeffs);
        let ql = tl.contract_last(&g.coeffs, &h.coeffs);
        let (n, d) = (form(&gram, &qe, &ql), form(&gram, &ql, &ql));
        num += n;
        den += d;
        per_pair.push(n / d);
    }
    let lambda = num / den;
    let hi = per_pair.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = per_pair.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = (hi - lo) / lambda;
    info!("calibrated Lambda = {lambda:.10} at eps = {} (spread {spread:.3e})", params.eps);
    if spread > CALIBRATION_SPREAD {
        return Err(Error::CalibrationUnstable { spread, values: per_pair });
    }
    Ok(Calibration { eps: params.eps, lambda, per_pair, spread })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// ‖Q^ε(F, F) − Q^L(F, F)‖_{L²}, F = μ^{1/2}f.
    Operator,
    /// ‖A^ε − A^L‖_F.
    Matrix,
    /// sup_{t ≤ T} ‖f^ε(t) − f^L(t)‖_{L²} for the linearized k = 0 flows.
    Semigroup,
}

impl std::fmt::Display for LimitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LimitMode::Operator => "operator",
            LimitMode::Matrix => "matrix",
            LimitMode::Semigroup => "semigroup",
        })
    }
}

impl std::str::FromStr for LimitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "operator" => Ok(LimitMode::Operator),
            "matrix" => Ok(LimitMode::Matrix),
            "semigroup" => Ok(LimitMode::Semigroup),
            _ => Err(Error::Domain(format!("unknown limit mode '{s}' (operator, matrix, semigroup)"))),
        }
    }
}

/// Fixed data shared by every ε of a scan.
#[derive(Debug, Clone)]
pub struct LimitInputs {
    /// Smooth f for operator mode; its micro part seeds the semigroup.
    pub test: HermiteCoeffs,
    /// Basis degree for matrix and semigroup modes.
    pub k: usize,
    pub horizon: f64,
    pub output_degree: usize,
}

impl LimitInputs {
    pub fn published(k: usize, horizon: f64) -> LimitInputs {
        LimitInputs { test: super::published_test_functions().remove(0), k, horizon, output_degree: OUTPUT_DEGREE }
    }

    /// (I − ℙ)f normalized, in the degree-k basis.
    pub fn initial_micro(&self) -> Result<HermiteCoeffs> {
        let f = self.test.reembed(self.k);
        let p = project_p(&f);
        let c: Vec<f64> = f.coeffs.iter().zip(&p.coeffs).map(|(a, b)| a - b).collect();
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::Domain("test function lies in the collision invariants".into()));
        }
        Ok(HermiteCoeffs::from_vec(&f.spec, c.iter().map(|x| x / n).collect()))
    }

    pub fn times(&self) -> Vec<f64> {
        geometric_times(1e-3, self.horizon, 64)
    }
}

#[derive(Debug, Clone)]
pub struct SlopeReport {
    pub mode: LimitMode,
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares fit log err ≈ intercept + slope·log ε.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub lambda_landau: f64,
}

impl SlopeReport {
    pub fn new(mode: LimitMode, eps: Vec<f64>, errors: Vec<f64>, lambda_landau: f64) -> Result<SlopeReport> {
        if eps.len() < 2 || eps.len() != errors.len() {
            return Err(Error::Domain(format!("slope fit needs >= 2 matching points, got {} eps / {} errors", eps.len(), errors.len())));
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain("eps list must be strictly decreasing".into()));
        }
        if errors.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::Domain(format!("errors must be positive and finite: {errors:?}")));
        }
        let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let (intercept, slope, r2) = fit_with_r2(&x, &y);
        Ok(SlopeReport { mode, eps, errors, slope, intercept, r2, lambda_landau })
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn fit_header() -> Vec<String> {
        ["mode", "slope", "intercept", "r2", "lambda_landau"].iter().map(|s| s.to_string()).collect()
    }

    pub fn fit_record(&self) -> Vec<String> {
        vec![self.mode.to_string(), fmt_num(self.slope), fmt_num(self.intercept), fmt_num(self.r2), fmt_num(self.lambda_landau)]
    }
}

impl CsvTable for SlopeReport {
    fn header(&self) -> Vec<String> {
        ["eps", "error"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.eps.iter().zip(&self.errors).map(|(e, r)| vec![fmt_num(*e), fmt_num(*r)]).collect()
    }
}

/// Error of the grazing limit for each ε, with the Landau side at
/// `base.lambda_landau` (the calibrated value).
pub fn limit_scan(mode: LimitMode, base: &ModelParams, eps: &[f64], inputs: &LimitInputs) -> Result<SlopeReport> {
    base.check_landau()?;
    let params: Vec<ModelParams> = eps.iter().map(|&e| base.with_eps(e)).collect();
    for p in &params {
        p.check()?;
    }
    let errors: Vec<f64> = match mode {
        LimitMode::Operator => {
            let f = &inputs.test;
            let degs = [f.spec.k, f.spec.k, inputs.output_degree];
            let gram = mu_gram(&BasisSpec::new(inputs.output_degree));
            let ql = trilinear_landau(base, degs)?.contract_last(&f.coeffs, &f.coeffs);
            params
                .par_iter()
                .map(|p| {
                    let qe = trilinear_eps(p, degs)?.contract_last(&f.coeffs, &f.coeffs);
                    let d: Vec<f64> = qe.iter().zip(&ql).map(|(a, b)| a - b).collect();
                    Ok(form(&gram, &d, &d).sqrt())
                })
                .collect::<Result<_>>()?
        }
        LimitMode::Matrix => {
            let spec = BasisSpec::new(inputs.k);
            let al = assemble_l_landau(&spec, base)?;
            params.par_iter().map(|p| Ok((assemble_l_eps(&spec, p)?.entries - &al.entries).norm())).collect::<Result<_>>()?
        }
        LimitMode::Semigroup => {
            let spec = BasisSpec::new(inputs.k);
            let f0 = inputs.initial_micro()?;
            let times = inputs.times();
            let fl = propagate(&assemble_l_landau(&spec, base)?, [0; 3], &f0, &times)?;
            params
                .par_iter()
                .map(|p| {
                    let fe = propagate(&assemble_l_eps(&spec, p)?, [0; 3], &f0, &times)?;
                    Ok(fe
                        .iter()
                        .zip(&fl)
                        .map(|(a, b)| a.0.iter().zip(&b.0).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
                        .fold(0.0, f64::max))
                })
                .collect::<Result<_>>()?
        }
    };
    SlopeReport::new(mode, eps.to_vec(), errors, base.lambda_landau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::published_pairs;

    fn base() -> ModelParams {
        ModelParams::validate(-1.0, 0.75, 0.01).unwrap()
    }

    #[test]
    fn mu_gram_of_constant_mode() {
        // ∫ μ ψ₀² = (2π)^{-3} ∫ e^{-|v|²} = (2π)^{-3} π^{3/2}.
        let g = mu_gram(&BasisSpec::new(2));
        let want = (2.0 * std::f64::consts::PI).powi(-3) * std::f64::consts::PI.powf(1.5);
        assert!((g[(0, 0)] - want).abs() < 1e-13 * want);
    }

    #[test]
    fn calibration_stable_and_scales_with_kernel() {
        let pairs = published_pairs();
        let c1 = calibrate_lambda(&base(), &pairs, 6).unwrap();
        assert!(c1.spread <= CALIBRATION_SPREAD, "spread {}", c1.spread);
        let c2 = calibrate_lambda(&base().with_eps(3e-3), &pairs, 6).unwrap();
        assert!((c1.lambda - c2.lambda).abs() <= 0.02 * c2.lambda, "{} vs {}", c1.lambda, c2.lambda);
        let c3 = calibrate_lambda(&base().with_c_b(2.0), &pairs, 6).unwrap();
        assert!((c3.lambda - 2.0 * c1.lambda).abs() < 1e-10 * c1.lambda);
    }

    #[test]
    fn calibration_preconditions() {
        let pairs = published_pairs();
        assert!(matches!(calibrate_lambda(&base().with_eps(0.1), &pairs, 6), Err(Error::Domain(_))));
        assert!(matches!(calibrate_lambda(&base(), &pairs[..2], 6), Err(Error::Domain(_))));
    }

    #[test]
    fn slope_report_invariants() {
        let r = SlopeReport::new(LimitMode::Matrix, vec![0.2, 0.1], vec![0.4, 0.2], 1.0).unwrap();
        assert!((r.slope - 1.0).abs() < 1e-14 && r.strictly_decreasing());
        assert!(SlopeReport::new(LimitMode::Matrix, vec![0.1, 0.2], vec![0.4, 0.2], 1.0).is_err());
        assert!(SlopeReport::new(LimitMode::Matrix, vec![0.2, 0.1], vec![0.4, 0.0], 1.0).is_err());
    }

    #[test]
    fn matrix_error_decreases_with_eps() {
        let inputs = LimitInputs::published(4, 5.0);
        let r = limit_scan(LimitMode::Matrix, &base(), &[0.2, 0.1, 0.05], &inputs).unwrap();
        assert!(r.strictly_decreasing(), "{:?}", r.errors);
    }

    #[test]
    fn initial_data_is_micro() {
        let inputs = LimitInputs::published(6, 5.0);
        let f0 = inputs.initial_micro().unwrap();
        assert!((f0.norm() - 1.0).abs() < 1e-14);
        assert!(project_p(&f0).norm() < 1e-12);
    }
}
