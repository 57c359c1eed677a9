//! Exactly solvable toy decay f(t) = e^{−λ a_ε(v) t} f₀ and the pointwise
//! envelope b_ε(t, v) ≥ min{t, (t/ε^{2(1−s)})^κ}.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dynamics::{fit_envelope, geometric_times, DecayTrace, EnvelopeFit};
use crate::error::{Error, Result};
use crate::params::{bracket, DecaySchedule, ModelParams};
use crate::quadrature::adaptive::{integrate_breaks, AdaptiveOptions};
use crate::report::{fmt_num, CsvTable};

/// Relative tolerance of the radial integral behind N(t).
pub const TOY_TOL: f64 = 1e-12;
/// Exponent at which the initial profile e^{−2q⟨v⟩^ϑ} is cut.
const PROFILE_CUT: f64 = 740.0;
/// Relative slack for rounding in the envelope comparison.
pub const SWEEP_SLACK: f64 = 1e-12;

fn toy_checks(params: &ModelParams, lambda: f64, q: f64, theta: f64) -> Result<()> {
    params.check()?;
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("toy rate lambda must be positive, got {lambda}")));
    }
    if !(q > 2.0 * lambda) {
        return Err(Error::Domain(format!("toy model needs q > 2 lambda, got q = {q}, lambda = {lambda}")));
    }
    if !(theta > 0.0 && theta <= 2.0) {
        return Err(Error::Domain(format!("toy exponent theta must lie in (0, 2], got {theta}")));
    }
    Ok(())
}

/// N(t) = (∫ e^{−2λ a_ε(|v|) t} e^{−2q⟨v⟩^ϑ} dv)^{1/2}.
pub fn toy_norm(params: &ModelParams, lambda: f64, q: f64, theta: f64, t: f64, rel_tol: f64) -> Result<f64> {
    toy_checks(params, lambda, q, theta)?;
    // ⟨R⟩^ϑ = PROFILE_CUT/(2q) bounds the support that matters at every t.
    let r_max = ((PROFILE_CUT / (2.0 * q)).powf(1.0 / theta).powi(2) - 1.0).max(1.0).sqrt();
    let mut breaks = vec![0.0];
    let mut b = 0.5 / params.eps;
    while b < r_max {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(r_max);
    let exponent = |r: f64| 2.0 * lambda * params.a_eps_toy(r) * t + 2.0 * q * bracket(r).powf(theta);
    // Factor out e^{−m}, m ≈ min exponent, so deep-time values stay representable.
    let m = (0..=2000).map(|i| exponent(r_max * i as f64 / 2000.0)).fold(f64::INFINITY, f64::min);
    let f = |r: f64| 4.0 * PI * r * r * (m - exponent(r)).exp();
    let opts = AdaptiveOptions { abs_tol: 1e-150, rel_tol, max_intervals: 20_000 };
    Ok((-0.5 * m).exp() * integrate_breaks(f, &breaks, opts)?.value.sqrt())
}

/// Geometric grid, 64 per decade, over [10⁻²·T_ε, 100·T_ε] plus t = 0.
pub fn toy_times(params: &ModelParams, lambda: f64) -> Vec<f64> {
    let t_eps = DecaySchedule::new(params, lambda).t_eps();
    geometric_times(1e-2 * t_eps, 100.0 * t_eps, 64)
}

#[derive(Debug, Clone)]
pub struct ToyRun {
    pub params: ModelParams,
    pub lambda: f64,
    pub q: f64,
    pub theta: f64,
    pub trace: DecayTrace,
    pub fit: EnvelopeFit,
    pub t_eps: f64,
}

pub fn toy_run(params: &ModelParams, lambda: f64, q: f64, theta: f64, times: &[f64]) -> Result<ToyRun> {
    toy_checks(params, lambda, q, theta)?;
    let norms: Vec<f64> = times.par_iter().map(|&t| toy_norm(params, lambda, q, theta, t, TOY_TOL)).collect::<Result<_>>()?;
    let trace = DecayTrace {
        times: times.to_vec(),
        norms,
        mode: [0; 3],
        generator: "toy".into(),
        initial: format!("exp(-{q}<v>^{theta})"),
    };
    let sched = DecaySchedule::new(params, lambda);
    let fit = fit_envelope(&trace, &sched)?;
    Ok(ToyRun { params: *params, lambda, q, theta, trace, fit, t_eps: sched.t_eps() })
}

/// Outcome of the envelope sweep; failures are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub eps: f64,
    pub checked: usize,
    pub failures: usize,
    /// Smallest b_ε / min{t, ·} over the grid.
    pub worst_ratio: f64,
    pub worst_at: (f64, f64),
}

impl CsvTable for SweepReport {
    fn header(&self) -> Vec<String> {
        ["eps", "checked", "failures", "worst_ratio", "worst_t", "worst_v"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![vec![fmt_num(self.eps), self.checked.to_string(), self.failures.to_string(), fmt_num(self.worst_ratio), fmt_num(self.worst_at.0), fmt_num(self.worst_at.1)]]
    }
}

/// t on [10⁻³, 10⁶] and v ∈ {0} ∪ [10⁻³, 10⁴], 64 points per decade.
pub fn default_sweep_grids() -> (Vec<f64>, Vec<f64>) {
    let t = geometric_times(1e-3, 1e6, 64)[1..].to_vec();
    let v = geometric_times(1e-3, 1e4, 64);
    (t, v)
}

pub fn b_lower_bound_sweep(params: &ModelParams, theta: f64, t_grid: &[f64], v_grid: &[f64]) -> Result<SweepReport> {
    params.check_landau()?;
    if !(theta > 0.0 && theta <= 2.0) {
        return Err(Error::Domain(format!("theta must lie in (0, 2], got {theta}")));
    }
    let sched = DecaySchedule::new(params, 1.0);
    let mut rep = SweepReport { eps: params.eps, checked: 0, failures: 0, worst_ratio: f64::INFINITY, worst_at: (f64::NAN, f64::NAN) };
    for &v in v_grid {
        let a = params.a_eps_toy(v);
        let w = bracket(v).powf(theta);
        for &t in t_grid {
            let b = a * t + w;
            let rhs = t.min(sched.late_branch(t));
            let ratio = b / rhs;
            rep.checked += 1;
            if ratio < 1.0 - SWEEP_SLACK {
                rep.failures += 1;
            }
            if ratio < rep.worst_ratio {
                rep.worst_ratio = ratio;
                rep.worst_at = (t, v);
            }
        }
    }
    Ok(rep)
}
