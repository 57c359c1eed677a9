//! Linear semigroup evolution of a single spatial Fourier mode and envelope
//! fits of the resulting decay traces.

pub mod ode;

use log::debug;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::basis::HermiteCoeffs;
use crate::error::{Error, Result};
use crate::operators::{transport_matrices, OperatorMatrix};
use crate::params::DecaySchedule;
use crate::report::{fmt_num, CsvTable};

use ode::{dopri5, StepControl};

/// Local error tolerance of the adaptive integrator.
pub const STEP_TOL: f64 = 1e-8;
/// Relative rms residual above which the early window is flagged non-linear.
pub const NONLINEAR_THRESHOLD: f64 = 1e-2;

/// Geometric grid with `per_decade` points per decade on [t_min, t_max],
/// preceded by t = 0.
pub fn geometric_times(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    let mut out = vec![0.0];
    out.extend((0..=n).map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64)));
    out
}

/// Norm used along a trace: ‖f‖² = f*Mf (identity means plain L²).
#[derive(Debug, Clone)]
pub enum TraceNorm {
    L2,
    Gram(DMatrix<f64>),
}

impl TraceNorm {
    fn sq(&self, x: &[f64]) -> f64 {
        match self {
            TraceNorm::L2 => x.iter().map(|a| a * a).sum(),
            TraceNorm::Gram(m) => {
                let v = DVector::from_column_slice(x);
                v.dot(&(m * &v))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecayTrace {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub mode: [i32; 3],
    pub generator: String,
    pub initial: String,
}

impl CsvTable for DecayTrace {
    fn header(&self) -> Vec<String> {
        vec!["t".into(), "norm".into()]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.times.iter().zip(&self.norms).map(|(t, n)| vec![fmt_num(*t), fmt_num(*n)]).collect()
    }
}

/// Solution of ∂_t f + i(k·v) f + A f = 0 at the requested times, as real
/// and imaginary coefficient parts.
pub fn propagate(generator: &OperatorMatrix, mode: [i32; 3], f0: &HermiteCoeffs, times: &[f64]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let n = generator.dim();
    if f0.coeffs.len() != n {
        return Err(Error::Dimension(format!("initial data has {} coefficients, generator {}", f0.coeffs.len(), n)));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Domain("times must be nonnegative and ascending".into()));
    }
    let a = &generator.entries;
    if mode == [0, 0, 0] {
        let eig = SymmetricEigen::new(a.clone());
        let c = eig.eigenvectors.transpose() * DVector::from_column_slice(&f0.coeffs);
        return Ok(times
            .iter()
            .map(|&t| {
                let d = DVector::from_iterator(n, c.iter().zip(eig.eigenvalues.iter()).map(|(ci, li)| ci * (-li * t).exp()));
                ((&eig.eigenvectors * d).as_slice().to_vec(), vec![0.0; n])
            })
            .collect());
    }
    // k·V is real symmetric; with f = x + iy:  x' = −Ax + (k·V)y,  y' = −Ay − (k·V)x.
    let v = transport_matrices(&generator.spec);
    let mut kv = DMatrix::zeros(n, n);
    for j in 0..3 {
        if mode[j] != 0 {
            kv += mode[j] as f64 * &v[j];
        }
    }
    let rhs = |_t: f64, y: &[f64], d: &mut [f64]| {
        let x = DVector::from_column_slice(&y[..n]);
        let z = DVector::from_column_slice(&y[n..]);
        let dx = -(a * &x) + &kv * &z;
        let dz = -(a * &z) - &kv * &x;
        d[..n].copy_from_slice(dx.as_slice());
        d[n..].copy_from_slice(dz.as_slice());
    };
    let mut y0 = f0.coeffs.clone();
    y0.extend(std::iter::repeat(0.0).take(n));
    let sol = dopri5(rhs, 0.0, &y0, times, StepControl::with_tol(STEP_TOL))?;
    Ok(sol.into_iter().map(|y| (y[..n].to_vec(), y[n..].to_vec())).collect())
}

/// Trace of ‖f(t)‖ for the single-mode linear flow.
pub fn evolve(generator: &OperatorMatrix, mode: [i32; 3], f0: &HermiteCoeffs, times: &[f64], norm: &TraceNorm, initial: &str) -> Result<DecayTrace> {
    let states = propagate(generator, mode, f0, times)?;
    let norms = states.iter().map(|(x, y)| (norm.sq(x) + norm.sq(y)).max(0.0).sqrt()).collect();
    Ok(DecayTrace { times: times.to_vec(), norms, mode, generator: generator.label.to_string(), initial: initial.to_string() })
}

/// Least-squares line y ≈ a + b x; returns (a, b, rms residual, condition number).
pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum::<f64>() / n).sqrt();
    // Condition number of the normal matrix [[n, Σx], [Σx, Σx²]].
    let sx: f64 = x.iter().sum();
    let sxx_raw: f64 = x.iter().map(|a| a * a).sum();
    let tr = n + sxx_raw;
    let det = n * sxx_raw - sx * sx;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let cond = (tr + disc) / (tr - disc).max(1e-300);
    (a, b, rms, cond)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    /// Early-window exponential rate.
    pub lambda_fit: f64,
    /// Late-window stretched exponent.
    pub kappa_fit: f64,
    /// Late-window prefactor c in −log(N/N₀) ≈ c t^κ.
    pub late_coeff: f64,
    /// Time where the fitted regimes cross.
    pub transition_estimate: f64,
    /// rms residual of the early fit relative to the log-range of the window.
    pub early_residual: f64,
    pub late_residual: f64,
    /// Early window not well described by a single exponential.
    pub early_nonlinear: bool,
    pub windows: [(f64, f64); 2],
}

impl CsvTable for EnvelopeFit {
    fn header(&self) -> Vec<String> {
        ["lambda_fit", "kappa_fit", "late_coeff", "transition_estimate", "early_residual", "late_residual", "early_nonlinear"].iter().map(|s| s.to_string()).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![vec![
            fmt_num(self.lambda_fit),
            fmt_num(self.kappa_fit),
            fmt_num(self.late_coeff),
            fmt_num(self.transition_estimate),
            fmt_num(self.early_residual),
            fmt_num(self.late_residual),
            self.early_nonlinear.to_string(),
        ]]
    }
}

/// λ from log N on [0, T_ε/2], κ from log(−log(N/N₀)) vs log t on [2T_ε, end].
pub fn fit_envelope(trace: &DecayTrace, schedule: &DecaySchedule) -> Result<EnvelopeFit> {
    fit_envelope_windows(trace, schedule.t_eps())
}

pub fn fit_envelope_windows(trace: &DecayTrace, t_eps: f64) -> Result<EnvelopeFit> {
    let n0 = trace.norms.first().copied().ok_or_else(|| Error::WindowTooShort("empty trace".into()))?;
    if trace.times[0] != 0.0 || !(n0 > 0.0) {
        return Err(Error::WindowTooShort("trace must start at t = 0 with a positive norm".into()));
    }
    let end = *trace.times.last().unwrap();
    let early: Vec<(f64, f64)> = trace.times.iter().zip(&trace.norms).filter(|(t, _)| **t <= 0.5 * t_eps).map(|(t, n)| (*t, (n / n0).ln())).collect();
    let late: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.norms)
        .filter(|(t, n)| **t >= 2.0 * t_eps && **n < n0)
        .map(|(t, n)| (t.ln(), (-(n / n0).ln()).ln()))
        .collect();
    if early.len() < 3 {
        return Err(Error::WindowTooShort(format!("{} points in [0, {:.3e}]", early.len(), 0.5 * t_eps)));
    }
    if late.len() < 3 {
        return Err(Error::WindowTooShort(format!("{} points in [{:.3e}, {end:.3e}]", late.len(), 2.0 * t_eps)));
    }
    let (ex, ey): (Vec<f64>, Vec<f64>) = early.into_iter().unzip();
    let (a_e, b_e, rms_e, cond_e) = line_fit(&ex, &ey);
    let range = ey.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ey.iter().cloned().fold(f64::INFINITY, f64::min);
    let early_residual = if range > 0.0 { rms_e / range } else { 0.0 };
    let (lx, ly): (Vec<f64>, Vec<f64>) = late.into_iter().unzip();
    let (a_l, kappa, rms_l, cond_l) = line_fit(&lx, &ly);
    debug!("envelope fit: early cond {cond_e:.3e}, late cond {cond_l:.3e}");
    let lambda = -b_e;
    let c = a_l.exp();
    // −log(N/N₀): early λt − a_e, late c t^κ; bisect their difference in log t.
    let gap = |t: f64| (lambda * t - a_e) - c * t.powf(kappa);
    let (mut lo, mut hi) = (1e-3 * t_eps, 1e3 * t_eps);
    let transition = if gap(lo).signum() != gap(hi).signum() {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if gap(mid).signum() == gap(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo * hi).sqrt()
    } else {
        f64::NAN
    };
    Ok(EnvelopeFit {
        lambda_fit: lambda,
        kappa_fit: kappa,
        late_coeff: c,
        transition_estimate: transition,
        early_residual,
        late_residual: rms_l,
        early_nonlinear: early_residual > NONLINEAR_THRESHOLD,
        windows: [(0.0, 0.5 * t_eps), (2.0 * t_eps, end)],
    })
}
