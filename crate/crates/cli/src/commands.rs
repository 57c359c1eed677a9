use std::f64::consts::PI;

use grazelab::basis::BasisSpec;
use grazelab::dynamics::{evolve, fit_envelope_windows, geometric_times, TraceNorm};
use grazelab::experiments::identities::{operator_structure, order_two_integral, symbol_points, symbol_quadrature};
use grazelab::experiments::limit::OUTPUT_DEGREE;
use grazelab::experiments::toy::b_lower_bound_sweep;
use grazelab::experiments::{calibrate_lambda, default_sweep_grids, empirical_constants, limit_scan, published_pairs, toy_run, toy_times, LimitInputs, LimitMode, SlopeReport};
use grazelab::operators::{assemble_l_eps, assemble_l_landau};
use grazelab::params::symbol_e_closed;
use grazelab::report::{fmt_num, CsvTable};
use grazelab::spectra::gap_scan;
use grazelab::{DecaySchedule, Error, ModelParams};

use crate::config::RunConfig;
use crate::emit::RunDir;
use crate::svg::{Chart, Series};
use crate::RunError;

pub const ORDER_TWO_TOL: f64 = 1e-8;
pub const SYMBOL_TOL: f64 = 1e-6;
pub const LAMBDA_E_TOL: f64 = 1e-8;
pub const ASYMMETRY_TOL: f64 = 1e-6;
pub const NULL_TOL: f64 = 1e-5;
pub const SPECTRUM_SLACK: f64 = 1e-6;
pub const GAP_SPREAD: f64 = 2.0;
pub const SLOPE_RANGE: (f64, f64) = (0.8, 1.2);
pub const SLOPE_R2: f64 = 0.98;
pub const CALIBRATION_DRIFT: f64 = 0.02;
pub const CONSTANT_SPREAD: f64 = 1.5;

fn strs(x: &[&str]) -> Vec<String> {
    x.iter().map(|s| s.to_string()).collect()
}

fn params(cfg: &RunConfig, eps: f64) -> Result<ModelParams, RunError> {
    Ok(ModelParams::validate(cfg.f64("gamma")?, cfg.f64("s")?, eps)?)
}

pub fn run(cfg: &mut RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    match cfg.command {
        "validate" => validate(cfg, dir),
        "symbol" => symbol(cfg, dir),
        "gap" => gap(cfg, dir),
        "limit" => limit(cfg, dir),
        "decay" => decay(cfg, dir),
        "toy" => toy(cfg, dir),
        "calibrate-lambda" => calibrate(cfg, dir),
        "constants" => constants(cfg, dir),
        other => Err(RunError::Usage(format!("unknown command '{other}'"))),
    }
}

fn validate(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let k = cfg.usize("K")?;
    let mut rows = Vec::new();
    let mut push = |dir: &mut RunDir, name: &str, eps: f64, value: f64, expected: f64, error: f64, tol: f64, pass: bool| {
        dir.check(&format!("{name}[eps={eps}]"), pass, format!("value {value:.10e}, error {error:.3e}, tolerance {tol:.0e}"));
        rows.push(vec![name.to_string(), fmt_num(eps), fmt_num(value), fmt_num(expected), fmt_num(error), fmt_num(tol), pass.to_string()]);
    };
    for eps in cfg.f64_list("eps")? {
        let p = params(cfg, eps)?;
        let v = order_two_integral(&p);
        let e = (v / (4.0 * PI) - 1.0).abs();
        push(dir, "order2_integral", eps, v, 4.0 * PI, e, ORDER_TWO_TOL, e <= ORDER_TWO_TOL);

        let worst = symbol_points(eps)
            .iter()
            .map(|&xi| (symbol_quadrature(&p, xi) / symbol_e_closed(eps, p.s, xi) - 1.0).abs())
            .fold(0.0, f64::max);
        push(dir, "symbol_check", eps, worst, 0.0, worst, SYMBOL_TOL, worst <= SYMBOL_TOL);

        let le = p.lambda_e()?;
        push(dir, "lambda_e", eps, le, 4.0, (le - 4.0).abs(), LAMBDA_E_TOL, (le - 4.0).abs() <= LAMBDA_E_TOL);

        let st = operator_structure(&assemble_l_eps(&BasisSpec::new(k), &p)?)?;
        push(dir, "null_space_residuals", eps, st.null_residual, 0.0, st.null_residual, NULL_TOL, st.null_residual <= NULL_TOL);
        push(dir, "asymmetry", eps, st.asymmetry, 0.0, st.asymmetry, ASYMMETRY_TOL, st.asymmetry <= ASYMMETRY_TOL);
        let neg = (-st.micro_min_relative).max(0.0);
        push(dir, "micro_spectrum", eps, st.micro_min, 0.0, neg, SPECTRUM_SLACK, st.micro_min_relative >= -SPECTRUM_SLACK);
    }
    dir.table("validate", &strs(&["check", "eps", "value", "expected", "error", "tolerance", "pass"]), &rows, true)?;
    if dir.failed().is_empty() {
        Ok(())
    } else {
        Err(RunError::Validation(format!("identity checks failed: {}", dir.failed().join(", "))))
    }
}

fn symbol(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for eps in cfg.f64_list("eps")? {
        let p = params(cfg, eps)?;
        let xs = match cfg.get("xi") {
            Some(_) => cfg.f64_list("xi")?,
            None => symbol_points(eps).to_vec(),
        };
        let mut worst: f64 = 0.0;
        let mut pts = Vec::new();
        for xi in xs {
            if !(xi > 0.0) {
                return Err(RunError::Usage(format!("--xi: values must be positive, got {xi}")));
            }
            let q = symbol_quadrature(&p, xi);
            let c = symbol_e_closed(eps, p.s, xi);
            let err = (q / c - 1.0).abs();
            worst = worst.max(err);
            pts.push((xi, q));
            rows.push(vec![fmt_num(eps), fmt_num(xi), fmt_num(q), fmt_num(c), fmt_num(err)]);
        }
        dir.check(&format!("symbol_closed_form[eps={eps}]"), worst <= SYMBOL_TOL, format!("max relative error {worst:.3e} (tolerance {SYMBOL_TOL:.0e})"));
        series.push(Series { name: format!("eps={eps}"), points: pts, dashed: false });
    }
    dir.table("symbol", &strs(&["eps", "xi", "quadrature", "closed_form", "rel_error"]), &rows, true)?;
    dir.chart("symbol", &Chart { title: "Angular symbol".into(), x_label: "|xi|".into(), y_label: "E(xi)".into(), log_x: true, log_y: true, series })
}

fn gap(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let eps = cfg.f64_list("eps")?;
    let rep = gap_scan(cfg.f64("gamma")?, cfg.f64("s")?, &eps, cfg.usize("K")?, cfg.f64("lambda_landau")?)?;
    dir.csv("gap", &rep, true)?;
    dir.note(format!("quadrature: {}", rep.quadrature));
    let tri: Vec<f64> = rep.boltzmann_rows().map(|r| r.lambda_min_triple).collect();
    let lo = tri.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tri.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    dir.check("gap_uniformity", lo > 0.0 && hi / lo <= GAP_SPREAD, format!("triple-norm lambda_min in [{lo:.6e}, {hi:.6e}], ratio {:.4} (limit {GAP_SPREAD})", hi / lo));
    if let Some(l) = rep.landau_row() {
        dir.check("landau_gap", l.lambda_min_l2gamma > 0.0, format!("lambda_min {:.6e}", l.lambda_min_l2gamma));
    }
    let pts = |f: fn(&grazelab::spectra::GapRow) -> f64| rep.boltzmann_rows().map(|r| (r.eps, f(r))).collect();
    dir.chart(
        "gap",
        &Chart {
            title: format!("Micro-space gap, K={}", rep.k),
            x_label: "eps".into(),
            y_label: "lambda_min".into(),
            log_x: true,
            log_y: false,
            series: vec![
                Series { name: "triple norm".into(), points: pts(|r| r.lambda_min_triple), dashed: false },
                Series { name: "L2 weighted".into(), points: pts(|r| r.lambda_min_l2gamma), dashed: false },
            ],
        },
    )
}

fn calibration_table(dir: &mut RunDir, cals: &[grazelab::experiments::Calibration]) -> Result<(), RunError> {
    let Some(first) = cals.first() else { return Ok(()) };
    let records: Vec<Vec<String>> = cals.iter().flat_map(|c| c.records()).collect();
    dir.table("calibration", &first.header(), &records, true)
}

/// Calibrates at each ε; an unstable calibration is a FAIL line, not an abort.
fn calibrate_at(cfg: &RunConfig, dir: &mut RunDir, eps: &[f64], output_degree: usize) -> Result<Vec<grazelab::experiments::Calibration>, RunError> {
    let pairs = published_pairs();
    let mut out = Vec::new();
    for &e in eps {
        let p = params(cfg, e)?;
        match calibrate_lambda(&p, &pairs, output_degree) {
            Ok(c) => {
                dir.check(&format!("calibration_spread[eps={e}]"), true, format!("lambda {:.10}, per-pair spread {:.3e}", c.lambda, c.spread));
                out.push(c);
            }
            Err(Error::CalibrationUnstable { spread, values }) => {
                dir.check(&format!("calibration_spread[eps={e}]"), false, format!("per-pair spread {spread:.3e} above 5%, values {values:?}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn limit(cfg: &mut RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let eps = cfg.f64_list("eps")?;
    let modes: Vec<LimitMode> = cfg.str_list("mode")?.iter().map(|m| m.parse().map_err(|e: Error| RunError::Usage(format!("--mode: {e}")))).collect::<Result<_, _>>()?;
    let k = cfg.usize("K")?;
    let horizon = cfg.f64("horizon")?;
    let first = *eps.first().ok_or_else(|| RunError::Usage("--eps: empty list".into()))?;
    let lambda = match cfg.opt_f64("lambda_landau")? {
        Some(l) => l,
        None => {
            let ce = cfg.f64_list("calibration_eps")?;
            let cals = calibrate_at(cfg, dir, &ce, OUTPUT_DEGREE)?;
            calibration_table(dir, &cals)?;
            let Some(best) = cals.iter().min_by(|a, b| a.eps.total_cmp(&b.eps)) else {
                return Err(RunError::Numerical("Landau prefactor calibration failed at every eps".into()));
            };
            dir.note(format!("lambda_landau calibrated at eps={}", best.eps));
            // The calibrated value becomes part of the resolved config.
            cfg.values.insert("lambda_landau".into(), format!("{}", best.lambda));
            best.lambda
        }
    };
    let base = params(cfg, first)?.with_lambda_landau(lambda);
    let inputs = LimitInputs::published(k, horizon);
    let mut fits = Vec::new();
    let mut series = Vec::new();
    for mode in modes {
        let rep = limit_scan(mode, &base, &eps, &inputs)?;
        dir.csv(&format!("limit_{mode}"), &rep, true)?;
        let (lo, hi) = SLOPE_RANGE;
        let pass = rep.slope >= lo && rep.slope <= hi && rep.r2 >= SLOPE_R2;
        dir.check(&format!("limit_slope[{mode}]"), pass, format!("slope {:.4} (want [{lo}, {hi}]), R^2 {:.5} (want >= {SLOPE_R2})", rep.slope, rep.r2));
        dir.check(&format!("limit_monotone[{mode}]"), rep.strictly_decreasing(), "error strictly decreasing in eps".into());
        series.push(Series { name: mode.to_string(), points: rep.eps.iter().cloned().zip(rep.errors.iter().cloned()).collect(), dashed: false });
        series.push(Series { name: format!("{mode} fit"), points: rep.eps.iter().map(|&e| (e, (rep.intercept + rep.slope * e.ln()).exp())).collect(), dashed: true });
        fits.push(rep.fit_record());
    }
    dir.table("limit_fit", &SlopeReport::fit_header(), &fits, true)?;
    dir.chart("limit", &Chart { title: "Grazing-limit error".into(), x_label: "eps".into(), y_label: "error".into(), log_x: true, log_y: true, series })
}

fn decay(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let eps = cfg.f64("eps")?;
    let p = params(cfg, eps)?;
    let k = cfg.usize("K")?;
    let spec = BasisSpec::new(k);
    let wv: Vec<i32> = cfg.str_list("wavevector")?.iter().map(|x| x.parse().map_err(|_| RunError::Usage(format!("--wavevector: '{x}' is not an integer")))).collect::<Result<_, _>>()?;
    let mode: [i32; 3] = wv.try_into().map_err(|_| RunError::Usage("--wavevector: need three integers".into()))?;
    let op = match cfg.get("generator").unwrap_or("") {
        "boltzmann" => assemble_l_eps(&spec, &p)?,
        "landau" => assemble_l_landau(&spec, &p.with_lambda_landau(cfg.f64("lambda_landau")?))?,
        other => return Err(RunError::Usage(format!("--generator: '{other}' (boltzmann, landau)"))),
    };
    let t_eps = DecaySchedule::new(&p, 1.0).t_eps();
    let horizon = cfg.opt_f64("horizon")?.unwrap_or(10.0 * t_eps);
    if !(horizon > 1e-2) {
        return Err(RunError::Usage(format!("--horizon: need > 0.01, got {horizon}")));
    }
    let f0 = LimitInputs::published(k, horizon).initial_micro()?;
    let times = geometric_times(1e-2, horizon, 64);
    let trace = evolve(&op, mode, &f0, &times, &TraceNorm::L2, "micro part of published test function 0")?;
    dir.csv("decay_trace", &trace, false)?;
    // Exact k = 0 propagator vs adaptive stepping (absolute tolerance 1e-8) for k ≠ 0.
    let (slack, floor) = if mode == [0; 3] { (1e-10, 1e-12) } else { (1e-7, 1e-6) };
    let n0 = trace.norms[0];
    let worst = trace.norms.windows(2).map(|w| (w[1] - w[0]) / n0).fold(f64::NEG_INFINITY, f64::max);
    dir.check("norm_nonincreasing", worst <= slack, format!("largest increase {worst:.3e} of N(0) (slack {slack:.0e})"));
    // The fit stops where the norm reaches the solver's noise floor.
    let keep = trace.norms.iter().position(|&n| n < floor * n0).unwrap_or(trace.norms.len());
    let mut fitted = trace.clone();
    fitted.times.truncate(keep);
    fitted.norms.truncate(keep);
    match fit_envelope_windows(&fitted, t_eps) {
        Ok(fit) => {
            dir.note(format!("decay fit on a truncated Galerkin trace up to t = {:e}; the late window is eventually a pure exponential", fitted.times[keep - 1]));
            dir.csv("decay_fit", &fit, true)?;
        }
        Err(Error::WindowTooShort(m)) => dir.note(format!("no envelope fit: {m}")),
        Err(e) => return Err(e.into()),
    }
    dir.chart(
        "decay",
        &Chart {
            title: format!("{} decay, mode {mode:?}", trace.generator),
            x_label: "t".into(),
            y_label: "norm".into(),
            log_x: true,
            log_y: true,
            series: vec![Series { name: "L2 norm".into(), points: trace.times.iter().cloned().zip(trace.norms.iter().cloned()).collect(), dashed: false }],
        },
    )
}

fn toy(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let (lambda, q, theta) = (cfg.f64("lambda")?, cfg.f64("q")?, cfg.f64("theta")?);
    let eps = cfg.f64_list("eps")?;
    let (tg, vg) = default_sweep_grids();
    let mut trace_rows = Vec::new();
    let mut fit_rows = Vec::new();
    let mut sweep_rows = Vec::new();
    let mut series = Vec::new();
    let mut crossings = Vec::new();
    for &e in &eps {
        let p = params(cfg, e)?;
        let run = toy_run(&p, lambda, q, theta, &toy_times(&p, lambda))?;
        let n0 = run.trace.norms[0];
        for (t, n) in run.trace.times.iter().zip(&run.trace.norms) {
            trace_rows.push(vec![fmt_num(e), fmt_num(*t), fmt_num(*n)]);
        }
        let f = &run.fit;
        let kappa = DecaySchedule::new(&p, lambda).kappa();
        fit_rows.push(vec![fmt_num(e), fmt_num(run.t_eps), fmt_num(f.lambda_fit), fmt_num(f.kappa_fit), fmt_num(kappa), fmt_num(f.transition_estimate), fmt_num(f.early_residual), fmt_num(f.late_residual)]);
        let lr = (f.lambda_fit / lambda - 1.0).abs();
        dir.check(&format!("toy_lambda[eps={e}]"), lr <= 0.10, format!("lambda_fit {:.5} vs {lambda} (relative {lr:.3}, limit 0.10)", f.lambda_fit));
        let kr = (f.kappa_fit / kappa - 1.0).abs();
        dir.check(&format!("toy_kappa[eps={e}]"), kr <= 0.05, format!("kappa_fit {:.4} vs {kappa:.4} (relative {kr:.3}, limit 0.05)", f.kappa_fit));
        let tr = f.transition_estimate;
        dir.check(
            &format!("toy_crossover[eps={e}]"),
            tr >= run.t_eps / 3.0 && tr <= 3.0 * run.t_eps,
            format!("crossover {tr:.4} vs window [{:.4}, {:.4}]", run.t_eps / 3.0, 3.0 * run.t_eps),
        );
        crossings.push((e, tr, run.t_eps));
        series.push(Series { name: format!("eps={e}"), points: run.trace.times.iter().zip(&run.trace.norms).map(|(t, n)| (*t, n / n0)).collect(), dashed: false });

        let sw = b_lower_bound_sweep(&p, theta, &tg, &vg)?;
        dir.check(&format!("b_envelope[eps={e}]"), sw.failures == 0, format!("{} failures in {} points, worst ratio {:.6}", sw.failures, sw.checked, sw.worst_ratio));
        sweep_rows.extend(sw.records());
    }
    for w in crossings.windows(2) {
        let ((e0, c0, t0), (e1, c1, t1)) = (w[0], w[1]);
        let predicted = t1 / t0;
        let shift = c1 / c0;
        dir.check(
            &format!("toy_crossover_shift[{e0}->{e1}]"),
            shift >= 0.5 * predicted && shift <= 2.0 * predicted,
            format!("shift {shift:.3}, predicted {predicted:.3}, window [{:.3}, {:.3}]", 0.5 * predicted, 2.0 * predicted),
        );
    }
    dir.table("toy_trace", &strs(&["eps", "t", "norm"]), &trace_rows, false)?;
    dir.table("toy_fit", &strs(&["eps", "t_eps", "lambda_fit", "kappa_fit", "kappa", "transition_estimate", "early_residual", "late_residual"]), &fit_rows, true)?;
    dir.table("toy_sweep", &strs(&["eps", "checked", "failures", "worst_ratio", "worst_t", "worst_v"]), &sweep_rows, true)?;
    dir.chart("toy", &Chart { title: "Toy decay N(t)/N(0)".into(), x_label: "t".into(), y_label: "N(t)/N(0)".into(), log_x: true, log_y: true, series })
}

fn calibrate(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let eps = cfg.f64_list("eps")?;
    let cals = calibrate_at(cfg, dir, &eps, cfg.usize("output_degree")?)?;
    calibration_table(dir, &cals)?;
    for w in cals.windows(2) {
        let d = (w[1].lambda / w[0].lambda - 1.0).abs();
        dir.check(&format!("calibration_drift[{}->{}]", w[0].eps, w[1].eps), d <= CALIBRATION_DRIFT, format!("relative change {d:.3e} (limit {CALIBRATION_DRIFT})"));
    }
    Ok(())
}

fn constants(cfg: &RunConfig, dir: &mut RunDir) -> Result<(), RunError> {
    let rep = empirical_constants(cfg.f64("gamma")?, cfg.f64("s")?, &cfg.f64_list("eps")?, &cfg.usize_list("K")?, cfg.u64("seed")?, cfg.usize("samples")?, cfg.usize("triples")?)?;
    dir.csv("constants", &rep, true)?;
    let names = ["coercivity", "n_upper", "n_lower", "trilinear", "trilinear_sup"];
    let spreads = rep.spreads();
    let rows: Vec<Vec<String>> = names.iter().zip(spreads).map(|(n, s)| vec![n.to_string(), fmt_num(s)]).collect();
    dir.table("constants_spread", &strs(&["constant", "max_over_min"]), &rows, true)?;
    for (i, n) in names.iter().enumerate() {
        if matches!(*n, "coercivity" | "n_upper" | "trilinear") {
            dir.check(&format!("constant_stability[{n}]"), spreads[i] <= CONSTANT_SPREAD, format!("max/min {:.4} (limit {CONSTANT_SPREAD})", spreads[i]));
        }
    }
    Ok(())
}
