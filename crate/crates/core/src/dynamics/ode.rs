//! Dormand–Prince 5(4) with embedded error control, for y' = F(t, y).

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> StepControl {
        StepControl { rtol: tol, atol: tol, h_min: 1e-14, max_steps: 5_000_000 }
    }
}

/// Integrate from (t0, y0) and record y at each requested time (ascending, ≥ t0).
pub fn dopri5<F: Fn(f64, &[f64], &mut [f64])>(f: F, t0: f64, y0: &[f64], outputs: &[f64], ctl: StepControl) -> Result<Vec<Vec<f64>>> {
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut out = Vec::with_capacity(outputs.len());
    let mut h = {
        f(t, &y, &mut k[0]);
        let yn = y.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let fn_ = k[0].iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        (0.01 * yn / fn_).min(1.0)
    };
    let mut steps = 0usize;
    let mut fsal = true;
    for &target in outputs {
        while t < target {
            if steps >= ctl.max_steps {
                return Err(Error::StepControlFailure { t, h });
            }
            let step = h.min(target - t);
            if !fsal {
                f(t, &y, &mut k[0]);
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for j in 0..s {
                        acc += step * A[s][j] * k[j][i];
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * step, &tmp, &mut k[s]);
            }
            // tmp now holds the 5th-order solution (row 6 of A equals B5).
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for s in 0..7 {
                    e += (B5[s] - B4[s]) * k[s][i];
                }
                let sc = ctl.atol + ctl.rtol * y[i].abs().max(tmp[i].abs());
                err += (step * e / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            steps += 1;
            if err <= 1.0 {
                t += step;
                y.copy_from_slice(&tmp);
                let (first, last) = k.split_at_mut(6);
                first[0].copy_from_slice(&last[0]);
                fsal = true;
            } else {
                fsal = false;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 || step >= h {
                h = step * fac;
            } else {
                h *= fac;
            }
            if h < ctl.h_min * (1.0 + t.abs()) {
                return Err(Error::StepControlFailure { t, h });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
