//! Headline studies: Λ calibration and the grazing-limit rate, the toy decay
//! transition, the b_ε envelope sweep, and recorded empirical constants.

pub mod constants;
pub mod identities;
pub mod limit;
pub mod toy;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisSpec, HermiteCoeffs};
use crate::error::{Error, Result};
use crate::report::fmt_num;

pub use constants::{empirical_constants, ConstantsReport, ConstantsRow};
pub use limit::{calibrate_lambda, limit_scan, Calibration, LimitInputs, LimitMode, SlopeReport};
pub use toy::{b_lower_bound_sweep, default_sweep_grids, toy_norm, toy_run, toy_times, SweepReport, ToyRun};

/// The one generator behind every seeded sample.
pub const RNG_NAME: &str = "ChaCha8Rng";
/// Seed of the published test functions.
pub const TEST_FUNCTION_SEED: u64 = 20_240_917;
pub const TEST_FUNCTION_COUNT: usize = 8;
pub const TEST_FUNCTION_DEGREE: usize = 3;

const PUBLISHED: &str = include_str!("../../data/test_functions.csv");

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Coefficients uniform in [−1, 1], normalized to unit L².
pub fn random_unit(spec: &BasisSpec, r: &mut ChaCha8Rng) -> HermiteCoeffs {
    let mut c: Vec<f64> = (0..spec.dim()).map(|_| r.gen_range(-1.0..=1.0)).collect();
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= n);
    HermiteCoeffs::from_vec(spec, c)
}

/// Regenerates the published test functions.
pub fn generate_test_functions(seed: u64, count: usize) -> Vec<HermiteCoeffs> {
    let spec = BasisSpec::new(TEST_FUNCTION_DEGREE);
    let mut r = rng(seed, 0);
    (0..count).map(|_| random_unit(&spec, &mut r)).collect()
}

/// Long-format CSV: function, a0, a1, a2, coeff.
pub fn write_test_functions<W: std::io::Write>(w: W, fs: &[HermiteCoeffs]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    out.write_record(["function", "a0", "a1", "a2", "coeff"]).map_err(io)?;
    for (i, f) in fs.iter().enumerate() {
        for (j, c) in f.coeffs.iter().enumerate() {
            let a = f.spec.alpha(j);
            out.write_record([i.to_string(), a[0].to_string(), a[1].to_string(), a[2].to_string(), fmt_num(*c)]).map_err(io)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_test_functions<R: std::io::Read>(r: R) -> Result<Vec<HermiteCoeffs>> {
    let spec = BasisSpec::new(TEST_FUNCTION_DEGREE);
    let mut rd = csv::Reader::from_reader(r);
    let mut out: Vec<HermiteCoeffs> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Domain(format!("test function file: {e}")))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Domain(format!("test function file: short record {rec:?}")));
        let parse_u = |i: usize| -> Result<usize> { field(i)?.parse().map_err(|e| Error::Domain(format!("test function file: {e}"))) };
        let id = parse_u(0)?;
        let a = [parse_u(1)?, parse_u(2)?, parse_u(3)?];
        let c: f64 = field(4)?.parse().map_err(|e| Error::Domain(format!("test function file: {e}")))?;
        let j = spec.index(a).ok_or_else(|| Error::Domain(format!("test function file: index {a:?} above degree {}", spec.k)))?;
        while out.len() <= id {
            out.push(HermiteCoeffs::zeros(&spec));
        }
        out[id].coeffs[j] = c;
    }
    Ok(out)
}

/// The test functions shipped in `data/test_functions.csv`.
pub fn published_test_functions() -> Vec<HermiteCoeffs> {
    read_test_functions(PUBLISHED.as_bytes()).expect("published test functions parse")
}

/// Disjoint pairs (f₀, f₁), (f₂, f₃), ...
pub fn published_pairs() -> Vec<(HermiteCoeffs, HermiteCoeffs)> {
    let fs = published_test_functions();
    fs.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

/// Least-squares line y ≈ a + b x with its R².
pub(crate) fn fit_with_r2(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (a, b, rms, _) = crate::dynamics::line_fit(x, y);
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / n;
    let r2 = if var > 0.0 { 1.0 - rms * rms / var } else { 1.0 };
    (a, b, r2)
}
