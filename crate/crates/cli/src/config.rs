//! Per-command key schema, `key = value` config files, and the resolved run
//! configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::RunError;

pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, default, help }
}

/// Keys every command accepts.
pub const RUN_KEYS: &[Key] = &[
    key("out", Some("grazelab-out"), "output directory"),
    key("format", Some("csv"), "output formats: csv or csv,svg"),
    key("threads", Some("0"), "worker threads (0 = logical cores)"),
    key("seed", Some("1"), "seed of the ChaCha8 generator"),
];

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "validate",
        about: "Kernel identity suite: order-2 integral, symbol, lambda_e, null space",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.1"), "grazing parameter(s), comma separated"),
            key("K", Some("8"), "Hermite degree of the assembled operator"),
        ],
    },
    CommandSpec {
        name: "symbol",
        about: "Quadrature angular symbol against its closed form",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.1"), "grazing parameter(s)"),
            key("xi", None, "|xi| values (default 1, 5, 1/eps, 2/eps, 5/eps)"),
        ],
    },
    CommandSpec {
        name: "gap",
        about: "Smallest eigenvalue on the micro space across eps, plus the Landau row",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.3,0.1,0.03,0.01"), "grazing parameters"),
            key("K", Some("8"), "Hermite degree"),
            key("lambda_landau", Some("3.141592653589793"), "Landau prefactor"),
        ],
    },
    CommandSpec {
        name: "limit",
        about: "Grazing-limit error scans and their log-log slopes",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.2,0.1,0.05,0.025"), "grazing parameters, strictly decreasing"),
            key("K", Some("8"), "Hermite degree for matrix and semigroup modes"),
            key("mode", Some("operator,matrix,semigroup"), "scan modes"),
            key("horizon", Some("5"), "semigroup horizon T"),
            key("lambda_landau", None, "Landau prefactor (calibrated when absent)"),
            key("calibration_eps", Some("0.01"), "eps used to calibrate the Landau prefactor"),
        ],
    },
    CommandSpec {
        name: "decay",
        about: "Linear decay trace of one Fourier mode and its envelope fit",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.1"), "grazing parameter"),
            key("K", Some("8"), "Hermite degree"),
            key("generator", Some("boltzmann"), "boltzmann or landau"),
            key("wavevector", Some("0,0,0"), "integer Fourier mode k"),
            key("horizon", None, "final time (default 10 T_eps)"),
            key("lambda_landau", Some("3.141592653589793"), "Landau prefactor"),
        ],
    },
    CommandSpec {
        name: "toy",
        about: "Exactly solvable toy decay, its envelope fit, and the b_eps sweep",
        keys: &[
            key("gamma", Some("-2"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.1"), "grazing parameter(s)"),
            key("lambda", Some("0.05"), "toy collision rate"),
            key("q", Some("0.2"), "initial profile rate, needs q > 2 lambda"),
            key("theta", Some("1"), "initial profile exponent in (0, 2]"),
        ],
    },
    CommandSpec {
        name: "calibrate-lambda",
        about: "Least-squares Landau prefactor from the published test pairs",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.01,0.003"), "grazing parameters, each <= 0.01"),
            key("output_degree", Some("8"), "Hermite degree of the projected output"),
        ],
    },
    CommandSpec {
        name: "constants",
        about: "Empirical coercivity, N-functional and trilinear constants",
        keys: &[
            key("gamma", Some("-1"), "kinetic exponent"),
            key("s", Some("0.75"), "angular singularity"),
            key("eps", Some("0.3,0.1,0.03"), "grazing parameters"),
            key("K", Some("6,8"), "Hermite degrees"),
            key("samples", Some("100"), "random functions per degree"),
            key("triples", Some("200"), "random triples per degree"),
        ],
    },
];

pub fn command(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, RunError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| RunError::Usage(format!("config line {}: expected 'key = value', got '{}'", i + 1, raw.trim())))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(RunError::Usage(format!("config line {}: empty key or value", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("--config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Fully resolved key → value map of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(spec: &'static CommandSpec, file: &[(String, String)], flags: &[(String, String)]) -> Result<RunConfig, RunError> {
        let known = |k: &str| spec.keys.iter().chain(RUN_KEYS).any(|x| x.name == k);
        let mut values = BTreeMap::new();
        for k in spec.keys.iter().chain(RUN_KEYS) {
            if let Some(d) = k.default {
                values.insert(k.name.to_string(), d.to_string());
            }
        }
        for (k, v) in file {
            if !known(k) {
                return Err(RunError::Usage(format!("config key '{k}' is not accepted by '{}'", spec.name)));
            }
            values.insert(k.clone(), v.clone());
        }
        for (k, v) in flags {
            values.insert(k.clone(), v.clone());
        }
        Ok(RunConfig { command: spec.name, values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, RunError> {
        self.get(key).ok_or_else(|| RunError::Usage(format!("--{key} is required")))
    }

    fn bad(key: &str, v: &str, what: &str) -> RunError {
        RunError::Usage(format!("--{key}: cannot parse '{v}' as {what}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, RunError> {
        let v = self.required(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "a number"))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, RunError> {
        self.get(key).map(|v| v.parse().map_err(|_| Self::bad(key, v, "a number"))).transpose()
    }

    pub fn usize(&self, key: &str) -> Result<usize, RunError> {
        let v = self.required(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "a nonnegative integer"))
    }

    pub fn u64(&self, key: &str) -> Result<u64, RunError> {
        let v = self.required(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "a nonnegative integer"))
    }

    pub fn str_list(&self, key: &str) -> Result<Vec<String>, RunError> {
        let v = self.required(key)?;
        let items: Vec<String> = v.split(',').map(|x| x.trim().to_string()).collect();
        if items.iter().any(|x| x.is_empty()) {
            return Err(Self::bad(key, v, "a comma-separated list"));
        }
        Ok(items)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, RunError> {
        let v = self.required(key)?;
        self.str_list(key)?.iter().map(|x| x.parse().map_err(|_| Self::bad(key, v, "a list of numbers"))).collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, RunError> {
        let v = self.required(key)?;
        self.str_list(key)?.iter().map(|x| x.parse().map_err(|_| Self::bad(key, v, "a list of integers"))).collect()
    }

    /// `key = value` lines, reusable as `--config`.
    pub fn to_config_text(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(x: &[(&str, &str)]) -> Vec<(String, String)> {
        x.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn grammar() {
        let got = parse_config_text("# header\n gamma = -2  # trailing\n\neps=0.1,0.01\n").unwrap();
        assert_eq!(got, pairs(&[("gamma", "-2"), ("eps", "0.1,0.01")]));
        assert!(parse_config_text("gamma -2\n").is_err());
        assert!(parse_config_text("gamma =\n").is_err());
    }

    #[test]
    fn precedence_and_unknown_keys() {
        let spec = command("toy").unwrap();
        let cfg = RunConfig::resolve(spec, &pairs(&[("q", "0.3"), ("lambda", "0.1")]), &pairs(&[("q", "0.4")])).unwrap();
        assert_eq!(cfg.get("q"), Some("0.4"));
        assert_eq!(cfg.get("lambda"), Some("0.1"));
        assert_eq!(cfg.get("gamma"), Some("-2"));
        assert!(RunConfig::resolve(spec, &pairs(&[("K", "8")]), &[]).is_err());
    }

    #[test]
    fn typed_access() {
        let spec = command("limit").unwrap();
        let cfg = RunConfig::resolve(spec, &[], &pairs(&[("eps", "0.2, 0.1"), ("K", "x")])).unwrap();
        assert_eq!(cfg.f64_list("eps").unwrap(), vec![0.2, 0.1]);
        assert!(cfg.usize("K").unwrap_err().to_string().contains("--K"));
        assert_eq!(cfg.opt_f64("lambda_landau").unwrap(), None);
        let text = cfg.to_config_text();
        let again = RunConfig::resolve(spec, &parse_config_text(&text).unwrap(), &[]).unwrap();
        assert_eq!(again.values, cfg.values);
    }
}
