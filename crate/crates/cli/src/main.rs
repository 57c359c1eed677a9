//! `grazelab` command-line runner.

mod commands;
mod config;
mod emit;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

use config::{RunConfig, COMMANDS, RUN_KEYS};
use emit::RunDir;

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    /// Rejected inputs or a failed identity suite.
    Validation(String),
    /// Numerical failure or a failed acceptance line.
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Validation(m) => write!(f, "validation failure: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl RunError {
    fn code(&self) -> u8 {
        match self {
            RunError::Usage(_) | RunError::Io(_) => 1,
            RunError::Validation(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl From<grazelab::Error> for RunError {
    fn from(e: grazelab::Error) -> Self {
        use grazelab::Error as E;
        match e {
            E::ConstraintViolation(_) | E::Domain(_) | E::DegreeTooLow { .. } | E::Dimension(_) => RunError::Validation(e.to_string()),
            E::Io(err) => RunError::Io(err.to_string()),
            other => RunError::Numerical(other.to_string()),
        }
    }
}

fn cli() -> Command {
    let mut app = Command::new("grazelab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Grazing-collision Boltzmann and Landau operators in a Hermite basis")
        .subcommand_required(true)
        .arg(Arg::new("verbose").short('v').long("verbose").action(ArgAction::SetTrue).global(true).help("log progress to stderr"));
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about).allow_negative_numbers(true);
        sub = sub.arg(Arg::new("config").long("config").value_name("PATH").help("key = value file; flags override it"));
        for k in spec.keys.iter().chain(RUN_KEYS) {
            let help = match k.default {
                Some(d) => format!("{} [default: {d}]", k.help),
                None => k.help.to_string(),
            };
            sub = sub.arg(Arg::new(k.name).long(k.name).value_name("VALUE").allow_negative_numbers(true).help(help));
        }
        app = app.subcommand(sub);
    }
    app
}

fn execute(args: Vec<String>) -> Result<(), RunError> {
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(()),
                _ => Err(RunError::Usage("see --help".into())),
            };
        }
    };
    let level = if matches.get_flag("verbose") { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let spec = config::command(name).expect("registered command");
    let file = match sub.get_one::<String>("config") {
        Some(p) => config::read_config(&PathBuf::from(p))?,
        None => Vec::new(),
    };
    let flags: Vec<(String, String)> = spec.keys.iter().chain(RUN_KEYS).filter_map(|k| sub.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone()))).collect();
    let mut cfg = RunConfig::resolve(spec, &file, &flags)?;

    let threads = cfg.usize("threads")?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| RunError::Usage(format!("--threads: {e}")))?;
    cfg.u64("seed")?;
    let out = PathBuf::from(cfg.get("out").unwrap_or("grazelab-out"));
    let mut dir = RunDir::create(&out, &cfg.str_list("format")?)?;

    let result = commands::run(&mut cfg, &mut dir);
    dir.finish(&cfg)?;
    result?;
    if dir.failed().is_empty() {
        Ok(())
    } else {
        Err(RunError::Numerical(format!("acceptance lines failed: {}", dir.failed().join(", "))))
    }
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grazelab: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_surface_is_consistent() {
        cli().debug_assert();
    }

    #[test]
    fn usage_errors_map_to_one() {
        let a = |x: &[&str]| execute(x.iter().map(|s| s.to_string()).collect());
        assert_eq!(a(&["grazelab", "nope"]).unwrap_err().code(), 1);
        assert_eq!(a(&["grazelab", "toy", "--K", "3"]).unwrap_err().code(), 1);
        assert!(a(&["grazelab", "--help"]).is_ok());
    }
}
