//! Run directory: CSV tables, optional SVG charts, manifest and summary.

use std::fs;
use std::path::{Path, PathBuf};

use grazelab::experiments::RNG_NAME;
use grazelab::report::CsvTable;

use crate::config::RunConfig;
use crate::svg::Chart;
use crate::RunError;

pub struct RunDir {
    pub path: PathBuf,
    svg: bool,
    files: Vec<String>,
    checks: Vec<String>,
    failed: Vec<String>,
    notes: Vec<String>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

impl RunDir {
    pub fn create(path: &Path, formats: &[String]) -> Result<RunDir, RunError> {
        let mut svg = false;
        for f in formats {
            match f.as_str() {
                "csv" => {}
                "svg" => svg = true,
                other => return Err(RunError::Usage(format!("--format: unknown format '{other}' (csv, svg)"))),
            }
        }
        fs::create_dir_all(path).map_err(|e| io(path, e))?;
        Ok(RunDir { path: path.to_path_buf(), svg, files: Vec::new(), checks: Vec::new(), failed: Vec::new(), notes: Vec::new() })
    }

    /// Writes `name.csv`; with `echo`, prints one line per record.
    pub fn table(&mut self, name: &str, header: &[String], records: &[Vec<String>], echo: bool) -> Result<(), RunError> {
        let file = format!("{name}.csv");
        let path = self.path.join(&file);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        w.write_record(header).map_err(|e| io(&path, e))?;
        for r in records {
            w.write_record(r).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        if echo {
            for r in records {
                let fields: Vec<String> = header.iter().zip(r).map(|(h, v)| format!("{h}={v}")).collect();
                println!("{name}: {}", fields.join(" "));
            }
        }
        self.files.push(file);
        Ok(())
    }

    pub fn csv<T: CsvTable>(&mut self, name: &str, t: &T, echo: bool) -> Result<(), RunError> {
        self.table(name, &t.header(), &t.records(), echo)
    }

    pub fn chart(&mut self, name: &str, chart: &Chart) -> Result<(), RunError> {
        if !self.svg {
            return Ok(());
        }
        let file = format!("{name}.svg");
        let path = self.path.join(&file);
        fs::write(&path, chart.render()).map_err(|e| io(&path, e))?;
        self.files.push(file);
        Ok(())
    }

    /// Records one acceptance line.
    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        let line = format!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        if !pass {
            self.failed.push(name.to_string());
        }
        self.checks.push(line);
    }

    /// Free-form line carried into the manifest.
    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }

    pub fn failed(&self) -> &[String] {
        &self.failed
    }

    pub fn finish(&mut self, cfg: &RunConfig) -> Result<(), RunError> {
        let mut m = String::new();
        m.push_str(&format!("# command: {}\n", cfg.command));
        m.push_str(&format!("# grazelab {}\n", env!("CARGO_PKG_VERSION")));
        m.push_str(&format!("# rng: {RNG_NAME}, seed {}\n", cfg.get("seed").unwrap_or("")));
        for n in &self.notes {
            m.push_str(&format!("# {n}\n"));
        }
        for f in &self.files {
            m.push_str(&format!("# file: {f}\n"));
        }
        m.push_str(&cfg.to_config_text());
        let path = self.path.join("manifest.txt");
        fs::write(&path, m).map_err(|e| io(&path, e))?;
        let mut s: String = self.checks.iter().map(|l| format!("{l}\n")).collect();
        if self.checks.is_empty() {
            s.push_str("no acceptance checks for this command\n");
        }
        let path = self.path.join("summary.txt");
        fs::write(&path, s).map_err(|e| io(&path, e))
    }
}
