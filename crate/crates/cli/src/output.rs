//! The output directory: provenance-stamped CSVs, the check table and the JSON summary.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use stefan_lab::analysis::{InequalityReport, Verdict};
use stefan_lab::io::{real, write_csv};

use crate::config::{resolved_json, Resolved};
use crate::error::CliError;

/// A check whose sides are not an estimate with a fitted constant.
pub fn plain_report(
    name: &str,
    lhs: f64,
    rhs: f64,
    verdict: Verdict,
    detail: Value,
) -> InequalityReport {
    InequalityReport {
        name: name.into(),
        lhs,
        lhs_terms: Vec::new(),
        rhs,
        rhs_terms: Vec::new(),
        fitted_constant: f64::NAN,
        refinement_series: Vec::new(),
        verdict,
        detail,
    }
}

pub struct Output {
    dir: PathBuf,
    hash: String,
    written: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path, hash: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            hash: hash.to_string(),
            written: Vec::new(),
        })
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let f = self.file(name)?;
        write_csv(f, &self.hash, header, rows)?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let f = self.file(name)?;
        serde_json::to_writer_pretty(f, value).map_err(|e| CliError::Output(e.to_string()))
    }

    /// `reports.csv` with one row per check.
    pub fn reports(&mut self, reports: &[InequalityReport]) -> Result<(), CliError> {
        let header: Vec<&str> = InequalityReport::CSV_HEADER.split(',').collect();
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.name.clone(),
                    real(r.lhs),
                    real(r.rhs),
                    real(r.fitted_constant),
                    r.verdict.to_string(),
                ]
            })
            .collect();
        self.csv("reports.csv", &header, &rows)
    }

    /// `summary.json`, echoing the resolved config; returns the exit code.
    pub fn finish(
        mut self,
        command: &str,
        resolved: &Resolved,
        reports: &[InequalityReport],
        extra: Value,
    ) -> Result<u8, CliError> {
        self.reports(reports)?;
        let failed: Vec<&str> = reports
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .map(|r| r.name.as_str())
            .collect();
        let code = if failed.is_empty() { 0 } else { 1 };
        let mut files = self.written.clone();
        files.push("summary.json".into());
        let summary = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": &self.hash,
            "config": resolved_json(&resolved.config, &resolved.constants),
            "pass": failed.is_empty(),
            "failed": failed,
            "checks": reports.iter().map(InequalityReport::json).collect::<Vec<_>>(),
            "results": extra,
            "files": files,
        });
        self.json("summary.json", &summary)?;
        for r in reports {
            println!("[{}] {}", r.verdict, r.name);
        }
        println!("wrote {}", self.dir.display());
        Ok(code)
    }
}
