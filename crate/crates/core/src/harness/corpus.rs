//! Run every scenario file in a directory and tabulate the verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::run::{run, ScenarioReport};
use crate::harness::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RowStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub file: String,
    pub scenario: String,
    pub status: RowStatus,
    pub min_margin: Option<f64>,
    pub checks: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub rows: Vec<CorpusRow>,
}

impl CorpusSummary {
    pub fn count(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    /// 0 when everything passed, 1 on any failed check, 2 when only errors occurred.
    pub fn exit_code(&self) -> i32 {
        if self.count(RowStatus::Fail) > 0 {
            1
        } else if self.count(RowStatus::Error) > 0 {
            2
        } else {
            0
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["file", "scenario", "status", "min_margin", "checks", "error"])?;
        for r in &self.rows {
            let status = serde_json::to_value(r.status)?;
            w.write_record([
                r.file.clone(),
                r.scenario.clone(),
                status.as_str().unwrap_or_default().to_string(),
                r.min_margin.map(|m| format!("{m:.12e}")).unwrap_or_default(),
                r.checks.to_string(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_file(path: &Path) -> Result<ScenarioReport> {
    let scenario = Scenario::from_path(path)?;
    run(&scenario.resolve()?)
}

/// Runs all `*.json` scenarios in `dir` (in parallel), writing `summary.csv` and
/// one `<stem>.report.json` per scenario into `out` when given.
pub fn corpus_run(dir: &Path, out: Option<&Path>) -> Result<CorpusSummary> {
    let files = scenario_files(dir)?;
    if let Some(out) = out {
        fs::create_dir_all(out)?;
    }
    let rows: Vec<CorpusRow> = files
        .par_iter()
        .map(|path| {
            let file = path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default();
            let result = run_file(path).and_then(|report| {
                if let Some(out) = out {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    let text = serde_json::to_string_pretty(&report)?;
                    fs::write(out.join(format!("{stem}.report.json")), text)?;
                }
                Ok(report)
            });
            match result {
                Ok(report) => CorpusRow {
                    file,
                    scenario: report.scenario.clone(),
                    status: if report.passed() {
                        RowStatus::Pass
                    } else {
                        RowStatus::Fail
                    },
                    min_margin: Some(report.min_margin),
                    checks: report.checks.len(),
                    error: None,
                },
                Err(e) => {
                    log::error!("{file}: {e}");
                    CorpusRow {
                        file,
                        scenario: String::new(),
                        status: RowStatus::Error,
                        min_margin: None,
                        checks: 0,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    let summary = CorpusSummary { rows };
    if let Some(out) = out {
        summary.write_csv(&out.join("summary.csv"))?;
    }
    Ok(summary)
}
