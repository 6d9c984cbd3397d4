//! Config-driven experiment execution.
//!
//! Jobs run on a bounded worker pool and results merge by job index, so
//! identical configs produce byte-identical artifacts regardless of the
//! worker count. All artifacts are produced in memory first; timing goes
//! to stderr only, never into the files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use mobius_lab::analyzer::mobius_average;
use mobius_lab::arithmetic::MobiusTable;
use mobius_lab::{Error, Result};

use crate::checks::CheckOutcome;
use crate::config::{job_seed, ExperimentConfig};

#[derive(Debug, Clone, Serialize)]
pub struct JobSummary {
    pub name: String,
    pub system: String,
    pub function: String,
    pub points: Vec<String>,
    pub final_values: Vec<f64>,
    pub checks: Vec<CheckVerdict>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdict {
    pub check: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub sieve_limit: u64,
    pub seed: u64,
    pub jobs: Vec<JobSummary>,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

/// In-memory run result: file name → bytes, plus the overall verdict.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub files: BTreeMap<String, Vec<u8>>,
    pub summary: Summary,
}

impl RunArtifacts {
    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }
}

/// Execute every job and check of the config on `workers` threads.
pub fn execute(config: &ExperimentConfig) -> Result<RunArtifacts> {
    execute_with_table(config, None)
}

/// Same as [`execute`], reusing a preloaded μ/λ table (e.g. from a binary
/// dump) instead of re-sieving, provided it covers the configured range.
pub fn execute_with_table(
    config: &ExperimentConfig,
    preloaded: Option<Arc<MobiusTable>>,
) -> Result<RunArtifacts> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;

    let table = match preloaded {
        Some(table) => {
            if table.limit() < config.sieve_limit {
                return Err(Error::InvalidArgument(format!(
                    "preloaded table covers only {} < sieve_limit {}",
                    table.limit(),
                    config.sieve_limit
                )));
            }
            table
        }
        None => Arc::new(MobiusTable::sieve(config.sieve_limit)?),
    };

    let job_results: Vec<Result<(String, Vec<u8>, JobSummary)>> = pool.install(|| {
        config
            .jobs
            .par_iter()
            .enumerate()
            .map(|(index, job)| run_job(config, &table, index, job))
            .collect()
    });

    let check_results: Vec<Result<CheckOutcome>> =
        pool.install(|| config.checks.par_iter().map(|check| check.run()).collect());

    let mut files = BTreeMap::new();
    let mut jobs = Vec::new();
    let mut all_passed = true;
    for result in job_results {
        let (file_name, bytes, summary) = result?;
        all_passed &= summary.passed;
        files.insert(file_name, bytes);
        jobs.push(summary);
    }
    let mut checks = Vec::new();
    for result in check_results {
        let outcome = result?;
        all_passed &= outcome.passed;
        checks.push(outcome);
    }

    let summary = Summary {
        sieve_limit: config.sieve_limit,
        seed: config.seed,
        jobs,
        checks,
        all_passed,
    };
    let summary_bytes = serde_json::to_vec_pretty(&summary)
        .map_err(|e| Error::Io(format!("summary serialization: {e}")))?;
    files.insert("summary.json".to_string(), summary_bytes);

    Ok(RunArtifacts { files, summary })
}

fn run_job(
    config: &ExperimentConfig,
    table: &Arc<MobiusTable>,
    index: usize,
    job: &crate::config::JobConfig,
) -> Result<(String, Vec<u8>, JobSummary)> {
    let sys = job.system.build()?;
    let phi = job.function.build(&sys)?;
    let seed = job_seed(config.seed, index);
    let points = job.point.resolve(&sys, seed)?;
    let checkpoints = job
        .checkpoints
        .clone()
        .unwrap_or_else(|| config.checkpoints.clone());

    let mut csv = String::new();
    let mut final_values = Vec::new();
    let mut point_names = Vec::new();
    let mut passed = true;
    let mut verdicts = Vec::new();

    for (i, x) in points.iter().enumerate() {
        let report = mobius_average(table, &sys, x, &phi, &checkpoints)?;
        if i == 0 {
            csv.push_str(&report.to_csv(&job.name));
        } else {
            // Skip the duplicate header for subsequent points.
            let body = report.to_csv(&job.name);
            csv.push_str(body.split_once('\n').map(|(_, b)| b).unwrap_or(""));
        }
        final_values.push(report.final_value());
        point_names.push(report.point.clone());
        for check in &job.checks {
            let ok = check.evaluate(&report);
            passed &= ok;
            verdicts.push(CheckVerdict {
                check: format!("{}[{}]", check.describe(), report.point),
                passed: ok,
            });
        }
    }

    let summary = JobSummary {
        name: job.name.clone(),
        system: sys.descriptor(),
        function: phi.describe(),
        points: point_names,
        final_values,
        checks: verdicts,
        passed,
    };
    Ok((format!("{}.csv", job.name), csv.into_bytes(), summary))
}

/// Write the artifacts under a directory, returning the paths.
pub fn write_artifacts(dir: &Path, artifacts: &RunArtifacts) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, bytes) in &artifacts.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes)?;
        paths.push(path);
    }
    Ok(paths)
}
