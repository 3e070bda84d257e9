use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProblemKind};
use super::io;
use crate::error::{Error, Result};
use crate::front::Front;
use crate::moea::{self, Algorithm};
use crate::seed;

/// Metadata written next to each run's front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub problem: ProblemKind,
    pub objectives: Vec<String>,
    pub population_size: usize,
    pub generations: usize,
    pub eval_samples: usize,
    pub reeval_samples: usize,
    pub front_size: usize,
    pub front_file: String,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub out: PathBuf,
    pub manifests: Vec<RunManifest>,
}

pub(crate) fn fronts_dir(out: &Path) -> PathBuf {
    out.join("fronts")
}

pub(crate) fn front_path(out: &Path, algorithm: Algorithm, run: usize) -> PathBuf {
    fronts_dir(out)
        .join(algorithm.slug())
        .join(format!("run_{run:03}.csv"))
}

/// Runs one optimization and returns its front and seed.
pub fn run_one(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    run: usize,
) -> Result<(Front, u64)> {
    let seed = seed::run_seed(config.master_seed, algorithm.name(), run);
    let problem = config.tax_problem();
    let front = moea::evolve(&problem, &config.moea_config(algorithm, seed))?;
    Ok((front, seed))
}

fn run_and_write(
    config: &ExperimentConfig,
    out: &Path,
    algorithm: Algorithm,
    run: usize,
) -> Result<RunManifest> {
    let start = Instant::now();
    let (front, seed) = run_one(config, algorithm, run)?;
    let path = front_path(out, algorithm, run);
    io::write_front(&path, &front)?;
    let manifest = RunManifest {
        algorithm,
        run,
        seed,
        problem: config.problem,
        objectives: front.objective_names.clone(),
        population_size: config.population(),
        generations: config.generations,
        eval_samples: config.eval_samples,
        reeval_samples: config.reeval_samples,
        front_size: front.len(),
        front_file: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    io::write_json(&path.with_extension("json"), &manifest)?;
    Ok(manifest)
}

/// Executes `runs` runs of every configured algorithm on a worker pool and
/// writes each front as soon as it is done. Failed runs do not stop the
/// batch; they are listed in `failures.json` and reported as an error once
/// every other run has finished.
pub fn optimize(config: &ExperimentConfig, out: &Path) -> Result<BatchSummary> {
    config.validate()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    io::write_json(&out.join("experiment.json"), &config.resolved())?;

    let tasks: Vec<(Algorithm, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&a| (0..config.runs).map(move |r| (a, r)))
        .collect();
    let threads = config
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} workers: {e}")))?;
    let results: Vec<std::result::Result<RunManifest, String>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(a, r)| {
                run_and_write(config, out, a, r).map_err(|e| format!("{a} run {r}: {e}"))
            })
            .collect()
    });

    let mut manifests = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(m) => manifests.push(m),
            Err(e) => failures.push(e),
        }
    }
    let failures_path = out.join("failures.json");
    if failures.is_empty() {
        if failures_path.exists() {
            std::fs::remove_file(&failures_path).map_err(|e| Error::io(&failures_path, e))?;
        }
        Ok(BatchSummary {
            out: out.to_path_buf(),
            manifests,
        })
    } else {
        io::write_json(&failures_path, &failures)?;
        Err(Error::Batch {
            failed: failures.len(),
            total: tasks.len(),
            failures,
        })
    }
}
