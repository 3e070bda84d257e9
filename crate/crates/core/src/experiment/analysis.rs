use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::io;
use super::optimize::{front_path, fronts_dir, RunManifest};
use crate::error::{Error, Result};
use crate::front::{Front, Solution};
use crate::indicators::{self, Comparison, HvMethod, IndicatorBatch};
use crate::moea::Algorithm;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunIndicators {
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub hypervolume: f64,
    /// Nonzero only for Monte Carlo estimates.
    pub hv_std_error: f64,
    pub hv_method: HvMethod,
    pub igd_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub objective_names: Vec<String>,
    /// Hypervolume reference: the worst value of each objective over every
    /// front of every algorithm.
    pub nadir: Vec<f64>,
    pub pf_known_size: usize,
    pub runs: Vec<RunIndicators>,
    /// Runs announced in `experiment.json` whose fronts are absent.
    pub missing_runs: Vec<PathBuf>,
    pub comparison: Comparison,
}

struct RunFront {
    algorithm: Algorithm,
    run: usize,
    seed: u64,
    front: Front,
}

fn run_index(name: &str) -> Option<usize> {
    name.strip_prefix("run_")?
        .strip_suffix(".csv")?
        .parse()
        .ok()
}

fn experiment_config(dir: &Path) -> Result<Option<ExperimentConfig>> {
    let path = dir.join("experiment.json");
    if path.exists() {
        io::read_json(&path).map(Some)
    } else {
        Ok(None)
    }
}

/// Front files present under `dir`, grouped per algorithm in canonical
/// algorithm order and sorted by run.
fn discover(dir: &Path) -> Result<Vec<(Algorithm, Vec<(usize, PathBuf)>)>> {
    let mut found = Vec::new();
    for algorithm in Algorithm::ALL {
        let alg_dir = fronts_dir(dir).join(algorithm.slug());
        if !alg_dir.is_dir() {
            continue;
        }
        let mut runs = Vec::new();
        for entry in std::fs::read_dir(&alg_dir).map_err(|e| Error::io(&alg_dir, e))? {
            let entry = entry.map_err(|e| Error::io(&alg_dir, e))?;
            if let Some(run) = run_index(&entry.file_name().to_string_lossy()) {
                runs.push((run, entry.path()));
            }
        }
        runs.sort();
        if !runs.is_empty() {
            found.push((algorithm, runs));
        }
    }
    Ok(found)
}

fn load_fronts(dir: &Path) -> Result<(Vec<RunFront>, Vec<PathBuf>)> {
    let config = experiment_config(dir)?;
    let found = discover(dir)?;
    let mut missing = Vec::new();
    let mut absent_algorithms = Vec::new();
    if let Some(c) = &config {
        for &a in &c.algorithms {
            let present: Vec<usize> = found
                .iter()
                .find(|(f, _)| *f == a)
                .map(|(_, runs)| runs.iter().map(|r| r.0).collect())
                .unwrap_or_default();
            let expected: Vec<PathBuf> = (0..c.runs)
                .filter(|r| !present.contains(r))
                .map(|r| front_path(dir, a, r))
                .collect();
            if present.is_empty() {
                absent_algorithms.extend(expected);
            } else {
                missing.extend(expected);
            }
        }
    }
    if !absent_algorithms.is_empty() {
        return Err(Error::MissingFronts(absent_algorithms));
    }
    if found.is_empty() {
        return Err(Error::MissingFronts(vec![fronts_dir(dir)]));
    }
    let master = config.as_ref().map_or(0, |c| c.master_seed);
    let mut fronts = Vec::new();
    for (algorithm, runs) in found {
        for (run, path) in runs {
            let front = io::read_front(&path)?;
            if front.is_empty() {
                return Err(Error::parse(&path, "front has no solutions"));
            }
            let manifest = path.with_extension("json");
            let seed = if manifest.exists() {
                io::read_json::<RunManifest>(&manifest)?.seed
            } else {
                seed::run_seed(master, algorithm.name(), run)
            };
            fronts.push(RunFront {
                algorithm,
                run,
                seed,
                front,
            });
        }
    }
    let names = &fronts[0].front.objective_names;
    if let Some(other) = fronts.iter().find(|f| &f.front.objective_names != names) {
        return Err(Error::Contract(format!(
            "{} run {} has objectives {:?}, expected {:?}",
            other.algorithm, other.run, other.front.objective_names, names
        )));
    }
    Ok((fronts, missing))
}

/// Runs the indicator pipeline over the fronts under `dir`: joins every
/// front, takes the nadir point and the known Pareto front of the union,
/// scores each run's hypervolume against the nadir and its IGD+ against
/// the known front, and compares algorithms. Writes `indicators.csv`,
/// `pf_known.csv`, `comparison.json` and `comparison.md`.
pub fn compute_indicators(dir: &Path) -> Result<IndicatorReport> {
    let (fronts, missing_runs) = load_fronts(dir)?;
    let union: Vec<Solution> = fronts
        .iter()
        .flat_map(|f| f.front.solutions.iter().cloned())
        .collect();
    let points: Vec<&[f64]> = union.iter().map(|s| s.objectives.as_slice()).collect();
    let nadir = indicators::nadir_point(&points)?;
    let mut pf_known = Front::new(
        fronts[0].front.variable_names.clone(),
        fronts[0].front.objective_names.clone(),
    );
    pf_known.solutions = indicators::nondominated_solutions(union);
    let reference = pf_known.points();

    let mut runs = Vec::with_capacity(fronts.len());
    for f in &fronts {
        let pts = f.front.points();
        let hv = indicators::hypervolume(&pts, &nadir)?;
        runs.push(RunIndicators {
            algorithm: f.algorithm,
            run: f.run,
            seed: f.seed,
            hypervolume: hv.value,
            hv_std_error: hv.std_error,
            hv_method: hv.method,
            igd_plus: indicators::igd_plus(&pts, &reference)?,
        });
    }

    let mut batches: Vec<IndicatorBatch> = Vec::new();
    for r in &runs {
        if batches
            .last()
            .is_none_or(|b| b.algorithm != r.algorithm.name())
        {
            batches.push(IndicatorBatch {
                algorithm: r.algorithm.name().to_string(),
                run_seeds: Vec::new(),
                hypervolume: Vec::new(),
                igd_plus: Vec::new(),
            });
        }
        let b = batches.last_mut().expect("pushed above");
        b.run_seeds.push(r.seed);
        b.hypervolume.push(r.hypervolume);
        b.igd_plus.push(r.igd_plus);
    }
    let comparison = indicators::compare_algorithms(&batches)?;

    let report = IndicatorReport {
        objective_names: pf_known.objective_names.clone(),
        nadir,
        pf_known_size: pf_known.len(),
        runs,
        missing_runs,
        comparison,
    };
    let header: Vec<String> = ["run", "algorithm", "hypervolume", "igd_plus"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = report.runs.iter().map(|r| {
        vec![
            r.run.to_string(),
            r.algorithm.name().to_string(),
            r.hypervolume.to_string(),
            r.igd_plus.to_string(),
        ]
    });
    io::write_atomic(&dir.join("indicators.csv"), &io::csv_bytes(&header, rows))?;
    io::write_front(&dir.join("pf_known.csv"), &pf_known)?;
    io::write_json(&dir.join("comparison.json"), &report)?;
    io::write_atomic(&dir.join("comparison.md"), report.markdown().as_bytes())?;
    Ok(report)
}

impl IndicatorReport {
    pub fn markdown(&self) -> String {
        let mut out = String::from("## Indicator comparison\n\n");
        let nadir: Vec<String> = self
            .objective_names
            .iter()
            .zip(&self.nadir)
            .map(|(n, v)| format!("{n} = {v:.6}"))
            .collect();
        out.push_str(&format!(
            "Reference (nadir) point: {}. Known front: {} solutions. \
             An algorithm is tied with the best when the Kruskal-Wallis p-value exceeds {}.\n\n",
            nadir.join(", "),
            self.pf_known_size,
            self.comparison.significance
        ));
        let estimated = self
            .runs
            .iter()
            .filter(|r| r.hv_method == HvMethod::MonteCarlo)
            .count();
        if estimated > 0 {
            out.push_str(&format!(
                "{estimated} hypervolume values are Monte Carlo estimates (see comparison.json).\n\n"
            ));
        }
        out.push_str(&self.comparison.to_markdown());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub files: Vec<PathBuf>,
    pub message: String,
}

/// Objective column groups plotted for a front with `m` objectives
/// (1-based): the value triples for five objectives, otherwise the first
/// pair.
fn scatter_groups(m: usize) -> Vec<Vec<usize>> {
    if m == 5 {
        vec![
            vec![1, 2, 3],
            vec![1, 2, 4],
            vec![1, 2, 5],
            vec![1, 4, 5],
            vec![3, 4, 5],
        ]
    } else if m >= 2 {
        vec![vec![1, 2]]
    } else {
        Vec::new()
    }
}

/// Writes plot data under `dir/report`: `boxplot.csv` (one row per
/// algorithm, run and indicator), one scatter CSV per objective group with
/// each algorithm's combined non-dominated front, and `summary.md`. A
/// directory without fronts yields an empty bundle.
pub fn report(dir: &Path) -> Result<ReportSummary> {
    if !dir.is_dir() || discover(dir)?.is_empty() {
        return Ok(ReportSummary {
            files: Vec::new(),
            message: format!("no fronts under {}; nothing to report", dir.display()),
        });
    }
    let indicators = compute_indicators(dir)?;
    let (fronts, _) = load_fronts(dir)?;
    let out = dir.join("report");
    let mut files = Vec::new();

    let header: Vec<String> = ["algorithm", "run", "indicator", "value"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = indicators.runs.iter().flat_map(|r| {
        [("hypervolume", r.hypervolume), ("igd_plus", r.igd_plus)].map(|(name, v)| {
            vec![
                r.algorithm.name().to_string(),
                r.run.to_string(),
                name.to_string(),
                v.to_string(),
            ]
        })
    });
    let path = out.join("boxplot.csv");
    io::write_atomic(&path, &io::csv_bytes(&header, rows))?;
    files.push(path);

    let mut per_algorithm: BTreeMap<usize, (Algorithm, Vec<Solution>)> = BTreeMap::new();
    for f in fronts {
        let key = Algorithm::ALL
            .iter()
            .position(|&a| a == f.algorithm)
            .unwrap_or(0);
        per_algorithm
            .entry(key)
            .or_insert_with(|| (f.algorithm, Vec::new()))
            .1
            .extend(f.front.solutions);
    }
    let combined: Vec<(Algorithm, Vec<Solution>)> = per_algorithm
        .into_values()
        .map(|(a, s)| (a, indicators::nondominated_solutions(s)))
        .collect();
    let names = &indicators.objective_names;
    for group in scatter_groups(names.len()) {
        let mut header = vec!["algorithm".to_string()];
        header.extend(group.iter().map(|&k| names[k - 1].clone()));
        let rows = combined.iter().flat_map(|(a, sols)| {
            let group = &group;
            sols.iter().map(move |s| {
                let mut row = vec![a.name().to_string()];
                row.extend(group.iter().map(|&k| s.objectives[k - 1].to_string()));
                row
            })
        });
        let suffix: Vec<String> = group.iter().map(|k| k.to_string()).collect();
        let path = out.join(format!("scatter_{}.csv", suffix.join("_")));
        io::write_atomic(&path, &io::csv_bytes(&header, rows))?;
        files.push(path);
    }

    let mut summary = String::from("# Experiment report\n\n");
    summary.push_str(&format!(
        "Objectives (numbered in scatter file names): {}.\n\n",
        names
            .iter()
            .enumerate()
            .map(|(i, n)| format!("{} {n}", i + 1))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    for (a, sols) in &combined {
        let best: Vec<String> = names
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let v = sols
                    .iter()
                    .map(|s| s.objectives[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                format!("{n} {v:.4}")
            })
            .collect();
        summary.push_str(&format!(
            "* {a}: {} non-dominated solutions over all runs; best {}\n",
            sols.len(),
            best.join(", ")
        ));
    }
    summary.push('\n');
    summary.push_str(&indicators.markdown());
    summary.push_str("Files:\n\n");
    for f in &files {
        if let Some(name) = f.file_name() {
            summary.push_str(&format!("* {}\n", name.to_string_lossy()));
        }
    }
    let path = out.join("summary.md");
    io::write_atomic(&path, summary.as_bytes())?;
    files.push(path);
    Ok(ReportSummary {
        message: format!("wrote {} files to {}", files.len(), out.display()),
        files,
    })
}
