use std::path::Path;

use normsynth::experiment::{self, io, ExperimentConfig, ProblemKind};
use normsynth::indicators;
use normsynth::society::SimulationConfig;
use normsynth::{Algorithm, VoteOptions};

fn tiny(problem: ProblemKind, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        problem,
        runs: 2,
        generations: 3,
        population_size: Some(if problem == ProblemKind::Two { 20 } else { 15 }),
        reeval_samples: 8,
        simulation: SimulationConfig {
            num_agents: 20,
            path_length: 4,
            ..SimulationConfig::default()
        },
        master_seed: seed,
        jobs: Some(2),
        ..ExperimentConfig::default()
    }
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn indicators_from_files_equal_indicators_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(ProblemKind::Two, 4);
    experiment::optimize(&config, dir.path()).unwrap();
    let report = experiment::compute_indicators(dir.path()).unwrap();

    let mut fronts = Vec::new();
    for &a in &config.algorithms {
        for r in 0..config.runs {
            fronts.push((a, r, experiment::run_one(&config, a, r).unwrap()));
        }
    }
    let union: Vec<Vec<f64>> = fronts
        .iter()
        .flat_map(|(_, _, (f, _))| f.points())
        .collect();
    let nadir = indicators::nadir_point(&union).unwrap();
    let known = indicators::nondominated_filter(&union).unwrap();
    assert_eq!(report.nadir, nadir);
    assert_eq!(report.pf_known_size, known.len());
    assert_eq!(report.runs.len(), fronts.len());
    for (row, (a, r, (front, seed))) in report.runs.iter().zip(&fronts) {
        assert_eq!((row.algorithm, row.run, row.seed), (*a, *r, *seed));
        let pts = front.points();
        assert_eq!(
            row.hypervolume,
            indicators::hypervolume_exact(&pts, &nadir).unwrap()
        );
        assert_eq!(row.igd_plus, indicators::igd_plus(&pts, &known).unwrap());
    }
    let table = report.comparison.table("hypervolume").unwrap();
    assert_eq!(table.rows.len(), 4);
}

#[test]
fn reruns_reproduce_every_csv_byte_for_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = tiny(ProblemKind::Two, 9);
    for dir in [a.path(), b.path()] {
        experiment::optimize(&config, dir).unwrap();
        experiment::report(dir).unwrap();
    }
    let mut compared = 0;
    for alg in &config.algorithms {
        for r in 0..config.runs {
            let rel = format!("fronts/{}/run_{r:03}.csv", alg.slug());
            assert_eq!(
                read(&a.path().join(&rel)),
                read(&b.path().join(&rel)),
                "{rel}"
            );
            compared += 1;
        }
    }
    for rel in [
        "indicators.csv",
        "pf_known.csv",
        "report/boxplot.csv",
        "report/scatter_1_2.csv",
    ] {
        assert_eq!(
            read(&a.path().join(rel)),
            read(&b.path().join(rel)),
            "{rel}"
        );
        compared += 1;
    }
    assert_eq!(compared, 12);
}

#[test]
fn written_outputs_read_back_through_their_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(ProblemKind::Two, 2);
    let summary = experiment::optimize(&config, dir.path()).unwrap();
    for m in &summary.manifests {
        let path = dir
            .path()
            .join("fronts")
            .join(m.algorithm.slug())
            .join(&m.front_file);
        let front = io::read_front(&path).unwrap();
        assert_eq!(front.len(), m.front_size);
        assert_eq!(front.objective_names, vec!["Equality", "Fairness"]);
        let back: experiment::RunManifest = io::read_json(&path.with_extension("json")).unwrap();
        assert_eq!(&back, m);
    }
    let resolved: ExperimentConfig = io::read_json(&dir.path().join("experiment.json")).unwrap();
    assert_eq!(resolved.population_size, Some(20));
    let report = experiment::compute_indicators(dir.path()).unwrap();
    let back: experiment::IndicatorReport =
        io::read_json(&dir.path().join("comparison.json")).unwrap();
    assert_eq!(back, report);
    io::read_front(&dir.path().join("pf_known.csv")).unwrap();
    assert!(!dir.path().join("failures.json").exists());
}

#[test]
fn two_objective_report_has_one_scatter() {
    let dir = tempfile::tempdir().unwrap();
    experiment::optimize(&tiny(ProblemKind::Two, 1), dir.path()).unwrap();
    experiment::report(dir.path()).unwrap();
    let text = String::from_utf8(read(&dir.path().join("report/scatter_1_2.csv"))).unwrap();
    assert_eq!(text.lines().next(), Some("algorithm,Equality,Fairness"));
    let scatters = std::fs::read_dir(dir.path().join("report"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("scatter")
        })
        .count();
    assert_eq!(scatters, 1);
}

#[test]
fn five_objective_report_covers_the_value_triples() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        algorithms: vec![Algorithm::Nsga2, Algorithm::MoeaDd],
        ..tiny(ProblemKind::Five, 3)
    };
    experiment::optimize(&config, dir.path()).unwrap();
    let summary = experiment::report(dir.path()).unwrap();
    for name in ["1_2_3", "1_2_4", "1_2_5", "1_4_5", "3_4_5"] {
        let path = dir.path().join(format!("report/scatter_{name}.csv"));
        assert!(summary.files.contains(&path), "{name}");
    }
    let header = String::from_utf8(read(&dir.path().join("report/scatter_1_2_4.csv"))).unwrap();
    assert!(header.starts_with("algorithm,Equality,Fairness,GainedAmount\n"));
}

#[test]
fn empty_directory_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let summary = experiment::report(dir.path()).unwrap();
    assert!(summary.files.is_empty());
    assert!(!dir.path().join("report").exists());
}

#[test]
fn elected_solution_comes_from_the_front_file() {
    let dir = tempfile::tempdir().unwrap();
    experiment::optimize(&tiny(ProblemKind::Two, 6), dir.path()).unwrap();
    let path = dir.path().join("fronts/nsga2/run_000.csv");
    let front = io::read_front(&path).unwrap();
    let e = experiment::reason(&path, 200, 5, VoteOptions::default()).unwrap();
    assert_eq!(e.norms.to_genes(), front.solutions[e.winner_index].genes);
    assert_eq!(e.tally.iter().sum::<usize>(), 200);
}
