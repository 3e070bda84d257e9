use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normsynth::experiment::{self, ExperimentConfig, ProblemKind};
use normsynth::{Algorithm, Error, Result, VoteMode, VoteOptions};

/// Norm synthesis for an agent-based tax society.
#[derive(Parser)]
#[command(name = "normsynth", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON); missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (voter seed for `reason`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output or run directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Objective set: two (Equality, Fairness) or five.
    #[arg(long, global = true)]
    problem: Option<ProblemKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and dump the final society and its scores.
    Simulate {
        /// Norms as JSON: an object with collect, redistribute, catch and fine, or 12 genes.
        #[arg(long)]
        norms: PathBuf,
    },
    /// Run a batch of optimizations and write every run's front.
    Optimize {
        /// Comma-separated algorithms (NSGA-II, SPEA2, MOEA/DD, MOMBI2).
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<Algorithm>>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        population: Option<usize>,
        /// Simulated paths per evaluation of reported solutions.
        #[arg(long)]
        reeval_samples: Option<usize>,
    },
    /// Compute hypervolume and IGD+ per run and compare algorithms.
    Indicators,
    /// Elect one solution of a front by citizen vote.
    Reason {
        /// Front CSV to vote on.
        #[arg(long)]
        front: PathBuf,
        #[arg(long)]
        voters: Option<usize>,
        #[arg(long, default_value = "weighted")]
        mode: VoteMode,
        /// Score collect genes as 1 - collect.
        #[arg(long)]
        direction_aware: bool,
    },
    /// Write box-plot and scatter data plus a markdown summary.
    Report,
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(jobs) = common.jobs {
        config.jobs = Some(jobs);
    }
    if let Some(problem) = common.problem {
        config.problem = problem;
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<()> {
    let mut config = load_config(&cli.common)?;
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        // ignore failure: the global pool can only be configured once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let out: &Path = &config.output_dir.clone();
    match cli.command {
        Command::Simulate { norms } => {
            let norms = experiment::load_norms(&norms)?;
            let dump = experiment::simulate(
                &config.simulation,
                &norms,
                &config.objectives(),
                config.master_seed,
                out,
            )?;
            println!(
                "simulated {} steps with seed {}; wrote {} and {}",
                config.simulation.path_length,
                dump.seed,
                out.join("society.json").display(),
                out.join("objectives.csv").display()
            );
            for (name, v) in &dump.objectives {
                println!("  {name}: {v}");
            }
        }
        Command::Optimize {
            algorithms,
            runs,
            generations,
            population,
            reeval_samples,
        } => {
            if let Some(a) = algorithms {
                config.algorithms = a;
            }
            if let Some(r) = runs {
                config.runs = r;
            }
            if let Some(g) = generations {
                config.generations = g;
            }
            if population.is_some() {
                config.population_size = population;
            }
            if let Some(s) = reeval_samples {
                config.reeval_samples = s;
            }
            let summary = experiment::optimize(&config, out)?;
            println!(
                "completed {} runs ({} problem, population {}, {} generations) into {}",
                summary.manifests.len(),
                config.problem,
                config.population(),
                config.generations,
                out.display()
            );
        }
        Command::Indicators => {
            let report = experiment::compute_indicators(out)?;
            print!("{}", report.markdown());
            if !report.missing_runs.is_empty() {
                eprintln!("warning: {} runs have no front:", report.missing_runs.len());
                for p in &report.missing_runs {
                    eprintln!("  {}", p.display());
                }
            }
        }
        Command::Reason {
            front,
            voters,
            mode,
            direction_aware,
        } => {
            let voters = voters.unwrap_or(config.voters);
            let options = VoteOptions {
                mode,
                direction_aware,
            };
            let report = experiment::reason(&front, voters, config.master_seed, options)?;
            print!("{}", report.to_text());
            if cli.common.out.is_some() {
                let path = out.join("election.json");
                experiment::io::write_json(&path, &report)?;
                println!("wrote {}", path.display());
            }
        }
        Command::Report => {
            let summary = experiment::report(out)?;
            println!("{}", summary.message);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
