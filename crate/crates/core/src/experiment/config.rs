use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moea::{Algorithm, MoeaConfig, MutationParams, SbxParams, TaxProblem};
use crate::society::SimulationConfig;
use crate::values::ObjectiveSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Equality and Fairness.
    #[default]
    #[serde(alias = "two_objectives")]
    Two,
    /// All five values.
    #[serde(alias = "five_objectives")]
    Five,
}

impl ProblemKind {
    pub fn objectives(self) -> ObjectiveSet {
        match self {
            ProblemKind::Two => ObjectiveSet::two(),
            ProblemKind::Five => ObjectiveSet::five(),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Two => "two",
            ProblemKind::Five => "five",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two" | "2" | "two_objectives" => Ok(ProblemKind::Two),
            "five" | "5" | "five_objectives" => Ok(ProblemKind::Five),
            _ => Err(Error::Config(format!(
                "unknown problem {s:?} (expected two or five)"
            ))),
        }
    }
}

/// Everything a batch needs. Missing keys take the defaults below, which
/// reproduce the reference setup: 30 runs of each algorithm, 500
/// generations, populations of 100 (two objectives) or 210 (five), SBX and
/// polynomial mutation with index 20, crossover probability 0.9, mutation
/// probability 1/12, MOEA/DD with a neighborhood of 10, one replacement
/// and local mating probability 0.9, and a 5000-path re-evaluation of
/// every reported solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    /// Overrides the per-problem default population.
    pub population_size: Option<usize>,
    pub generations: usize,
    pub crossover: SbxParams,
    pub mutation: MutationParams,
    pub neighborhood_size: usize,
    pub replacement_limit: usize,
    pub neighborhood_probability: f64,
    /// Simulated paths per fitness evaluation during evolution.
    pub eval_samples: usize,
    /// Simulated paths per evaluation of reported solutions.
    pub reeval_samples: usize,
    pub simulation: SimulationConfig,
    pub master_seed: u64,
    /// Worker threads; all available cores when absent.
    pub jobs: Option<usize>,
    /// Voters in an election.
    pub voters: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemKind::Two,
            algorithms: Algorithm::ALL.to_vec(),
            runs: 30,
            population_size: None,
            generations: 500,
            crossover: SbxParams::default(),
            mutation: MutationParams::default(),
            neighborhood_size: 10,
            replacement_limit: 1,
            neighborhood_probability: 0.9,
            eval_samples: 1,
            reeval_samples: 5000,
            simulation: SimulationConfig::default(),
            master_seed: 0,
            jobs: None,
            voters: 200,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn objectives(&self) -> ObjectiveSet {
        self.problem.objectives()
    }

    pub fn population(&self) -> usize {
        self.population_size
            .unwrap_or_else(|| MoeaConfig::default_population(self.objectives().len()))
    }

    pub fn moea_config(&self, algorithm: Algorithm, seed: u64) -> MoeaConfig {
        MoeaConfig {
            algorithm,
            population_size: self.population(),
            generations: self.generations,
            crossover: self.crossover,
            mutation: self.mutation,
            neighborhood_size: self.neighborhood_size,
            replacement_limit: self.replacement_limit,
            neighborhood_probability: self.neighborhood_probability,
            seed,
        }
    }

    pub fn tax_problem(&self) -> TaxProblem {
        TaxProblem {
            simulation: self.simulation.clone(),
            objectives: self.objectives(),
            eval_samples: self.eval_samples,
            final_samples: self.reeval_samples,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return Err(Error::Config(format!("algorithm {a} listed twice")));
            }
        }
        if self.eval_samples == 0 || self.reeval_samples == 0 {
            return Err(Error::Config("sample counts must be at least 1".into()));
        }
        if self.voters == 0 {
            return Err(Error::Config("voters must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        self.simulation.validate()?;
        let m = self.objectives().len();
        for &a in &self.algorithms {
            self.moea_config(a, 0).validate(m)?;
        }
        Ok(())
    }

    /// The configuration with the population size filled in.
    pub fn resolved(&self) -> Self {
        ExperimentConfig {
            population_size: Some(self.population()),
            ..self.clone()
        }
    }
}
