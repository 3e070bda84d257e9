//! Multi-objective evolutionary optimization.
//!
//! Problems report objectives in maximization sense; the algorithms negate
//! them and minimize the resulting cost vectors. Fitness is a deterministic
//! function of the genome within a run: every genome of a run is simulated
//! under the same seed (common random numbers), so noisy simulations become
//! well-defined optimization problems and elitism stays meaningful. Seeding
//! each genome separately lets selection pick genomes for their lucky draws
//! instead of their norms; on the tax problem that collapses the front onto
//! a few points whose re-evaluated scores are far below their fitness.
//! The reported front is re-scored per genome with [`Problem::evaluate_final`].

pub mod moeadd;
pub mod mombi2;
pub mod nsga2;
pub mod operators;
pub mod pareto;
pub mod spea2;
pub mod weights;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{Front, Solution};
use crate::seed::{self, Rng};
use crate::society::{NormVector, SimulationConfig, MAX_CATCH};
use crate::values::{self, ObjectiveSet};

pub use operators::{MutationParams, SbxParams};

/// An optimization problem over a box-bounded real genome.
pub trait Problem: Sync {
    fn bounds(&self) -> &[(f64, f64)];

    fn num_objectives(&self) -> usize;

    /// Objective scores (maximization) of `genes`, deterministic in `seed`.
    fn evaluate(&self, genes: &[f64], seed: u64) -> Result<Vec<f64>>;

    /// Scores reported for the final front. Defaults to [`Problem::evaluate`].
    fn evaluate_final(&self, genes: &[f64], seed: u64) -> Result<Vec<f64>> {
        self.evaluate(genes, seed)
    }

    /// Scores assigned when evaluation hits a degenerate state.
    fn worst(&self) -> Vec<f64>;

    /// Makes `genes` feasible. The default clamps into bounds.
    fn repair(&self, genes: &mut [f64]) {
        operators::clamp(genes, self.bounds());
    }

    fn variable_names(&self) -> Vec<String> {
        (1..=self.bounds().len())
            .map(|i| format!("x_{i}"))
            .collect()
    }

    fn objective_names(&self) -> Vec<String> {
        (1..=self.num_objectives())
            .map(|i| format!("f_{i}"))
            .collect()
    }
}

/// Bounds of the twelve norm genes: collect, redistribute, catch, fine.
pub const NORM_BOUNDS: [(f64, f64); 12] = [
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, MAX_CATCH),
    (0.0, 1.0),
];

const REDISTRIBUTE: std::ops::Range<usize> = 5..10;

/// Clamps norm genes into bounds and projects the redistribute block onto
/// the simplex (uniform when it sums to zero).
pub fn repair(genes: &mut [f64]) {
    operators::clamp(genes, &NORM_BOUNDS);
    operators::project_to_simplex(&mut genes[REDISTRIBUTE]);
}

/// The tax society as an optimization problem.
#[derive(Debug, Clone)]
pub struct TaxProblem {
    pub simulation: SimulationConfig,
    pub objectives: ObjectiveSet,
    /// Monte Carlo paths per evaluation during evolution.
    pub eval_samples: usize,
    /// Monte Carlo paths per evaluation of the reported front.
    pub final_samples: usize,
}

impl TaxProblem {
    pub fn new(objectives: ObjectiveSet) -> Self {
        TaxProblem {
            simulation: SimulationConfig::default(),
            objectives,
            eval_samples: 1,
            final_samples: 5000,
        }
    }

    fn score(&self, genes: &[f64], seed: u64, samples: usize) -> Result<Vec<f64>> {
        let norms = NormVector::from_genes(genes)?;
        Ok(values::evaluate(&norms, &self.simulation, &self.objectives, samples, seed)?.scores)
    }
}

impl Problem for TaxProblem {
    fn bounds(&self) -> &[(f64, f64)] {
        &NORM_BOUNDS
    }

    fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    fn evaluate(&self, genes: &[f64], seed: u64) -> Result<Vec<f64>> {
        self.score(genes, seed, self.eval_samples)
    }

    fn evaluate_final(&self, genes: &[f64], seed: u64) -> Result<Vec<f64>> {
        self.score(genes, seed, self.final_samples)
    }

    fn worst(&self) -> Vec<f64> {
        self.objectives.worst()
    }

    fn repair(&self, genes: &mut [f64]) {
        repair(genes);
    }

    fn variable_names(&self) -> Vec<String> {
        NormVector::VARIABLE_NAMES
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn objective_names(&self) -> Vec<String> {
        self.objectives.names()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "NSGA-II")]
    Nsga2,
    #[serde(rename = "SPEA2")]
    Spea2,
    #[serde(rename = "MOEA/DD")]
    MoeaDd,
    #[serde(rename = "MOMBI2")]
    Mombi2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Nsga2,
        Algorithm::Spea2,
        Algorithm::MoeaDd,
        Algorithm::Mombi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "NSGA-II",
            Algorithm::Spea2 => "SPEA2",
            Algorithm::MoeaDd => "MOEA/DD",
            Algorithm::Mombi2 => "MOMBI2",
        }
    }

    /// Filesystem-safe identifier.
    pub fn slug(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Spea2 => "spea2",
            Algorithm::MoeaDd => "moeadd",
            Algorithm::Mombi2 => "mombi2",
        }
    }

    /// Whether the population size must match a weight lattice.
    pub fn uses_weights(self) -> bool {
        matches!(self, Algorithm::MoeaDd | Algorithm::Mombi2)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "nsgaii" | "nsga2" => Ok(Algorithm::Nsga2),
            "spea2" => Ok(Algorithm::Spea2),
            "moeadd" => Ok(Algorithm::MoeaDd),
            "mombi2" | "mombiii" => Ok(Algorithm::Mombi2),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoeaConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub generations: usize,
    pub crossover: SbxParams,
    pub mutation: MutationParams,
    /// MOEA/DD neighborhood size (delta).
    pub neighborhood_size: usize,
    /// MOEA/DD: at most this many members are replaced per offspring.
    pub replacement_limit: usize,
    /// MOEA/DD: probability of mating inside the neighborhood.
    pub neighborhood_probability: f64,
    pub seed: u64,
}

impl MoeaConfig {
    pub fn new(
        algorithm: Algorithm,
        population_size: usize,
        generations: usize,
        seed: u64,
    ) -> Self {
        MoeaConfig {
            algorithm,
            population_size,
            generations,
            crossover: SbxParams::default(),
            mutation: MutationParams::default(),
            neighborhood_size: 10,
            replacement_limit: 1,
            neighborhood_probability: 0.9,
            seed,
        }
    }

    /// Population size used for `objectives` objectives: 100 for two and
    /// 210 for five.
    pub fn default_population(objectives: usize) -> usize {
        match objectives {
            2 => 100,
            5 => 210,
            m => weights::lattice_size(m, 4).max(2),
        }
    }

    pub fn validate(&self, objectives: usize) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population size must be at least 2".into()));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.crossover.probability)
            || !unit(self.neighborhood_probability)
            || !self.mutation.probability.is_none_or(unit)
        {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        if self.crossover.eta < 0.0 || self.mutation.eta < 0.0 {
            return Err(Error::Config(
                "distribution indices must be nonnegative".into(),
            ));
        }
        if self.algorithm == Algorithm::MoeaDd
            && (self.neighborhood_size < 2 || self.replacement_limit < 1)
        {
            return Err(Error::Config(
                "MOEA/DD needs a neighborhood of at least 2 and a replacement limit of at least 1"
                    .into(),
            ));
        }
        if self.algorithm.uses_weights() {
            weights::WeightVectorSet::for_population(objectives, self.population_size)?;
        }
        Ok(())
    }
}

/// A genome with its evaluation and per-algorithm bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    /// Maximization scores as reported by the problem.
    pub objectives: Vec<f64>,
    /// Negated objectives; what the algorithms minimize.
    pub costs: Vec<f64>,
    /// Non-domination level, 0 is the best front.
    pub rank: usize,
    pub crowding: f64,
    pub strength_fitness: f64,
    pub utility: f64,
}

impl Individual {
    pub fn new(genes: Vec<f64>, objectives: Vec<f64>) -> Self {
        let costs = objectives.iter().map(|v| -v).collect();
        Individual {
            genes,
            objectives,
            costs,
            rank: 0,
            crowding: 0.0,
            strength_fitness: 0.0,
            utility: 0.0,
        }
    }
}

/// Called with the generation index (0 is the initial population) and the
/// population the algorithm treats as its elite set.
pub type Observer<'o> = dyn FnMut(usize, &[Individual]) + 'o;

/// Shared machinery of a single run.
pub(crate) struct Engine<'a> {
    pub problem: &'a dyn Problem,
    pub config: &'a MoeaConfig,
    pub rng: Rng,
    mutation_rate: f64,
}

impl<'a> Engine<'a> {
    fn new(problem: &'a dyn Problem, config: &'a MoeaConfig) -> Self {
        Engine {
            problem,
            config,
            rng: seed::rng(seed::combine(config.seed, 0x5EED)),
            mutation_rate: config.mutation.rate(problem.bounds().len()),
        }
    }

    pub fn objectives(&self) -> usize {
        self.problem.num_objectives()
    }

    pub fn evaluate(&self, genomes: Vec<Vec<f64>>) -> Result<Vec<Individual>> {
        let problem = self.problem;
        let eval_seed = seed::combine(self.config.seed, EVAL_SALT);
        genomes
            .into_par_iter()
            .map(|genes| {
                let scores = match problem.evaluate(&genes, eval_seed) {
                    Ok(s) => s,
                    Err(Error::Degenerate(_)) => problem.worst(),
                    Err(e) => return Err(e),
                };
                Ok(Individual::new(genes, scores))
            })
            .collect()
    }

    pub fn initial_population(&mut self) -> Result<Vec<Individual>> {
        let genomes = (0..self.config.population_size)
            .map(|_| {
                let mut genes: Vec<f64> = self
                    .problem
                    .bounds()
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * self.rng.random::<f64>())
                    .collect();
                self.problem.repair(&mut genes);
                genes
            })
            .collect();
        self.evaluate(genomes)
    }

    /// Crossover, mutation and repair of one parent pair.
    pub fn variation(&mut self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let bounds = self.problem.bounds();
        let (mut c1, mut c2) =
            operators::sbx_crossover(a, b, bounds, self.config.crossover, &mut self.rng);
        for child in [&mut c1, &mut c2] {
            operators::polynomial_mutation(
                child,
                bounds,
                self.config.mutation.eta,
                self.mutation_rate,
                &mut self.rng,
            );
            self.problem.repair(child);
        }
        (c1, c2)
    }

    /// Binary tournament over `0..n`; `better(a, b)` orders candidates and
    /// exact ties are settled by a coin flip.
    pub fn tournament(
        &mut self,
        n: usize,
        mut compare: impl FnMut(usize, usize) -> std::cmp::Ordering,
    ) -> usize {
        let a = self.rng.random_range(0..n);
        let b = if n > 1 {
            let b = self.rng.random_range(0..n - 1);
            if b >= a {
                b + 1
            } else {
                b
            }
        } else {
            a
        };
        match compare(a, b) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if self.rng.random::<bool>() {
                    a
                } else {
                    b
                }
            }
        }
    }
}

/// Runs the configured algorithm and returns its final population (the
/// archive for SPEA2).
pub fn run(
    problem: &dyn Problem,
    config: &MoeaConfig,
    observer: Option<&mut Observer<'_>>,
) -> Result<Vec<Individual>> {
    config.validate(problem.num_objectives())?;
    let mut noop = |_: usize, _: &[Individual]| {};
    let observer: &mut Observer<'_> = match observer {
        Some(o) => o,
        None => &mut noop,
    };
    let mut engine = Engine::new(problem, config);
    match config.algorithm {
        Algorithm::Nsga2 => nsga2::run(&mut engine, observer),
        Algorithm::Spea2 => spea2::run(&mut engine, observer),
        Algorithm::MoeaDd => moeadd::run(&mut engine, observer),
        Algorithm::Mombi2 => mombi2::run(&mut engine, observer),
    }
}

const EVAL_SALT: u64 = 0xE7A1;
const FINAL_SALT: u64 = 0xF1_4A1;

/// One complete optimization run: the non-dominated members of the final
/// population, re-scored with [`Problem::evaluate_final`] and filtered
/// again, as a front in maximization sense.
pub fn evolve(problem: &dyn Problem, config: &MoeaConfig) -> Result<Front> {
    let population = run(problem, config, None)?;
    final_front(problem, config.seed, &population)
}

pub(crate) fn final_front(
    problem: &dyn Problem,
    run_seed: u64,
    population: &[Individual],
) -> Result<Front> {
    let costs: Vec<&[f64]> = population.iter().map(|i| i.costs.as_slice()).collect();
    let mut genomes: Vec<&[f64]> = Vec::new();
    for i in pareto::nondominated_indices(&costs) {
        let genes = population[i].genes.as_slice();
        if !genomes.iter().any(|g| same_bits(g, genes)) {
            genomes.push(genes);
        }
    }
    let final_seed = seed::combine(run_seed, FINAL_SALT);
    let scored: Vec<Solution> = genomes
        .into_par_iter()
        .map(|genes| {
            let objectives =
                match problem.evaluate_final(genes, seed::genome_seed(final_seed, genes)) {
                    Ok(s) => s,
                    Err(Error::Degenerate(_)) => problem.worst(),
                    Err(e) => return Err(e),
                };
            Ok(Solution {
                genes: genes.to_vec(),
                objectives,
            })
        })
        .collect::<Result<_>>()?;
    let mut front = Front::new(problem.variable_names(), problem.objective_names());
    front.solutions = crate::indicators::nondominated_solutions(scored);
    Ok(front)
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_examples() {
        let mut g = [0.5, 0.5, 0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.2, 0.2, 0.1, 0.1];
        let before = g;
        repair(&mut g);
        assert_eq!(g, before);

        let mut g = [0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.9, 0.1];
        repair(&mut g);
        assert_eq!(&g[5..10], &[0.2; 5]);
        assert_eq!(g[10], 0.5);

        let mut g = [
            -1.0, 2.0, 0.5, 0.5, 0.5, -1.0, -1.0, 0.0, 0.0, 0.0, -0.1, 1.5,
        ];
        repair(&mut g);
        assert_eq!((g[0], g[1]), (0.0, 1.0));
        assert_eq!(&g[5..10], &[0.2; 5]);
        assert_eq!((g[10], g[11]), (0.0, 1.0));
    }

    #[test]
    fn algorithm_names_parse() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(a.slug().parse::<Algorithm>().unwrap(), a);
        }
        assert!("nsga3".parse::<Algorithm>().is_err());
    }

    #[test]
    fn weight_based_algorithms_need_lattice_sizes() {
        let cfg = MoeaConfig::new(Algorithm::MoeaDd, 200, 1, 0);
        assert!(matches!(cfg.validate(5), Err(Error::Config(_))));
        let cfg = MoeaConfig::new(Algorithm::Nsga2, 200, 1, 0);
        assert!(cfg.validate(5).is_ok());
        assert_eq!(MoeaConfig::default_population(2), 100);
        assert_eq!(MoeaConfig::default_population(5), 210);
    }
}
