//! Tax-society simulation.
//!
//! A step runs, in order: snapshot of primary wealth, tax payment by
//! compliant citizens, catching and fining of evaders, interest on the
//! collected pool, redistribution of the pool by wealth group, and
//! reassignment of wealth groups.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Rng};

const SIMPLEX_TOL: f64 = 1e-9;

/// Upper bound of the catch probability.
pub const MAX_CATCH: f64 = 0.5;

/// Parametric norms imposed by the government.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormVector {
    /// Tax rate per wealth group, poorest first.
    pub collect: Vec<f64>,
    /// Share of the pool returned to each wealth group; sums to one.
    pub redistribute: Vec<f64>,
    /// Probability that an evader is caught in a step.
    pub catch: f64,
    /// Fine rate applied to the evaded tax of a caught evader.
    pub fine: f64,
}

impl NormVector {
    /// Names of the twelve decision variables of the five-group layout.
    pub const VARIABLE_NAMES: [&'static str; 12] = [
        "collect_1",
        "collect_2",
        "collect_3",
        "collect_4",
        "collect_5",
        "redistribute_1",
        "redistribute_2",
        "redistribute_3",
        "redistribute_4",
        "redistribute_5",
        "catch",
        "fine",
    ];

    /// Genome layout: `[collect.., redistribute.., catch, fine]`.
    pub fn from_genes(genes: &[f64]) -> Result<Self> {
        if genes.len() < 4 || !genes.len().is_multiple_of(2) {
            return Err(Error::Constraint(format!(
                "a norm genome needs 2*groups + 2 genes, got {}",
                genes.len()
            )));
        }
        let groups = (genes.len() - 2) / 2;
        let norms = NormVector {
            collect: genes[..groups].to_vec(),
            redistribute: genes[groups..2 * groups].to_vec(),
            catch: genes[2 * groups],
            fine: genes[2 * groups + 1],
        };
        norms.validate()?;
        Ok(norms)
    }

    pub fn to_genes(&self) -> Vec<f64> {
        let mut genes = Vec::with_capacity(2 * self.collect.len() + 2);
        genes.extend_from_slice(&self.collect);
        genes.extend_from_slice(&self.redistribute);
        genes.push(self.catch);
        genes.push(self.fine);
        genes
    }

    pub fn num_groups(&self) -> usize {
        self.collect.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.collect.is_empty() || self.collect.len() != self.redistribute.len() {
            return Err(Error::Constraint(format!(
                "collect has {} entries but redistribute has {}",
                self.collect.len(),
                self.redistribute.len()
            )));
        }
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        for (k, &c) in self.collect.iter().enumerate() {
            if !in_unit(c) {
                return Err(Error::Constraint(format!(
                    "collect_{} = {c} outside [0, 1]",
                    k + 1
                )));
            }
        }
        for (k, &r) in self.redistribute.iter().enumerate() {
            if !in_unit(r) {
                return Err(Error::Constraint(format!(
                    "redistribute_{} = {r} outside [0, 1]",
                    k + 1
                )));
            }
        }
        let sum: f64 = self.redistribute.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Constraint(format!(
                "redistribute sums to {sum}, expected 1"
            )));
        }
        if !(0.0..=MAX_CATCH).contains(&self.catch) {
            return Err(Error::Constraint(format!(
                "catch = {} outside [0, {MAX_CATCH}]",
                self.catch
            )));
        }
        if !in_unit(self.fine) {
            return Err(Error::Constraint(format!(
                "fine = {} outside [0, 1]",
                self.fine
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Citizen {
    pub wealth: f64,
    /// Wealth at the start of the current step.
    pub primary_wealth: f64,
    /// Zero-based wealth group, 0 is the poorest.
    pub group: usize,
    pub evader: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub num_agents: usize,
    pub num_groups: usize,
    pub interest_rate: f64,
    pub evader_probability: f64,
    pub path_length: usize,
    /// Bounds of the uniform initial wealth distribution.
    pub wealth_init: (f64, f64),
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            num_agents: 200,
            num_groups: 5,
            interest_rate: 0.05,
            evader_probability: 0.05,
            path_length: 10,
            wealth_init: (0.0, 100.0),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_groups == 0 || self.num_agents == 0 {
            return Err(Error::Config(
                "num_agents and num_groups must be positive".into(),
            ));
        }
        if !self.num_agents.is_multiple_of(self.num_groups) {
            return Err(Error::Config(format!(
                "num_agents ({}) is not divisible by num_groups ({})",
                self.num_agents, self.num_groups
            )));
        }
        for (name, v) in [
            ("interest_rate", self.interest_rate),
            ("evader_probability", self.evader_probability),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let (lo, hi) = self.wealth_init;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "wealth_init ({lo}, {hi}) must be a nonnegative finite range"
            )));
        }
        Ok(())
    }
}

/// World state of one simulated path.
#[derive(Debug, Clone)]
pub struct Society {
    pub citizens: Vec<Citizen>,
    pub num_groups: usize,
    pub interest_rate: f64,
    /// Redistribution pool of the most recent step, interest included.
    pub last_pool: f64,
    rng: Rng,
    /// Scratch buffer of (wealth key, citizen index) for regrouping.
    order: Vec<(i64, usize)>,
}

/// Integer key ordered like `f64::total_cmp`.
fn wealth_key(w: f64) -> i64 {
    let bits = w.to_bits() as i64;
    bits ^ (((bits >> 63) as u64) >> 1) as i64
}

/// JSON shape of a society dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SocietySnapshot {
    pub num_groups: usize,
    pub interest_rate: f64,
    pub last_pool: f64,
    pub total_wealth: f64,
    pub citizens: Vec<CitizenRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CitizenRecord {
    pub wealth: f64,
    pub pw: f64,
    /// One-based group label (g1 is the poorest).
    pub group: usize,
    pub evader: bool,
}

impl Society {
    /// Builds a society from explicit citizens; groups are (re)assigned.
    pub fn from_citizens(
        citizens: Vec<Citizen>,
        num_groups: usize,
        interest_rate: f64,
        seed: u64,
    ) -> Result<Self> {
        if num_groups == 0 || citizens.is_empty() || !citizens.len().is_multiple_of(num_groups) {
            return Err(Error::Config(format!(
                "{} citizens cannot form {num_groups} equal groups",
                citizens.len()
            )));
        }
        if let Some(c) = citizens.iter().find(|c| !(c.wealth >= 0.0)) {
            return Err(Error::Config(format!("negative wealth {}", c.wealth)));
        }
        let order = Vec::with_capacity(citizens.len());
        let mut society = Society {
            citizens,
            num_groups,
            interest_rate,
            last_pool: 0.0,
            rng: seed::rng(seed),
            order,
        };
        society.assign_groups();
        Ok(society)
    }

    pub fn total_wealth(&self) -> f64 {
        self.citizens.iter().map(|c| c.wealth).sum()
    }

    pub fn group_size(&self) -> usize {
        self.citizens.len() / self.num_groups
    }

    /// Sorts citizens by wealth (stable by index) and assigns equal-size
    /// groups from poorest to richest.
    pub fn assign_groups(&mut self) {
        self.order.clear();
        self.order.extend(
            self.citizens
                .iter()
                .enumerate()
                .map(|(i, c)| (wealth_key(c.wealth), i)),
        );
        self.order.sort_unstable();
        let size = self.group_size();
        for (rank, &(_, i)) in self.order.iter().enumerate() {
            self.citizens[i].group = rank / size;
        }
    }

    /// Advances the society by one step under `norms`.
    pub fn step(&mut self, norms: &NormVector) -> Result<()> {
        norms.validate()?;
        if norms.num_groups() != self.num_groups {
            return Err(Error::Constraint(format!(
                "norms define {} groups, society has {}",
                norms.num_groups(),
                self.num_groups
            )));
        }
        let mut pool = 0.0;
        for c in &mut self.citizens {
            c.primary_wealth = c.wealth;
        }
        for c in self.citizens.iter_mut().filter(|c| !c.evader) {
            let tax = norms.collect[c.group] * c.wealth;
            c.wealth -= tax;
            pool += tax;
        }
        for c in self.citizens.iter_mut().filter(|c| c.evader) {
            let draw: f64 = self.rng.random();
            if draw < norms.catch {
                let tax = norms.collect[c.group] * c.wealth;
                let due = (tax + norms.fine * tax).min(c.wealth);
                c.wealth -= due;
                pool += due;
            }
        }
        pool *= 1.0 + self.interest_rate;
        self.last_pool = pool;

        let per_member = pool / self.group_size() as f64;
        for c in &mut self.citizens {
            c.wealth += per_member * norms.redistribute[c.group];
        }
        self.assign_groups();
        Ok(())
    }

    pub fn snapshot(&self) -> SocietySnapshot {
        SocietySnapshot {
            num_groups: self.num_groups,
            interest_rate: self.interest_rate,
            last_pool: self.last_pool,
            total_wealth: self.total_wealth(),
            citizens: self
                .citizens
                .iter()
                .map(|c| CitizenRecord {
                    wealth: c.wealth,
                    pw: c.primary_wealth,
                    group: c.group + 1,
                    evader: c.evader,
                })
                .collect(),
        }
    }
}

/// Draws a fresh society: uniform wealths, Bernoulli evader flags,
/// quintile groups.
pub fn init_society(config: &SimulationConfig, seed: u64) -> Result<Society> {
    config.validate()?;
    let mut rng = seed::rng(seed);
    let (lo, hi) = config.wealth_init;
    let citizens = (0..config.num_agents)
        .map(|_| {
            let wealth = lo + (hi - lo) * rng.random::<f64>();
            let evader = rng.random::<f64>() < config.evader_probability;
            Citizen {
                wealth,
                primary_wealth: wealth,
                group: 0,
                evader,
            }
        })
        .collect();
    // The society's own stream continues from the initialization stream.
    let step_seed = rng.random::<u64>();
    Society::from_citizens(citizens, config.num_groups, config.interest_rate, step_seed)
}

/// Initializes a society and runs `path_length` steps. Returns the final
/// state and the final step's redistribution pool.
pub fn run_path(
    config: &SimulationConfig,
    norms: &NormVector,
    seed: u64,
) -> Result<(Society, f64)> {
    let mut society = init_society(config, seed)?;
    for _ in 0..config.path_length {
        society.step(norms)?;
    }
    let pool = society.last_pool;
    Ok((society, pool))
}
