//! MOMBI2: R2-indicator ranking with achievement scalarizing utilities.
//!
//! Costs are normalized against an ideal point `z*` and a nadir estimate
//! `z_nad`. For each weight vector `w` every individual gets the utility
//! `u(x; w) = max_k w_k (f_k(x) - z*_k) / (z_nad_k - z*_k)`; sorting by
//! that utility (ties by the Euclidean norm of the normalized costs, then
//! by index) yields one ordering per weight vector. An individual's rank is
//! its best position over all orderings and its utility the smallest value
//! it reaches at that position. Survival keeps the lowest (rank, utility)
//! pairs, so the worst utilities of the last rank are discarded.
//!
//! The nadir estimate follows a variance-driven rule over a record of the
//! last [`RECORD_SIZE`] per-generation maxima `z_max`:
//!
//! 1. if the largest per-objective variance of the record exceeds
//!    [`ALPHA`], the nadir jumps to `z_max`;
//! 2. otherwise, per objective `k`:
//!    * when `z_nad_k - z*_k < EPSILON` the range has collapsed and the nadir
//!      is reset to `max(z_max_k, z*_k + EPSILON)`;
//!    * when `z_max_k > z_nad_k` the nadir is pushed out to
//!      `z_max_k + (z_max_k - z_nad_k)`;
//!    * when the record for `k` is flat and `z_max_k < z_nad_k` the nadir
//!      moves halfway towards `z_max_k`;
//!
//!    and any change to objective `k` clears the record.

use std::collections::VecDeque;

use super::weights::WeightVectorSet;
use super::{Engine, Individual, Observer};
use crate::error::Result;

pub const ALPHA: f64 = 0.5;
pub const EPSILON: f64 = 1e-3;
pub const RECORD_SIZE: usize = 5;

/// Ideal and nadir estimates in cost space.
#[derive(Debug, Clone)]
pub struct ReferencePoints {
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
    record: VecDeque<Vec<f64>>,
}

fn column_max(population: &[Individual], m: usize) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; m];
    for ind in population {
        for (o, c) in out.iter_mut().zip(&ind.costs) {
            *o = o.max(*c);
        }
    }
    out
}

impl ReferencePoints {
    pub fn new(population: &[Individual]) -> Self {
        let m = population[0].costs.len();
        let mut ideal = vec![f64::INFINITY; m];
        for ind in population {
            for (z, c) in ideal.iter_mut().zip(&ind.costs) {
                *z = z.min(*c);
            }
        }
        let nadir = column_max(population, m)
            .into_iter()
            .zip(&ideal)
            .map(|(n, z)| n.max(z + EPSILON))
            .collect();
        ReferencePoints {
            ideal,
            nadir,
            record: VecDeque::new(),
        }
    }

    fn variances(&self) -> Vec<f64> {
        let m = self.ideal.len();
        let n = self.record.len() as f64;
        (0..m)
            .map(|k| {
                let mean = self.record.iter().map(|r| r[k]).sum::<f64>() / n;
                self.record
                    .iter()
                    .map(|r| (r[k] - mean).powi(2))
                    .sum::<f64>()
                    / n
            })
            .collect()
    }

    pub fn update(&mut self, population: &[Individual]) {
        let m = self.ideal.len();
        for ind in population {
            for (z, c) in self.ideal.iter_mut().zip(&ind.costs) {
                *z = z.min(*c);
            }
        }
        let current = column_max(population, m);
        self.record.push_back(current.clone());
        if self.record.len() > RECORD_SIZE {
            self.record.pop_front();
        }
        let var = self.variances();
        if var.iter().cloned().fold(0.0, f64::max) > ALPHA {
            self.nadir = current;
        } else {
            let mut changed = false;
            for k in 0..m {
                let before = self.nadir[k];
                if self.nadir[k] - self.ideal[k] < EPSILON {
                    self.nadir[k] = current[k].max(self.ideal[k] + EPSILON);
                } else if current[k] > self.nadir[k] {
                    self.nadir[k] = current[k] + (current[k] - self.nadir[k]);
                } else if var[k] == 0.0 && current[k] < self.nadir[k] {
                    self.nadir[k] = 0.5 * (self.nadir[k] + current[k]);
                }
                changed |= self.nadir[k] != before;
            }
            if changed {
                self.record.clear();
            }
        }
        for k in 0..m {
            if self.nadir[k] - self.ideal[k] < EPSILON {
                self.nadir[k] = self.ideal[k] + EPSILON;
            }
        }
    }

    pub fn normalize(&self, costs: &[f64]) -> Vec<f64> {
        costs
            .iter()
            .zip(&self.ideal)
            .zip(&self.nadir)
            .map(|((c, z), n)| (c - z) / (n - z))
            .collect()
    }
}

/// Weighted achievement utility of normalized costs.
pub fn achievement(normalized: &[f64], weight: &[f64]) -> f64 {
    normalized
        .iter()
        .zip(weight)
        .map(|(f, w)| w * f)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Assigns `rank` and `utility` to every member from its best position
/// across the per-weight utility orderings.
pub fn r2_ranking(
    population: &mut [Individual],
    weights: &WeightVectorSet,
    refs: &ReferencePoints,
) {
    let normalized: Vec<Vec<f64>> = population
        .iter()
        .map(|i| refs.normalize(&i.costs))
        .collect();
    let norms: Vec<f64> = normalized
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    for ind in population.iter_mut() {
        ind.rank = usize::MAX;
        ind.utility = f64::INFINITY;
    }
    let mut order: Vec<usize> = (0..population.len()).collect();
    let mut utility = vec![0.0; population.len()];
    for w in &weights.vectors {
        for (u, f) in utility.iter_mut().zip(&normalized) {
            *u = achievement(f, w);
        }
        order.sort_by(|&a, &b| {
            utility[a]
                .total_cmp(&utility[b])
                .then(norms[a].total_cmp(&norms[b]))
                .then(a.cmp(&b))
        });
        for (position, &i) in order.iter().enumerate() {
            let ind = &mut population[i];
            if position < ind.rank {
                ind.rank = position;
                ind.utility = utility[i];
            } else if position == ind.rank && utility[i] < ind.utility {
                ind.utility = utility[i];
            }
        }
    }
}

fn by_rank_then_utility(a: &Individual, b: &Individual) -> std::cmp::Ordering {
    a.rank.cmp(&b.rank).then(a.utility.total_cmp(&b.utility))
}

pub(crate) fn run(engine: &mut Engine<'_>, observer: &mut Observer<'_>) -> Result<Vec<Individual>> {
    let size = engine.config.population_size;
    let weights = WeightVectorSet::for_population(engine.objectives(), size)?;
    let mut population = engine.initial_population()?;
    let mut refs = ReferencePoints::new(&population);
    r2_ranking(&mut population, &weights, &refs);
    observer(0, &population);

    for generation in 1..=engine.config.generations {
        let mut genomes = Vec::with_capacity(size + 1);
        while genomes.len() < size {
            let a = engine.tournament(size, |x, y| {
                by_rank_then_utility(&population[x], &population[y])
            });
            let b = engine.tournament(size, |x, y| {
                by_rank_then_utility(&population[x], &population[y])
            });
            let (c1, c2) = engine.variation(&population[a].genes, &population[b].genes);
            genomes.push(c1);
            genomes.push(c2);
        }
        genomes.truncate(size);
        population.extend(engine.evaluate(genomes)?);
        refs.update(&population);
        r2_ranking(&mut population, &weights, &refs);
        let mut order: Vec<usize> = (0..population.len()).collect();
        order
            .sort_by(|&a, &b| by_rank_then_utility(&population[a], &population[b]).then(a.cmp(&b)));
        order.truncate(size);
        order.sort_unstable();
        let mut slots: Vec<Option<Individual>> = population.into_iter().map(Some).collect();
        population = order
            .into_iter()
            .map(|i| slots[i].take().expect("kept once"))
            .collect();
        observer(generation, &population);
    }
    Ok(population)
}
