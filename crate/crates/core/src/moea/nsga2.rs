//! NSGA-II: binary tournament on (rank, crowding), SBX and polynomial
//! mutation, and (mu + lambda) survival by fronts then crowding distance.

use std::cmp::Ordering;

use super::pareto::{crowding_distance, fast_nondominated_sort};
use super::{Engine, Individual, Observer};
use crate::error::Result;

/// Assigns `rank` and `crowding` to every member.
pub fn assign_rank_and_crowding(population: &mut [Individual]) -> Vec<Vec<usize>> {
    let costs: Vec<&[f64]> = population.iter().map(|i| i.costs.as_slice()).collect();
    let fronts = fast_nondominated_sort(&costs);
    for (rank, front) in fronts.iter().enumerate() {
        let points: Vec<&[f64]> = front
            .iter()
            .map(|&i| population[i].costs.as_slice())
            .collect();
        let distances = crowding_distance(&points);
        for (&i, d) in front.iter().zip(distances) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
    fronts
}

/// Lower rank first, then larger crowding distance.
pub fn crowded_comparison(a: &Individual, b: &Individual) -> Ordering {
    a.rank
        .cmp(&b.rank)
        .then_with(|| b.crowding.total_cmp(&a.crowding))
}

/// Keeps the best `size` members by fronts, splitting the last front by
/// crowding distance.
pub fn survival(mut merged: Vec<Individual>, size: usize) -> Vec<Individual> {
    let fronts = assign_rank_and_crowding(&mut merged);
    let mut keep: Vec<usize> = Vec::with_capacity(size);
    for front in fronts {
        if keep.len() + front.len() <= size {
            keep.extend(front);
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| {
                merged[b]
                    .crowding
                    .total_cmp(&merged[a].crowding)
                    .then(a.cmp(&b))
            });
            last.truncate(size - keep.len());
            keep.extend(last);
        }
        if keep.len() == size {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| slots[i].take().expect("index kept twice"))
        .collect()
}

pub(crate) fn run(engine: &mut Engine<'_>, observer: &mut Observer<'_>) -> Result<Vec<Individual>> {
    let size = engine.config.population_size;
    let mut population = engine.initial_population()?;
    assign_rank_and_crowding(&mut population);
    observer(0, &population);

    for generation in 1..=engine.config.generations {
        let mut genomes = Vec::with_capacity(size + 1);
        while genomes.len() < size {
            let a = engine.tournament(size, |x, y| {
                crowded_comparison(&population[x], &population[y])
            });
            let b = engine.tournament(size, |x, y| {
                crowded_comparison(&population[x], &population[y])
            });
            let (c1, c2) = engine.variation(&population[a].genes, &population[b].genes);
            genomes.push(c1);
            genomes.push(c2);
        }
        genomes.truncate(size);
        let offspring = engine.evaluate(genomes)?;
        population.extend(offspring);
        population = survival(population, size);
        observer(generation, &population);
    }
    Ok(population)
}
