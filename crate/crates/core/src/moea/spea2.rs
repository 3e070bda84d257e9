//! SPEA2: strength-based fitness with k-th nearest neighbor density, an
//! external archive truncated by iterated nearest-neighbor removal, and
//! binary tournaments on fitness.

use super::pareto::dominates_min;
use super::{Engine, Individual, Observer};
use crate::error::Result;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sets `strength_fitness = R + D` on every member, where R sums the
/// strengths of an individual's dominators and `D = 1 / (sigma_k + 2)` with
/// `k = floor(sqrt(n))`. Non-dominated members end up below 1.
pub fn assign_fitness(union: &mut [Individual]) {
    let n = union.len();
    let mut dominates = vec![vec![false; n]; n];
    let mut strength = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates_min(&union[i].costs, &union[j].costs) {
                dominates[i][j] = true;
                strength[i] += 1;
            }
        }
    }
    let k = ((n as f64).sqrt() as usize).clamp(1, n.saturating_sub(1).max(1));
    for i in 0..n {
        let raw: usize = (0..n)
            .filter(|&j| dominates[j][i])
            .map(|j| strength[j])
            .sum();
        let mut d: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| distance(&union[i].costs, &union[j].costs))
            .collect();
        let sigma = if d.is_empty() {
            0.0
        } else {
            let kth = (k - 1).min(d.len() - 1);
            *d.select_nth_unstable_by(kth, f64::total_cmp).1
        };
        union[i].strength_fitness = raw as f64 + 1.0 / (sigma + 2.0);
    }
}

/// Removes members one at a time until `capacity` remain; each removal
/// takes the member whose sorted distance list to the others is
/// lexicographically smallest. Returns the kept indices in input order.
pub fn truncate(points: &[&[f64]], capacity: usize) -> Vec<usize> {
    let n = points.len();
    if n <= capacity {
        return (0..n).collect();
    }
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| distance(points[i], points[j])).collect())
        .collect();
    // sorted (distance, other) per member
    let mut lists: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| {
            let mut l: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (dist[i][j], j))
                .collect();
            l.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            l
        })
        .collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    while remaining > capacity {
        let mut victim: Option<usize> = None;
        for i in (0..n).filter(|&i| alive[i]) {
            victim = match victim {
                None => Some(i),
                Some(v) => {
                    let smaller = lists[i]
                        .iter()
                        .map(|e| e.0)
                        .partial_cmp(lists[v].iter().map(|e| e.0))
                        == Some(std::cmp::Ordering::Less);
                    Some(if smaller { i } else { v })
                }
            };
        }
        let v = victim.expect("population is non-empty");
        alive[v] = false;
        remaining -= 1;
        for (i, list) in lists.iter_mut().enumerate() {
            if alive[i] {
                if let Some(pos) = list.iter().position(|e| e.1 == v) {
                    list.remove(pos);
                }
            }
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

/// Builds the next archive of `capacity` members from the union.
pub fn environmental_selection(mut union: Vec<Individual>, capacity: usize) -> Vec<Individual> {
    assign_fitness(&mut union);
    let nondominated: Vec<usize> = (0..union.len())
        .filter(|&i| union[i].strength_fitness < 1.0)
        .collect();
    let keep: Vec<usize> = if nondominated.len() > capacity {
        let points: Vec<&[f64]> = nondominated
            .iter()
            .map(|&i| union[i].costs.as_slice())
            .collect();
        truncate(&points, capacity)
            .into_iter()
            .map(|k| nondominated[k])
            .collect()
    } else {
        let mut order: Vec<usize> = (0..union.len()).collect();
        order.sort_by(|&a, &b| {
            union[a]
                .strength_fitness
                .total_cmp(&union[b].strength_fitness)
                .then(a.cmp(&b))
        });
        order.truncate(capacity);
        order.sort_unstable();
        order
    };
    let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| slots[i].take().expect("index kept twice"))
        .collect()
}

pub(crate) fn run(engine: &mut Engine<'_>, observer: &mut Observer<'_>) -> Result<Vec<Individual>> {
    let size = engine.config.population_size;
    let mut archive = environmental_selection(engine.initial_population()?, size);
    observer(0, &archive);

    for generation in 1..=engine.config.generations {
        let n = archive.len();
        let mut genomes = Vec::with_capacity(size + 1);
        while genomes.len() < size {
            let fitness = |x: usize, y: usize| {
                archive[x]
                    .strength_fitness
                    .total_cmp(&archive[y].strength_fitness)
            };
            let a = engine.tournament(n, fitness);
            let b = engine.tournament(n, fitness);
            let (c1, c2) = engine.variation(&archive[a].genes, &archive[b].genes);
            genomes.push(c1);
            genomes.push(c2);
        }
        genomes.truncate(size);
        let mut union = archive;
        union.extend(engine.evaluate(genomes)?);
        archive = environmental_selection(union, size);
        observer(generation, &archive);
    }
    Ok(archive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(costs: &[f64]) -> Individual {
        Individual::new(vec![0.0], costs.iter().map(|c| -c).collect())
    }

    #[test]
    fn nondominated_members_have_zero_raw_fitness() {
        let mut u = vec![
            ind(&[0.0, 1.0]),
            ind(&[1.0, 0.0]),
            ind(&[1.0, 1.0]),
            ind(&[2.0, 2.0]),
        ];
        assign_fitness(&mut u);
        assert!(u[0].strength_fitness < 1.0);
        assert!(u[1].strength_fitness < 1.0);
        // strengths are 2, 2, 1, 0
        assert!(u[2].strength_fitness >= 4.0 && u[2].strength_fitness < 5.0);
        assert!(u[3].strength_fitness >= 5.0 && u[3].strength_fitness < 6.0);
    }

    #[test]
    fn truncation_removes_most_crowded() {
        let pts: Vec<Vec<f64>> = vec![
            vec![0.0, 4.0],
            vec![1.0, 3.0],
            vec![1.1, 2.9],
            vec![4.0, 0.0],
        ];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let kept = truncate(&refs, 3);
        assert_eq!(kept.len(), 3);
        assert!(kept.contains(&0) && kept.contains(&3));
    }

    #[test]
    fn archive_never_exceeds_capacity() {
        let u: Vec<Individual> = (0..30).map(|i| ind(&[i as f64, 30.0 - i as f64])).collect();
        let a = environmental_selection(u, 10);
        assert_eq!(a.len(), 10);
    }
}
