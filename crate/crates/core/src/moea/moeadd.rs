//! MOEA/DD: dominance and decomposition.
//!
//! Every member is associated with the subregion of the weight vector
//! closest (by perpendicular distance) to its translated cost vector
//! `f - z*`. Offspring are produced one per subproblem, preferably from
//! parents living in the subproblem's neighborhood, and each offspring is
//! inserted into the population before exactly one member is removed, so at
//! most one incumbent is replaced per offspring:
//!
//! * with a single non-domination level, the worst member of the most
//!   crowded subregion goes ([`State::locate_worst`]);
//! * otherwise the last level `F_l` is examined: a lone member of `F_l` is
//!   removed unless it is the only occupant of its subregion; with several
//!   members, the most crowded subregion among theirs loses its
//!   largest-PBI member if it holds more than one solution;
//! * isolated last-level members are kept and [`State::locate_worst`]
//!   decides instead.
//!
//! Crowding ties are broken by the larger sum of PBI values of the
//! subregion's members.

use rand::Rng as _;

use super::pareto::{dominates_min, fast_nondominated_sort};
use super::weights::WeightVectorSet;
use super::{Engine, Individual, Observer};
use crate::error::Result;

/// PBI penalty.
pub const THETA: f64 = 5.0;

/// Penalty-based boundary intersection of `costs` for direction `weight`
/// relative to `ideal`: `(d1 + theta * d2, d1, d2)`.
pub fn pbi(costs: &[f64], ideal: &[f64], weight: &[f64], theta: f64) -> (f64, f64, f64) {
    let norm = weight.iter().map(|w| w * w).sum::<f64>().sqrt();
    let d1 = costs
        .iter()
        .zip(ideal)
        .zip(weight)
        .map(|((f, z), w)| (f - z) * w)
        .sum::<f64>()
        / norm;
    let d2 = costs
        .iter()
        .zip(ideal)
        .zip(weight)
        .map(|((f, z), w)| {
            let r = f - z - d1 * w / norm;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    (d1 + theta * d2, d1, d2)
}

/// Index of the weight vector with the smallest perpendicular distance to
/// `costs - ideal`.
pub fn associate(costs: &[f64], ideal: &[f64], weights: &WeightVectorSet) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (j, w) in weights.vectors.iter().enumerate() {
        let d2 = pbi(costs, ideal, w, 0.0).2;
        if d2 < best.0 {
            best = (d2, j);
        }
    }
    best.1
}

pub(crate) struct State {
    pub members: Vec<Individual>,
    pub region: Vec<usize>,
    pub level: Vec<usize>,
    pub ideal: Vec<f64>,
    weights: WeightVectorSet,
}

impl State {
    fn new(members: Vec<Individual>, weights: WeightVectorSet) -> Self {
        let m = weights.vectors[0].len();
        let mut ideal = vec![f64::INFINITY; m];
        for ind in &members {
            for (z, c) in ideal.iter_mut().zip(&ind.costs) {
                *z = z.min(*c);
            }
        }
        let mut state = State {
            members,
            region: Vec::new(),
            level: Vec::new(),
            ideal,
            weights,
        };
        state.reassociate();
        state.recompute_levels();
        state
    }

    fn reassociate(&mut self) {
        self.region = self
            .members
            .iter()
            .map(|ind| associate(&ind.costs, &self.ideal, &self.weights))
            .collect();
    }

    fn recompute_levels(&mut self) {
        let costs: Vec<&[f64]> = self.members.iter().map(|i| i.costs.as_slice()).collect();
        self.level = vec![0; costs.len()];
        for (l, front) in fast_nondominated_sort(&costs).iter().enumerate() {
            for &i in front {
                self.level[i] = l;
            }
        }
        for (ind, &l) in self.members.iter_mut().zip(&self.level) {
            ind.rank = l;
        }
    }

    pub fn niche_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.weights.len()];
        for &r in &self.region {
            counts[r] += 1;
        }
        counts
    }

    fn pbi_of(&self, i: usize) -> f64 {
        pbi(
            &self.members[i].costs,
            &self.ideal,
            &self.weights.vectors[self.region[i]],
            THETA,
        )
        .0
    }

    fn region_pbi_sum(&self, region: usize) -> f64 {
        (0..self.members.len())
            .filter(|&i| self.region[i] == region)
            .map(|i| self.pbi_of(i))
            .sum()
    }

    /// Most crowded region among `candidates`, ties to the larger PBI sum.
    fn most_crowded(&self, candidates: impl Iterator<Item = usize>, counts: &[usize]) -> usize {
        let mut best: Option<(usize, f64, usize)> = None;
        for r in candidates {
            let count = counts[r];
            best = match best {
                Some((bc, bs, br)) if count < bc => Some((bc, bs, br)),
                Some((bc, bs, br)) if count == bc => {
                    let s = self.region_pbi_sum(r);
                    if s > bs {
                        Some((count, s, r))
                    } else {
                        Some((bc, bs, br))
                    }
                }
                _ => Some((count, self.region_pbi_sum(r), r)),
            };
        }
        best.expect("at least one region").2
    }

    /// Member with the largest PBI among `candidates`.
    fn worst_pbi(&self, candidates: impl Iterator<Item = usize>) -> usize {
        candidates
            .map(|i| (self.pbi_of(i), i))
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .expect("non-empty region")
            .1
    }

    /// Worst member of the most crowded subregion: among its members on the
    /// largest non-domination level, the one with the largest PBI.
    pub fn locate_worst(&self) -> usize {
        let counts = self.niche_counts();
        let occupied = (0..counts.len()).filter(|&r| counts[r] > 0);
        let h = self.most_crowded(occupied, &counts);
        let in_h: Vec<usize> = (0..self.members.len())
            .filter(|&i| self.region[i] == h)
            .collect();
        let worst_level = in_h.iter().map(|&i| self.level[i]).max().unwrap_or(0);
        self.worst_pbi(in_h.into_iter().filter(|&i| self.level[i] == worst_level))
    }

    fn choose_victim(&self) -> usize {
        let last = *self.level.iter().max().expect("non-empty population");
        if last == 0 {
            return self.locate_worst();
        }
        let counts = self.niche_counts();
        let last_front: Vec<usize> = (0..self.members.len())
            .filter(|&i| self.level[i] == last)
            .collect();
        if let [only] = last_front[..] {
            return if counts[self.region[only]] > 1 {
                only
            } else {
                self.locate_worst()
            };
        }
        let mut regions: Vec<usize> = last_front.iter().map(|&i| self.region[i]).collect();
        regions.sort_unstable();
        regions.dedup();
        let h = self.most_crowded(regions.into_iter(), &counts);
        if counts[h] > 1 {
            self.worst_pbi((0..self.members.len()).filter(|&i| self.region[i] == h))
        } else {
            self.locate_worst()
        }
    }

    /// Inserts `child` and removes one member.
    fn insert(&mut self, child: Individual) {
        let mut ideal_moved = false;
        for (z, c) in self.ideal.iter_mut().zip(&child.costs) {
            if *c < *z {
                *z = *c;
                ideal_moved = true;
            }
        }
        let dominates_someone = self
            .members
            .iter()
            .any(|m| dominates_min(&child.costs, &m.costs));
        let child_level = self
            .members
            .iter()
            .zip(&self.level)
            .filter(|(m, _)| dominates_min(&m.costs, &child.costs))
            .map(|(_, &l)| l + 1)
            .max()
            .unwrap_or(0);
        let region = associate(&child.costs, &self.ideal, &self.weights);
        self.members.push(child);
        self.region.push(region);
        self.level.push(child_level);
        if ideal_moved {
            self.reassociate();
        }
        if dominates_someone {
            self.recompute_levels();
        }

        let victim = self.choose_victim();
        let victim_dominates = self
            .members
            .iter()
            .any(|m| dominates_min(&self.members[victim].costs, &m.costs));
        self.members.swap_remove(victim);
        self.region.swap_remove(victim);
        self.level.swap_remove(victim);
        if victim_dominates {
            self.recompute_levels();
        }
        for (ind, &l) in self.members.iter_mut().zip(&self.level) {
            ind.rank = l;
        }
    }
}

fn pick_two(engine: &mut Engine<'_>, pool: &[usize]) -> (usize, usize) {
    let a = engine.rng.random_range(0..pool.len());
    let mut b = engine.rng.random_range(0..pool.len() - 1);
    if b >= a {
        b += 1;
    }
    (pool[a], pool[b])
}

pub(crate) fn run(engine: &mut Engine<'_>, observer: &mut Observer<'_>) -> Result<Vec<Individual>> {
    let weights =
        WeightVectorSet::for_population(engine.objectives(), engine.config.population_size)?;
    let neighborhoods = weights.neighborhoods(engine.config.neighborhood_size);
    let initial = engine.initial_population()?;
    let mut state = State::new(initial, weights);
    observer(0, &state.members);
    let everyone: Vec<usize> = (0..engine.config.population_size).collect();

    for generation in 1..=engine.config.generations {
        for subproblem in 0..neighborhoods.len() {
            let local = engine.rng.random::<f64>() < engine.config.neighborhood_probability;
            let pool: Vec<usize> = if local {
                let nb = &neighborhoods[subproblem];
                (0..state.members.len())
                    .filter(|&i| nb.contains(&state.region[i]))
                    .collect()
            } else {
                Vec::new()
            };
            let (a, b) = if pool.len() >= 2 {
                pick_two(engine, &pool)
            } else {
                pick_two(engine, &everyone)
            };
            let (child, _) = engine.variation(&state.members[a].genes, &state.members[b].genes);
            let child = engine.evaluate(vec![child])?.pop().expect("one child");
            state.insert(child);
        }
        observer(generation, &state.members);
    }
    Ok(state.members)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbi_on_the_ray_is_d1() {
        let w = [0.6, 0.8];
        let (value, d1, d2) = pbi(&[1.5, 2.0], &[0.0, 0.0], &w, THETA);
        assert!(d2.abs() < 1e-12);
        assert!((d1 - 2.5).abs() < 1e-12);
        assert!((value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn pbi_off_the_ray() {
        let (value, d1, d2) = pbi(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], THETA);
        assert_eq!((d1, d2), (0.0, 1.0));
        assert_eq!(value, THETA);
    }

    #[test]
    fn association_picks_closest_direction() {
        let w = WeightVectorSet::lattice(2, 4);
        assert_eq!(associate(&[1.0, 0.0], &[0.0, 0.0], &w), 4);
        assert_eq!(associate(&[0.0, 1.0], &[0.0, 0.0], &w), 0);
        assert_eq!(associate(&[2.0, 2.0], &[0.0, 0.0], &w), 2);
    }

    fn ind(costs: &[f64]) -> Individual {
        Individual::new(vec![0.0], costs.iter().map(|c| -c).collect())
    }

    #[test]
    fn insertion_keeps_size_and_partition() {
        let w = WeightVectorSet::lattice(2, 4);
        let members: Vec<Individual> = (0..5)
            .map(|i| ind(&[i as f64 / 4.0, 1.0 - i as f64 / 4.0]))
            .collect();
        let mut state = State::new(members, w);
        state.insert(ind(&[0.2, 0.2]));
        assert_eq!(state.members.len(), 5);
        assert_eq!(state.niche_counts().iter().sum::<usize>(), 5);
        // a dominated newcomer is the one discarded
        state.insert(ind(&[5.0, 5.0]));
        assert!(state.members.iter().all(|m| m.costs != vec![5.0, 5.0]));
        let costs: Vec<&[f64]> = state.members.iter().map(|m| m.costs.as_slice()).collect();
        let fronts = fast_nondominated_sort(&costs);
        for (l, f) in fronts.iter().enumerate() {
            for &i in f {
                assert_eq!(state.level[i], l);
            }
        }
    }
}
