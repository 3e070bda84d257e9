//! Simplex-lattice (Das-Dennis) weight vectors.

use crate::error::{Error, Result};

/// Weight vectors on the unit simplex with lattice resolution `divisions`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVectorSet {
    pub vectors: Vec<Vec<f64>>,
    pub divisions: usize,
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of lattice points for `m` objectives and `divisions` steps.
pub fn lattice_size(m: usize, divisions: usize) -> usize {
    binomial(divisions + m - 1, m - 1)
}

impl WeightVectorSet {
    pub fn lattice(m: usize, divisions: usize) -> Self {
        let mut vectors = Vec::with_capacity(lattice_size(m, divisions));
        let mut current = vec![0usize; m];
        fill(&mut vectors, &mut current, 0, divisions, divisions);
        WeightVectorSet { vectors, divisions }
    }

    /// The lattice whose size equals `population`, if one exists.
    pub fn for_population(m: usize, population: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("no objectives".into()));
        }
        if m == 1 {
            return if population == 1 {
                Ok(Self::lattice(1, 1))
            } else {
                Err(Error::Config(
                    "a single objective admits only one weight vector".into(),
                ))
            };
        }
        let mut h = 1;
        loop {
            let size = lattice_size(m, h);
            if size == population {
                return Ok(Self::lattice(m, h));
            }
            if size > population {
                return Err(Error::Config(format!(
                    "population size {population} matches no simplex lattice for {m} objectives"
                )));
            }
            h += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// For each vector, the indices of its `size` nearest vectors (itself
    /// first), by Euclidean distance with index tie-break.
    pub fn neighborhoods(&self, size: usize) -> Vec<Vec<usize>> {
        let n = self.vectors.len();
        let size = size.clamp(1, n);
        (0..n)
            .map(|i| {
                let mut by_distance: Vec<(f64, usize)> = (0..n)
                    .map(|j| (squared_distance(&self.vectors[i], &self.vectors[j]), j))
                    .collect();
                by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                by_distance.into_iter().take(size).map(|(_, j)| j).collect()
            })
            .collect()
    }
}

fn fill(out: &mut Vec<Vec<f64>>, current: &mut [usize], k: usize, left: usize, total: usize) {
    if k == current.len() - 1 {
        current[k] = left;
        out.push(current.iter().map(|&c| c as f64 / total as f64).collect());
        return;
    }
    for c in 0..=left {
        current[k] = c;
        fill(out, current, k + 1, left - c, total);
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_population_sizes() {
        let two = WeightVectorSet::for_population(2, 100).unwrap();
        assert_eq!((two.divisions, two.len()), (99, 100));
        let five = WeightVectorSet::for_population(5, 210).unwrap();
        assert_eq!((five.divisions, five.len()), (6, 210));
        assert!(WeightVectorSet::for_population(5, 200).is_err());
    }

    #[test]
    fn vectors_lie_on_simplex() {
        for w in &WeightVectorSet::lattice(3, 4).vectors {
            assert!(w.iter().all(|&x| x >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(WeightVectorSet::lattice(3, 4).len(), binomial(6, 2));
    }

    #[test]
    fn neighborhood_starts_with_self() {
        let w = WeightVectorSet::lattice(2, 9);
        let nb = w.neighborhoods(3);
        assert_eq!(nb[4], vec![4, 3, 5]);
        assert_eq!(w.neighborhoods(50)[0].len(), 10);
    }
}
