//! Pareto dominance, non-dominated sorting and crowding distance.
//!
//! Everything except [`dominates`] and [`dominates_max`] works on cost
//! vectors (minimization), the internal convention of the algorithms.

use crate::error::{Error, Result};
use crate::values::ObjectiveVector;

/// `a` dominates `b` when minimizing.
pub fn dominates_min(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// `a` dominates `b` when maximizing.
pub fn dominates_max(a: &[f64], b: &[f64]) -> bool {
    dominates_min(b, a)
}

/// Pareto dominance between two value vectors (maximization).
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.set != b.set {
        return Err(Error::Contract(format!(
            "objective sets differ: {:?} vs {:?}",
            a.set.names(),
            b.set.names()
        )));
    }
    Ok(dominates_max(&a.scores, &b.scores))
}

/// Deb's fast non-dominated sort over cost vectors. Returns fronts as index
/// lists, best first; indices inside a front are ascending.
pub fn fast_nondominated_sort<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_min(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_min(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Indices of the non-dominated cost vectors.
pub fn nondominated_indices<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates_min(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

/// Crowding distance of each member of a front. Boundary members get
/// infinity; an objective with zero range contributes nothing.
pub fn crowding_distance<P: AsRef<[f64]>>(front: &[P]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let value = |i: usize| front[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let range = value(order[n - 1]) - value(order[0]);
        if range <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in order.windows(3) {
            distance[w[1]] += (value(w[2]) - value(w[0])) / range;
        }
    }
    distance
}
