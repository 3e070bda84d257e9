//! Front quality indicators and statistical comparison of run batches.
//!
//! All inputs are objective vectors in maximization sense.

mod hypervolume;
mod stats;

pub use hypervolume::{
    hypervolume, hypervolume_exact, hypervolume_monte_carlo, HvEstimate, HvMethod, MC_SAMPLES,
    MC_THRESHOLD,
};
pub use stats::{
    compare_algorithms, kruskal_wallis, Comparison, IndicatorBatch, IndicatorTable, KruskalWallis,
    Row, SIGNIFICANCE,
};

use crate::error::{Error, Result};
use crate::front::Solution;
use crate::moea::pareto::dominates_max;

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Indices of the maximal non-dominated subset, first occurrence of each
/// duplicate only, in input order.
fn nondominated_positions(points: &[&[f64]]) -> Vec<usize> {
    let mut keep = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if dominates_max(q, p) || (j < i && same_bits(q, p)) {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    keep
}

fn check_dimensions<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let m = points
        .first()
        .ok_or_else(|| Error::Contract("empty point set".into()))?
        .as_ref()
        .len();
    if points.iter().any(|p| p.as_ref().len() != m) {
        return Err(Error::Contract("points have different dimensions".into()));
    }
    Ok(m)
}

/// The maximal non-dominated subset of `points` with duplicates kept once.
pub fn nondominated_filter<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<Vec<f64>>> {
    check_dimensions(points)?;
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_ref()).collect();
    Ok(nondominated_positions(&refs)
        .into_iter()
        .map(|i| refs[i].to_vec())
        .collect())
}

/// Keeps the solutions whose objective vectors are non-dominated, one per
/// distinct objective vector.
pub fn nondominated_solutions(solutions: Vec<Solution>) -> Vec<Solution> {
    let refs: Vec<&[f64]> = solutions.iter().map(|s| s.objectives.as_slice()).collect();
    let keep = nondominated_positions(&refs);
    let mut slots: Vec<Option<Solution>> = solutions.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| slots[i].take().expect("kept once"))
        .collect()
}

/// Component-wise minimum over every point.
pub fn nadir_point<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<f64>> {
    let m = check_dimensions(points)?;
    let mut nadir = vec![f64::INFINITY; m];
    for p in points {
        for (n, v) in nadir.iter_mut().zip(p.as_ref()) {
            *n = n.min(*v);
        }
    }
    Ok(nadir)
}

/// Mean over reference points `z` of `min_a d+(a, z)`, with
/// `d+(a, z) = sqrt(sum_k max(z_k - a_k, 0)^2)` for maximized objectives.
pub fn igd_plus<P: AsRef<[f64]>, Q: AsRef<[f64]>>(front: &[P], reference: &[Q]) -> Result<f64> {
    let m = check_dimensions(front)?;
    if check_dimensions(reference)? != m {
        return Err(Error::Contract(
            "front and reference front have different objective counts".into(),
        ));
    }
    let total: f64 = reference
        .iter()
        .map(|z| {
            front
                .iter()
                .map(|a| {
                    a.as_ref()
                        .iter()
                        .zip(z.as_ref())
                        .map(|(a, z)| (z - a).max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}
