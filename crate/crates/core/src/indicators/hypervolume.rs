//! Hypervolume by the WFG recursion, with a Monte Carlo estimator for
//! large five-objective fronts.
//!
//! Internally points are negated so that every objective is minimized and
//! the reference point bounds the region from above.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_dimensions;
use crate::error::{Error, Result};
use crate::moea::pareto::dominates_min;
use crate::seed;

/// Samples drawn by the Monte Carlo estimator.
pub const MC_SAMPLES: usize = 1_000_000;
/// Five-objective fronts larger than this are estimated rather than
/// computed exactly.
pub const MC_THRESHOLD: usize = 500;

const MC_SEED: u64 = 0x48_56;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HvMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvEstimate {
    pub value: f64,
    /// Zero for exact values.
    pub std_error: f64,
    pub method: HvMethod,
}

/// Negated points that are strictly better than the reference in every
/// objective, with the negated reference.
fn prepare<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let m = check_dimensions(points)?;
    if reference.len() != m {
        return Err(Error::Contract(format!(
            "reference point has {} objectives, front has {m}",
            reference.len()
        )));
    }
    let kept: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v > r))
        .map(|p| p.iter().map(|v| -v).collect())
        .collect();
    Ok((nds(kept), reference.iter().map(|r| -r).collect()))
}

/// Non-dominated subset under minimization, duplicates dropped.
fn nds(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    points.dedup();
    // after the lexicographic sort nobody is dominated by a later point
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| dominates_min(q, &p)) {
            out.push(p);
        }
    }
    out
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(x, r)| r - x).product()
}

/// Volume dominated by mutually non-dominated `points` (minimization).
fn wfg(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let d = reference.len();
    match (points.len(), d) {
        (0, _) => 0.0,
        (1, _) => box_volume(&points[0], reference),
        (_, 1) => reference[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        (_, 2) => {
            points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut volume = 0.0;
            let mut floor = reference[1];
            for p in &points {
                if p[1] < floor {
                    volume += (reference[0] - p[0]) * (floor - p[1]);
                    floor = p[1];
                }
            }
            volume
        }
        _ => {
            // worst last coordinate first: every later point is at least as
            // good there, so each limit set is flat in the last dimension
            points.sort_by(|a, b| b[d - 1].total_cmp(&a[d - 1]));
            let lower = &reference[..d - 1];
            let mut volume = 0.0;
            for k in 0..points.len() {
                let p = &points[k];
                let limit: Vec<Vec<f64>> = points[k + 1..]
                    .iter()
                    .map(|q| {
                        q[..d - 1]
                            .iter()
                            .zip(&p[..d - 1])
                            .map(|(a, b)| a.max(*b))
                            .collect()
                    })
                    .collect();
                let exclusive = box_volume(&p[..d - 1], lower) - wfg(nds(limit), lower);
                volume += (reference[d - 1] - p[d - 1]) * exclusive;
            }
            volume
        }
    }
}

/// Exact volume of the region dominated by `points` and bounded by
/// `reference` (maximization). Points not strictly better than the
/// reference in every objective are ignored.
pub fn hypervolume_exact<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> Result<f64> {
    let (points, reference) = prepare(points, reference)?;
    Ok(wfg(points, &reference))
}

/// Uniform sampling of the box between `reference` and the component-wise
/// best point.
pub fn hypervolume_monte_carlo<P: AsRef<[f64]>>(
    points: &[P],
    reference: &[f64],
    samples: usize,
    seed: u64,
) -> Result<HvEstimate> {
    if samples == 0 {
        return Err(Error::Contract(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let (points, reference) = prepare(points, reference)?;
    let estimate = |value, std_error| HvEstimate {
        value,
        std_error,
        method: HvMethod::MonteCarlo,
    };
    if points.is_empty() {
        return Ok(estimate(0.0, 0.0));
    }
    let m = reference.len();
    let ideal: Vec<f64> = (0..m)
        .map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume = box_volume(&ideal, &reference);
    let chunks = samples.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::rng(seed::sample_seed(seed, c as u64));
            let n = CHUNK.min(samples - c * CHUNK);
            let mut s = vec![0.0; m];
            let mut hits = 0;
            for _ in 0..n {
                for k in 0..m {
                    s[k] = ideal[k] + (reference[k] - ideal[k]) * rng.random::<f64>();
                }
                if points.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    Ok(estimate(
        volume * fraction,
        volume * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    ))
}

/// Exact hypervolume, except for five-objective fronts with more than
/// [`MC_THRESHOLD`] points, which get a [`MC_SAMPLES`]-sample estimate.
pub fn hypervolume<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> Result<HvEstimate> {
    let (kept, _) = prepare(points, reference)?;
    if reference.len() == 5 && kept.len() > MC_THRESHOLD {
        return hypervolume_monte_carlo(points, reference, MC_SAMPLES, MC_SEED);
    }
    Ok(HvEstimate {
        value: hypervolume_exact(points, reference)?,
        std_error: 0.0,
        method: HvMethod::Exact,
    })
}
