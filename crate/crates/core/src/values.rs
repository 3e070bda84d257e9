//! Value objectives scored on a simulated society.
//!
//! All five objectives are maximized. `Equality` and `Fairness` lie in
//! [-1, 1], `Wealth` and `CollectPortion` in [0, 1]. `GainedAmount` is a
//! ratio to the redistribution pool: it is not clamped above one and drops
//! below zero when the fourth group pays more than it gets back.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::society::{run_path, NormVector, SimulationConfig, Society};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    Equality,
    Fairness,
    Wealth,
    GainedAmount,
    CollectPortion,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::Equality,
        Objective::Fairness,
        Objective::Wealth,
        Objective::GainedAmount,
        Objective::CollectPortion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Equality => "Equality",
            Objective::Fairness => "Fairness",
            Objective::Wealth => "Wealth",
            Objective::GainedAmount => "GainedAmount",
            Objective::CollectPortion => "CollectPortion",
        }
    }

    /// Lowest attainable score; used as the fitness of degenerate states.
    pub fn worst(self) -> f64 {
        match self {
            // The fourth group pays at most its own contribution to the pool,
            // so its relative gain is bounded below by -1.
            Objective::Equality | Objective::Fairness | Objective::GainedAmount => -1.0,
            Objective::Wealth | Objective::CollectPortion => 0.0,
        }
    }

    fn admits(self, v: f64) -> bool {
        const EPS: f64 = 1e-9;
        let (lo, hi) = match self {
            Objective::Equality | Objective::Fairness => (-1.0, 1.0),
            Objective::Wealth | Objective::CollectPortion => (0.0, 1.0),
            // Negative when the fourth group pays more tax than it receives.
            Objective::GainedAmount => (-1.0, f64::INFINITY),
        };
        v.is_finite() && v >= lo - EPS && v <= hi + EPS
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown objective {s:?}")))
    }
}

/// Ordered list of enabled objectives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveSet(Vec<Objective>);

impl ObjectiveSet {
    pub fn new(objectives: Vec<Objective>) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::Config("empty objective set".into()));
        }
        let mut seen = objectives.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != objectives.len() {
            return Err(Error::Config("duplicate objective in set".into()));
        }
        Ok(ObjectiveSet(objectives))
    }

    /// Equality and Fairness.
    pub fn two() -> Self {
        ObjectiveSet(vec![Objective::Equality, Objective::Fairness])
    }

    pub fn five() -> Self {
        ObjectiveSet(Objective::ALL.to_vec())
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|o| o.name().to_string()).collect()
    }

    pub fn worst(&self) -> Vec<f64> {
        self.0.iter().map(|o| o.worst()).collect()
    }
}

/// Scores of one norm vector, maximization sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub set: ObjectiveSet,
    pub scores: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(set: ObjectiveSet, scores: Vec<f64>) -> Result<Self> {
        if set.len() != scores.len() {
            return Err(Error::Contract(format!(
                "{} scores for {} objectives",
                scores.len(),
                set.len()
            )));
        }
        Ok(ObjectiveVector { set, scores })
    }

    pub fn get(&self, objective: Objective) -> Option<f64> {
        self.set
            .objectives()
            .iter()
            .position(|&o| o == objective)
            .map(|i| self.scores[i])
    }

    /// CSV header and row.
    pub fn to_csv(&self) -> String {
        let header = self.set.names().join(",");
        let row = self
            .scores
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("{header}\n{row}\n")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .set
            .objectives()
            .iter()
            .zip(&self.scores)
            .map(|(o, &s)| (o.name().to_string(), serde_json::json!(s)))
            .collect();
        serde_json::Value::Object(map)
    }

    fn check_ranges(&self) -> Result<()> {
        for (o, &s) in self.set.objectives().iter().zip(&self.scores) {
            if !o.admits(s) {
                return Err(Error::Degenerate(format!("{o} = {s} out of range")));
            }
        }
        Ok(())
    }
}

/// Gini index `Σ_ij |w_i - w_j| / (2 n² mean)`.
pub fn gini(wealths: &[f64]) -> Result<f64> {
    if wealths.is_empty() {
        return Err(Error::Degenerate("no citizens".into()));
    }
    let n = wealths.len() as f64;
    let total: f64 = wealths.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("mean wealth is zero".into()));
    }
    let mut sorted = wealths.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Σ_ij |w_i - w_j| = 2 Σ_i (2i - n + 1) w_(i) over ascending order.
    let pair_sum: f64 = 2.0
        * sorted
            .iter()
            .enumerate()
            .map(|(i, &w)| (2.0 * i as f64 - n + 1.0) * w)
            .sum::<f64>();
    let mean = total / n;
    Ok(pair_sum / (2.0 * n * n * mean))
}

fn wealths(state: &Society) -> Vec<f64> {
    state.citizens.iter().map(|c| c.wealth).collect()
}

pub fn equality(state: &Society) -> Result<f64> {
    Ok(1.0 - 2.0 * gini(&wealths(state))?)
}

/// `2 P[group = g1 | evader] - 1`, or 0 when nobody evades.
pub fn fairness(state: &Society) -> f64 {
    let (evaders, poorest) = state
        .citizens
        .iter()
        .filter(|c| c.evader)
        .fold((0usize, 0usize), |(e, p), c| {
            (e + 1, p + usize::from(c.group == 0))
        });
    if evaders == 0 {
        return 0.0;
    }
    2.0 * poorest as f64 / evaders as f64 - 1.0
}

/// Share of total wealth held by the richest group.
pub fn wealth_share(state: &Society) -> Result<f64> {
    let top = state.num_groups - 1;
    let (richest, total) = state.citizens.iter().fold((0.0, 0.0), |(r, t), c| {
        (if c.group == top { r + c.wealth } else { r }, t + c.wealth)
    });
    if !(total > 0.0) {
        return Err(Error::Degenerate("total wealth is zero".into()));
    }
    Ok(richest / total)
}

/// Net gain of the fourth group during the last step, relative to the pool
/// `cr`. Zero when nothing was redistributed.
pub fn gained_amount(state: &Society, cr: f64) -> f64 {
    if cr == 0.0 {
        return 0.0;
    }
    // With fewer than four groups the second-richest group stands in.
    let group = state.num_groups.saturating_sub(2).min(3);
    let gain: f64 = state
        .citizens
        .iter()
        .filter(|c| c.group == group)
        .map(|c| c.wealth - c.primary_wealth)
        .sum();
    gain / cr
}

/// `1 - collect_1`.
pub fn collect_portion(norms: &NormVector) -> f64 {
    1.0 - norms.collect[0]
}

fn score(objective: Objective, state: &Society, cr: f64, norms: &NormVector) -> Result<f64> {
    match objective {
        Objective::Equality => equality(state),
        Objective::Fairness => Ok(fairness(state)),
        Objective::Wealth => wealth_share(state),
        Objective::GainedAmount => Ok(gained_amount(state, cr)),
        Objective::CollectPortion => Ok(collect_portion(norms)),
    }
}

/// Scores every objective of `set` on one simulated path.
pub fn evaluate_path(
    norms: &NormVector,
    config: &SimulationConfig,
    set: &ObjectiveSet,
    seed: u64,
) -> Result<Vec<f64>> {
    let (state, cr) = run_path(config, norms, seed)?;
    set.objectives()
        .iter()
        .map(|&o| score(o, &state, cr, norms))
        .collect()
}

const PARALLEL_SAMPLES: usize = 64;

/// Monte Carlo estimate: the mean objective vector over `samples`
/// independent paths. Sample `i` runs under `seed::sample_seed(seed, i)`;
/// sums are accumulated in sample order so the result does not depend on
/// thread scheduling.
pub fn evaluate(
    norms: &NormVector,
    config: &SimulationConfig,
    set: &ObjectiveSet,
    samples: usize,
    seed: u64,
) -> Result<ObjectiveVector> {
    if samples == 0 {
        return Err(Error::Contract("at least one sample is required".into()));
    }
    norms.validate()?;
    let run = |i: usize| evaluate_path(norms, config, set, seed::sample_seed(seed, i as u64));
    let per_sample: Vec<Vec<f64>> = if samples >= PARALLEL_SAMPLES {
        (0..samples)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..samples).map(run).collect::<Result<_>>()?
    };
    let mut mean = vec![0.0; set.len()];
    for s in &per_sample {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= samples as f64;
    }
    let out = ObjectiveVector::new(set.clone(), mean)?;
    out.check_ranges()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::society::Citizen;

    fn society(wealths: &[f64], evaders: &[bool], groups: usize) -> Society {
        let citizens = wealths
            .iter()
            .zip(evaders)
            .map(|(&w, &e)| Citizen {
                wealth: w,
                primary_wealth: w,
                group: 0,
                evader: e,
            })
            .collect();
        Society::from_citizens(citizens, groups, 0.05, 0).unwrap()
    }

    fn brute_gini(w: &[f64]) -> f64 {
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let s: f64 = w
            .iter()
            .flat_map(|a| w.iter().map(move |b| (a - b).abs()))
            .sum();
        s / (2.0 * n * n * mean)
    }

    #[test]
    fn gini_worked_examples() {
        assert_eq!(gini(&[5.0; 4]).unwrap(), 0.0);
        assert!((gini(&[0.0, 10.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((gini(&[1.0, 2.0, 3.0]).unwrap() - 8.0 / 36.0).abs() < 1e-12);
        assert!(matches!(gini(&[0.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gini_matches_pairwise_sum() {
        let w: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 + 0.5).collect();
        assert!((gini(&w).unwrap() - brute_gini(&w)).abs() < 1e-12);
    }

    #[test]
    fn equality_examples() {
        let s = society(&[4.0, 4.0, 4.0, 4.0, 4.0], &[false; 5], 5);
        assert!((equality(&s).unwrap() - 1.0).abs() < 1e-12);
        let s = society(&[0.0, 10.0], &[false; 2], 2);
        assert!(equality(&s).unwrap().abs() < 1e-12);
        let s = society(&[1.0, 2.0, 3.0], &[false; 3], 3);
        assert!((equality(&s).unwrap() - (1.0 - 16.0 / 36.0)).abs() < 1e-12);
    }

    #[test]
    fn fairness_examples() {
        let w: Vec<f64> = (0..10).map(|i| i as f64).collect();
        // evaders at wealth 0 and 1 are both in g1
        let mut e = vec![false; 10];
        e[0] = true;
        e[1] = true;
        assert_eq!(fairness(&society(&w, &e, 5)), 1.0);
        // one evader per group
        let e: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        assert!((fairness(&society(&w, &e, 5)) + 0.6).abs() < 1e-12);
        assert_eq!(fairness(&society(&w, &[false; 10], 5)), 0.0);
    }

    #[test]
    fn wealth_share_examples() {
        let s = society(&[3.0; 10], &[false; 10], 5);
        assert!((wealth_share(&s).unwrap() - 0.2).abs() < 1e-12);
        let mut w = vec![0.0; 10];
        w[8] = 2.0;
        w[9] = 5.0;
        assert!((wealth_share(&society(&w, &[false; 10], 5)).unwrap() - 1.0).abs() < 1e-12);
        assert!(wealth_share(&society(&[0.0; 10], &[false; 10], 5)).is_err());
    }

    #[test]
    fn gained_amount_examples() {
        let mut s = society(&[1.0, 2.0, 3.0, 4.0, 5.0], &[false; 5], 5);
        assert_eq!(gained_amount(&s, 7.0), 0.0);
        // citizen with wealth 4 is the only g4 member
        s.citizens[3].primary_wealth = 1.0;
        assert!((gained_amount(&s, 3.0) - 1.0).abs() < 1e-12);
        assert!((gained_amount(&s, 3.0 / 1.05) - 1.05).abs() < 1e-12);
        assert_eq!(gained_amount(&s, 0.0), 0.0);
    }

    #[test]
    fn collect_portion_examples() {
        let mut n = NormVector {
            collect: vec![0.0; 5],
            redistribute: vec![0.2; 5],
            catch: 0.0,
            fine: 0.0,
        };
        assert_eq!(collect_portion(&n), 1.0);
        n.collect[0] = 0.7054;
        assert!((collect_portion(&n) - 0.2946).abs() < 1e-12);
        n.collect[0] = 1.0;
        assert_eq!(collect_portion(&n), 0.0);
    }

    fn sample_norms() -> NormVector {
        NormVector {
            collect: vec![0.3, 0.4, 0.5, 0.2, 0.1],
            redistribute: vec![0.3, 0.2, 0.2, 0.2, 0.1],
            catch: 0.4,
            fine: 0.6,
        }
    }

    #[test]
    fn single_sample_equals_single_path() {
        let cfg = SimulationConfig::default();
        let set = ObjectiveSet::five();
        let n = sample_norms();
        let v = evaluate(&n, &cfg, &set, 1, 11).unwrap();
        let direct = evaluate_path(&n, &cfg, &set, seed::sample_seed(11, 0)).unwrap();
        assert_eq!(v.scores, direct);
        assert_eq!(v, evaluate(&n, &cfg, &set, 1, 11).unwrap());
    }

    #[test]
    fn mean_over_samples_matches_individual_paths() {
        let cfg = SimulationConfig::default();
        let set = ObjectiveSet::five();
        let n = sample_norms();
        let k = 80;
        let v = evaluate(&n, &cfg, &set, k, 5).unwrap();
        let mut mean = vec![0.0; 5];
        for i in 0..k {
            let s = evaluate_path(&n, &cfg, &set, seed::sample_seed(5, i as u64)).unwrap();
            for (m, x) in mean.iter_mut().zip(s) {
                *m += x;
            }
        }
        for (a, m) in v.scores.iter().zip(&mean) {
            assert!((a - m / k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn untaxed_society_keeps_initial_equality() {
        let cfg = SimulationConfig {
            evader_probability: 0.0,
            ..Default::default()
        };
        let n = NormVector {
            collect: vec![0.0; 5],
            redistribute: vec![0.2; 5],
            catch: 0.2,
            fine: 0.2,
        };
        let v = evaluate(&n, &cfg, &ObjectiveSet::two(), 1, 3).unwrap();
        let init = crate::society::init_society(&cfg, seed::sample_seed(3, 0)).unwrap();
        let w: Vec<f64> = init.citizens.iter().map(|c| c.wealth).collect();
        assert!((v.scores[0] - (1.0 - 2.0 * brute_gini(&w))).abs() < 1e-12);
    }

    #[test]
    fn objective_vector_serializes() {
        let v = ObjectiveVector::new(ObjectiveSet::two(), vec![0.5, -0.25]).unwrap();
        assert_eq!(v.to_csv(), "Equality,Fairness\n0.5,-0.25\n");
        assert_eq!(v.to_json()["Fairness"], -0.25);
        assert_eq!(
            "gainedamount".parse::<Objective>().unwrap(),
            Objective::GainedAmount
        );
    }
}
