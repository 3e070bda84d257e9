//! Election of one solution from a front by voting citizens.
//!
//! Every voter belongs to a wealth group and prefers one norm. The norm is
//! resolved to a concrete gene: the voter's own group component for
//! collect and redistribute, the single gene for catch and fine. In the
//! default weighted mode a voter scores each solution by a weighted sum of
//! its genes (0.8 on the preferred gene, the rest split evenly) and votes
//! for the best one; in literal mode it votes for the solution with the
//! largest preferred gene. The plurality winner is elected. All ties go to
//! the lowest solution index.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::Solution;
use crate::seed;

/// Weight on the preferred gene.
pub const PREFERRED_WEIGHT: f64 = 0.8;
/// Genes in a norm vector.
pub const SLOTS: usize = 12;
/// Wealth groups voters are drawn from.
pub const GROUPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Collect,
    Redistribute,
    Catch,
    Fine,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::Collect, Norm::Redistribute, Norm::Catch, Norm::Fine];

    /// Gene index for a voter in `group` (1-based).
    pub fn slot(self, group: usize) -> usize {
        match self {
            Norm::Collect => group - 1,
            Norm::Redistribute => GROUPS + group - 1,
            Norm::Catch => 2 * GROUPS,
            Norm::Fine => 2 * GROUPS + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteMode {
    #[default]
    Weighted,
    Literal,
}

impl fmt::Display for VoteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteMode::Weighted => "weighted",
            VoteMode::Literal => "literal",
        })
    }
}

impl FromStr for VoteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weighted" => Ok(VoteMode::Weighted),
            "literal" => Ok(VoteMode::Literal),
            _ => Err(Error::Config(format!(
                "unknown vote mode {s:?} (expected weighted or literal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteOptions {
    pub mode: VoteMode,
    /// Score collect genes as `1 - collect`, so voters favor low taxes.
    pub direction_aware: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoterAgent {
    /// Wealth group, 1-based.
    pub group: usize,
    pub preference: Norm,
    pub weights: Vec<f64>,
}

/// 0.8 on `slot` and 0.2 spread evenly over the other genes.
pub fn preference_weights(slot: usize) -> Vec<f64> {
    let rest = (1.0 - PREFERRED_WEIGHT) / (SLOTS - 1) as f64;
    (0..SLOTS)
        .map(|i| if i == slot { PREFERRED_WEIGHT } else { rest })
        .collect()
}

impl VoterAgent {
    pub fn new(group: usize, preference: Norm) -> Result<Self> {
        if !(1..=GROUPS).contains(&group) {
            return Err(Error::Contract(format!(
                "group {group} outside 1..={GROUPS}"
            )));
        }
        Ok(VoterAgent {
            group,
            preference,
            weights: preference_weights(preference.slot(group)),
        })
    }

    pub fn slot(&self) -> usize {
        self.preference.slot(self.group)
    }
}

/// `count` voters with uniformly random groups and preferred norms.
pub fn make_voters(count: usize, seed: u64) -> Result<Vec<VoterAgent>> {
    if count == 0 {
        return Err(Error::Contract("at least one voter is required".into()));
    }
    let mut rng = seed::rng(seed);
    (0..count)
        .map(|_| {
            let group = rng.random_range(1..=GROUPS);
            let preference = Norm::ALL[rng.random_range(0..Norm::ALL.len())];
            VoterAgent::new(group, preference)
        })
        .collect()
}

fn scored_gene(genes: &[f64], slot: usize, direction_aware: bool) -> f64 {
    if direction_aware && slot < GROUPS {
        1.0 - genes[slot]
    } else {
        genes[slot]
    }
}

fn check_solutions(solutions: &[Solution], width: usize) -> Result<()> {
    if solutions.is_empty() {
        return Err(Error::Contract("no solutions to vote on".into()));
    }
    if let Some(s) = solutions.iter().find(|s| s.genes.len() != width) {
        return Err(Error::Contract(format!(
            "solution has {} genes, expected {width}",
            s.genes.len()
        )));
    }
    Ok(())
}

fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, s) in scores.enumerate() {
        if s > best.0 {
            best = (s, i);
        }
    }
    best.1
}

fn weighted_argmax(
    solutions: &[Solution],
    weights: &[f64],
    direction_aware: bool,
) -> Result<usize> {
    check_solutions(solutions, weights.len())?;
    Ok(argmax(solutions.iter().map(|s| {
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * scored_gene(&s.genes, i, direction_aware))
            .sum()
    })))
}

/// Index of the solution with the largest weighted gene sum.
pub fn fitness(solutions: &[Solution], weights: &[f64]) -> Result<usize> {
    weighted_argmax(solutions, weights, false)
}

/// The solution `agent` votes for.
pub fn get_vote(agent: &VoterAgent, solutions: &[Solution], options: VoteOptions) -> Result<usize> {
    match options.mode {
        VoteMode::Weighted => weighted_argmax(solutions, &agent.weights, options.direction_aware),
        VoteMode::Literal => {
            check_solutions(solutions, SLOTS)?;
            let slot = agent.slot();
            Ok(argmax(solutions.iter().map(|s| {
                scored_gene(&s.genes, slot, options.direction_aware)
            })))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Election {
    pub winner: usize,
    /// Votes per solution, in input order.
    pub tally: Vec<usize>,
}

/// Collects one vote per voter and elects the plurality winner.
pub fn main_reasoner(
    voters: &[VoterAgent],
    solutions: &[Solution],
    options: VoteOptions,
) -> Result<Election> {
    if voters.is_empty() {
        return Err(Error::Contract("no voters".into()));
    }
    check_solutions(solutions, SLOTS)?;
    let votes: Vec<usize> = voters
        .par_iter()
        .map(|v| get_vote(v, solutions, options))
        .collect::<Result<_>>()?;
    let mut tally = vec![0; solutions.len()];
    for v in votes {
        tally[v] += 1;
    }
    let winner = argmax(tally.iter().map(|&c| c as f64));
    Ok(Election { winner, tally })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(genes: Vec<f64>) -> Solution {
        Solution {
            genes,
            objectives: vec![0.0, 0.0],
        }
    }

    fn base() -> Vec<f64> {
        vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.2, 0.2, 0.25, 0.5]
    }

    #[test]
    fn weights_sum_to_one() {
        for v in make_voters(200, 3).unwrap() {
            assert!((v.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert_eq!(v.weights[v.slot()], PREFERRED_WEIGHT);
        }
        assert_eq!(make_voters(50, 9).unwrap(), make_voters(50, 9).unwrap());
        assert!(make_voters(0, 1).is_err());
    }

    #[test]
    fn catch_lover_picks_higher_catch() {
        let mut a = base();
        a[10] = 0.5;
        let mut b = base();
        b[10] = 0.0;
        let voter = VoterAgent::new(3, Norm::Catch).unwrap();
        for mode in [VoteMode::Weighted, VoteMode::Literal] {
            let opts = VoteOptions {
                mode,
                direction_aware: false,
            };
            assert_eq!(
                get_vote(&voter, &[sol(b.clone()), sol(a.clone())], opts).unwrap(),
                1
            );
        }
    }

    #[test]
    fn identical_solutions_go_to_first() {
        let s = vec![sol(base()), sol(base()), sol(base())];
        assert_eq!(fitness(&s, &preference_weights(4)).unwrap(), 0);
        assert!(fitness(&[], &preference_weights(0)).is_err());
    }

    #[test]
    fn literal_redistribute_reads_own_group() {
        let mut a = base();
        a[5] = 0.6;
        a[6] = 0.0;
        let mut b = base();
        b[5] = 0.0;
        b[6] = 0.6;
        let s = [sol(a), sol(b)];
        let opts = VoteOptions {
            mode: VoteMode::Literal,
            direction_aware: false,
        };
        assert_eq!(
            get_vote(&VoterAgent::new(1, Norm::Redistribute).unwrap(), &s, opts).unwrap(),
            0
        );
        assert_eq!(
            get_vote(&VoterAgent::new(2, Norm::Redistribute).unwrap(), &s, opts).unwrap(),
            1
        );
    }

    #[test]
    fn direction_aware_flips_collect() {
        let mut low = base();
        low[0] = 0.1;
        let s = [sol(base()), sol(low)];
        let voter = VoterAgent::new(1, Norm::Collect).unwrap();
        let plain = VoteOptions {
            mode: VoteMode::Literal,
            direction_aware: false,
        };
        let aware = VoteOptions {
            mode: VoteMode::Literal,
            direction_aware: true,
        };
        assert_eq!(get_vote(&voter, &s, plain).unwrap(), 0);
        assert_eq!(get_vote(&voter, &s, aware).unwrap(), 1);
    }

    #[test]
    fn plurality_and_tally() {
        let mut hi_fine = base();
        hi_fine[11] = 0.9;
        let mut hi_catch = base();
        hi_catch[10] = 0.5;
        let s = [sol(hi_fine), sol(hi_catch)];
        let voters = vec![
            VoterAgent::new(1, Norm::Fine).unwrap(),
            VoterAgent::new(2, Norm::Fine).unwrap(),
            VoterAgent::new(3, Norm::Catch).unwrap(),
        ];
        let e = main_reasoner(&voters, &s, VoteOptions::default()).unwrap();
        assert_eq!(e.winner, 0);
        assert_eq!(e.tally, vec![2, 1]);
    }
}
