use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io;
use crate::error::{Error, Result};
use crate::reasoner::{self, VoteMode, VoteOptions};
use crate::society::{self, NormVector, SimulationConfig, SocietySnapshot};
use crate::values::{self, ObjectiveSet};

#[derive(Deserialize)]
#[serde(untagged)]
enum NormsFile {
    Norms(NormVector),
    Genes(Vec<f64>),
}

/// Reads norms from JSON, either as an object with `collect`,
/// `redistribute`, `catch` and `fine` or as a flat array of twelve genes.
pub fn load_norms(path: &Path) -> Result<NormVector> {
    let norms = match io::read_json::<NormsFile>(path)? {
        NormsFile::Norms(n) => n,
        NormsFile::Genes(g) => NormVector::from_genes(&g)?,
    };
    norms.validate()?;
    Ok(norms)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationDump {
    pub seed: u64,
    pub norms: NormVector,
    pub society: SocietySnapshot,
    pub objectives: BTreeMap<String, f64>,
}

/// Simulates one path and writes `society.json` (final state) and
/// `objectives.csv` (scores of that path) into `out`.
pub fn simulate(
    config: &SimulationConfig,
    norms: &NormVector,
    set: &ObjectiveSet,
    seed: u64,
    out: &Path,
) -> Result<SimulationDump> {
    norms.validate()?;
    config.validate()?;
    let (state, _) = society::run_path(config, norms, seed)?;
    let scores = values::evaluate_path(norms, config, set, seed)?;
    let vector = values::ObjectiveVector::new(set.clone(), scores)?;
    let dump = SimulationDump {
        seed,
        norms: norms.clone(),
        society: state.snapshot(),
        objectives: set
            .names()
            .into_iter()
            .zip(vector.scores.iter().copied())
            .collect(),
    };
    io::write_json(&out.join("society.json"), &dump)?;
    io::write_atomic(&out.join("objectives.csv"), vector.to_csv().as_bytes())?;
    Ok(dump)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionReport {
    pub front: String,
    pub voter_seed: u64,
    pub voters: usize,
    pub mode: VoteMode,
    pub direction_aware: bool,
    pub winner_index: usize,
    pub norms: NormVector,
    pub objectives: BTreeMap<String, f64>,
    /// Votes per front member, in file order.
    pub tally: Vec<usize>,
}

impl ElectionReport {
    pub fn to_text(&self) -> String {
        let pct = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{:.2}%", 100.0 * x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut s = format!(
            "elected solution {} of {} with {} of {} votes ({} mode)\n",
            self.winner_index,
            self.tally.len(),
            self.tally[self.winner_index],
            self.voters,
            self.mode
        );
        s.push_str(&format!("  collect:      {}\n", pct(&self.norms.collect)));
        s.push_str(&format!(
            "  redistribute: {}\n",
            pct(&self.norms.redistribute)
        ));
        s.push_str(&format!(
            "  catch:        {:.2}%\n",
            100.0 * self.norms.catch
        ));
        s.push_str(&format!(
            "  fine:         {:.2}%\n",
            100.0 * self.norms.fine
        ));
        for (name, v) in &self.objectives {
            s.push_str(&format!("  {name}: {v:.4}\n"));
        }
        s
    }
}

/// Elects one solution of the front stored at `front_path`.
pub fn reason(
    front_path: &Path,
    voters: usize,
    seed: u64,
    options: VoteOptions,
) -> Result<ElectionReport> {
    let front = io::read_front(front_path)?;
    if front.is_empty() {
        return Err(Error::Contract(format!(
            "{} holds no solutions to elect from",
            front_path.display()
        )));
    }
    let agents = reasoner::make_voters(voters, seed)?;
    let election = reasoner::main_reasoner(&agents, &front.solutions, options)?;
    let winner = &front.solutions[election.winner];
    Ok(ElectionReport {
        front: front_path.display().to_string(),
        voter_seed: seed,
        voters,
        mode: options.mode,
        direction_aware: options.direction_aware,
        winner_index: election.winner,
        norms: NormVector::from_genes(&winner.genes)?,
        objectives: front
            .objective_names
            .iter()
            .cloned()
            .zip(winner.objectives.iter().copied())
            .collect(),
        tally: election.tally,
    })
}
