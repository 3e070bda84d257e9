//! Synthesis of parametric tax norms for an agent-based society.
//!
//! * [`society`] simulates citizens paying taxes, evading, being fined and
//!   receiving redistributed funds.
//! * [`values`] scores a norm set on Equality, Fairness, Wealth, Gained
//!   Amount and Collect Portion.
//! * [`moea`] searches norm space with NSGA-II, SPEA2, MOEA/DD and MOMBI2.
//! * [`indicators`] measures fronts (hypervolume, IGD+) and compares
//!   algorithms with Kruskal-Wallis tests.
//! * [`reasoner`] elects one solution by citizen vote.
//! * [`experiment`] drives reproducible batches and writes their artifacts.

pub mod error;
pub mod experiment;
pub mod front;
pub mod indicators;
pub mod moea;
pub mod reasoner;
pub mod seed;
pub mod society;
pub mod values;

pub use error::{Error, Result};
pub use front::{Front, Solution};
pub use moea::{Algorithm, MoeaConfig, Problem, TaxProblem};
pub use reasoner::{VoteMode, VoteOptions, VoterAgent};
pub use society::{NormVector, SimulationConfig, Society};
pub use values::{Objective, ObjectiveSet, ObjectiveVector};
