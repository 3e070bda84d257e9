//! Reproducible experiment batches and their file artifacts.
//!
//! A run directory looks like:
//!
//! ```text
//! <out>/experiment.json              resolved configuration
//! <out>/fronts/<alg>/run_000.csv     final front of one run
//! <out>/fronts/<alg>/run_000.json    run manifest
//! <out>/failures.json                only when some runs failed
//! <out>/indicators.csv               run, algorithm, hypervolume, igd_plus
//! <out>/pf_known.csv                 non-dominated union of every front
//! <out>/comparison.json|.md          mean / std / max table per indicator
//! <out>/report/                      plot data and summary
//! ```

mod analysis;
mod commands;
mod config;
pub mod io;
mod optimize;

pub use analysis::{compute_indicators, report, IndicatorReport, ReportSummary, RunIndicators};
pub use commands::{load_norms, reason, simulate, ElectionReport, SimulationDump};
pub use config::{ExperimentConfig, ProblemKind};
pub use optimize::{optimize, run_one, BatchSummary, RunManifest};
