//! Monte Carlo harness: plans, seeded trials, summaries and rate fits.

pub mod census;
pub mod io;
pub mod plan;
pub mod runner;
pub mod stats;

pub use census::{count_exceedances, threshold_exceedance_census, Census, LevelCount};
pub use plan::{Cell, ExperimentPlan, NoiseModel, SignalSpec};
pub use runner::{
    derive_seed, estimate_event_probability, run_plan, run_plan_with, CellSummary, EventEstimate, Execution,
    PlanOutput, ThresholdCheck, TrialDiagnostics, TrialReport,
};
pub use stats::{fit_rate, RateFit};
