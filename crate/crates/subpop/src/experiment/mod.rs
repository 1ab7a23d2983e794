//! Experiment plans, result files, and batch execution.
//!
//! An [`ExperimentPlan`] names the algorithms, problems, run counts, and
//! seed of a study. [`run_experiment`] executes every cell on a worker
//! pool and writes a self-describing result tree whose `manifest.cfg`
//! reproduces the study bit for bit. The remaining functions reload those
//! files for comparison and diagnostics.

mod files;
mod plan;
mod run;

pub use files::{
    read_indicator_table, read_points, read_solution_set, render_front,
    render_indicator_table, render_solution_set, write_front, write_solution_set,
    SolutionSetFile,
};
pub use plan::{
    AlgorithmKind, AlgorithmSettings, ExperimentPlan, ProblemSpec, Profile,
};
pub use run::{compare_results, forces_summary, indicators_for_files, run_experiment};
