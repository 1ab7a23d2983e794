//! Subpopulation composition: interaction matrices, configuration, and the
//! run loop that couples heterogeneous strategies into one optimizer.
//!
//! A composed run is described by four pieces: the set of subpopulations,
//! the strategy each one executes, their relative sizes, and the
//! interaction matrices that route parents and archive offers between them.
//! [`GsfConfig`] carries all four; [`run_gsf`] executes them.

mod config;
mod im;
mod runner;

pub use config::{GsfConfig, SizeVector, Strategy};
pub use im::{topology_im, InteractionMatrix, Topology};
pub use runner::{run_gsf, RunResult};
