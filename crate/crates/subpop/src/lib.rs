//! Multi-objective evolutionary optimization with heterogeneous
//! subpopulations.
//!
//! The toolkit composes three strategy families — single-objective
//! differential evolution, Pareto-based GDE3, and novelty-driven MONA — into
//! one framework where subpopulations exchange parents and archive offers
//! through interaction-probability matrices. Benchmarks (the WFG suite),
//! quality indicators, displacement-force diagnostics, and a reproducible
//! experiment driver round it out.

pub mod assess;
pub mod de;
pub mod dominance;
pub mod error;
pub mod experiment;
pub mod forces;
pub mod gde3;
pub mod gsf;
pub mod novelty;
pub mod problem;
pub mod rng;
pub mod solution;
pub mod wfg;

pub use error::{Error, Result};

// Every code block in the guide under `book/` is compiled and executed by
// `cargo test --doc`: each chapter is attached as module documentation
// below, one module per chapter so a failing snippet names its origin.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    pub mod problems {}
    #[doc = include_str!("../../../book/src/differential-evolution.md")]
    pub mod differential_evolution {}
    #[doc = include_str!("../../../book/src/gde3.md")]
    pub mod gde3 {}
    #[doc = include_str!("../../../book/src/novelty.md")]
    pub mod novelty {}
    #[doc = include_str!("../../../book/src/subpopulations.md")]
    pub mod subpopulations {}
    #[doc = include_str!("../../../book/src/indicators.md")]
    pub mod indicators {}
    #[doc = include_str!("../../../book/src/forces.md")]
    pub mod forces {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
