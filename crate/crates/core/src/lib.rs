//! Hierarchical agent-based collaborative random search.
//!
//! The objective dimensions of a [`SearchSpace`] are recursively split across a
//! tree of agents ([`hierarchy`]). Every leaf ("terminal") agent owns exactly one
//! dimension and, once per iteration, samples `b` candidates around a shared
//! starting coordinate: one draw close to the start along its own dimension,
//! `b - 1` stratified draws over the rest of that dimension's domain, and tight
//! local draws along every other dimension ([`sampler`]). The root collects the
//! per-agent winners and broadcasts the overall best as every agent's next
//! start ([`engine`]).
//!
//! Two matched-evaluation baselines (plain random search and Latin hypercube
//! search) and a set of analytic benchmark functions live in [`baselines`] and
//! [`benchmarks`].
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is plugged
//! in through the [`Executor`] trait; [`Sequential`] is the reference
//! implementation.
//!
//! ```
//! use hiersearch_core::{build_hierarchy, tune, CapacityPolicy, Dimension, Direction,
//!     SearchSpace, Sequential, StopCriteria, TerminalDefaults};
//!
//! let space = SearchSpace::all_objective(
//!     vec![Dimension::continuous("x", -5.0, 5.0), Dimension::log10("lr", 1e-5, 1e-1)],
//!     Direction::Minimize,
//! )?;
//! let h = build_hierarchy(&space, &CapacityPolicy::Uniform(2), &TerminalDefaults::uniform(3, 1.0 / 64.0, 2.0))?;
//! let f = |p: &[f64]| (p[0] - 1.0).powi(2) + (p[1].log10() + 3.0).powi(2);
//! let report = tune(&h, &space, &f, StopCriteria::iterations(20), 7, &Sequential)?;
//! assert_eq!(report.evaluations_used, 2 * 3 * 20);
//! # Ok::<(), hiersearch_core::Error>(())
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod baselines;
pub mod benchmarks;
pub mod domain;
pub mod engine;
mod error;
pub mod hierarchy;
pub mod rng;
pub mod sampler;

pub use domain::{
    clamp_to_domain, validate_space, Coordinate, Dimension, DimensionKind, Direction, Objective,
    ObjectiveError, ObjectiveHandle, Query, Scale, SearchSpace,
};
pub use engine::{
    initial_feedback, prepare_feedback, run_iteration, tune, EvaluationRecord, Executor, Feedback,
    IterationTrace, RunReport, Sequential, StartPoint, StopCriteria, TerminalAgent,
};
pub use error::{Error, Result};
pub use hierarchy::{
    build_hierarchy, divide, hierarchy_stats, AgentKind, AgentNode, CapacityPolicy, Hierarchy,
    HierarchyStats, TerminalConfig, TerminalDefaults, WidthState,
};
