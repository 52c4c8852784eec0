//! Robust-design optimization through evidence theory and multiagent
//! collaborative search.
//!
//! The crate combines three layers:
//!
//! * [`evidence`] — interval-valued basic probability assignments and the
//!   Belief/Plausibility measures of threshold events on response functions,
//!   plus the [`evidence::RobustProblem`] wrapper that lifts a deterministic
//!   design problem to Belief-valued objectives and constraints.
//! * [`macs`] — the multiagent collaborative search engine: a population of
//!   agents with local perception regions, resource budgets, social
//!   communication through a global Pareto archive ([`pareto`]) and an
//!   adaptive domain [`decomposition`] that steers regeneration and
//!   branching.
//! * problem libraries — analytic [`benchmarks`], a shape-based
//!   [`lowthrust`] transfer model and an atmospheric-entry [`aerocapture`]
//!   model, each exposing both the raw physics operations and a ready-made
//!   robust problem definition.
//!
//! All engine state is seeded and evolves deterministically in sequential
//! mode; repeated runs with the same configuration are bitwise identical.

pub mod aerocapture;
pub mod benchmarks;
pub mod decomposition;
pub mod evidence;
pub mod interval;
pub mod lowthrust;
pub mod macs;
pub mod numeric;
pub mod pareto;
pub mod sampling;

pub use interval::Interval;
