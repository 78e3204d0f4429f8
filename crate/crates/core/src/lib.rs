//! Fitness Clouds on NK landscapes.
//!
//! [`landscape`] builds and persists random NK instances, [`space`]
//! enumerates them, [`heuristics`] holds the local-search step rules,
//! [`cloud`] computes Fitness Clouds, Limit Fitness Clouds and the β / β*
//! bottleneck estimates, and [`analytic`] evaluates the normal-approximation
//! predictions for the mean offspring fitness. [`battery`] runs every
//! heuristic on one landscape and tabulates β and β*.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytic;
pub mod battery;
pub mod cloud;
pub mod error;
pub mod export;
pub mod genotype;
pub mod heuristics;
pub mod landscape;
mod par;
pub mod space;

pub use cloud::{Beta, BetaEstimate, CloudKind, CloudSummary, EstimateMethod};
pub use error::{Error, Result};
pub use genotype::Genotype;
pub use heuristics::{CoolingSchedule, HeuristicSpec, Trajectory};
pub use landscape::NkLandscape;
pub use space::{FitnessSource, FitnessTable, SearchSpace};
