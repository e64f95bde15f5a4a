//! Exact analysis of spatiotemporal patterns in discrete Bayesian networks.
//!
//! The crate computes specific and complete local integration of patterns,
//! per-trajectory disintegration hierarchies and their ι-entities, symmetry
//! checks, and the entity-level notions of action and perception. All
//! probabilities are exact rationals; floating point appears only in reports.

pub mod agency;
pub mod builtin;
pub mod cli;
pub mod disintegration;
pub mod error;
pub mod integration;
pub mod model;
pub mod partition;
pub mod pattern;
pub mod rational;
pub mod symmetry;
pub mod system;

pub use error::{Error, Result};
pub use model::{BayesNet, NodeId, StateSpace};
pub use partition::SetPartition;
pub use pattern::Pattern;
pub use rational::Rational;
