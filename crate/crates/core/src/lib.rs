//! Unbiased low-variance agent evaluation for imperfect-information games.
//!
//! The crate evaluates poker agents with four estimators of an agent's
//! expected winnings: plain chip counting, MIVAT (chance control variates),
//! MIVAT combined with imaginary observations, and AIVAT, which adds
//! control variates for the decisions of players whose strategy is known
//! and averages over their private information.
//!
//! Everything runs on small games (Kuhn poker and Leduc hold'em) whose
//! trees can be enumerated, so every estimator can be checked for exact
//! unbiasedness and compared on identical simulated matches.
//!
//! Module map:
//! - [`game`]: rules, states, full game trees, reach probabilities.
//! - [`solver`]: external-sampling MCCFR, best response, value functions.
//! - [`partitions`]: the decision/chance partition and its terminal twin.
//! - [`estimators`]: per-episode evaluation for every estimator.
//! - [`stats`]: summaries and variance-reduction comparisons.
//! - [`harness`]: the solve / simulate / estimate / oracle pipeline.

pub mod error;
pub mod estimators;
pub mod game;
pub mod harness;
pub mod partitions;
pub mod solver;
pub mod stats;
pub mod strategy;

pub use error::{Error, Result};
