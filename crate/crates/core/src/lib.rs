//! Learning-progress driven exploration.
//!
//! This crate holds the algorithmic half of the project: domain types, seeded
//! random streams, learning-progress estimation, region trees that grow new
//! bandit arms, the interest bandit, memory-based forward/inverse models, the
//! four exploration strategies and the two simulated worlds they are compared
//! on. Everything here is `no_std` + `alloc`; file formats, configuration and
//! the command line live in the `curio` crate.

#![cfg_attr(not(test), no_std)]
// range checks are written `!(x >= lo)` so NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod envs;
pub mod error;
pub mod explorers;
pub mod interest;
pub mod lp;
pub mod metrics;
pub mod models;
pub mod regions;
pub mod rng;
pub mod store;
pub mod types;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use store::RolloutStore;
pub use types::{ActionParams, EntityId, EntitySpec, GoalSpaceId, Outcome, OutcomeSchema, Rollout, RolloutMeta};
