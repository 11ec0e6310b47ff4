//! Re-execution of a rollout log against a fresh environment.

use std::path::Path;

use curio_core::Outcome;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::log::LogReader;
use crate::run::build_env;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub rollouts: u64,
    /// First tick whose recomputed outcome differs from the logged one.
    pub mismatch: Option<u64>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn bit_equal(a: &Outcome, b: &Outcome) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|((ia, va), (ib, vb))| {
            ia == ib && va.len() == vb.len() && va.iter().zip(vb).all(|(x, y)| x.to_bits() == y.to_bits())
        })
}

/// Feeds every logged action through a fresh environment built from `cfg`
/// and compares outcomes bit for bit. Stops at the first mismatch.
pub fn replay(log: &Path, cfg: &RunConfig) -> Result<ReplayReport> {
    let mut env = build_env(cfg)?;
    let spec = env.spec().clone();
    let mut count = 0;
    for rollout in LogReader::open(log)? {
        let rollout = rollout?;
        if rollout.tick != count {
            return Err(Error::Schema(format!("log tick {} where {count} was expected", rollout.tick)));
        }
        if rollout.action.dim() != spec.action_dim {
            return Err(Error::Schema(format!(
                "tick {count}: action has {} components, `{}` expects {}",
                rollout.action.dim(),
                spec.name,
                spec.action_dim
            )));
        }
        spec.schema.validate(&rollout.outcome).map_err(|e| Error::Schema(format!("tick {count}: {e}")))?;
        let outcome = env.execute(&rollout.action)?;
        if !bit_equal(&outcome, &rollout.outcome) {
            return Ok(ReplayReport { rollouts: count + 1, mismatch: Some(count) });
        }
        count += 1;
    }
    Ok(ReplayReport { rollouts: count, mismatch: None })
}
