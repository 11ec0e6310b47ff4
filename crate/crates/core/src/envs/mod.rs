//! Simulated environments.

pub mod atb;
pub mod synthetic;

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::{ActionParams, Outcome, OutcomeSchema};

pub use atb::{forward_kinematics, ArmToolBall, ArmToolBallConfig, ChainTrace};
pub use synthetic::{Curve, Synthetic, SyntheticConfig};

/// Static description of an environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub name: String,
    pub action_dim: usize,
    pub schema: OutcomeSchema,
    /// Outcome observed when nothing is done; the reference for "controlled".
    pub rest: Outcome,
}

impl EnvSpec {
    pub fn diameter(&self) -> f64 {
        self.schema.diameter()
    }
}

pub trait Environment {
    fn spec(&self) -> &EnvSpec;

    /// Runs one rollout. Every call is one unit of experiment budget.
    fn execute(&mut self, action: &ActionParams) -> Result<Outcome>;
}

impl<E: Environment + ?Sized> Environment for &mut E {
    fn spec(&self) -> &EnvSpec {
        (**self).spec()
    }

    fn execute(&mut self, action: &ActionParams) -> Result<Outcome> {
        (**self).execute(action)
    }
}
