use crate::envs::Environment;
use crate::error::Result;
use crate::models::ExperienceDb;
use crate::rng::RngStream;
use crate::types::Rollout;

use super::{uniform_action, Explorer, Step, Telemetry};

/// Uniform motor babbling.
#[derive(Clone, Debug)]
pub struct RandomBabbling {
    db: ExperienceDb,
    rng: RngStream,
}

impl RandomBabbling {
    pub fn new(env: &dyn Environment, rng: RngStream) -> Self {
        let spec = env.spec();
        RandomBabbling { db: ExperienceDb::new(spec.action_dim, spec.schema.clone()), rng }
    }
}

impl Explorer for RandomBabbling {
    fn name(&self) -> &'static str {
        "random"
    }

    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step> {
        let action = uniform_action(env.spec().action_dim, &mut self.rng);
        let outcome = env.execute(&action)?;
        self.db.add(action.clone(), outcome.clone())?;
        Ok(Step { rollout: Rollout { tick, action, outcome, meta: None }, telemetry: Telemetry::default() })
    }

    fn db(&self) -> &ExperienceDb {
        &self.db
    }
}
