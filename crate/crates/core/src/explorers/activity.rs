use alloc::format;
use alloc::vec::Vec;

use crate::envs::synthetic::{Synthetic, ACTIVITIES, ERROR};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::interest::ArmSet;
use crate::lp::{ErrorHistory, LpConfig};
use crate::models::ExperienceDb;
use crate::rng::RngStream;
use crate::types::Rollout;

use super::{Explorer, ExplorerParams, Step, Telemetry};

/// Learning-progress selection over the four fixed activities of the
/// synthetic world. The observed error feeds each activity's history
/// directly; there is no forward model in the loop.
#[derive(Clone, Debug)]
pub struct ActivityLp {
    db: ExperienceDb,
    histories: Vec<ErrorHistory>,
    arms: ArmSet<usize>,
    lp: LpConfig,
    rng: RngStream,
}

impl ActivityLp {
    pub fn new(env: &dyn Environment, params: &ExplorerParams, rng: RngStream) -> Result<Self> {
        params.validate()?;
        let spec = env.spec();
        if spec.schema.entity(&ERROR.into()).is_err() || spec.action_dim != 1 {
            return Err(Error::schema("activity selection needs the synthetic environment"));
        }
        let lp = LpConfig { window: params.theta, bootstrap: params.epsilon0 };
        let arms: Vec<_> = (1..=ACTIVITIES).map(|a| (a, lp.bootstrap)).collect();
        Ok(ActivityLp {
            db: ExperienceDb::new(spec.action_dim, spec.schema.clone()),
            histories: (0..ACTIVITIES).map(|_| ErrorHistory::for_window(params.theta)).collect(),
            arms: ArmSet::new(&arms, params.epsilon)?,
            lp,
            rng,
        })
    }

    pub fn arms(&self) -> &ArmSet<usize> {
        &self.arms
    }

    pub fn history(&self, activity: usize) -> Option<&ErrorHistory> {
        self.histories.get(activity.checked_sub(1)?)
    }
}

impl Explorer for ActivityLp {
    fn name(&self) -> &'static str {
        "iac"
    }

    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step> {
        let activity = self.arms.select(&mut self.rng);
        let action = Synthetic::action_for(activity);
        let outcome = env.execute(&action)?;
        let error = outcome.project(&ERROR.into())?[0];
        self.histories[activity - 1].push(tick, error)?;
        self.db.add(action.clone(), outcome.clone())?;

        let mut current = Vec::with_capacity(ACTIVITIES);
        for (i, h) in self.histories.iter().enumerate() {
            current.push((i + 1, h.learning_progress(&self.lp)?.interest));
        }
        self.arms.sync(&current)?;
        let telemetry = Telemetry {
            selected_arm: Some(format!("activity{activity}")),
            interests: current.iter().map(|(a, i)| (format!("activity{a}"), *i)).collect(),
            arm_count: ACTIVITIES,
            best_reward: None,
        };
        Ok(Step { rollout: Rollout { tick, action, outcome, meta: None }, telemetry })
    }

    fn db(&self) -> &ExperienceDb {
        &self.db
    }
}
