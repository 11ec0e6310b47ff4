use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::envs::Environment;
use crate::error::Result;
use crate::interest::ArmSet;
use crate::lp::{ErrorHistory, LpConfig};
use crate::models::ExperienceDb;
use crate::rng::RngStream;
use crate::types::{GoalSpaceId, Rollout, RolloutMeta};

use super::{uniform_action, Explorer, ExplorerParams, Step, Telemetry};

/// One entity's outcome projection, used as a space of self-generated goals.
#[derive(Clone, Debug)]
pub struct GoalSpace {
    pub id: GoalSpaceId,
    pub bounds: Vec<(f64, f64)>,
    pub diameter: f64,
    /// Normalized goal-reaching errors for goals targeted in this space.
    pub competence: ErrorHistory,
}

/// Goal exploration with competence-progress space selection and hindsight.
///
/// Every rollout is stored once in the experience database, which indexes its
/// outcome under every goal space, so what one goal achieved is available when
/// later targeting any other space.
#[derive(Clone, Debug)]
pub struct Imgep {
    db: ExperienceDb,
    spaces: Vec<GoalSpace>,
    arms: ArmSet<usize>,
    lp: LpConfig,
    sigma: f64,
    rho: f64,
    action_dim: usize,
    rng: RngStream,
}

impl Imgep {
    pub fn new(env: &dyn Environment, params: &ExplorerParams, rng: RngStream) -> Result<Self> {
        params.validate()?;
        let spec = env.spec();
        let spaces: Vec<GoalSpace> = spec
            .schema
            .entities
            .iter()
            .map(|e| GoalSpace {
                id: e.id.clone(),
                bounds: e.bounds.clone(),
                diameter: e.diameter(),
                competence: ErrorHistory::for_window(params.theta),
            })
            .collect();
        let lp = LpConfig { window: params.theta, bootstrap: params.epsilon0 };
        let arms: Vec<_> = (0..spaces.len()).map(|i| (i, lp.bootstrap)).collect();
        Ok(Imgep {
            db: ExperienceDb::new(spec.action_dim, spec.schema.clone()),
            arms: ArmSet::new(&arms, params.epsilon)?,
            spaces,
            lp,
            sigma: params.sigma,
            rho: params.rho,
            action_dim: spec.action_dim,
            rng,
        })
    }

    pub fn spaces(&self) -> &[GoalSpace] {
        &self.spaces
    }

    pub fn arms(&self) -> &ArmSet<usize> {
        &self.arms
    }

    /// Current selection probability of every goal space, in schema order.
    pub fn selection_distribution(&self) -> Vec<(GoalSpaceId, f64)> {
        self.arms
            .selection_distribution()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (self.spaces[i].id.clone(), p))
            .collect()
    }

    /// Selects the goal space, goal and action for the next rollout.
    fn plan(&mut self) -> Result<(usize, Vec<f64>, crate::types::ActionParams)> {
        let space = self.arms.select(&mut self.rng);
        let goal: Vec<f64> = self.spaces[space].bounds.iter().map(|&(lo, hi)| self.rng.random_range(lo..=hi)).collect();
        let explore: f64 = self.rng.random();
        let action = if self.db.is_empty() || explore < self.rho {
            uniform_action(self.action_dim, &mut self.rng)
        } else {
            self.db.infer_action(&goal, &self.spaces[space].id, self.sigma, &mut self.rng)?
        };
        Ok((space, goal, action))
    }
}

impl Explorer for Imgep {
    fn name(&self) -> &'static str {
        "imgep"
    }

    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step> {
        let (space, goal, action) = self.plan()?;
        let outcome = env.execute(&action)?;
        self.db.add(action.clone(), outcome.clone())?;

        let target = &mut self.spaces[space];
        let reached = outcome.project(&target.id)?;
        let dist: f64 = goal.iter().zip(reached).map(|(g, r)| (g - r) * (g - r)).sum();
        target.competence.push(tick, (libm::sqrt(dist) / target.diameter).min(1.0))?;

        let mut current = Vec::with_capacity(self.spaces.len());
        for (i, s) in self.spaces.iter().enumerate() {
            current.push((i, s.competence.learning_progress(&self.lp)?.interest));
        }
        self.arms.sync(&current)?;

        let meta = RolloutMeta { explorer: self.name().to_string(), goal_space: self.spaces[space].id.clone(), goal };
        let telemetry = Telemetry {
            selected_arm: Some(self.spaces[space].id.to_string()),
            interests: current.iter().map(|&(i, v)| (self.spaces[i].id.to_string(), v)).collect(),
            arm_count: self.spaces.len(),
            best_reward: None,
        };
        Ok(Step { rollout: Rollout { tick, action, outcome, meta: Some(meta) }, telemetry })
    }

    fn db(&self) -> &ExperienceDb {
        &self.db
    }
}
