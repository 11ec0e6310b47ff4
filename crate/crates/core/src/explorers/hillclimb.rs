use alloc::vec::Vec;

use crate::envs::Environment;
use crate::error::Result;
use crate::models::{perturb, ExperienceDb};
use crate::rng::RngStream;
use crate::types::{ActionParams, EntityId, Outcome, Rollout};

use super::{uniform_action, Explorer, ExplorerParams, Step, Telemetry};

/// Extrinsic reward computed from an outcome.
pub trait RewardFn {
    fn reward(&self, outcome: &Outcome) -> f64;
}

impl<F: Fn(&Outcome) -> f64> RewardFn for F {
    fn reward(&self, outcome: &Outcome) -> f64 {
        self(outcome)
    }
}

/// Euclidean distance of an entity from where it started. Zero whenever the
/// entity did not move.
#[derive(Clone, Debug, PartialEq)]
pub struct Displacement {
    pub entity: EntityId,
    pub start: Vec<f64>,
}

impl RewardFn for Displacement {
    fn reward(&self, outcome: &Outcome) -> f64 {
        match outcome.get(&self.entity) {
            Some(p) => libm::sqrt(p.iter().zip(&self.start).map(|(a, b)| (a - b) * (a - b)).sum()),
            None => 0.0,
        }
    }
}

/// Stochastic hill climbing on an extrinsic reward.
///
/// The incumbent action is replaced only when a rollout strictly beats the
/// incumbent reward. The incumbent reward starts at a baseline (zero by
/// default: the reward of an environment where nothing happened), and until
/// something beats it actions are drawn uniformly.
pub struct HillClimber<R> {
    db: ExperienceDb,
    best: Option<ActionParams>,
    best_reward: f64,
    sigma: f64,
    reward: R,
    rng: RngStream,
}

impl<R: RewardFn> HillClimber<R> {
    pub fn new(env: &dyn Environment, params: &ExplorerParams, reward: R, rng: RngStream) -> Result<Self> {
        Self::with_baseline(env, params, reward, 0.0, rng)
    }

    pub fn with_baseline(
        env: &dyn Environment,
        params: &ExplorerParams,
        reward: R,
        baseline: f64,
        rng: RngStream,
    ) -> Result<Self> {
        params.validate()?;
        let spec = env.spec();
        Ok(HillClimber {
            db: ExperienceDb::new(spec.action_dim, spec.schema.clone()),
            best: None,
            best_reward: baseline,
            sigma: params.sigma_h,
            reward,
            rng,
        })
    }

    pub fn best(&self) -> Option<(&ActionParams, f64)> {
        self.best.as_ref().map(|a| (a, self.best_reward))
    }

    pub fn best_reward(&self) -> f64 {
        self.best_reward
    }
}

impl<R: RewardFn> Explorer for HillClimber<R> {
    fn name(&self) -> &'static str {
        "hillclimb"
    }

    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step> {
        let action = match &self.best {
            Some(best) => perturb(best, self.sigma, &mut self.rng),
            None => uniform_action(env.spec().action_dim, &mut self.rng),
        };
        let outcome = env.execute(&action)?;
        let r = self.reward.reward(&outcome);
        if r > self.best_reward {
            self.best_reward = r;
            self.best = Some(action.clone());
        }
        self.db.add(action.clone(), outcome.clone())?;
        let telemetry = Telemetry { best_reward: Some(self.best_reward), ..Telemetry::default() };
        Ok(Step { rollout: Rollout { tick, action, outcome, meta: None }, telemetry })
    }

    fn db(&self) -> &ExperienceDb {
        &self.db
    }
}
