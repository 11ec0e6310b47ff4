//! Exploration strategies under comparison.
//!
//! Every strategy issues exactly one environment execution per [`Explorer::step`],
//! so budgets are comparable across strategies.

mod activity;
mod hillclimb;
mod iac;
mod imgep;
mod random;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::models::ExperienceDb;
use crate::regions::RegionDump;
use crate::types::Rollout;

pub use activity::ActivityLp;
pub use hillclimb::{Displacement, HillClimber, RewardFn};
pub use iac::Iac;
pub use imgep::{GoalSpace, Imgep};
pub use random::RandomBabbling;

/// Tunable parameters shared by all strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplorerParams {
    /// Learning-progress half-window (θ).
    pub theta: usize,
    /// Bandit exploration floor (ε).
    pub epsilon: f64,
    /// Bootstrap interest for under-sampled arms (ε₀).
    pub epsilon0: f64,
    /// Exemplars per region before a split (C).
    pub split_capacity: usize,
    /// Candidate cuts per dimension (K).
    pub split_candidates: usize,
    /// Neighbors averaged by the forward model.
    pub k: usize,
    /// Goal-directed perturbation std, in action units (σ).
    pub sigma: f64,
    /// Probability of a random action inside goal exploration (ρ).
    pub rho: f64,
    /// Hill-climbing perturbation std (σ_h).
    pub sigma_h: f64,
}

impl Default for ExplorerParams {
    fn default() -> Self {
        ExplorerParams {
            theta: 25,
            epsilon: 0.1,
            epsilon0: 0.01,
            split_capacity: 40,
            split_candidates: 5,
            k: 1,
            sigma: 0.05,
            rho: 0.2,
            sigma_h: 0.1,
        }
    }
}

impl ExplorerParams {
    /// Checks every parameter against its documented range; the error names the key.
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &'static str, expected: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Param { key, expected })
            }
        };
        check(self.theta >= 1, "theta", ">= 1")?;
        check((0.0..=1.0).contains(&self.epsilon), "epsilon", "in [0, 1]")?;
        check(self.epsilon0 >= 0.0 && self.epsilon0.is_finite(), "epsilon0", "finite and >= 0")?;
        check(self.split_capacity >= 2, "split_capacity", ">= 2")?;
        check(self.split_candidates >= 1, "split_candidates", ">= 1")?;
        check(self.k >= 1, "k", ">= 1")?;
        check(self.sigma >= 0.0 && self.sigma.is_finite(), "sigma", "finite and >= 0")?;
        check((0.0..=1.0).contains(&self.rho), "rho", "in [0, 1]")?;
        check(self.sigma_h >= 0.0 && self.sigma_h.is_finite(), "sigma_h", "finite and >= 0")?;
        Ok(())
    }
}

/// Per-step bandit and reward state, for the metrics stream.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Telemetry {
    pub selected_arm: Option<String>,
    /// Current interest of every arm, after this step's update.
    pub interests: Vec<(String, f64)>,
    pub arm_count: usize,
    pub best_reward: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub rollout: Rollout,
    pub telemetry: Telemetry,
}

pub trait Explorer {
    fn name(&self) -> &'static str;

    /// Chooses an action, executes it once and learns from the result.
    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step>;

    fn db(&self) -> &ExperienceDb;

    /// Region tree snapshot, for strategies that grow one.
    fn region_dump(&self) -> Option<RegionDump> {
        None
    }
}

pub(crate) fn uniform_action<R: rand::RngCore + ?Sized>(dim: usize, rng: &mut R) -> crate::types::ActionParams {
    use rand::Rng;
    crate::types::ActionParams::clamped((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
}
