use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::envs::Environment;
use crate::error::Result;
use crate::interest::ArmSet;
use crate::lp::LpConfig;
use crate::models::{prediction_error, ExperienceDb};
use crate::regions::{LeafId, RegionConfig, RegionDump, RegionTree};
use crate::rng::RngStream;
use crate::types::{ActionParams, Outcome, OutcomeSchema, Rollout};

use super::{Explorer, ExplorerParams, Step, Telemetry};

/// Region-based knowledge-progress exploration.
///
/// The region tree lives in the normalized sensorimotor space (action
/// coordinates followed by outcome coordinates, each mapped to `[0, 1]`).
/// Each step picks a leaf with the interest bandit, samples an action inside
/// the leaf's action slab, and files the forward model's prediction error
/// under the region the experience lands in.
#[derive(Clone, Debug)]
pub struct Iac {
    db: ExperienceDb,
    tree: RegionTree,
    arms: ArmSet<LeafId>,
    k: usize,
    action_dim: usize,
    outcome_bounds: Vec<(f64, f64)>,
    rng: RngStream,
}

impl Iac {
    pub fn new(env: &dyn Environment, params: &ExplorerParams, rng: RngStream) -> Result<Self> {
        params.validate()?;
        let spec = env.spec();
        let cfg = RegionConfig {
            capacity: params.split_capacity,
            candidates: params.split_candidates,
            // a leaf splits at C exemplars, so its progress window has to fit well below that
            lp: LpConfig { window: params.theta.min(params.split_capacity / 4).max(1), bootstrap: params.epsilon0 },
        };
        let dims = spec.action_dim + spec.schema.total_dim();
        let tree = RegionTree::new(alloc::vec![(0.0, 1.0); dims], cfg)?;
        let arms = ArmSet::new(&tree.leaves(), params.epsilon)?;
        Ok(Iac {
            db: ExperienceDb::new(spec.action_dim, spec.schema.clone()),
            tree,
            arms,
            k: params.k,
            action_dim: spec.action_dim,
            outcome_bounds: spec.schema.flat_bounds(),
            rng,
        })
    }

    pub fn tree(&self) -> &RegionTree {
        &self.tree
    }

    pub fn arms(&self) -> &ArmSet<LeafId> {
        &self.arms
    }

    fn region_point(&self, action: &ActionParams, outcome: &Outcome) -> Vec<f64> {
        let acts = action.as_slice().iter().map(|a| ((a + 1.0) * 0.5).clamp(0.0, 1.0));
        let outs = outcome
            .concat()
            .into_iter()
            .zip(&self.outcome_bounds)
            .map(|(x, (lo, hi))| ((x - lo) / (hi - lo)).clamp(0.0, 1.0));
        acts.chain(outs).collect()
    }

    fn error(&self, schema: &OutcomeSchema, action: &ActionParams, observed: &Outcome) -> Result<f64> {
        if self.db.is_empty() {
            // nothing to predict from yet: maximal normalized error
            return Ok(1.0);
        }
        let predicted = self.db.predict(action, self.k)?;
        prediction_error(schema, &predicted, observed)
    }
}

impl Explorer for Iac {
    fn name(&self) -> &'static str {
        "iac"
    }

    fn step(&mut self, env: &mut dyn Environment, tick: u64) -> Result<Step> {
        let leaf = self.arms.select(&mut self.rng);
        let bounds = self.tree.bounds(leaf).expect("arms track live leaves");
        let action = ActionParams::clamped(
            bounds[..self.action_dim].iter().map(|&(lo, hi)| 2.0 * self.rng.random_range(lo..=hi) - 1.0).collect(),
        );
        let outcome = env.execute(&action)?;
        let error = self.error(&env.spec().schema, &action, &outcome)?;
        let point = self.region_point(&action, &outcome);
        self.tree.insert(&point, error, tick)?;
        self.db.add(action.clone(), outcome.clone())?;
        self.arms.sync(&self.tree.leaves())?;

        let selected = self.arms.arms().iter().find(|a| a.id == leaf);
        let telemetry = Telemetry {
            selected_arm: Some(format!("region{leaf}")),
            // the leaf may have just split; report the interest it was chosen on when it survives
            interests: selected.map(|a| alloc::vec![(format!("region{leaf}"), a.interest)]).unwrap_or_default(),
            arm_count: self.arms.len(),
            best_reward: None,
        };
        Ok(Step { rollout: Rollout { tick, action, outcome, meta: None }, telemetry })
    }

    fn db(&self) -> &ExperienceDb {
        &self.db
    }

    fn region_dump(&self) -> Option<RegionDump> {
        Some(self.tree.dump())
    }
}
