//! Memory-based forward and inverse models over the experience database.
//!
//! Forward prediction averages the outcomes of the nearest stored actions.
//! Inverse inference retrieves the stored action whose outcome projection is
//! closest to a goal and perturbs it with Gaussian noise.

mod index;

use alloc::format;
use alloc::vec::Vec;

use rand::RngCore;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::{ActionParams, GoalSpaceId, Outcome, OutcomeSchema};

pub use index::{NearestIndex, Neighbor, KD_THRESHOLD};

#[derive(Clone, Debug)]
pub struct ExperienceDb {
    action_dim: usize,
    schema: OutcomeSchema,
    actions: Vec<ActionParams>,
    outcomes: Vec<Outcome>,
    action_index: NearestIndex,
    space_indices: Vec<(GoalSpaceId, NearestIndex)>,
}

impl ExperienceDb {
    pub fn new(action_dim: usize, schema: OutcomeSchema) -> Self {
        let space_indices = schema.entities.iter().map(|e| (e.id.clone(), NearestIndex::new(e.dim()))).collect();
        ExperienceDb {
            action_dim,
            schema,
            actions: Vec::new(),
            outcomes: Vec::new(),
            action_index: NearestIndex::new(action_dim),
            space_indices,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn schema(&self) -> &OutcomeSchema {
        &self.schema
    }

    pub fn action(&self, i: usize) -> &ActionParams {
        &self.actions[i]
    }

    pub fn outcome(&self, i: usize) -> &Outcome {
        &self.outcomes[i]
    }

    /// Number of projections indexed for one goal space.
    pub fn space_len(&self, space: &GoalSpaceId) -> Result<usize> {
        Ok(self.space_index(space)?.len())
    }

    fn space_index(&self, space: &GoalSpaceId) -> Result<&NearestIndex> {
        self.space_indices
            .iter()
            .find(|(id, _)| id == space)
            .map(|(_, idx)| idx)
            .ok_or_else(|| Error::schema(format!("unknown goal space `{space}`")))
    }

    /// Stores one experience and indexes it under every goal space.
    pub fn add(&mut self, action: ActionParams, outcome: Outcome) -> Result<()> {
        if action.dim() != self.action_dim {
            return Err(Error::schema(format!(
                "action has {} components, database expects {}",
                action.dim(),
                self.action_dim
            )));
        }
        self.schema.validate(&outcome)?;
        self.action_index.push(action.as_slice());
        for ((_, idx), (_, values)) in self.space_indices.iter_mut().zip(outcome.iter()) {
            idx.push(values);
        }
        self.actions.push(action);
        self.outcomes.push(outcome);
        Ok(())
    }

    /// Entity-wise mean outcome of the `k` stored actions nearest to `action`.
    pub fn predict(&self, action: &ActionParams, k: usize) -> Result<Outcome> {
        if self.is_empty() {
            return Err(Error::Unavailable("forward model has no data"));
        }
        if k == 0 {
            return Err(Error::domain("k must be >= 1"));
        }
        if action.dim() != self.action_dim {
            return Err(Error::schema("query action has the wrong dimension"));
        }
        let neighbors = self.action_index.knn(action.as_slice(), k);
        let mut sum = alloc::vec![0.0; self.schema.total_dim()];
        for n in &neighbors {
            for (s, v) in sum.iter_mut().zip(self.outcomes[n.index].concat()) {
                *s += v;
            }
        }
        let count = neighbors.len() as f64;
        sum.iter_mut().for_each(|s| *s /= count);
        Outcome::from_concat(&self.schema, &sum)
    }

    /// Index of the stored experience whose projection on `space` is nearest to `goal`.
    pub fn nearest_in_space(&self, space: &GoalSpaceId, goal: &[f64]) -> Result<Neighbor> {
        let idx = self.space_index(space)?;
        if goal.len() != idx.dim() {
            return Err(Error::schema(format!(
                "goal has {} components, space `{space}` has {}",
                goal.len(),
                idx.dim()
            )));
        }
        idx.nearest(goal).ok_or(Error::Unavailable("inverse model has no data"))
    }

    /// Action expected to reach `goal` in `space`: the best stored action plus
    /// `N(0, σ²)` noise per component, clamped to `[-1, 1]`.
    pub fn infer_action<R: RngCore + ?Sized>(
        &self,
        goal: &[f64],
        space: &GoalSpaceId,
        sigma: f64,
        rng: &mut R,
    ) -> Result<ActionParams> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        let best = self.nearest_in_space(space, goal)?;
        Ok(perturb(&self.actions[best.index], sigma, rng))
    }
}

/// Adds i.i.d. Gaussian noise to every component and clamps to `[-1, 1]`.
pub fn perturb<R: RngCore + ?Sized>(action: &ActionParams, sigma: f64, rng: &mut R) -> ActionParams {
    if sigma == 0.0 {
        return action.clone();
    }
    let noise = Normal::new(0.0, sigma).expect("sigma validated by caller");
    ActionParams::clamped(action.as_slice().iter().map(|v| v + noise.sample(rng)).collect())
}

/// Normalized distance between two outcomes of the same schema: Euclidean
/// norm of the concatenated differences divided by the schema diameter.
pub fn prediction_error(schema: &OutcomeSchema, predicted: &Outcome, observed: &Outcome) -> Result<f64> {
    schema.validate(predicted)?;
    schema.validate(observed)?;
    let d2 = index::dist2(&predicted.concat(), &observed.concat());
    Ok(libm::sqrt(d2) / schema.diameter())
}
