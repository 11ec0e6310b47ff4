//! Non-stationary bandit over a changing set of arms.
//!
//! Arms are picked with probability `ε/K + (1-ε)·interestᵢ/Σinterest`. When
//! every interest is zero the proportional term is uniform. Interests are
//! pushed in from outside on every step via [`ArmSet::sync`], so the bandit
//! keeps no value estimates of its own.

use alloc::format;
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Arm<Id> {
    pub id: Id,
    pub interest: f64,
    pub selections: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmSet<Id> {
    arms: Vec<Arm<Id>>,
    epsilon: f64,
}

impl<Id: Clone + PartialEq + Debug> ArmSet<Id> {
    /// Fresh arm set; every arm starts with zero selections.
    pub fn new(arms: &[(Id, f64)], epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::domain(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let mut set = ArmSet { arms: Vec::new(), epsilon };
        set.sync(arms)?;
        Ok(set)
    }

    pub fn arms(&self) -> &[Arm<Id>] {
        &self.arms
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Selection probabilities, in arm order.
    pub fn selection_distribution(&self) -> Vec<f64> {
        let k = self.arms.len() as f64;
        let total: f64 = self.arms.iter().map(|a| a.interest).sum();
        self.arms
            .iter()
            .map(|a| {
                let share = if total > 0.0 { a.interest / total } else { 1.0 / k };
                self.epsilon / k + (1.0 - self.epsilon) * share
            })
            .collect()
    }

    /// Samples an arm index, bumps its selection count and returns its id.
    pub fn select<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Id {
        let probs = self.selection_distribution();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = Some(i);
                break;
            }
        }
        // Rounding can leave the cumulative sum a hair under 1.
        let i = chosen.unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0));
        self.arms[i].selections += 1;
        self.arms[i].id.clone()
    }

    /// Replaces the arm set. Known ids keep their selection counts, new ids
    /// start at zero, missing ids are dropped.
    pub fn sync(&mut self, current: &[(Id, f64)]) -> Result<()> {
        if current.is_empty() {
            return Err(Error::schema("arm set must hold at least one arm"));
        }
        let mut next = Vec::with_capacity(current.len());
        for (i, (id, interest)) in current.iter().enumerate() {
            if current[..i].iter().any(|(other, _)| other == id) {
                return Err(Error::schema(format!("duplicate arm id {id:?}")));
            }
            if !(*interest >= 0.0) || !interest.is_finite() {
                return Err(Error::domain(format!("arm {id:?} has invalid interest {interest}")));
            }
            let selections = self.arms.iter().find(|a| &a.id == id).map_or(0, |a| a.selections);
            next.push(Arm { id: id.clone(), interest: *interest, selections });
        }
        self.arms = next;
        Ok(())
    }
}
