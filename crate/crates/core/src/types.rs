//! Domain types shared by every module: actions, outcomes and rollouts.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Name of an environment entity (`hand`, `ball`, ...).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

/// Goal spaces are per-entity projections of the outcome, so they share ids.
pub type GoalSpaceId = EntityId;

impl EntityId {
    pub fn new(name: impl Into<String>) -> Self {
        EntityId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId(s.to_owned())
    }
}

/// Motor parameters in normalized units, every component in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionParams(Vec<f64>);

impl ActionParams {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < -1.0 || *v > 1.0 {
                return Err(Error::domain(format!("action component {i} = {v} outside [-1, 1]")));
            }
        }
        Ok(ActionParams(values))
    }

    /// Clamps every component into `[-1, 1]`. Non-finite components become 0.
    pub fn clamped(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            *v = if v.is_finite() { v.clamp(-1.0, 1.0) } else { 0.0 };
        }
        ActionParams(values)
    }

    pub fn zeros(dim: usize) -> Self {
        ActionParams(alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ActionParams {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ActionParams::new(values)
    }
}

impl From<ActionParams> for Vec<f64> {
    fn from(a: ActionParams) -> Vec<f64> {
        a.0
    }
}

/// Declared layout of one entity's sub-vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntitySpec {
    pub id: EntityId,
    /// Per-dimension `(lo, hi)`.
    pub bounds: Vec<(f64, f64)>,
}

impl EntitySpec {
    pub fn new(id: &str, bounds: Vec<(f64, f64)>) -> Self {
        EntitySpec { id: EntityId::from(id), bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Euclidean norm of the bounds extent.
    pub fn diameter(&self) -> f64 {
        libm::sqrt(self.bounds.iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum())
    }
}

/// Ordered list of entities making up an outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSchema {
    pub entities: Vec<EntitySpec>,
}

impl OutcomeSchema {
    pub fn new(entities: Vec<EntitySpec>) -> Result<Self> {
        for (i, e) in entities.iter().enumerate() {
            if entities[..i].iter().any(|o| o.id == e.id) {
                return Err(Error::schema(format!("duplicate entity `{}`", e.id)));
            }
            for (lo, hi) in &e.bounds {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::schema(format!("entity `{}` has invalid bounds ({lo}, {hi})", e.id)));
                }
            }
        }
        Ok(OutcomeSchema { entities })
    }

    pub fn entity(&self, id: &EntityId) -> Result<&EntitySpec> {
        self.entities.iter().find(|e| &e.id == id).ok_or_else(|| Error::schema(format!("unknown entity `{id}`")))
    }

    /// Total number of outcome coordinates.
    pub fn total_dim(&self) -> usize {
        self.entities.iter().map(EntitySpec::dim).sum()
    }

    /// Concatenated bounds of all entities, in schema order.
    pub fn flat_bounds(&self) -> Vec<(f64, f64)> {
        self.entities.iter().flat_map(|e| e.bounds.iter().copied()).collect()
    }

    /// Norm of the concatenated bounds extent.
    pub fn diameter(&self) -> f64 {
        libm::sqrt(self.flat_bounds().iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum())
    }

    /// Checks keys, order, dimensions and finiteness of an outcome.
    pub fn validate(&self, outcome: &Outcome) -> Result<()> {
        if outcome.len() != self.entities.len() {
            return Err(Error::schema(format!(
                "outcome has {} entities, schema declares {}",
                outcome.len(),
                self.entities.len()
            )));
        }
        for (spec, (id, values)) in self.entities.iter().zip(outcome.iter()) {
            if &spec.id != id {
                return Err(Error::schema(format!("expected entity `{}`, found `{id}`", spec.id)));
            }
            if values.len() != spec.dim() {
                return Err(Error::schema(format!(
                    "entity `{id}` has {} components, expected {}",
                    values.len(),
                    spec.dim()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::schema(format!("entity `{id}` has a non-finite component")));
            }
        }
        Ok(())
    }
}

/// Observation of one rollout: a real sub-vector per entity, in schema order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Outcome {
    entries: Vec<(EntityId, Vec<f64>)>,
}

impl Outcome {
    pub fn new() -> Self {
        Outcome::default()
    }

    /// Builder-style insertion; replaces an existing entry with the same id.
    pub fn with(mut self, id: &str, values: Vec<f64>) -> Self {
        self.insert(EntityId::from(id), values);
        self
    }

    pub fn insert(&mut self, id: EntityId, values: Vec<f64>) {
        match self.entries.iter_mut().find(|(k, _)| *k == id) {
            Some((_, v)) => *v = values,
            None => self.entries.push((id, values)),
        }
    }

    pub fn get(&self, id: &EntityId) -> Option<&[f64]> {
        self.entries.iter().find(|(k, _)| k == id).map(|(_, v)| v.as_slice())
    }

    /// The sub-vector for one goal space, unchanged.
    pub fn project(&self, space: &GoalSpaceId) -> Result<&[f64]> {
        self.get(space).ok_or_else(|| Error::schema(format!("outcome has no entity `{space}`")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityId, &[f64])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All components concatenated in entry order.
    pub fn concat(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|(_, v)| v.iter().copied()).collect()
    }

    /// Rebuilds an outcome from concatenated components laid out by `schema`.
    pub fn from_concat(schema: &OutcomeSchema, flat: &[f64]) -> Result<Self> {
        if flat.len() != schema.total_dim() {
            return Err(Error::schema(format!(
                "flat outcome has {} components, schema needs {}",
                flat.len(),
                schema.total_dim()
            )));
        }
        let mut out = Outcome::new();
        let mut offset = 0;
        for e in &schema.entities {
            out.entries.push((e.id.clone(), flat[offset..offset + e.dim()].to_vec()));
            offset += e.dim();
        }
        Ok(out)
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        struct OutcomeVisitor;

        impl<'de> Visitor<'de> for OutcomeVisitor {
            type Value = Outcome;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from entity name to an array of numbers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> core::result::Result<Outcome, A::Error> {
                let mut out = Outcome::new();
                while let Some((k, v)) = access.next_entry::<EntityId, Vec<f64>>()? {
                    if out.get(&k).is_some() {
                        return Err(serde::de::Error::custom(format!("duplicate entity `{k}`")));
                    }
                    out.entries.push((k, v));
                }
                Ok(out)
            }
        }

        deserializer.deserialize_map(OutcomeVisitor)
    }
}

/// Goal-directed metadata attached to a rollout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutMeta {
    pub explorer: String,
    pub goal_space: GoalSpaceId,
    pub goal: Vec<f64>,
}

/// One executed experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub tick: u64,
    pub action: ActionParams,
    pub outcome: Outcome,
    pub meta: Option<RolloutMeta>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_selects_entity() {
        let o = Outcome::new().with("hand", vec![0.2, 0.1]).with("ball", vec![1.5, 1.5]);
        assert_eq!(o.project(&"ball".into()).unwrap(), &[1.5, 1.5]);
        let o = Outcome::new().with("hand", vec![0.0, 0.0]);
        assert_eq!(o.project(&"hand".into()).unwrap(), &[0.0, 0.0]);
        assert!(matches!(o.project(&"ball".into()), Err(Error::Schema(_))));
    }

    #[test]
    fn action_bounds_checked() {
        assert!(ActionParams::new(vec![0.0, 1.0, -1.0]).is_ok());
        assert!(ActionParams::new(vec![1.5]).is_err());
        assert!(ActionParams::new(vec![f64::NAN]).is_err());
        assert_eq!(ActionParams::clamped(vec![3.0, -7.0, f64::NAN]).as_slice(), &[1.0, -1.0, 0.0]);
    }

    #[test]
    fn schema_validation() {
        let schema = OutcomeSchema::new(vec![
            EntitySpec::new("hand", vec![(-1.0, 1.0), (-1.0, 1.0)]),
            EntitySpec::new("ball", vec![(-2.0, 2.0), (-2.0, 2.0)]),
        ])
        .unwrap();
        let good = Outcome::new().with("hand", vec![0.0, 0.0]).with("ball", vec![1.0, 1.0]);
        schema.validate(&good).unwrap();
        let swapped = Outcome::new().with("ball", vec![1.0, 1.0]).with("hand", vec![0.0, 0.0]);
        assert!(schema.validate(&swapped).is_err());
        let short = Outcome::new().with("hand", vec![0.0]).with("ball", vec![1.0, 1.0]);
        assert!(schema.validate(&short).is_err());
        assert!((schema.diameter() - libm::sqrt(4.0 + 4.0 + 16.0 + 16.0)).abs() < 1e-12);
        let flat = good.concat();
        assert_eq!(Outcome::from_concat(&schema, &flat).unwrap(), good);
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(OutcomeSchema::new(vec![EntitySpec::new("x", vec![(1.0, 1.0)])]).is_err());
        assert!(OutcomeSchema::new(vec![
            EntitySpec::new("x", vec![(0.0, 1.0)]),
            EntitySpec::new("x", vec![(0.0, 1.0)])
        ])
        .is_err());
    }
}
