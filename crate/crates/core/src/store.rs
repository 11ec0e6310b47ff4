//! Append-only rollout store with an optional write-through sink.

use alloc::vec::Vec;
use core::convert::Infallible;

use crate::types::Rollout;

/// Destination for rollouts as they are recorded (a log file, a socket...).
pub trait RolloutSink {
    type Error;

    fn write(&mut self, rollout: &Rollout) -> Result<(), Self::Error>;
}

/// Sink that discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoSink;

impl RolloutSink for NoSink {
    type Error = Infallible;

    fn write(&mut self, _: &Rollout) -> Result<(), Infallible> {
        Ok(())
    }
}

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum RecordError<E> {
    #[error("ordering error: expected tick {expected}, got {got}")]
    Ordering { expected: u64, got: u64 },
    #[error("sink write failed: {0}")]
    Sink(E),
}

#[derive(Debug)]
pub struct RolloutStore<S = NoSink> {
    rollouts: Vec<Rollout>,
    sink: Option<S>,
}

impl RolloutStore<NoSink> {
    pub fn new() -> Self {
        RolloutStore { rollouts: Vec::new(), sink: None }
    }
}

impl Default for RolloutStore<NoSink> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: RolloutSink> RolloutStore<S> {
    pub fn with_sink(sink: S) -> Self {
        RolloutStore { rollouts: Vec::new(), sink: Some(sink) }
    }

    /// Appends `r`, whose tick must equal the current length, and returns its index.
    ///
    /// The rollout is written to the sink first; on a sink failure the store
    /// is left unchanged.
    pub fn record(&mut self, r: Rollout) -> Result<usize, RecordError<S::Error>> {
        let expected = self.rollouts.len() as u64;
        if r.tick != expected {
            return Err(RecordError::Ordering { expected, got: r.tick });
        }
        if let Some(sink) = self.sink.as_mut() {
            sink.write(&r).map_err(RecordError::Sink)?;
        }
        self.rollouts.push(r);
        Ok(self.rollouts.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.rollouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rollouts.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Rollout> {
        self.rollouts.get(index)
    }

    pub fn rollouts(&self) -> &[Rollout] {
        &self.rollouts
    }

    pub fn sink_mut(&mut self) -> Option<&mut S> {
        self.sink.as_mut()
    }

    /// Drops the sink and returns the recorded rollouts.
    pub fn into_rollouts(self) -> Vec<Rollout> {
        self.rollouts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ActionParams, Outcome};

    fn rollout(tick: u64) -> Rollout {
        Rollout {
            tick,
            action: ActionParams::zeros(2),
            outcome: Outcome::new().with("hand", vec![0.0, 0.0]),
            meta: None,
        }
    }

    #[test]
    fn sequential_append() {
        let mut store = RolloutStore::new();
        assert_eq!(store.record(rollout(0)).unwrap(), 0);
        for t in 1..5 {
            store.record(rollout(t)).unwrap();
        }
        assert_eq!(store.record(rollout(5)).unwrap(), 5);
    }

    #[test]
    fn tick_gap_rejected() {
        let mut store = RolloutStore::new();
        for t in 0..5 {
            store.record(rollout(t)).unwrap();
        }
        assert_eq!(store.record(rollout(7)), Err(RecordError::Ordering { expected: 5, got: 7 }));
        assert_eq!(store.len(), 5);
    }

    struct FailingSink;

    impl RolloutSink for FailingSink {
        type Error = &'static str;

        fn write(&mut self, _: &Rollout) -> Result<(), &'static str> {
            Err("disk full")
        }
    }

    #[test]
    fn sink_error_propagates() {
        let mut store = RolloutStore::with_sink(FailingSink);
        assert_eq!(store.record(rollout(0)), Err(RecordError::Sink("disk full")));
        assert!(store.is_empty());
    }
}
