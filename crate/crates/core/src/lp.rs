//! Learning progress: how fast an error signal is going down.
//!
//! Progress over a history is the mean error of the older half of the last
//! `2θ` samples minus the mean error of the newer half. Interest clamps it at
//! zero, so flat curves (trivial or hopeless activities) and rising curves
//! (unlearnable noise getting sampled) both stop attracting attention.

use alloc::collections::VecDeque;
use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Window and bootstrap parameters for progress estimation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    /// Samples per half-window (θ).
    pub window: usize,
    /// Interest reported while fewer than `2θ` samples exist (ε₀).
    pub bootstrap: f64,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { window: 25, bootstrap: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpEstimate {
    /// Signed progress, error units per window.
    pub lp: f64,
    /// `max(0, lp)`, or the bootstrap value for under-sampled histories.
    pub interest: f64,
    pub window: usize,
}

/// Bounded ring of `(tick, error)` pairs; the oldest pair is evicted at capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorHistory {
    capacity: usize,
    samples: VecDeque<(u64, f64)>,
}

impl ErrorHistory {
    pub fn new(capacity: usize) -> Self {
        ErrorHistory { capacity: capacity.max(1), samples: VecDeque::with_capacity(capacity) }
    }

    /// History sized for a given window (capacity `2θ`).
    pub fn for_window(window: usize) -> Self {
        ErrorHistory::new(2 * window.max(1))
    }

    pub fn push(&mut self, tick: u64, error: f64) -> Result<()> {
        if !(error >= 0.0) || !error.is_finite() {
            return Err(Error::domain(format!("error must be a finite value >= 0, got {error}")));
        }
        if let Some(&(last, _)) = self.samples.back() {
            if tick <= last {
                return Err(Error::Ordering { expected: last + 1, got: tick });
            }
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back((tick, error));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &(u64, f64)> + ExactSizeIterator {
        self.samples.iter()
    }

    /// Progress over the last `2θ` samples, or the bootstrap estimate.
    pub fn learning_progress(&self, cfg: &LpConfig) -> Result<LpEstimate> {
        let theta = cfg.window;
        if theta == 0 {
            return Err(Error::domain("learning-progress window must be >= 1"));
        }
        if 2 * theta > self.capacity {
            return Err(Error::domain(format!("window 2x{theta} exceeds history capacity {}", self.capacity)));
        }
        let n = self.samples.len();
        if n < 2 * theta {
            return Ok(LpEstimate { lp: 0.0, interest: cfg.bootstrap, window: theta });
        }
        let tail = self.samples.range(n - 2 * theta..).map(|&(_, e)| e);
        let lp = two_window_progress(tail, theta);
        Ok(LpEstimate { lp, interest: interest_value(lp, cfg.bootstrap, n, theta), window: theta })
    }
}

/// Mean of the first `theta` values minus mean of the next `theta` values.
fn two_window_progress(mut errors: impl Iterator<Item = f64>, theta: usize) -> f64 {
    let older: f64 = errors.by_ref().take(theta).sum();
    let newer: f64 = errors.take(theta).sum();
    older / theta as f64 - newer / theta as f64
}

/// Progress over a whole tick-ordered error sequence, split into two equal
/// halves (the oldest sample is dropped when the length is odd). Sequences
/// shorter than two samples have zero progress.
pub fn sequence_progress(errors: &[f64]) -> f64 {
    let theta = errors.len() / 2;
    if theta == 0 {
        return 0.0;
    }
    two_window_progress(errors[errors.len() - 2 * theta..].iter().copied(), theta)
}

/// Interest of an arm given its progress and how many samples back it.
pub fn interest_value(lp: f64, bootstrap: f64, sample_count: usize, theta: usize) -> f64 {
    if sample_count < 2 * theta {
        bootstrap
    } else {
        lp.max(0.0)
    }
}
