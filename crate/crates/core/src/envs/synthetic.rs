//! Four activities with fixed error curves.
//!
//! Practicing an activity returns its error curve evaluated at the current
//! practice count plus observation noise, then bumps the count. The default
//! curves are one hopeless activity, a slow learner, a fast learner and a
//! trivial one.

use alloc::format;
use alloc::vec;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{ActionParams, EntitySpec, Outcome, OutcomeSchema};

pub const ACTIVITIES: usize = 4;
pub const ACTIVITY: &str = "activity";
pub const ERROR: &str = "error";

/// Error as a function of practice count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    Constant {
        value: f64,
    },
    /// `amplitude · exp(-n / tau) + floor`
    Exponential {
        amplitude: f64,
        tau: f64,
        floor: f64,
    },
}

impl Curve {
    pub fn eval(&self, n: u64) -> f64 {
        match *self {
            Curve::Constant { value } => value,
            Curve::Exponential { amplitude, tau, floor } => amplitude * libm::exp(-(n as f64) / tau) + floor,
        }
    }

    /// Slope at `n = 0`.
    pub fn initial_slope(&self) -> f64 {
        match *self {
            Curve::Constant { .. } => 0.0,
            Curve::Exponential { amplitude, tau, .. } => -amplitude / tau,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Curve::Constant { value } => (0.0..=1.0).contains(&value),
            Curve::Exponential { amplitude, tau, floor } => {
                amplitude >= 0.0 && tau > 0.0 && floor >= 0.0 && amplitude + floor <= 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("error curve {self:?} leaves [0, 1]")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Curves for activities 1 through 4.
    pub curves: [Curve; ACTIVITIES],
    pub noise_std: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            curves: [
                Curve::Constant { value: 0.9 },
                Curve::Exponential { amplitude: 0.75, tau: 1000.0, floor: 0.1 },
                Curve::Exponential { amplitude: 0.8, tau: 150.0, floor: 0.1 },
                Curve::Constant { value: 0.05 },
            ],
            noise_std: 0.01,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Synthetic {
    cfg: SyntheticConfig,
    spec: EnvSpec,
    counts: [u64; ACTIVITIES],
    noise: Option<Normal<f64>>,
    rng: RngStream,
}

impl Synthetic {
    pub fn new(cfg: SyntheticConfig, rng: RngStream) -> Result<Self> {
        for c in &cfg.curves {
            c.validate()?;
        }
        if !(cfg.noise_std >= 0.0) || !cfg.noise_std.is_finite() {
            return Err(Error::domain("noise std must be finite and >= 0"));
        }
        let noise = (cfg.noise_std > 0.0).then(|| Normal::new(0.0, cfg.noise_std).expect("validated std"));
        let schema = OutcomeSchema::new(vec![
            EntitySpec::new(ACTIVITY, vec![(0.5, ACTIVITIES as f64 + 0.5)]),
            EntitySpec::new(ERROR, vec![(0.0, 1.0)]),
        ])?;
        let rest = Outcome::new().with(ACTIVITY, vec![0.5]).with(ERROR, vec![0.0]);
        let spec = EnvSpec { name: "synthetic".into(), action_dim: 1, schema, rest };
        Ok(Synthetic { cfg, spec, counts: [0; ACTIVITIES], noise, rng })
    }

    pub fn config(&self) -> &SyntheticConfig {
        &self.cfg
    }

    /// Practice counts for activities 1 through 4.
    pub fn counts(&self) -> [u64; ACTIVITIES] {
        self.counts
    }

    /// Practices activity `activity` (1-based) once and returns the observed error.
    pub fn practice(&mut self, activity: usize) -> Result<f64> {
        if !(1..=ACTIVITIES).contains(&activity) {
            return Err(Error::domain(format!("activity {activity} outside 1..={ACTIVITIES}")));
        }
        let n = &mut self.counts[activity - 1];
        let mut e = self.cfg.curves[activity - 1].eval(*n);
        *n += 1;
        if let Some(noise) = &self.noise {
            e += noise.sample(&mut self.rng);
        }
        Ok(e.clamp(0.0, 1.0))
    }

    /// Activity selected by a one-component action: `[-1, 1]` cut in four equal bins.
    pub fn activity_of(action: &ActionParams) -> Result<usize> {
        match action.as_slice() {
            [a] => Ok((libm::floor((a + 1.0) * 0.5 * ACTIVITIES as f64) as usize + 1).min(ACTIVITIES)),
            _ => Err(Error::schema("synthetic environment expects a single action component")),
        }
    }

    /// Center of the action bin that selects `activity`.
    pub fn action_for(activity: usize) -> ActionParams {
        let width = 2.0 / ACTIVITIES as f64;
        ActionParams::clamped(vec![-1.0 + width * (activity as f64 - 0.5)])
    }
}

impl Environment for Synthetic {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn execute(&mut self, action: &ActionParams) -> Result<Outcome> {
        let activity = Self::activity_of(action)?;
        let e = self.practice(activity)?;
        Ok(Outcome::new().with(ACTIVITY, vec![activity as f64]).with(ERROR, vec![e]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn env() -> Synthetic {
        Synthetic::new(SyntheticConfig::default(), seeded_rng(0, "env")).unwrap()
    }

    #[test]
    fn trivial_and_fast_curves() {
        let mut e = env();
        let first = e.practice(4).unwrap();
        assert!((first - 0.05).abs() <= 0.03, "{first}");
        // the trivial curve does not drift with practice
        let mean = (0..400).map(|_| e.practice(4).unwrap()).sum::<f64>() / 400.0;
        assert!((mean - 0.05).abs() <= 3.0 * 0.01 / 20.0, "{mean}");
        assert!((e.practice(3).unwrap() - 0.9).abs() <= 0.03);
    }

    #[test]
    fn hard_activity_mean() {
        let mut e = env();
        let mean: f64 = (0..100).map(|_| e.practice(1).unwrap()).sum::<f64>() / 100.0;
        assert!((mean - 0.9).abs() < 0.01);
        assert_eq!(e.counts(), [100, 0, 0, 0]);
    }

    #[test]
    fn invalid_activity() {
        assert!(matches!(env().practice(0), Err(Error::Domain(_))));
        assert!(matches!(env().practice(5), Err(Error::Domain(_))));
    }

    #[test]
    fn fast_learner_starts_steeper() {
        let c = SyntheticConfig::default().curves;
        assert!(c[2].initial_slope().abs() > c[1].initial_slope().abs());
    }

    #[test]
    fn action_bins_round_trip() {
        for a in 1..=ACTIVITIES {
            assert_eq!(Synthetic::activity_of(&Synthetic::action_for(a)).unwrap(), a);
        }
        assert_eq!(Synthetic::activity_of(&ActionParams::new(vec![1.0]).unwrap()).unwrap(), 4);
        assert_eq!(Synthetic::activity_of(&ActionParams::new(vec![-1.0]).unwrap()).unwrap(), 1);
    }
}
