//! Run configuration.
//!
//! A config file is a single JSON object. Strategy parameters sit at the top
//! level next to the run identity; environment overrides live under `atb` and
//! `synthetic`. Command-line flags are merged into the object before it is
//! checked, so a file only needs the keys it changes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use curio_core::envs::{ArmToolBallConfig, SyntheticConfig};
use curio_core::explorers::ExplorerParams;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Synthetic,
    Atb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExplorerKind {
    Random,
    Iac,
    Imgep,
    Hillclimb,
}

impl EnvKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::Synthetic => "synthetic",
            EnvKind::Atb => "atb",
        }
    }
}

impl ExplorerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExplorerKind::Random => "random",
            ExplorerKind::Iac => "iac",
            ExplorerKind::Imgep => "imgep",
            ExplorerKind::Hillclimb => "hillclimb",
        }
    }
}

fn default_grid() -> usize {
    20
}

fn default_delta() -> f64 {
    0.05
}

fn check_field<T: serde::de::DeserializeOwned>(obj: &Map<String, Value>, key: &str) -> Result<()> {
    match obj.get(key) {
        None => Err(Error::config(key, "missing")),
        Some(v) => T::deserialize(v).map(drop).map_err(|e| Error::config(key, e.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub env: EnvKind,
    pub explorer: ExplorerKind,
    /// Total rollouts.
    pub budget: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub params: ExplorerParams,
    /// Coverage cells per dimension of each entity space.
    #[serde(default = "default_grid")]
    pub coverage_grid: usize,
    /// Displacement from rest that counts as control.
    #[serde(default = "default_delta")]
    pub control_delta: f64,
    #[serde(default)]
    pub atb: ArmToolBallConfig,
    #[serde(default)]
    pub synthetic: SyntheticConfig,
}

impl RunConfig {
    pub fn new(env: EnvKind, explorer: ExplorerKind, budget: u64, seed: u64) -> Self {
        RunConfig {
            env,
            explorer,
            budget,
            seed,
            out: None,
            params: ExplorerParams::default(),
            coverage_grid: default_grid(),
            control_delta: default_delta(),
            atb: ArmToolBallConfig::default(),
            synthetic: SyntheticConfig::default(),
        }
    }

    /// Parses a JSON object, rejecting unknown keys and out-of-range values.
    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(given) = &value else {
            return Err(Error::config("<root>", "config must be a JSON object"));
        };
        let given_keys: BTreeSet<String> = given.keys().cloned().collect();
        // `flatten` hides field paths from the error, so check the run identity up front
        check_field::<EnvKind>(given, "env")?;
        check_field::<ExplorerKind>(given, "explorer")?;
        check_field::<u64>(given, "budget")?;
        check_field::<u64>(given, "seed")?;
        let cfg: RunConfig = serde_path_to_error::deserialize(value.clone()).map_err(|e| {
            let key = e.path().to_string();
            Error::config(if key == "." { "<root>".to_string() } else { key }, e.into_inner().to_string())
        })?;
        // `flatten` swallows unknown top-level keys, so compare against what we understood
        let Value::Object(known) =
            serde_json::to_value(RunConfig { out: Some(PathBuf::new()), ..cfg.clone() }).expect("config serializes")
        else {
            unreachable!("config serializes to an object")
        };
        if let Some(unknown) = given_keys.iter().find(|k| !known.contains_key(*k)) {
            return Err(Error::config(unknown.clone(), "unknown key"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file, overlaying `overrides` (typically command-line flags) on top.
    pub fn load(path: Option<&Path>, overrides: Map<String, Value>) -> Result<Self> {
        let mut obj = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                match serde_json::from_str(&text).map_err(|e| Error::parse(p, e))? {
                    Value::Object(m) => m,
                    _ => return Err(Error::parse(p, "config must be a JSON object")),
                }
            }
            None => Map::new(),
        };
        obj.extend(overrides);
        Self::from_value(Value::Object(obj))
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::config("budget", "must be >= 1"));
        }
        if self.coverage_grid == 0 {
            return Err(Error::config("coverage_grid", "must be >= 1"));
        }
        if !(self.control_delta > 0.0 && self.control_delta.is_finite()) {
            return Err(Error::config("control_delta", "must be finite and > 0"));
        }
        self.params.validate().map_err(|e| match e {
            curio_core::Error::Param { key, expected } => Error::config(key, format!("must be {expected}")),
            other => Error::config("<params>", other.to_string()),
        })?;
        match self.env {
            EnvKind::Atb => self.atb.validate().map_err(|e| Error::config("atb", e.to_string()))?,
            EnvKind::Synthetic => {
                curio_core::envs::Synthetic::new(self.synthetic.clone(), curio_core::rng::seeded_rng(0, "check"))
                    .map_err(|e| Error::config("synthetic", e.to_string()))?;
                if self.explorer == ExplorerKind::Hillclimb {
                    return Err(Error::config("explorer", "hillclimb needs the atb environment (ball reward)"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({"env": "atb", "explorer": "imgep", "budget": 10, "seed": 3})
    }

    fn key_of(r: Result<RunConfig>) -> String {
        match r {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_value(base()).unwrap();
        assert_eq!(cfg, RunConfig::new(EnvKind::Atb, ExplorerKind::Imgep, 10, 3));
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::new(EnvKind::Synthetic, ExplorerKind::Iac, 3000, 7);
        cfg.params.theta = 12;
        cfg.synthetic.noise_std = 0.02;
        cfg.out = Some("runs/x".into());
        let back = RunConfig::from_value(serde_json::from_str(&cfg.to_json()).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_name_the_key() {
        let mut v = base();
        v["rho"] = json!(1.5);
        assert_eq!(key_of(RunConfig::from_value(v)), "rho");

        let mut v = base();
        v["budget"] = json!(0);
        assert_eq!(key_of(RunConfig::from_value(v)), "budget");

        let mut v = base();
        v["bogus"] = json!(1);
        assert_eq!(key_of(RunConfig::from_value(v)), "bogus");

        let mut v = base();
        v["atb"] = json!({"gian": 0.1});
        assert!(key_of(RunConfig::from_value(v)).starts_with("atb"));

        let mut v = base();
        v["explorer"] = json!("greedy");
        assert_eq!(key_of(RunConfig::from_value(v)), "explorer");

        let v = json!({"env": "atb", "budget": 1, "seed": 0});
        assert_eq!(key_of(RunConfig::from_value(v)), "explorer");

        let mut v = base();
        v["env"] = json!("synthetic");
        v["explorer"] = json!("hillclimb");
        assert_eq!(key_of(RunConfig::from_value(v)), "explorer");
    }
}
