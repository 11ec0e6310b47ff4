//! Single-run execution and its artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use curio_core::envs::{atb, ArmToolBall, Environment, Synthetic};
use curio_core::explorers::{ActivityLp, Displacement, Explorer, HillClimber, Iac, Imgep, RandomBabbling};
use curio_core::metrics::{displaced, CoverageGrid};
use curio_core::rng::seeded_rng;
use curio_core::store::{RecordError, RolloutStore};
use curio_core::{EntityId, Rollout};
use serde::{Deserialize, Serialize};

use crate::config::{EnvKind, ExplorerKind, RunConfig};
use crate::error::{Error, Result};
use crate::log::JsonlSink;

pub const CONFIG_FILE: &str = "config.json";
pub const LOG_FILE: &str = "rollouts.jsonl";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REGIONS_FILE: &str = "regions.json";

/// Environment for `cfg`, seeded from the run seed.
pub fn build_env(cfg: &RunConfig) -> Result<Box<dyn Environment + Send>> {
    let rng = seeded_rng(cfg.seed, "env");
    Ok(match cfg.env {
        EnvKind::Atb => Box::new(ArmToolBall::new(cfg.atb.clone(), rng)?),
        EnvKind::Synthetic => Box::new(Synthetic::new(cfg.synthetic.clone(), rng)?),
    })
}

/// Explorer for `cfg`. On the synthetic world `iac` selects among the four
/// fixed activities.
pub fn build_explorer(cfg: &RunConfig, env: &dyn Environment) -> Result<Box<dyn Explorer + Send>> {
    let rng = seeded_rng(cfg.seed, "explorer");
    let p = &cfg.params;
    Ok(match (cfg.explorer, cfg.env) {
        (ExplorerKind::Random, _) => Box::new(RandomBabbling::new(env, rng)),
        (ExplorerKind::Iac, EnvKind::Synthetic) => Box::new(ActivityLp::new(env, p, rng)?),
        (ExplorerKind::Iac, EnvKind::Atb) => Box::new(Iac::new(env, p, rng)?),
        (ExplorerKind::Imgep, _) => Box::new(Imgep::new(env, p, rng)?),
        (ExplorerKind::Hillclimb, EnvKind::Atb) => {
            let reward = Displacement { entity: atb::BALL.into(), start: cfg.atb.ball_start.to_vec() };
            Box::new(HillClimber::new(env, p, reward, rng)?)
        }
        (ExplorerKind::Hillclimb, EnvKind::Synthetic) => {
            return Err(Error::config("explorer", "hillclimb needs the atb environment (ball reward)"))
        }
    })
}

/// Machine-readable result of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub env: String,
    pub explorer: String,
    pub seed: u64,
    pub budget: u64,
    /// First tick each entity ended a rollout displaced from rest; `null` if never.
    pub first_control: BTreeMap<String, Option<u64>>,
    /// Occupied coverage cells per entity at the end of the run.
    pub coverage: BTreeMap<String, usize>,
    /// Per arm, the fraction of each budget quartile's selections that went to it.
    pub allocation: BTreeMap<String, [f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_reward: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<usize>,
}

impl Summary {
    /// Scalar metric by dotted name: `coverage.<entity>`, `first_control.<entity>`
    /// (a never-controlled entity counts as the full budget), `best_reward`,
    /// `regions` or `allocation.<arm>.<quartile 1-4>`.
    pub fn metric(&self, name: &str) -> Result<f64> {
        let unknown = || Error::Analysis(format!("unknown metric `{name}`"));
        let (head, rest) = name.split_once('.').unwrap_or((name, ""));
        match head {
            "coverage" => self.coverage.get(rest).map(|&c| c as f64).ok_or_else(unknown),
            "first_control" => {
                self.first_control.get(rest).map(|t| t.unwrap_or(self.budget) as f64).ok_or_else(unknown)
            }
            "best_reward" => self.best_reward.ok_or_else(unknown),
            "regions" => self.regions.map(|r| r as f64).ok_or_else(unknown),
            "allocation" => {
                let (arm, q) = rest.rsplit_once('.').ok_or_else(unknown)?;
                let q: usize = q.parse().ok().filter(|q| (1..=4).contains(q)).ok_or_else(unknown)?;
                Ok(self.allocation.get(arm).map_or(0.0, |f| f[q - 1]))
            }
            _ => Err(unknown()),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }
}

/// Everything a run produced that is not already in its files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    /// Arm selected at each tick, for strategies that select arms.
    pub selections: Vec<Option<String>>,
    pub rollouts: Vec<Rollout>,
    /// Directory holding the artifacts, if any were written.
    pub dir: Option<PathBuf>,
}

struct Files {
    dir: PathBuf,
    metrics: csv::Writer<BufWriter<File>>,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

/// Runs `cfg.budget` rollouts. When `cfg.out` is set the directory receives
/// the config, rollout log, metrics CSV and summary (plus the region tree
/// for region-based runs).
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut env = build_env(cfg)?;
    let mut explorer = build_explorer(cfg, env.as_ref())?;
    let spec = env.spec().clone();
    let entities: Vec<EntityId> = spec.schema.entities.iter().map(|e| e.id.clone()).collect();

    let mut files = match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let mut text = cfg.to_json();
            text.push('\n');
            fs::write(dir.join(CONFIG_FILE), text).map_err(|e| Error::io(dir.join(CONFIG_FILE), e))?;
            let mut metrics = csv::Writer::from_writer(create(dir, METRICS_FILE)?);
            let mut header = vec!["tick".to_string(), "selected_arm".into(), "arm_count".into(), "interests".into()];
            header.extend(entities.iter().map(|e| format!("controlled.{e}")));
            header.extend(entities.iter().map(|e| format!("coverage.{e}")));
            header.push("best_reward".into());
            metrics.write_record(&header).map_err(|e| Error::io(dir.join(METRICS_FILE), e.into()))?;
            Some(Files { dir: dir.clone(), metrics })
        }
        None => None,
    };
    let sink = match &files {
        Some(f) => Some(JsonlSink::create(&f.dir.join(LOG_FILE))?),
        None => None,
    };
    let mut store = RolloutStore::with_sink(SinkSlot(sink));

    let mut grids: Vec<CoverageGrid> = spec
        .schema
        .entities
        .iter()
        .map(|e| CoverageGrid::new(e.bounds.clone(), cfg.coverage_grid))
        .collect::<curio_core::Result<_>>()?;
    let rest: Vec<&[f64]> = entities.iter().map(|e| spec.rest.get(e).expect("rest covers schema")).collect();
    let mut first_control: Vec<Option<u64>> = vec![None; entities.len()];
    let mut selections = Vec::with_capacity(cfg.budget as usize);
    let mut best_reward = None;

    for tick in 0..cfg.budget {
        let step = explorer.step(env.as_mut(), tick)?;
        let mut controlled = Vec::with_capacity(entities.len());
        for (i, e) in entities.iter().enumerate() {
            let v = step.rollout.outcome.get(e).ok_or_else(|| Error::Schema(format!("rollout lacks `{e}`")))?;
            grids[i].add(v);
            let c = displaced(v, rest[i], cfg.control_delta);
            if c && first_control[i].is_none() {
                first_control[i] = Some(tick);
            }
            controlled.push(c);
        }
        best_reward = step.telemetry.best_reward.or(best_reward);
        if let Some(f) = &mut files {
            let t = &step.telemetry;
            let interests: Vec<String> = t.interests.iter().map(|(a, v)| format!("{a}={v}")).collect();
            let mut row = vec![
                tick.to_string(),
                t.selected_arm.clone().unwrap_or_default(),
                t.arm_count.to_string(),
                interests.join(";"),
            ];
            row.extend(controlled.iter().map(|&c| u8::from(c).to_string()));
            row.extend(grids.iter().map(|g| g.count().to_string()));
            row.push(t.best_reward.map(|r| r.to_string()).unwrap_or_default());
            f.metrics.write_record(&row).map_err(|e| Error::io(f.dir.join(METRICS_FILE), e.into()))?;
        }
        selections.push(step.telemetry.selected_arm);
        store.record(step.rollout).map_err(|e| match e {
            RecordError::Ordering { expected, got } => Error::Core(curio_core::Error::Ordering { expected, got }),
            RecordError::Sink(e) => Error::io(cfg.out.clone().unwrap_or_default().join(LOG_FILE), e),
        })?;
    }

    let tree = explorer.region_dump();
    let summary = Summary {
        env: cfg.env.as_str().into(),
        explorer: cfg.explorer.as_str().into(),
        seed: cfg.seed,
        budget: cfg.budget,
        first_control: entities.iter().map(|e| e.to_string()).zip(first_control).collect(),
        coverage: entities.iter().map(|e| e.to_string()).zip(grids.iter().map(CoverageGrid::count)).collect(),
        allocation: allocation(&selections, cfg.budget),
        best_reward,
        regions: tree.as_ref().map(count_leaves),
    };

    if let Some(mut f) = files {
        f.metrics.flush().map_err(|e| Error::io(f.dir.join(METRICS_FILE), e))?;
        store.sink_mut().map_or(Ok(()), SinkSlot::flush).map_err(|e| Error::io(f.dir.join(LOG_FILE), e))?;
        write_json(&f.dir, SUMMARY_FILE, &summary)?;
        if let Some(tree) = &tree {
            write_json(&f.dir, REGIONS_FILE, tree)?;
        }
    }
    Ok(RunOutcome { summary, selections, rollouts: store.into_rollouts(), dir: cfg.out.clone() })
}

fn count_leaves(d: &curio_core::regions::RegionDump) -> usize {
    if d.children.is_empty() {
        1
    } else {
        d.children.iter().map(count_leaves).sum()
    }
}

/// Fraction of each budget quartile's ticks that selected each arm.
pub fn allocation(selections: &[Option<String>], budget: u64) -> BTreeMap<String, [f64; 4]> {
    let quartile = |t: usize| ((t as u64 * 4) / budget.max(1)).min(3) as usize;
    let mut sizes = [0usize; 4];
    let mut counts: BTreeMap<String, [usize; 4]> = BTreeMap::new();
    for (t, s) in selections.iter().enumerate() {
        let q = quartile(t);
        sizes[q] += 1;
        if let Some(arm) = s {
            counts.entry(arm.clone()).or_default()[q] += 1;
        }
    }
    counts
        .into_iter()
        .map(|(arm, c)| (arm, [0, 1, 2, 3].map(|q| if sizes[q] == 0 { 0.0 } else { c[q] as f64 / sizes[q] as f64 })))
        .collect()
}

/// Optional log sink so in-memory runs share the recording path.
struct SinkSlot(Option<JsonlSink<BufWriter<File>>>);

impl SinkSlot {
    fn flush(&mut self) -> std::io::Result<()> {
        self.0.as_mut().map_or(Ok(()), JsonlSink::flush)
    }
}

impl curio_core::store::RolloutSink for SinkSlot {
    type Error = std::io::Error;

    fn write(&mut self, rollout: &Rollout) -> std::io::Result<()> {
        match &mut self.0 {
            Some(s) => s.write(rollout),
            None => Ok(()),
        }
    }
}

/// Runs seeds `0..seeds` of `base` in parallel, each into `out/seed-<s>`.
pub fn sweep(base: &RunConfig, seeds: u64, out: &Path) -> Result<Vec<Summary>> {
    use rayon::prelude::*;
    (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let cfg = RunConfig { seed, out: Some(out.join(format!("seed-{seed}"))), ..base.clone() };
            run_experiment(&cfg).map(|o| o.summary)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartile_allocation() {
        let sel: Vec<Option<String>> =
            ["a", "a", "b", "a", "b", "b", "b", "b"].iter().map(|s| Some(s.to_string())).collect();
        let alloc = allocation(&sel, 8);
        assert_eq!(alloc["a"], [1.0, 0.5, 0.0, 0.0]);
        assert_eq!(alloc["b"], [0.0, 0.5, 1.0, 1.0]);
        assert!(allocation(&[None, None], 2).is_empty());
    }

    #[test]
    fn metric_lookup() {
        let s = Summary {
            env: "atb".into(),
            explorer: "random".into(),
            seed: 0,
            budget: 100,
            first_control: [("ball".to_string(), None), ("hand".to_string(), Some(3))].into(),
            coverage: [("ball".to_string(), 1)].into(),
            allocation: [("tool".to_string(), [0.1, 0.2, 0.3, 0.4])].into(),
            best_reward: None,
            regions: None,
        };
        assert_eq!(s.metric("coverage.ball").unwrap(), 1.0);
        assert_eq!(s.metric("first_control.ball").unwrap(), 100.0);
        assert_eq!(s.metric("first_control.hand").unwrap(), 3.0);
        assert_eq!(s.metric("allocation.tool.3").unwrap(), 0.3);
        assert_eq!(s.metric("allocation.hand.1").unwrap(), 0.0);
        assert!(s.metric("coverage.moon").is_err());
        assert!(s.metric("allocation.tool.5").is_err());
        assert!(s.metric("best_reward").is_err());
    }
}
