//! Cross-group comparison of run summaries on one scalar metric.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::run::{Summary, SUMMARY_FILE};
use crate::stats::{mann_whitney, spread, Spread};

/// Minimum runs per group.
pub const MIN_SEEDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStats {
    pub name: String,
    pub values: Vec<f64>,
    #[serde(flatten)]
    pub spread: Spread,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairTest {
    pub a: String,
    pub b: String,
    pub u: f64,
    pub p: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub metric: String,
    pub groups: Vec<GroupStats>,
    /// Two-sided Mann-Whitney test for every pair of groups.
    pub tests: Vec<PairTest>,
}

/// Every `summary.json` at or below `dir`, in path order.
pub fn find_summaries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        if entry.file_type().is_file() && entry.file_name() == SUMMARY_FILE {
            found.push(entry.into_path());
        }
    }
    Ok(found)
}

pub fn load_group(dir: &Path) -> Result<Vec<Summary>> {
    find_summaries(dir)?.iter().map(|p| Summary::read(p)).collect()
}

pub fn compare(groups: &[(String, Vec<Summary>)], metric: &str) -> Result<Comparison> {
    if groups.len() < 2 {
        return Err(Error::Analysis(format!("need at least 2 groups, got {}", groups.len())));
    }
    let mut stats = Vec::with_capacity(groups.len());
    for (name, runs) in groups {
        if runs.len() < MIN_SEEDS {
            return Err(Error::Analysis(format!("group `{name}` has {} runs, need at least {MIN_SEEDS}", runs.len())));
        }
        let values = runs.iter().map(|s| s.metric(metric)).collect::<Result<Vec<_>>>()?;
        let spread = spread(&values).expect("non-empty group");
        stats.push(GroupStats { name: name.clone(), values, spread });
    }
    let mut tests = Vec::new();
    for i in 0..stats.len() {
        for j in i + 1..stats.len() {
            let r = mann_whitney(&stats[i].values, &stats[j].values)?;
            tests.push(PairTest { a: stats[i].name.clone(), b: stats[j].name.clone(), u: r.u, p: r.p, exact: r.exact });
        }
    }
    Ok(Comparison { metric: metric.to_string(), groups: stats, tests })
}
