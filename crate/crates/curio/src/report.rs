//! Summary tables as CSV.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crate::compare::find_summaries;
use crate::error::{Error, Result};
use crate::run::Summary;

fn csv_err(e: csv::Error) -> Error {
    Error::io("<report>", e.into())
}

/// One row per run found under `dir`: identity, first-control ticks and
/// coverage per entity, best reward and region count.
pub fn runs_table<W: Write>(dir: &Path, out: W) -> Result<usize> {
    let paths = find_summaries(dir)?;
    let runs = paths.iter().map(|p| Summary::read(p)).collect::<Result<Vec<_>>>()?;
    let entities: BTreeSet<&String> =
        runs.iter().flat_map(|r| r.first_control.keys().chain(r.coverage.keys())).collect();

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["run".to_string(), "env".into(), "explorer".into(), "seed".into(), "budget".into()];
    header.extend(entities.iter().map(|e| format!("first_control.{e}")));
    header.extend(entities.iter().map(|e| format!("coverage.{e}")));
    header.extend(["best_reward".to_string(), "regions".into()]);
    w.write_record(&header).map_err(csv_err)?;
    for (path, r) in paths.iter().zip(&runs) {
        let run = path.parent().and_then(|p| p.strip_prefix(dir).ok()).map(|p| p.display().to_string());
        let mut row =
            vec![run.unwrap_or_default(), r.env.clone(), r.explorer.clone(), r.seed.to_string(), r.budget.to_string()];
        row.extend(
            entities
                .iter()
                .map(|e| r.first_control.get(*e).map_or(String::new(), |t| t.map_or("none".into(), |t| t.to_string()))),
        );
        row.extend(entities.iter().map(|e| r.coverage.get(*e).map_or(String::new(), |c| c.to_string())));
        row.push(r.best_reward.map(|b| b.to_string()).unwrap_or_default());
        row.push(r.regions.map(|b| b.to_string()).unwrap_or_default());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<report>", e))?;
    Ok(runs.len())
}

/// One row per run, arm and budget quartile: the arm's share of that quartile.
pub fn allocation_table<W: Write>(dir: &Path, out: W) -> Result<usize> {
    let paths = find_summaries(dir)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "explorer", "seed", "arm", "q1", "q2", "q3", "q4"]).map_err(csv_err)?;
    for path in &paths {
        let r = Summary::read(path)?;
        let run =
            path.parent().and_then(|p| p.strip_prefix(dir).ok()).map(|p| p.display().to_string()).unwrap_or_default();
        for (arm, f) in &r.allocation {
            let mut row = vec![run.clone(), r.explorer.clone(), r.seed.to_string(), arm.clone()];
            row.extend(f.iter().map(|x| x.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<report>", e))?;
    Ok(paths.len())
}
