//! Behavioral diversity and control-onset measures over rollouts.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::types::{EntityId, Rollout};

/// Incremental count of occupied cells in a `g`-per-dimension grid.
#[derive(Clone, Debug)]
pub struct CoverageGrid {
    bounds: Vec<(f64, f64)>,
    g: usize,
    cells: BTreeSet<Vec<usize>>,
}

impl CoverageGrid {
    pub fn new(bounds: Vec<(f64, f64)>, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::domain("grid resolution must be >= 1"));
        }
        Ok(CoverageGrid { bounds, g, cells: BTreeSet::new() })
    }

    /// Marks the cell holding `p`; out-of-bounds points land in edge cells.
    pub fn add(&mut self, p: &[f64]) {
        let cell = p
            .iter()
            .zip(&self.bounds)
            .map(|(x, (lo, hi))| {
                let f = libm::floor((x - lo) / (hi - lo) * self.g as f64);
                if f.is_nan() || f < 0.0 {
                    0
                } else {
                    (f as usize).min(self.g - 1)
                }
            })
            .collect();
        self.cells.insert(cell);
    }

    pub fn count(&self) -> usize {
        self.cells.len()
    }
}

/// Number of distinct grid cells holding at least one point.
pub fn coverage<'a>(points: impl IntoIterator<Item = &'a [f64]>, bounds: &[(f64, f64)], g: usize) -> Result<usize> {
    let mut grid = CoverageGrid::new(bounds.to_vec(), g)?;
    for p in points {
        grid.add(p);
    }
    Ok(grid.count())
}

/// Whether `values` is more than `delta` (Euclidean) away from `rest`.
pub fn displaced(values: &[f64], rest: &[f64], delta: f64) -> bool {
    let d2: f64 = values.iter().zip(rest).map(|(a, b)| (a - b) * (a - b)).sum();
    libm::sqrt(d2) > delta
}

/// First tick at which `entity` ended a rollout more than `delta` away from its rest value.
pub fn first_control_time(log: &[Rollout], entity: &EntityId, rest: &[f64], delta: f64) -> Result<Option<u64>> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta must be > 0, got {delta}")));
    }
    for r in log {
        let values = r.outcome.get(entity).ok_or_else(|| Error::schema(format!("unknown entity `{entity}`")))?;
        if displaced(values, rest, delta) {
            return Ok(Some(r.tick));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ActionParams, Outcome};

    const UNIT: [(f64, f64); 2] = [(0.0, 1.0), (0.0, 1.0)];

    #[test]
    fn coverage_cases() {
        assert_eq!(coverage(core::iter::empty(), &UNIT, 20).unwrap(), 0);
        let p = [0.3, 0.3];
        assert_eq!(coverage([&p[..], &p[..]], &UNIT, 20).unwrap(), 1);
        let pts = [[0.1, 0.9], [0.7, 0.2], [5.0, -3.0]];
        assert_eq!(coverage(pts.iter().map(|p| &p[..]), &UNIT, 1).unwrap(), 1);
        assert_eq!(coverage(pts.iter().map(|p| &p[..]), &UNIT, 2).unwrap(), 2);
        // clamped to the same edge cell as (1.0, 0.0)
        let edge = [[1.0, 0.0], [7.0, -1.0]];
        assert_eq!(coverage(edge.iter().map(|p| &p[..]), &UNIT, 20).unwrap(), 1);
        assert!(coverage(core::iter::empty(), &UNIT, 0).is_err());
    }

    fn log(ball: &[[f64; 2]]) -> Vec<Rollout> {
        ball.iter()
            .enumerate()
            .map(|(t, b)| Rollout {
                tick: t as u64,
                action: ActionParams::zeros(1),
                outcome: Outcome::new().with("ball", b.to_vec()),
                meta: None,
            })
            .collect()
    }

    #[test]
    fn first_control_cases() {
        let rest = [1.5, 1.5];
        let still = log(&[rest; 30]);
        assert_eq!(first_control_time(&still, &"ball".into(), &rest, 0.05).unwrap(), None);

        let mut moved = [rest; 30];
        moved[17] = [1.2, 1.4];
        let moved = log(&moved);
        assert_eq!(first_control_time(&moved, &"ball".into(), &rest, 0.05).unwrap(), Some(17));
        assert_eq!(first_control_time(&moved, &"ball".into(), &rest, 100.0).unwrap(), None);
        assert!(matches!(first_control_time(&moved, &"tool".into(), &rest, 0.05), Err(Error::Schema(_))));
        assert!(first_control_time(&moved, &"ball".into(), &rest, 0.0).is_err());
    }
}
