//! Progressive partitioning of experience space.
//!
//! A region tree starts as one leaf covering the whole space. Every leaf keeps
//! the experiences that fell into it along with their errors; once a leaf holds
//! `C` exemplars it is cut in two along the axis-aligned plane that best
//! separates fast-improving experiences from slow ones. Leaves are the arms of
//! the interest bandit, so the arm set grows as the tree refines.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{sequence_progress, ErrorHistory, LpConfig};

pub type LeafId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    /// Exemplars that trigger a split (C).
    pub capacity: usize,
    /// Candidate cut values per dimension (K).
    pub candidates: usize,
    /// Progress window and bootstrap used for leaf interest.
    pub lp: LpConfig,
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig { capacity: 40, candidates: 5, lp: LpConfig { window: 10, bootstrap: 0.01 } }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exemplar {
    pub point: Vec<f64>,
    pub error: f64,
    pub tick: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitDecision {
    pub dim: usize,
    pub value: f64,
    /// `|lp_low - lp_high|` for this cut.
    pub score: f64,
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf { exemplars: Vec<Exemplar>, history: ErrorHistory },
    Split { dim: usize, value: f64, children: [usize; 2] },
}

#[derive(Clone, Debug)]
struct RegionNode {
    bounds: Vec<(f64, f64)>,
    kind: NodeKind,
}

#[derive(Clone, Debug)]
pub struct RegionTree {
    nodes: Vec<RegionNode>,
    cfg: RegionConfig,
    inserted: usize,
}

/// Debug view of a (sub)tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionDump {
    pub id: usize,
    pub bounds: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<(usize, f64)>,
    pub exemplars: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interest: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<RegionDump>,
}

impl RegionTree {
    pub fn new(bounds: Vec<(f64, f64)>, cfg: RegionConfig) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::domain("region space needs at least one dimension"));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::domain(format!("invalid region bounds ({lo}, {hi})")));
        }
        if cfg.capacity < 2 || cfg.candidates == 0 {
            return Err(Error::domain("region capacity must be >= 2 and candidates >= 1"));
        }
        if cfg.lp.window == 0 {
            return Err(Error::domain("region progress window must be >= 1"));
        }
        let root = RegionNode { bounds, kind: Self::fresh_leaf(&cfg, Vec::new()) };
        Ok(RegionTree { nodes: alloc::vec![root], cfg, inserted: 0 })
    }

    fn fresh_leaf(cfg: &RegionConfig, exemplars: Vec<Exemplar>) -> NodeKind {
        let mut history = ErrorHistory::new(cfg.capacity.max(2 * cfg.lp.window));
        for e in &exemplars {
            // exemplars arrive sorted by tick with unique ticks
            let _ = history.push(e.tick, e.error);
        }
        NodeKind::Leaf { exemplars, history }
    }

    pub fn config(&self) -> &RegionConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].bounds.len()
    }

    pub fn root_bounds(&self) -> &[(f64, f64)] {
        &self.nodes[0].bounds
    }

    /// Total exemplars ever inserted.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Leaf whose bounds contain `point`.
    pub fn region_of(&self, point: &[f64]) -> Result<LeafId> {
        self.check_point(point)?;
        let mut id = 0;
        loop {
            match &self.nodes[id].kind {
                NodeKind::Leaf { .. } => return Ok(id),
                NodeKind::Split { dim, value, children } => {
                    id = if point[*dim] < *value { children[0] } else { children[1] };
                }
            }
        }
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        let bounds = self.root_bounds();
        if point.len() != bounds.len() {
            return Err(Error::domain(format!("point has {} dims, region space has {}", point.len(), bounds.len())));
        }
        for (i, (x, (lo, hi))) in point.iter().zip(bounds).enumerate() {
            if !(x >= lo && x <= hi) {
                return Err(Error::domain(format!("coordinate {i} = {x} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Adds one experience and splits its leaf if it is full. Returns the
    /// leaf containing the point after any split.
    pub fn insert(&mut self, point: &[f64], error: f64, tick: u64) -> Result<LeafId> {
        let leaf = self.region_of(point)?;
        let RegionNode { kind: NodeKind::Leaf { exemplars, history }, .. } = &mut self.nodes[leaf] else {
            unreachable!("region_of returns leaves")
        };
        history.push(tick, error)?;
        exemplars.push(Exemplar { point: point.to_vec(), error, tick });
        self.inserted += 1;
        if exemplars.len() < self.cfg.capacity {
            return Ok(leaf);
        }
        match self.maybe_split(leaf) {
            Some(decision) => {
                let children = self.apply_split(leaf, decision);
                Ok(if point[decision.dim] < decision.value { children[0] } else { children[1] })
            }
            None => Ok(leaf),
        }
    }

    /// Best cut for a leaf, or `None` when it is not a leaf or no cut
    /// leaves both sides non-empty.
    pub fn maybe_split(&self, leaf: LeafId) -> Option<SplitDecision> {
        match &self.nodes.get(leaf)?.kind {
            NodeKind::Leaf { exemplars, .. } => best_split(exemplars, self.cfg.candidates),
            NodeKind::Split { .. } => None,
        }
    }

    fn apply_split(&mut self, leaf: LeafId, decision: SplitDecision) -> [usize; 2] {
        let parent = &mut self.nodes[leaf];
        let NodeKind::Leaf { exemplars, .. } = core::mem::replace(
            &mut parent.kind,
            NodeKind::Split { dim: decision.dim, value: decision.value, children: [0, 0] },
        ) else {
            unreachable!("only leaves are split")
        };
        let (mut low, mut high): (Vec<_>, Vec<_>) =
            exemplars.into_iter().partition(|e| e.point[decision.dim] < decision.value);
        low.sort_by_key(|e| e.tick);
        high.sort_by_key(|e| e.tick);

        let mut low_bounds = parent.bounds.clone();
        let mut high_bounds = parent.bounds.clone();
        low_bounds[decision.dim].1 = decision.value;
        high_bounds[decision.dim].0 = decision.value;

        let first = self.nodes.len();
        let children = [first, first + 1];
        if let NodeKind::Split { children: c, .. } = &mut self.nodes[leaf].kind {
            *c = children;
        }
        self.nodes.push(RegionNode { bounds: low_bounds, kind: Self::fresh_leaf(&self.cfg, low) });
        self.nodes.push(RegionNode { bounds: high_bounds, kind: Self::fresh_leaf(&self.cfg, high) });
        children
    }

    fn leaf_ids(&self) -> impl Iterator<Item = LeafId> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| matches!(n.kind, NodeKind::Leaf { .. }).then_some(i))
    }

    /// Every leaf once, with its current interest.
    pub fn leaves(&self) -> Vec<(LeafId, f64)> {
        self.leaf_ids().map(|id| (id, self.interest(id).unwrap_or(0.0))).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_ids().count()
    }

    pub fn interest(&self, leaf: LeafId) -> Option<f64> {
        match &self.nodes.get(leaf)?.kind {
            NodeKind::Leaf { history, .. } => history.learning_progress(&self.cfg.lp).ok().map(|e| e.interest),
            NodeKind::Split { .. } => None,
        }
    }

    pub fn bounds(&self, id: usize) -> Option<&[(f64, f64)]> {
        self.nodes.get(id).map(|n| n.bounds.as_slice())
    }

    pub fn exemplars(&self, leaf: LeafId) -> Option<&[Exemplar]> {
        match &self.nodes.get(leaf)?.kind {
            NodeKind::Leaf { exemplars, .. } => Some(exemplars),
            NodeKind::Split { .. } => None,
        }
    }

    pub fn history(&self, leaf: LeafId) -> Option<&ErrorHistory> {
        match &self.nodes.get(leaf)?.kind {
            NodeKind::Leaf { history, .. } => Some(history),
            NodeKind::Split { .. } => None,
        }
    }

    pub fn dump(&self) -> RegionDump {
        self.dump_node(0)
    }

    fn dump_node(&self, id: usize) -> RegionDump {
        let node = &self.nodes[id];
        match &node.kind {
            NodeKind::Leaf { exemplars, .. } => RegionDump {
                id,
                bounds: node.bounds.clone(),
                split: None,
                exemplars: exemplars.len(),
                interest: self.interest(id),
                children: Vec::new(),
            },
            NodeKind::Split { dim, value, children } => {
                let children: Vec<_> = children.iter().map(|&c| self.dump_node(c)).collect();
                RegionDump {
                    id,
                    bounds: node.bounds.clone(),
                    split: Some((*dim, *value)),
                    exemplars: children.iter().map(|c| c.exemplars).sum(),
                    interest: None,
                    children,
                }
            }
        }
    }
}

/// Candidate cut values on one dimension: midpoints between consecutive
/// distinct sorted coordinates, thinned to at most `k` evenly spaced by rank.
pub fn candidate_cuts(coords: &mut Vec<f64>, k: usize) -> Vec<f64> {
    coords.sort_by(f64::total_cmp);
    coords.dedup();
    let gaps = coords.len().saturating_sub(1);
    let picks: Vec<usize> =
        if gaps <= k { (0..gaps).collect() } else { (0..k).map(|j| (j + 1) * gaps / (k + 1)).collect() };
    picks.into_iter().map(|p| 0.5 * (coords[p] + coords[p + 1])).collect()
}

/// Scores every candidate cut by the difference in learning progress between
/// its two sides and returns the best one. Ties go to the lowest dimension,
/// then the lowest value.
pub fn best_split(exemplars: &[Exemplar], k: usize) -> Option<SplitDecision> {
    let dims = exemplars.first()?.point.len();
    let mut ordered: Vec<&Exemplar> = exemplars.iter().collect();
    ordered.sort_by_key(|e| e.tick);

    let mut best: Option<SplitDecision> = None;
    let mut low = Vec::with_capacity(ordered.len());
    let mut high = Vec::with_capacity(ordered.len());
    for dim in 0..dims {
        let mut coords: Vec<f64> = ordered.iter().map(|e| e.point[dim]).collect();
        for value in candidate_cuts(&mut coords, k) {
            low.clear();
            high.clear();
            for e in &ordered {
                if e.point[dim] < value {
                    low.push(e.error);
                } else {
                    high.push(e.error);
                }
            }
            if low.is_empty() || high.is_empty() {
                continue;
            }
            let score = libm::fabs(sequence_progress(&low) - sequence_progress(&high));
            if best.is_none_or(|b| score > b.score) {
                best = Some(SplitDecision { dim, value, score });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;

    fn unit(d: usize) -> Vec<(f64, f64)> {
        alloc::vec![(0.0, 1.0); d]
    }

    fn cfg(capacity: usize) -> RegionConfig {
        RegionConfig { capacity, candidates: 5, lp: LpConfig { window: 1, bootstrap: 0.01 } }
    }

    #[test]
    fn single_leaf_lookup() {
        let tree = RegionTree::new(unit(2), cfg(4)).unwrap();
        assert_eq!(tree.region_of(&[0.5, 0.5]).unwrap(), 0);
        assert_eq!(tree.region_of(&[1.0, 0.0]).unwrap(), 0);
        assert!(matches!(tree.region_of(&[1.5, 0.0]), Err(Error::Domain(_))));
        assert!(tree.region_of(&[0.5]).is_err());
    }

    #[test]
    fn split_routes_by_value() {
        let mut tree = RegionTree::new(unit(2), cfg(4)).unwrap();
        let children = tree.apply_split(0, SplitDecision { dim: 0, value: 0.5, score: 0.0 });
        assert_eq!(tree.region_of(&[0.2, 0.9]).unwrap(), children[0]);
        assert_eq!(tree.region_of(&[0.5, 0.9]).unwrap(), children[1]);
    }

    #[test]
    fn no_split_below_capacity() {
        let mut tree = RegionTree::new(unit(2), cfg(4)).unwrap();
        tree.insert(&[0.1, 0.1], 0.5, 0).unwrap();
        tree.insert(&[0.9, 0.9], 0.5, 1).unwrap();
        tree.insert(&[0.5, 0.2], 0.5, 2).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.exemplars(0).unwrap().len(), 3);
    }

    #[test]
    fn identical_points_never_split() {
        let mut tree = RegionTree::new(unit(2), cfg(4)).unwrap();
        for t in 0..6 {
            tree.insert(&[0.3, 0.3], 0.1 * t as f64, t).unwrap();
        }
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.exemplars(0).unwrap().len(), 6);
        assert!(tree.maybe_split(0).is_none());
    }

    #[test]
    fn forced_single_candidate() {
        let ex =
            [Exemplar { point: vec![0.0], error: 0.5, tick: 0 }, Exemplar { point: vec![1.0], error: 0.5, tick: 1 }];
        let d = best_split(&ex, 5).unwrap();
        assert_eq!((d.dim, d.value), (0, 0.5));
    }

    #[test]
    fn candidate_thinning() {
        let mut coords: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let cuts = candidate_cuts(&mut coords, 5);
        assert_eq!(cuts.len(), 5);
        assert!(cuts.windows(2).all(|w| w[0] < w[1]));
        let mut dup = vec![0.2, 0.2, 0.7];
        let cuts = candidate_cuts(&mut dup, 5);
        assert_eq!(cuts.len(), 1);
        assert!((cuts[0] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn leaves_report_bootstrap_then_children() {
        let mut tree = RegionTree::new(unit(2), cfg(4)).unwrap();
        assert_eq!(tree.leaves(), vec![(0, 0.01)]);
        let mut rng = seeded_rng(3, "tree");
        for t in 0..4 {
            tree.insert(&[rng.random(), rng.random()], 0.5, t).unwrap();
        }
        assert_eq!(tree.leaves().len(), 2);
        let dump = tree.dump();
        assert_eq!(dump.exemplars, 4);
        assert_eq!(dump.children.len(), 2);
    }

    #[test]
    fn bad_construction() {
        assert!(RegionTree::new(vec![(1.0, 0.0)], cfg(4)).is_err());
        assert!(RegionTree::new(vec![], cfg(4)).is_err());
        assert!(RegionTree::new(unit(1), cfg(1)).is_err());
    }
}
