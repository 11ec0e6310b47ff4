//! Exact k-nearest-neighbor index.
//!
//! Below [`KD_THRESHOLD`] points queries are a linear scan; past it an
//! incremental k-d tree is built and kept up to date. Exact duplicates share a
//! tree node so long runs of identical outcomes do not degrade the tree into a
//! list. Both paths order results by `(squared distance, insertion index)`
//! and return identical answers.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

pub const KD_THRESHOLD: usize = 1000;

const NIL: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// Squared Euclidean distance.
    pub dist2: f64,
}

impl Eq for Neighbor {}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
struct KdNode {
    /// Insertion indices sharing this exact point; the first one owns the coordinates.
    indices: Vec<usize>,
    axis: usize,
    left: usize,
    right: usize,
}

#[derive(Clone, Debug)]
pub struct NearestIndex {
    dim: usize,
    points: Vec<f64>,
    nodes: Vec<KdNode>,
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl NearestIndex {
    pub fn new(dim: usize) -> Self {
        NearestIndex { dim, points: Vec::new(), nodes: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index * self.dim..(index + 1) * self.dim]
    }

    /// Appends a point; panics if its dimension is wrong.
    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.points.extend_from_slice(p);
        let n = self.len();
        if !self.nodes.is_empty() {
            self.tree_insert(n - 1);
        } else if n >= KD_THRESHOLD {
            for i in 0..n {
                self.tree_insert(i);
            }
        }
    }

    fn tree_insert(&mut self, index: usize) {
        let new_node = |axis| KdNode { indices: alloc::vec![index], axis, left: NIL, right: NIL };
        if self.nodes.is_empty() {
            self.nodes.push(new_node(0));
            return;
        }
        let mut cur = 0;
        loop {
            let owner = self.nodes[cur].indices[0];
            if self.point(owner) == self.point(index) {
                self.nodes[cur].indices.push(index);
                return;
            }
            let axis = self.nodes[cur].axis;
            let go_left = self.point(index)[axis] < self.point(owner)[axis];
            let next = if go_left { self.nodes[cur].left } else { self.nodes[cur].right };
            if next == NIL {
                let id = self.nodes.len();
                self.nodes.push(new_node((axis + 1) % self.dim));
                if go_left {
                    self.nodes[cur].left = id;
                } else {
                    self.nodes[cur].right = id;
                }
                return;
            }
            cur = next;
        }
    }

    /// The `k` nearest points to `q`, closest first, ties by insertion order.
    pub fn knn(&self, q: &[f64], k: usize) -> Vec<Neighbor> {
        assert_eq!(q.len(), self.dim, "query dimension mismatch");
        if k == 0 || self.is_empty() {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        let offer = |heap: &mut BinaryHeap<Neighbor>, n: Neighbor| {
            if heap.len() < k {
                heap.push(n);
            } else if heap.peek().is_some_and(|w| n < *w) {
                heap.pop();
                heap.push(n);
            }
        };
        if self.nodes.is_empty() {
            for i in 0..self.len() {
                offer(&mut heap, Neighbor { index: i, dist2: dist2(q, self.point(i)) });
            }
        } else {
            // (node, lower bound on the squared distance of anything below it)
            let mut stack = alloc::vec![(0usize, 0.0f64)];
            while let Some((cur, bound)) = stack.pop() {
                // Only skip when nothing below could tie or beat the current worst.
                if heap.len() == k && heap.peek().is_some_and(|w| bound > w.dist2) {
                    continue;
                }
                let node = &self.nodes[cur];
                let p = self.point(node.indices[0]);
                let d = dist2(q, p);
                for &index in &node.indices {
                    offer(&mut heap, Neighbor { index, dist2: d });
                }
                let diff = q[node.axis] - p[node.axis];
                let (near, far) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
                if far != NIL {
                    stack.push((far, bound.max(diff * diff)));
                }
                if near != NIL {
                    stack.push((near, bound));
                }
            }
        }
        heap.into_sorted_vec()
    }

    pub fn nearest(&self, q: &[f64]) -> Option<Neighbor> {
        self.knn(q, 1).into_iter().next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;

    fn brute(points: &[Vec<f64>], q: &[f64], k: usize) -> Vec<Neighbor> {
        let mut all: Vec<_> =
            points.iter().enumerate().map(|(index, p)| Neighbor { index, dist2: dist2(q, p) }).collect();
        all.sort();
        all.truncate(k);
        all
    }

    #[test]
    fn matches_linear_scan_across_threshold() {
        let mut rng = seeded_rng(5, "knn");
        let mut idx = NearestIndex::new(3);
        let mut pts = Vec::new();
        for n in 0..2500 {
            // coarse grid coordinates force plenty of exact ties
            let p: Vec<f64> = (0..3).map(|_| (rng.random_range(0..8) as f64) / 8.0).collect();
            idx.push(&p);
            pts.push(p);
            if n % 97 == 0 {
                let q: Vec<f64> = (0..3).map(|_| rng.random()).collect();
                for k in [1, 3, 10] {
                    assert_eq!(idx.knn(&q, k), brute(&pts, &q, k));
                }
            }
        }
    }

    #[test]
    fn duplicates_resolve_to_first_insert() {
        let mut idx = NearestIndex::new(2);
        for _ in 0..1500 {
            idx.push(&[1.5, 1.5]);
        }
        idx.push(&[0.0, 0.0]);
        assert_eq!(idx.nearest(&[1.4, 1.4]).unwrap().index, 0);
        assert_eq!(idx.nearest(&[0.1, 0.0]).unwrap().index, 1500);
        assert_eq!(idx.knn(&[1.5, 1.5], 3).iter().map(|n| n.index).collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}
