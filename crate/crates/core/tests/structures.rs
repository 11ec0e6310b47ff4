//! Region tree and nearest-neighbor index invariants.

use curio_core::models::NearestIndex;
use curio_core::regions::{RegionConfig, RegionDump, RegionTree};
use curio_core::rng::seeded_rng;
use proptest::prelude::*;
use rand::Rng;

fn leaf_dumps(d: &RegionDump, out: &mut Vec<RegionDump>) {
    if d.children.is_empty() {
        out.push(d.clone());
    }
    for c in &d.children {
        leaf_dumps(c, out);
    }
}

fn contains(bounds: &[(f64, f64)], p: &[f64]) -> bool {
    bounds.iter().zip(p).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
}

#[test]
fn leaves_partition_and_conserve_exemplars() {
    let mut rng = seeded_rng(5, "regions");
    let mut tree = RegionTree::new(vec![(-1.0, 1.0); 3], RegionConfig::default()).unwrap();
    let mut points = Vec::new();
    for t in 0..10_000u64 {
        // error depends on position so splits have progress to separate
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let e = (0.5 + 0.4 * p[0] - 1e-4 * t as f64 * p[1].abs()).clamp(0.0, 1.0);
        let leaf = tree.insert(&p, e, t).unwrap();
        assert!(contains(tree.bounds(leaf).unwrap(), &p));
        points.push(p);
    }
    assert_eq!(tree.inserted(), 10_000);
    assert!(tree.leaf_count() > 1);

    let mut leaves = Vec::new();
    leaf_dumps(&tree.dump(), &mut leaves);
    assert_eq!(leaves.len(), tree.leaf_count());
    assert_eq!(leaves.iter().map(|l| l.exemplars).sum::<usize>(), 10_000);

    for p in &points {
        let owners = leaves
            .iter()
            .filter(|l| l.bounds.iter().zip(p).all(|(&(lo, hi), &x)| lo <= x && (x < hi || (hi == 1.0 && x == hi))));
        assert_eq!(owners.count(), 1, "{p:?}");
        assert!(contains(tree.bounds(tree.region_of(p).unwrap()).unwrap(), p));
    }
    for (id, interest) in tree.leaves() {
        assert!(interest >= 0.0 && interest.is_finite());
        let ex = tree.exemplars(id).unwrap();
        assert!(ex.iter().all(|e| contains(tree.bounds(id).unwrap(), &e.point)));
    }
}

#[test]
fn region_dump_serializes() {
    let mut tree = RegionTree::new(vec![(0.0, 1.0)], RegionConfig::default()).unwrap();
    for t in 0..200u64 {
        let x = (t as f64 * 0.618).fract();
        tree.insert(&[x], if x < 0.5 { 0.9 - 0.004 * t as f64 } else { 0.5 }, t).unwrap();
    }
    let dump = tree.dump();
    let back: RegionDump = serde_json::from_str(&serde_json::to_string(&dump).unwrap()).unwrap();
    assert_eq!(back, dump);
}

fn linear_knn(points: &[Vec<f64>], q: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut d: Vec<(usize, f64)> =
        points.iter().enumerate().map(|(i, p)| (i, p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())).collect();
    // stable sort keeps the earliest insertion first among equal distances
    d.sort_by(|a, b| a.1.total_cmp(&b.1));
    d.truncate(k);
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn knn_matches_linear_scan(seed in any::<u64>(), dim in 1usize..5, k in 1usize..8, grid in any::<bool>()) {
        let mut rng = seeded_rng(seed, "knn");
        // a coarse grid forces many exact ties
        let coord = |rng: &mut curio_core::RngStream| {
            let x: f64 = rng.random_range(-1.0..1.0);
            if grid { (x * 4.0).round() / 4.0 } else { x }
        };
        let points: Vec<Vec<f64>> = (0..1500).map(|_| (0..dim).map(|_| coord(&mut rng)).collect()).collect();
        let mut idx = NearestIndex::new(dim);
        for p in &points {
            idx.push(p);
        }
        for _ in 0..50 {
            let q: Vec<f64> = (0..dim).map(|_| coord(&mut rng)).collect();
            let got: Vec<(usize, f64)> = idx.knn(&q, k).into_iter().map(|n| (n.index, n.dist2)).collect();
            prop_assert_eq!(got, linear_knn(&points, &q, k));
        }
    }
}
